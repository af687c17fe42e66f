// Copyright 2026 The Concet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "concet/tape.hpp"

#include <cmath>
#include <memory>
#include <utility>

#include "concet/error.hpp"
#include "concet/kernels.hpp"
#include "concet/rng.hpp"

namespace concet {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

int Tape::push(Tensor val) {
  Node n;
  n.val = std::move(val);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

Tensor& Tape::grad_of(int id) {
  Node& n = nodes_[static_cast<size_t>(id)];
  if (n.grad.empty()) {
    const Tensor& v = value_of(id);
    n.grad = v.rank() == 1 ? Tensor(v.rows()) : Tensor(v.rows(), v.cols());
  }
  return n.grad;
}

const Tensor& Tape::val(Var v) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size()))
    throw UsageError("tape: val of unknown var");
  return value_of(v.id);
}

Var Tape::constant(Tensor v) { return Var{push(std::move(v))}; }

Var Tape::leaf(const Tensor& value, Tensor* grad_sink) {
  if (grad_sink != nullptr && !grad_sink->same_shape(value))
    throw ShapeError("tape: leaf gradient sink shape mismatch");
  Node n;
  n.ext = &value;
  n.sink = grad_sink;
  nodes_.push_back(std::move(n));
  int id = static_cast<int>(nodes_.size()) - 1;
  if (grad_sink != nullptr) {
    nodes_[static_cast<size_t>(id)].back = [this, id]() {
      Node& self = nodes_[static_cast<size_t>(id)];
      if (!self.grad.empty()) *self.sink += self.grad;
    };
  }
  return Var{id};
}

Var Tape::gather_rows(Var table, const std::vector<int>& ids, int zero_id) {
  const Tensor& t = val(table);
  if (t.rank() != 2) throw ShapeError("gather_rows: table must be rank 2");
  size_t d = t.cols();
  Tensor out(ids.size(), d);
  for (size_t i = 0; i < ids.size(); ++i) {
    int id = ids[i];
    if (id == zero_id) continue;
    if (id < 0 || id >= static_cast<int>(t.rows()))
      throw ShapeError("gather_rows: row id out of range");
    for (size_t c = 0; c < d; ++c) out.at(i, c) = t.at(static_cast<size_t>(id), c);
  }
  int oid = push(std::move(out));
  int tid = table.id;
  std::vector<int> idv = ids;
  nodes_[static_cast<size_t>(oid)].back = [this, oid, tid, idv, zero_id, d]() {
    const Tensor& g = nodes_[static_cast<size_t>(oid)].grad;
    Node& tnode = nodes_[static_cast<size_t>(tid)];
    // Scatter straight into a leaf's sink so big tables never allocate a
    // dense per-example gradient.
    Tensor& dst = tnode.sink != nullptr ? *tnode.sink : grad_of(tid);
    for (size_t i = 0; i < idv.size(); ++i) {
      int id = idv[i];
      if (id == zero_id) continue;
      for (size_t c = 0; c < d; ++c)
        dst.at(static_cast<size_t>(id), c) += g.at(i, c);
    }
  };
  return Var{oid};
}

Var Tape::reshape(Var x, size_t rows, size_t cols) {
  const Tensor& v = val(x);
  if (rows * cols != v.size()) throw ShapeError("reshape: size mismatch");
  Tensor out(rows, cols);
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  int oid = push(std::move(out));
  int xid = x.id;
  nodes_[static_cast<size_t>(oid)].back = [this, oid, xid]() {
    const Tensor& g = nodes_[static_cast<size_t>(oid)].grad;
    Tensor& dx = grad_of(xid);
    for (size_t i = 0; i < g.size(); ++i) dx[i] += g[i];
  };
  return Var{oid};
}

Var Tape::conv1d(Var x, Var w, Var b, int width) {
  const Tensor& xv = val(x);
  const Tensor& wv = val(w);
  const Tensor& bv = val(b);
  if (xv.rank() != 2 || wv.rank() != 2 || bv.rank() != 1)
    throw ShapeError("conv1d: bad ranks");
  size_t n = xv.rows(), cin = xv.cols(), cout = wv.cols();
  if (wv.rows() != static_cast<size_t>(width) * cin || bv.rows() != cout)
    throw ShapeError("conv1d: weight shape mismatch");
  int left = (width - 1) / 2;
  Tensor out(n, cout);
  for (size_t t = 0; t < n; ++t) {
    double* orow = out.data() + t * cout;
    for (size_t c = 0; c < cout; ++c) orow[c] = bv[c];
    for (int dt = 0; dt < width; ++dt) {
      long src = static_cast<long>(t) + dt - left;
      if (src < 0 || src >= static_cast<long>(n)) continue;
      matmul_acc_serial(xv.data() + static_cast<size_t>(src) * cin,
                        wv.data() + static_cast<size_t>(dt) * cin * cout, orow,
                        1, cin, cout);
    }
  }
  int oid = push(std::move(out));
  int xid = x.id, wid = w.id, bid = b.id;
  nodes_[static_cast<size_t>(oid)].back = [this, oid, xid, wid, bid, width, n,
                                           cin, cout, left]() {
    const Tensor& g = nodes_[static_cast<size_t>(oid)].grad;
    const Tensor& xv2 = value_of(xid);
    const Tensor& wv2 = value_of(wid);
    Tensor& dx = grad_of(xid);
    Tensor& dw = grad_of(wid);
    Tensor& db = grad_of(bid);
    for (size_t t = 0; t < n; ++t) {
      const double* grow = g.data() + t * cout;
      for (size_t c = 0; c < cout; ++c) db[c] += grow[c];
      for (int dt = 0; dt < width; ++dt) {
        long src = static_cast<long>(t) + dt - left;
        if (src < 0 || src >= static_cast<long>(n)) continue;
        const double* xrow = xv2.data() + static_cast<size_t>(src) * cin;
        const double* wblk = wv2.data() + static_cast<size_t>(dt) * cin * cout;
        matmul_acc_serial(xrow, grow,
                          dw.data() + static_cast<size_t>(dt) * cin * cout,
                          cin, 1, cout);
        double* dxrow = dx.data() + static_cast<size_t>(src) * cin;
        for (size_t ci = 0; ci < cin; ++ci) {
          double s = 0.0;
          for (size_t c = 0; c < cout; ++c) s += wblk[ci * cout + c] * grow[c];
          dxrow[ci] += s;
        }
      }
    }
  };
  return Var{oid};
}

Var Tape::relu(Var x) {
  const Tensor& v = val(x);
  Tensor out = v;
  for (size_t i = 0; i < out.size(); ++i)
    if (out[i] < 0.0) out[i] = 0.0;
  int oid = push(std::move(out));
  int xid = x.id;
  nodes_[static_cast<size_t>(oid)].back = [this, oid, xid]() {
    const Tensor& g = nodes_[static_cast<size_t>(oid)].grad;
    const Tensor& v2 = value_of(xid);
    Tensor& dx = grad_of(xid);
    for (size_t i = 0; i < g.size(); ++i)
      if (v2[i] > 0.0) dx[i] += g[i];
  };
  return Var{oid};
}

Var Tape::tanh_op(Var x) {
  const Tensor& v = val(x);
  Tensor out = v;
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
  int oid = push(std::move(out));
  int xid = x.id;
  nodes_[static_cast<size_t>(oid)].back = [this, oid, xid]() {
    Node& self = nodes_[static_cast<size_t>(oid)];
    const Tensor& g = self.grad;
    const Tensor& y = self.val;
    Tensor& dx = grad_of(xid);
    for (size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * (1.0 - y[i] * y[i]);
  };
  return Var{oid};
}

Var Tape::max_over_time(Var x) {
  const Tensor& v = val(x);
  if (v.rank() != 2 || v.rows() == 0)
    throw ShapeError("max_over_time: need non-empty rank-2 input");
  size_t n = v.rows(), c = v.cols();
  Tensor out(c);
  std::vector<size_t> arg(c, 0);
  for (size_t j = 0; j < c; ++j) {
    double best = v.at(0, j);
    for (size_t t = 1; t < n; ++t) {
      if (v.at(t, j) > best) {
        best = v.at(t, j);
        arg[j] = t;
      }
    }
    out[j] = best;
  }
  int oid = push(std::move(out));
  int xid = x.id;
  nodes_[static_cast<size_t>(oid)].back = [this, oid, xid, arg, c]() {
    const Tensor& g = nodes_[static_cast<size_t>(oid)].grad;
    Tensor& dx = grad_of(xid);
    for (size_t j = 0; j < c; ++j) dx.at(arg[j], j) += g[j];
  };
  return Var{oid};
}

Var Tape::lstm(Var x, Var wx, Var wh, Var b, bool reverse) {
  const Tensor& xv = val(x);
  const Tensor& wxv = val(wx);
  const Tensor& whv = val(wh);
  const Tensor& bv = val(b);
  size_t n = xv.rows(), d = xv.cols(), h = whv.rows();
  if (wxv.rows() != d || wxv.cols() != 4 * h || whv.cols() != 4 * h ||
      bv.rows() != 4 * h)
    throw ShapeError("lstm: weight shape mismatch");
  if (n == 0) throw ShapeError("lstm: empty sequence");

  struct Cache {
    Tensor gi, gf, gg, go, c, tc;
  };
  auto cache = std::make_shared<Cache>();
  cache->gi = Tensor(n, h);
  cache->gf = Tensor(n, h);
  cache->gg = Tensor(n, h);
  cache->go = Tensor(n, h);
  cache->c = Tensor(n, h);
  cache->tc = Tensor(n, h);
  Tensor out(n, h);
  std::vector<double> z(4 * h);
  for (size_t s = 0; s < n; ++s) {
    size_t t = reverse ? n - 1 - s : s;
    size_t tp = reverse ? t + 1 : t - 1;  // previous step's row, if s > 0
    matmul_serial(xv.data() + t * d, wxv.data(), z.data(), 1, d, 4 * h);
    if (s > 0)
      matmul_acc_serial(out.data() + tp * h, whv.data(), z.data(), 1, h,
                        4 * h);
    for (size_t j = 0; j < 4 * h; ++j) z[j] += bv[j];
    for (size_t j = 0; j < h; ++j) {
      double gi = sigmoid(z[j]);
      double gf = sigmoid(z[h + j]);
      double gg = std::tanh(z[2 * h + j]);
      double go = sigmoid(z[3 * h + j]);
      double cp = s > 0 ? cache->c.at(tp, j) : 0.0;
      double ct = gf * cp + gi * gg;
      double tc = std::tanh(ct);
      cache->gi.at(t, j) = gi;
      cache->gf.at(t, j) = gf;
      cache->gg.at(t, j) = gg;
      cache->go.at(t, j) = go;
      cache->c.at(t, j) = ct;
      cache->tc.at(t, j) = tc;
      out.at(t, j) = go * tc;
    }
  }
  int oid = push(std::move(out));
  int xid = x.id, wxid = wx.id, whid = wh.id, bid = b.id;
  nodes_[static_cast<size_t>(oid)].back = [this, oid, xid, wxid, whid, bid,
                                           reverse, n, d, h, cache]() {
    const Tensor& g = nodes_[static_cast<size_t>(oid)].grad;
    const Tensor& xv2 = value_of(xid);
    const Tensor& wxv2 = value_of(wxid);
    const Tensor& whv2 = value_of(whid);
    const Tensor& hv = nodes_[static_cast<size_t>(oid)].val;
    Tensor& dx = grad_of(xid);
    Tensor& dwx = grad_of(wxid);
    Tensor& dwh = grad_of(whid);
    Tensor& db = grad_of(bid);
    std::vector<double> dh(h, 0.0), dc(h, 0.0), dz(4 * h);
    for (size_t s = n; s-- > 0;) {
      size_t t = reverse ? n - 1 - s : s;
      size_t tp = reverse ? t + 1 : t - 1;
      for (size_t j = 0; j < h; ++j) {
        double dht = g.at(t, j) + dh[j];
        double gi = cache->gi.at(t, j), gf = cache->gf.at(t, j);
        double gg = cache->gg.at(t, j), go = cache->go.at(t, j);
        double tc = cache->tc.at(t, j);
        double dgo = dht * tc;
        double dct = dc[j] + dht * go * (1.0 - tc * tc);
        double cp = s > 0 ? cache->c.at(tp, j) : 0.0;
        double dgi = dct * gg;
        double dgg = dct * gi;
        double dgf = dct * cp;
        dc[j] = dct * gf;
        dz[j] = dgi * gi * (1.0 - gi);
        dz[h + j] = dgf * gf * (1.0 - gf);
        dz[2 * h + j] = dgg * (1.0 - gg * gg);
        dz[3 * h + j] = dgo * go * (1.0 - go);
      }
      for (size_t j = 0; j < 4 * h; ++j) db[j] += dz[j];
      matmul_acc_serial(xv2.data() + t * d, dz.data(), dwx.data(), d, 1,
                        4 * h);
      if (s > 0)
        matmul_acc_serial(hv.data() + tp * h, dz.data(), dwh.data(), h, 1,
                          4 * h);
      double* dxrow = dx.data() + t * d;
      for (size_t dd = 0; dd < d; ++dd) {
        double sum = 0.0;
        const double* wrow = wxv2.data() + dd * 4 * h;
        for (size_t j = 0; j < 4 * h; ++j) sum += wrow[j] * dz[j];
        dxrow[dd] += sum;
      }
      for (size_t hh = 0; hh < h; ++hh) {
        double sum = 0.0;
        const double* wrow = whv2.data() + hh * 4 * h;
        for (size_t j = 0; j < 4 * h; ++j) sum += wrow[j] * dz[j];
        dh[hh] = s > 0 ? sum : 0.0;
      }
    }
  };
  return Var{oid};
}

Var Tape::concat_cols(Var a, Var b) {
  const Tensor& av = val(a);
  const Tensor& bv = val(b);
  if (av.rank() != 2 || bv.rank() != 2 || av.rows() != bv.rows())
    throw ShapeError("concat_cols: row mismatch");
  size_t n = av.rows(), da = av.cols(), db = bv.cols();
  Tensor out(n, da + db);
  for (size_t t = 0; t < n; ++t) {
    for (size_t j = 0; j < da; ++j) out.at(t, j) = av.at(t, j);
    for (size_t j = 0; j < db; ++j) out.at(t, da + j) = bv.at(t, j);
  }
  int oid = push(std::move(out));
  int aid = a.id, bid = b.id;
  nodes_[static_cast<size_t>(oid)].back = [this, oid, aid, bid, n, da, db]() {
    const Tensor& g = nodes_[static_cast<size_t>(oid)].grad;
    Tensor& dav = grad_of(aid);
    Tensor& dbv = grad_of(bid);
    for (size_t t = 0; t < n; ++t) {
      for (size_t j = 0; j < da; ++j) dav.at(t, j) += g.at(t, j);
      for (size_t j = 0; j < db; ++j) dbv.at(t, j) += g.at(t, da + j);
    }
  };
  return Var{oid};
}

Var Tape::matmul_op(Var a, Var b) {
  const Tensor& av = val(a);
  const Tensor& bv = val(b);
  if (av.rank() != 2 || bv.rank() != 2 || av.cols() != bv.rows())
    throw ShapeError("matmul: inner dimension mismatch");
  size_t n = av.rows(), k = av.cols(), m = bv.cols();
  Tensor out(n, m);
  matmul_serial(av.data(), bv.data(), out.data(), n, k, m);
  int oid = push(std::move(out));
  int aid = a.id, bid = b.id;
  nodes_[static_cast<size_t>(oid)].back = [this, oid, aid, bid, n, k, m]() {
    const Tensor& g = nodes_[static_cast<size_t>(oid)].grad;
    const Tensor& av2 = value_of(aid);
    const Tensor& bv2 = value_of(bid);
    Tensor da(n, k), db(k, m);
    matmul_bt_serial(g.data(), bv2.data(), da.data(), n, m, k);
    matmul_at_serial(av2.data(), g.data(), db.data(), k, n, m);
    grad_of(aid) += da;
    grad_of(bid) += db;
  };
  return Var{oid};
}

Var Tape::add_row(Var x, Var b) {
  const Tensor& xv = val(x);
  const Tensor& bv = val(b);
  if (xv.rank() != 2 || bv.rank() != 1 || xv.cols() != bv.rows())
    throw ShapeError("add_row: shape mismatch");
  size_t n = xv.rows(), d = xv.cols();
  Tensor out = xv;
  for (size_t t = 0; t < n; ++t)
    for (size_t j = 0; j < d; ++j) out.at(t, j) += bv[j];
  int oid = push(std::move(out));
  int xid = x.id, bid = b.id;
  nodes_[static_cast<size_t>(oid)].back = [this, oid, xid, bid, n, d]() {
    const Tensor& g = nodes_[static_cast<size_t>(oid)].grad;
    Tensor& dx = grad_of(xid);
    Tensor& db = grad_of(bid);
    for (size_t t = 0; t < n; ++t)
      for (size_t j = 0; j < d; ++j) {
        dx.at(t, j) += g.at(t, j);
        db[j] += g.at(t, j);
      }
  };
  return Var{oid};
}

Var Tape::matvec_op(Var x, Var v) {
  const Tensor& xv = val(x);
  const Tensor& vv = val(v);
  if (xv.rank() != 2 || vv.rank() != 1 || xv.cols() != vv.rows())
    throw ShapeError("matvec: shape mismatch");
  size_t n = xv.rows(), d = xv.cols();
  Tensor out(n);
  matvec_serial(xv.data(), vv.data(), out.data(), n, d);
  int oid = push(std::move(out));
  int xid = x.id, vid = v.id;
  nodes_[static_cast<size_t>(oid)].back = [this, oid, xid, vid, n, d]() {
    const Tensor& g = nodes_[static_cast<size_t>(oid)].grad;
    const Tensor& xv2 = value_of(xid);
    const Tensor& vv2 = value_of(vid);
    Tensor& dx = grad_of(xid);
    Tensor& dv = grad_of(vid);
    for (size_t t = 0; t < n; ++t) {
      for (size_t j = 0; j < d; ++j) {
        dx.at(t, j) += g[t] * vv2[j];
        dv[j] += g[t] * xv2.at(t, j);
      }
    }
  };
  return Var{oid};
}

Var Tape::softmax_op(Var x) {
  const Tensor& v = val(x);
  if (v.rank() != 1 || v.rows() == 0)
    throw ShapeError("softmax: need non-empty vector");
  size_t n = v.rows();
  double mx = v[0];
  for (size_t i = 1; i < n; ++i) mx = std::max(mx, v[i]);
  Tensor out(n);
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    out[i] = std::exp(v[i] - mx);
    sum += out[i];
  }
  for (size_t i = 0; i < n; ++i) out[i] /= sum;
  int oid = push(std::move(out));
  int xid = x.id;
  nodes_[static_cast<size_t>(oid)].back = [this, oid, xid, n]() {
    Node& self = nodes_[static_cast<size_t>(oid)];
    const Tensor& g = self.grad;
    const Tensor& p = self.val;
    Tensor& dx = grad_of(xid);
    double dot = 0.0;
    for (size_t i = 0; i < n; ++i) dot += g[i] * p[i];
    for (size_t i = 0; i < n; ++i) dx[i] += p[i] * (g[i] - dot);
  };
  return Var{oid};
}

Var Tape::weighted_sum_rows(Var h, Var w) {
  const Tensor& hv = val(h);
  const Tensor& wv = val(w);
  if (hv.rank() != 2 || wv.rank() != 1 || hv.rows() != wv.rows())
    throw ShapeError("weighted_sum_rows: shape mismatch");
  size_t n = hv.rows(), d = hv.cols();
  Tensor out(d);
  for (size_t t = 0; t < n; ++t)
    for (size_t j = 0; j < d; ++j) out[j] += wv[t] * hv.at(t, j);
  int oid = push(std::move(out));
  int hid = h.id, wid = w.id;
  nodes_[static_cast<size_t>(oid)].back = [this, oid, hid, wid, n, d]() {
    const Tensor& g = nodes_[static_cast<size_t>(oid)].grad;
    const Tensor& hv2 = value_of(hid);
    const Tensor& wv2 = value_of(wid);
    Tensor& dh = grad_of(hid);
    Tensor& dw = grad_of(wid);
    for (size_t t = 0; t < n; ++t) {
      for (size_t j = 0; j < d; ++j) {
        dh.at(t, j) += g[j] * wv2[t];
        dw[t] += g[j] * hv2.at(t, j);
      }
    }
  };
  return Var{oid};
}

Var Tape::affine(Var x, Var w, Var b) {
  const Tensor& xv = val(x);
  const Tensor& wv = val(w);
  const Tensor& bv = val(b);
  if (xv.rank() != 1 || wv.rank() != 2 || bv.rank() != 1 ||
      wv.rows() != xv.rows() || wv.cols() != bv.rows())
    throw ShapeError("affine: shape mismatch");
  size_t d = xv.rows(), m = wv.cols();
  Tensor out(m);
  matmul_serial(xv.data(), wv.data(), out.data(), 1, d, m);
  for (size_t j = 0; j < m; ++j) out[j] += bv[j];
  int oid = push(std::move(out));
  int xid = x.id, wid = w.id, bid = b.id;
  nodes_[static_cast<size_t>(oid)].back = [this, oid, xid, wid, bid, d, m]() {
    const Tensor& g = nodes_[static_cast<size_t>(oid)].grad;
    const Tensor& xv2 = value_of(xid);
    const Tensor& wv2 = value_of(wid);
    Tensor& dx = grad_of(xid);
    Tensor& dw = grad_of(wid);
    Tensor& db = grad_of(bid);
    for (size_t i = 0; i < d; ++i) {
      double s = 0.0;
      const double* wrow = wv2.data() + i * m;
      for (size_t j = 0; j < m; ++j) s += wrow[j] * g[j];
      dx[i] += s;
    }
    matmul_acc_serial(xv2.data(), g.data(), dw.data(), d, 1, m);
    for (size_t j = 0; j < m; ++j) db[j] += g[j];
  };
  return Var{oid};
}

Var Tape::concat(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat: no parts");
  size_t total = 0;
  for (Var p : parts) {
    const Tensor& v = val(p);
    if (v.rank() != 1) throw ShapeError("concat: parts must be vectors");
    total += v.rows();
  }
  Tensor out(total);
  size_t off = 0;
  for (Var p : parts) {
    const Tensor& v = val(p);
    for (size_t i = 0; i < v.rows(); ++i) out[off + i] = v[i];
    off += v.rows();
  }
  int oid = push(std::move(out));
  std::vector<int> ids;
  ids.reserve(parts.size());
  for (Var p : parts) ids.push_back(p.id);
  nodes_[static_cast<size_t>(oid)].back = [this, oid, ids]() {
    const Tensor& g = nodes_[static_cast<size_t>(oid)].grad;
    size_t off2 = 0;
    for (int pid : ids) {
      Tensor& dp = grad_of(pid);
      for (size_t i = 0; i < dp.rows(); ++i) dp[i] += g[off2 + i];
      off2 += dp.rows();
    }
  };
  return Var{oid};
}

Var Tape::dropout(Var x, double rate, uint64_t seed) {
  if (rate <= 0.0) return x;
  if (rate >= 1.0) throw UsageError("dropout: rate must be below 1");
  const Tensor& v = val(x);
  double keep = 1.0 - rate;
  Rng rng(seed);
  auto mask = std::make_shared<std::vector<double>>(v.size());
  Tensor out = v;
  for (size_t i = 0; i < v.size(); ++i) {
    double m = rng.uniform() < keep ? 1.0 / keep : 0.0;
    (*mask)[i] = m;
    out[i] *= m;
  }
  int oid = push(std::move(out));
  int xid = x.id;
  nodes_[static_cast<size_t>(oid)].back = [this, oid, xid, mask]() {
    const Tensor& g = nodes_[static_cast<size_t>(oid)].grad;
    Tensor& dx = grad_of(xid);
    for (size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * (*mask)[i];
  };
  return Var{oid};
}

Var Tape::cosine(Var a, Var b) {
  const Tensor& av = val(a);
  const Tensor& bv = val(b);
  if (av.rank() != 1 || bv.rank() != 1 || av.rows() != bv.rows())
    throw ShapeError("cosine: shape mismatch");
  size_t d = av.rows();
  double dot = 0.0, na2 = 0.0, nb2 = 0.0;
  for (size_t i = 0; i < d; ++i) {
    dot += av[i] * bv[i];
    na2 += av[i] * av[i];
    nb2 += bv[i] * bv[i];
  }
  double na = std::sqrt(na2), nb = std::sqrt(nb2);
  constexpr double kEps = 1e-30;
  Tensor out(1);
  if (na < kEps || nb < kEps) {
    out[0] = 0.0;
    return Var{push(std::move(out))};  // degenerate: value 0, no gradient
  }
  double cosv = dot / (na * nb);
  out[0] = cosv;
  int oid = push(std::move(out));
  int aid = a.id, bid = b.id;
  nodes_[static_cast<size_t>(oid)].back = [this, oid, aid, bid, d, na, nb,
                                           cosv]() {
    double gl = nodes_[static_cast<size_t>(oid)].grad[0];
    const Tensor& av2 = value_of(aid);
    const Tensor& bv2 = value_of(bid);
    Tensor& da = grad_of(aid);
    Tensor& db = grad_of(bid);
    for (size_t i = 0; i < d; ++i) {
      da[i] += gl * (bv2[i] / (na * nb) - cosv * av2[i] / (na * na));
      db[i] += gl * (av2[i] / (na * nb) - cosv * bv2[i] / (nb * nb));
    }
  };
  return Var{oid};
}

Var Tape::cross_entropy(Var logits, int label) {
  const Tensor& v = val(logits);
  if (v.rank() != 1 || v.rows() == 0)
    throw ShapeError("cross_entropy: need non-empty logit vector");
  if (label < 0 || label >= static_cast<int>(v.rows()))
    throw DataError("cross_entropy: label out of range");
  size_t n = v.rows();
  double mx = v[0];
  for (size_t i = 1; i < n; ++i) mx = std::max(mx, v[i]);
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) sum += std::exp(v[i] - mx);
  double lse = mx + std::log(sum);
  Tensor out(1);
  out[0] = lse - v[static_cast<size_t>(label)];
  auto probs = std::make_shared<std::vector<double>>(n);
  for (size_t i = 0; i < n; ++i) (*probs)[i] = std::exp(v[i] - mx) / sum;
  int oid = push(std::move(out));
  int xid = logits.id;
  nodes_[static_cast<size_t>(oid)].back = [this, oid, xid, label, probs, n]() {
    double gl = nodes_[static_cast<size_t>(oid)].grad[0];
    Tensor& dx = grad_of(xid);
    for (size_t i = 0; i < n; ++i) {
      double onehot = static_cast<int>(i) == label ? 1.0 : 0.0;
      dx[i] += gl * ((*probs)[i] - onehot);
    }
  };
  return Var{oid};
}

void Tape::backward(Var loss) {
  if (ran_backward_) throw UsageError("tape: backward already ran");
  ran_backward_ = true;
  const Tensor& lv = val(loss);
  if (lv.size() != 1) throw ShapeError("backward: loss must be a scalar");
  grad_of(loss.id)[0] = 1.0;
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.back && !n.grad.empty()) n.back();
  }
}

}  // namespace concet
