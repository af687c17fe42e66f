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

#include "concet/topics.hpp"

#include <algorithm>
#include <cmath>

#include "concet/io.hpp"
#include "concet/kernels.hpp"
#include "concet/rng.hpp"

namespace concet {

namespace {

constexpr int kInferSweeps = 50;
constexpr uint64_t kSvdSeed = 0x5eedbeefcafe01ULL;

std::vector<int> term_ids(const std::map<std::string, int>& vocab,
                          const std::vector<std::string>& tokens) {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto it = vocab.find(t);
    if (it != vocab.end()) ids.push_back(it->second);
  }
  return ids;
}

// Modified Gram-Schmidt on the columns of x [rows, n].
void orthonormalize(Tensor& x) {
  const size_t rows = x.rows(), n = x.cols();
  for (size_t j = 0; j < n; ++j) {
    for (size_t p = 0; p < j; ++p) {
      double dot = 0.0;
      for (size_t r = 0; r < rows; ++r) dot += x.at(r, p) * x.at(r, j);
      for (size_t r = 0; r < rows; ++r) x.at(r, j) -= dot * x.at(r, p);
    }
    double norm = 0.0;
    for (size_t r = 0; r < rows; ++r) norm += x.at(r, j) * x.at(r, j);
    norm = std::sqrt(norm);
    if (norm < 1e-300) {
      // Degenerate column: re-seed with a unit vector not in the span.
      x.at(j % rows, j) = 1.0;
      for (size_t p = 0; p < j; ++p) {
        double dot = 0.0;
        for (size_t r = 0; r < rows; ++r) dot += x.at(r, p) * x.at(r, j);
        for (size_t r = 0; r < rows; ++r) x.at(r, j) -= dot * x.at(r, p);
      }
      norm = 0.0;
      for (size_t r = 0; r < rows; ++r) norm += x.at(r, j) * x.at(r, j);
      norm = std::sqrt(norm);
      if (norm < 1e-300) norm = 1.0;
    }
    for (size_t r = 0; r < rows; ++r) x.at(r, j) /= norm;
  }
}

// Cyclic Jacobi eigensolve of a symmetric matrix; returns eigenvalues and
// fills `vecs` with eigenvectors in columns, both sorted descending.
void jacobi_eigh(Tensor a, std::vector<double>& values, Tensor& vecs) {
  const size_t n = a.rows();
  vecs = Tensor(n, n);
  for (size_t i = 0; i < n; ++i) vecs.at(i, i) = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (size_t p = 0; p < n; ++p)
      for (size_t q = p + 1; q < n; ++q) off += a.at(p, q) * a.at(p, q);
    if (off < 1e-24) break;

    for (size_t p = 0; p < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (size_t i = 0; i < n; ++i) {
          const double aip = a.at(i, p), aiq = a.at(i, q);
          a.at(i, p) = c * aip - s * aiq;
          a.at(i, q) = s * aip + c * aiq;
        }
        for (size_t i = 0; i < n; ++i) {
          const double api = a.at(p, i), aqi = a.at(q, i);
          a.at(p, i) = c * api - s * aqi;
          a.at(q, i) = s * api + c * aqi;
        }
        for (size_t i = 0; i < n; ++i) {
          const double vip = vecs.at(i, p), viq = vecs.at(i, q);
          vecs.at(i, p) = c * vip - s * viq;
          vecs.at(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  values.resize(n);
  for (size_t i = 0; i < n; ++i) values[i] = a.at(i, i);
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t x, size_t y) { return values[x] > values[y]; });
  std::vector<double> sorted(n);
  Tensor svecs(n, n);
  for (size_t j = 0; j < n; ++j) {
    sorted[j] = values[order[j]];
    for (size_t i = 0; i < n; ++i) svecs.at(i, j) = vecs.at(i, order[j]);
  }
  values = std::move(sorted);
  vecs = std::move(svecs);
}

// Top-n eigenpairs of a symmetric PSD matrix g via subspace iteration.
void top_eigs(const Tensor& g, int n, int iters, std::vector<double>& values,
              Tensor& vectors) {
  const size_t dim = g.rows();
  Tensor x(dim, static_cast<size_t>(n));
  Rng rng(kSvdSeed);
  for (size_t i = 0; i < x.size(); ++i) x[i] = rng.gaussian();
  orthonormalize(x);

  Tensor y(dim, static_cast<size_t>(n));
  for (int it = 0; it < iters; ++it) {
    matmul_serial(g.data(), x.data(), y.data(), dim, dim,
                  static_cast<size_t>(n));
    std::swap(x, y);
    orthonormalize(x);
  }

  // Rayleigh-Ritz on the converged subspace.
  matmul_serial(g.data(), x.data(), y.data(), dim, dim, static_cast<size_t>(n));
  Tensor small(static_cast<size_t>(n), static_cast<size_t>(n));
  matmul_at_serial(x.data(), y.data(), small.data(), static_cast<size_t>(n),
                   dim, static_cast<size_t>(n));
  Tensor w;
  jacobi_eigh(small, values, w);
  vectors = Tensor(dim, static_cast<size_t>(n));
  matmul_serial(x.data(), w.data(), vectors.data(), dim,
                static_cast<size_t>(n), static_cast<size_t>(n));
}

}  // namespace

LdaModel lda_fit(const std::vector<std::vector<std::string>>& corpus, int n,
                 int iters, uint64_t seed, double alpha, double beta) {
  if (n < 2) throw DataError("LDA needs at least 2 topics");
  if (corpus.empty()) throw DataError("LDA corpus is empty");
  if (iters < 1) throw DataError("LDA needs at least one sweep");

  LdaModel model;
  model.n_topics_ = n;
  model.alpha_ = alpha > 0.0 ? alpha : 50.0 / n;
  model.beta_ = beta > 0.0 ? beta : 0.01;
  model.seed_ = seed;

  for (const auto& doc : corpus)
    for (const auto& tok : doc)
      model.vocab_.emplace(tok, 0);
  if (model.vocab_.empty()) throw DataError("LDA vocabulary is empty");
  int next = 0;
  for (auto& [term, id] : model.vocab_) id = next++;

  const size_t v = model.vocab_.size();
  const size_t k = static_cast<size_t>(n);
  const size_t d = corpus.size();

  std::vector<std::vector<int>> docs(d);
  for (size_t i = 0; i < d; ++i) docs[i] = term_ids(model.vocab_, corpus[i]);

  model.topic_word_ = Tensor(v, k);
  model.topic_totals_.assign(k, 0.0);
  Tensor doc_topic(d, k);
  std::vector<std::vector<int>> assign(d);

  Rng rng(seed);
  for (size_t i = 0; i < d; ++i) {
    assign[i].resize(docs[i].size());
    for (size_t j = 0; j < docs[i].size(); ++j) {
      int topic = static_cast<int>(rng.uniform_int(k));
      assign[i][j] = topic;
      model.topic_word_.at(static_cast<size_t>(docs[i][j]),
                           static_cast<size_t>(topic)) += 1.0;
      model.topic_totals_[static_cast<size_t>(topic)] += 1.0;
      doc_topic.at(i, static_cast<size_t>(topic)) += 1.0;
    }
  }

  const double vb = static_cast<double>(v) * model.beta_;
  std::vector<double> weights(k);
  for (int sweep = 0; sweep < iters; ++sweep) {
    for (size_t i = 0; i < d; ++i) {
      for (size_t j = 0; j < docs[i].size(); ++j) {
        const size_t term = static_cast<size_t>(docs[i][j]);
        const size_t old_t = static_cast<size_t>(assign[i][j]);
        model.topic_word_.at(term, old_t) -= 1.0;
        model.topic_totals_[old_t] -= 1.0;
        doc_topic.at(i, old_t) -= 1.0;

        double total = 0.0;
        for (size_t t = 0; t < k; ++t) {
          weights[t] = (doc_topic.at(i, t) + model.alpha_) *
                       (model.topic_word_.at(term, t) + model.beta_) /
                       (model.topic_totals_[t] + vb);
          total += weights[t];
        }
        double r = rng.uniform() * total;
        size_t new_t = k - 1;
        for (size_t t = 0; t < k; ++t) {
          r -= weights[t];
          if (r <= 0.0) {
            new_t = t;
            break;
          }
        }
        assign[i][j] = static_cast<int>(new_t);
        model.topic_word_.at(term, new_t) += 1.0;
        model.topic_totals_[new_t] += 1.0;
        doc_topic.at(i, new_t) += 1.0;
      }
    }
  }
  return model;
}

std::vector<double> LdaModel::infer(const std::vector<std::string>& tokens) const {
  const size_t k = static_cast<size_t>(n_topics_);
  std::vector<int> ids = term_ids(vocab_, tokens);
  if (ids.empty())
    return std::vector<double>(k, 1.0 / static_cast<double>(k));

  const double vb = static_cast<double>(vocab_.size()) * beta_;
  std::vector<double> doc_topic(k, 0.0);
  std::vector<int> assign(ids.size());

  Rng rng(seed_ ^ 0xd0c1d0c1d0c1ULL);
  for (size_t j = 0; j < ids.size(); ++j) {
    int t = static_cast<int>(rng.uniform_int(k));
    assign[j] = t;
    doc_topic[static_cast<size_t>(t)] += 1.0;
  }

  std::vector<double> weights(k);
  for (int sweep = 0; sweep < kInferSweeps; ++sweep) {
    for (size_t j = 0; j < ids.size(); ++j) {
      const size_t term = static_cast<size_t>(ids[j]);
      const size_t old_t = static_cast<size_t>(assign[j]);
      doc_topic[old_t] -= 1.0;
      double total = 0.0;
      for (size_t t = 0; t < k; ++t) {
        weights[t] = (doc_topic[t] + alpha_) *
                     (topic_word_.at(term, t) + beta_) /
                     (topic_totals_[t] + vb);
        total += weights[t];
      }
      double r = rng.uniform() * total;
      size_t new_t = k - 1;
      for (size_t t = 0; t < k; ++t) {
        r -= weights[t];
        if (r <= 0.0) {
          new_t = t;
          break;
        }
      }
      assign[j] = static_cast<int>(new_t);
      doc_topic[new_t] += 1.0;
    }
  }

  const double denom =
      static_cast<double>(ids.size()) + alpha_ * static_cast<double>(k);
  std::vector<double> out(k);
  for (size_t t = 0; t < k; ++t) out[t] = (doc_topic[t] + alpha_) / denom;
  return out;
}

void LdaModel::save(std::ostream& os) const {
  io::write_u32(os, static_cast<uint32_t>(n_topics_));
  io::write_f64(os, alpha_);
  io::write_f64(os, beta_);
  io::write_u64(os, seed_);
  io::write_u64(os, vocab_.size());
  for (const auto& [term, id] : vocab_) {
    io::write_string(os, term);
    io::write_u32(os, static_cast<uint32_t>(id));
  }
  io::write_tensor(os, topic_word_);
  io::write_f64_vec(os, topic_totals_);
}

LdaModel LdaModel::load(std::istream& is) {
  LdaModel m;
  m.n_topics_ = static_cast<int>(io::read_u32(is));
  m.alpha_ = io::read_f64(is);
  m.beta_ = io::read_f64(is);
  m.seed_ = io::read_u64(is);
  uint64_t v = io::read_u64(is);
  for (uint64_t i = 0; i < v; ++i) {
    std::string term = io::read_string(is);
    m.vocab_[term] = static_cast<int>(io::read_u32(is));
  }
  m.topic_word_ = io::read_tensor(is);
  m.topic_totals_ = io::read_f64_vec(is);
  return m;
}

SvdResult svd_truncated(const Tensor& a, int n, int iters) {
  const size_t rows = a.rows(), cols = a.cols();
  if (n < 1 || static_cast<size_t>(n) > std::min(rows, cols))
    throw DataError("SVD rank exceeds matrix dimensions");

  SvdResult result;
  std::vector<double> values;
  if (cols <= rows) {
    // Right singular vectors straight from A^T A.
    Tensor gram(cols, cols);
    matmul_at_serial(a.data(), a.data(), gram.data(), cols, rows, cols);
    top_eigs(gram, n, iters, values, result.basis);
  } else {
    // Smaller Gram side: eigenvectors of A A^T are left singular vectors;
    // map them through A^T and normalize.
    Tensor gram(rows, rows);
    matmul_bt_serial(a.data(), a.data(), gram.data(), rows, cols, rows);
    Tensor u;
    top_eigs(gram, n, iters, values, u);
    result.basis = Tensor(cols, static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
      for (size_t c = 0; c < cols; ++c) {
        double sum = 0.0;
        for (size_t r = 0; r < rows; ++r)
          sum += a.at(r, c) * u.at(r, static_cast<size_t>(j));
        result.basis.at(c, static_cast<size_t>(j)) = sum;
      }
      double norm = 0.0;
      for (size_t c = 0; c < cols; ++c) {
        double x = result.basis.at(c, static_cast<size_t>(j));
        norm += x * x;
      }
      norm = std::sqrt(norm);
      if (norm < 1e-300) {
        result.basis.at(static_cast<size_t>(j) % cols, static_cast<size_t>(j)) = 1.0;
        norm = 1.0;
      }
      for (size_t c = 0; c < cols; ++c)
        result.basis.at(c, static_cast<size_t>(j)) /= norm;
    }
  }

  result.sigma.resize(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j)
    result.sigma[static_cast<size_t>(j)] =
        std::sqrt(std::max(values[static_cast<size_t>(j)], 0.0));
  return result;
}

LsaModel lsa_fit(const std::vector<std::vector<std::string>>& corpus, int n) {
  if (corpus.empty()) throw DataError("LSA corpus is empty");

  LsaModel model;
  for (const auto& doc : corpus)
    for (const auto& tok : doc) model.vocab_.emplace(tok, 0);
  if (model.vocab_.empty()) throw DataError("LSA vocabulary is empty");
  int next = 0;
  for (auto& [term, id] : model.vocab_) id = next++;

  const size_t v = model.vocab_.size();
  const size_t d = corpus.size();
  if (n < 1 || static_cast<size_t>(n) > std::min(v, d))
    throw DataError("LSA rank exceeds min(#terms, #docs)");

  // Document frequencies → idf = ln(D / df).
  std::vector<long long> df(v, 0);
  std::vector<std::vector<int>> docs(d);
  for (size_t i = 0; i < d; ++i) {
    docs[i] = term_ids(model.vocab_, corpus[i]);
    std::vector<int> uniq = docs[i];
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (int t : uniq) ++df[static_cast<size_t>(t)];
  }
  model.idf_.resize(v);
  for (size_t t = 0; t < v; ++t)
    model.idf_[t] =
        df[t] > 0 ? std::log(static_cast<double>(d) / static_cast<double>(df[t]))
                  : 0.0;

  Tensor a(d, v);
  for (size_t i = 0; i < d; ++i)
    for (int t : docs[i]) a.at(i, static_cast<size_t>(t)) += model.idf_[static_cast<size_t>(t)];

  SvdResult svd = svd_truncated(a, n);
  model.sigma_ = std::move(svd.sigma);
  model.basis_ = std::move(svd.basis);
  return model;
}

std::vector<double> LsaModel::tfidf_row(const std::vector<std::string>& tokens) const {
  std::vector<double> row(vocab_.size(), 0.0);
  for (int t : term_ids(vocab_, tokens))
    row[static_cast<size_t>(t)] += idf_[static_cast<size_t>(t)];
  return row;
}

std::vector<double> LsaModel::project(const std::vector<std::string>& tokens) const {
  std::vector<double> row = tfidf_row(tokens);
  const size_t n = sigma_.size();
  std::vector<double> out(n, 0.0);
  for (size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (size_t t = 0; t < row.size(); ++t)
      sum += row[t] * basis_.at(t, j);
    out[j] = sum;
  }
  return out;
}

void LsaModel::save(std::ostream& os) const {
  io::write_u64(os, vocab_.size());
  for (const auto& [term, id] : vocab_) {
    io::write_string(os, term);
    io::write_u32(os, static_cast<uint32_t>(id));
  }
  io::write_f64_vec(os, idf_);
  io::write_f64_vec(os, sigma_);
  io::write_tensor(os, basis_);
}

LsaModel LsaModel::load(std::istream& is) {
  LsaModel m;
  uint64_t v = io::read_u64(is);
  for (uint64_t i = 0; i < v; ++i) {
    std::string term = io::read_string(is);
    m.vocab_[term] = static_cast<int>(io::read_u32(is));
  }
  m.idf_ = io::read_f64_vec(is);
  m.sigma_ = io::read_f64_vec(is);
  m.basis_ = io::read_tensor(is);
  return m;
}

std::vector<double> topic_features(const LdaModel& lda, const LsaModel& lsa,
                                   const std::vector<std::string>& tokens) {
  if (lda.topics() != lsa.topics())
    throw DataError("LDA and LSA topic counts differ");
  std::vector<double> out = lda.infer(tokens);
  std::vector<double> proj = lsa.project(tokens);
  out.insert(out.end(), proj.begin(), proj.end());
  return out;
}

}  // namespace concet
