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
//
// Adam optimizer with bias correction over named tensors.

#ifndef CONCET_ADAM_HPP_
#define CONCET_ADAM_HPP_

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "concet/error.hpp"
#include "concet/tensor.hpp"

namespace concet {

// Parameters in a stable declaration order; gradients keyed by name.
using NamedTensors = std::vector<std::pair<std::string, Tensor>>;
using GradMap = std::map<std::string, Tensor>;

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamConfig cfg = AdamConfig{}) : cfg_(cfg) {}

  // One update over all parameters.  A name missing from `grads` counts as
  // an all-zero gradient; its moments still decay.
  void step(NamedTensors& params, const GradMap& grads) {
    ++t_;
    double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (auto& [name, p] : params) {
      auto [it, fresh] = state_.try_emplace(name, Moments{});
      Moments& st = it->second;
      if (fresh) {
        st.m = p.rank() == 1 ? Tensor(p.rows()) : Tensor(p.rows(), p.cols());
        st.v = st.m;
      }
      if (!st.m.same_shape(p))
        throw ShapeError("adam: parameter shape changed: " + name);
      auto git = grads.find(name);
      const Tensor* g = git == grads.end() ? nullptr : &git->second;
      if (g != nullptr && !g->same_shape(p))
        throw ShapeError("adam: gradient shape mismatch: " + name);
      for (size_t i = 0; i < p.size(); ++i) {
        double gi = g != nullptr ? (*g)[i] : 0.0;
        st.m[i] = cfg_.beta1 * st.m[i] + (1.0 - cfg_.beta1) * gi;
        st.v[i] = cfg_.beta2 * st.v[i] + (1.0 - cfg_.beta2) * gi * gi;
        double mhat = st.m[i] / bc1;
        double vhat = st.v[i] / bc2;
        p[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
      }
    }
  }

  long long steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  struct Moments {
    Tensor m, v;
  };
  AdamConfig cfg_;
  std::map<std::string, Moments> state_;
  long long t_ = 0;
};

}  // namespace concet

#endif  // CONCET_ADAM_HPP_
