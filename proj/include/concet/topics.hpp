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
// Unsupervised topic features: LDA via collapsed Gibbs sampling and LSA via
// truncated SVD of the tf-idf matrix.  Their per-utterance outputs are
// concatenated into one feature vector of length 2n.

#ifndef CONCET_TOPICS_HPP_
#define CONCET_TOPICS_HPP_

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "concet/error.hpp"
#include "concet/tensor.hpp"

namespace concet {

class LdaModel {
 public:
  LdaModel() = default;

  int topics() const { return n_topics_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  size_t vocab_size() const { return vocab_.size(); }

  // Topic distribution for one utterance: fixed-sweep Gibbs inference on
  // the held-out document.  All-OOV input returns uniform.  Sums to 1.
  std::vector<double> infer(const std::vector<std::string>& tokens) const;

  void save(std::ostream& os) const;
  static LdaModel load(std::istream& is);

  friend LdaModel lda_fit(const std::vector<std::vector<std::string>>& corpus,
                          int n, int iters, uint64_t seed, double alpha,
                          double beta);

 private:
  int n_topics_ = 0;
  double alpha_ = 0.0;
  double beta_ = 0.01;
  uint64_t seed_ = 0;
  std::map<std::string, int> vocab_;        // term → dense id
  Tensor topic_word_;                       // [V, K] counts
  std::vector<double> topic_totals_;        // [K]
};

// Collapsed Gibbs sampling for `iters` sweeps.  Deterministic given seed.
// alpha defaults to 50/n and beta to 0.01 when passed as 0.
LdaModel lda_fit(const std::vector<std::vector<std::string>>& corpus, int n,
                 int iters = 500, uint64_t seed = 1, double alpha = 0.0,
                 double beta = 0.0);

// Top-n singular structure of a dense matrix: sigma (non-increasing) and
// the right-singular basis [cols(a), n] with unit-norm columns.  Subspace
// iteration with re-orthonormalization; deterministic.
struct SvdResult {
  std::vector<double> sigma;
  Tensor basis;
};
SvdResult svd_truncated(const Tensor& a, int n, int iters = 300);

class LsaModel {
 public:
  LsaModel() = default;

  int topics() const { return static_cast<int>(sigma_.size()); }
  size_t vocab_size() const { return vocab_.size(); }
  const std::vector<double>& sigma() const { return sigma_; }
  const Tensor& basis() const { return basis_; }

  // tf-idf vector of the tokens projected onto the singular basis.  Length
  // n; zero vector for unseen-only input.  Linear in its input.
  std::vector<double> project(const std::vector<std::string>& tokens) const;

  // The tf-idf row vector of a document under this model's weights.
  std::vector<double> tfidf_row(const std::vector<std::string>& tokens) const;

  void save(std::ostream& os) const;
  static LsaModel load(std::istream& is);

  friend LsaModel lsa_fit(const std::vector<std::vector<std::string>>& corpus,
                          int n);

 private:
  std::map<std::string, int> vocab_;  // term → dense id
  std::vector<double> idf_;           // [V]
  std::vector<double> sigma_;         // [n]
  Tensor basis_;                      // [V, n]
};

// Rank-n truncated SVD of the corpus tf-idf matrix (tf * ln(D/df)).
// Requires n ≤ min(#terms, #docs).
LsaModel lsa_fit(const std::vector<std::vector<std::string>>& corpus, int n);

// [F_LDA; F_LSA], length 2n.  Throws DataError when the models disagree
// on n.
std::vector<double> topic_features(const LdaModel& lda, const LsaModel& lsa,
                                   const std::vector<std::string>& tokens);

}  // namespace concet

#endif  // CONCET_TOPICS_HPP_
