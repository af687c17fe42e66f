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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "concet/rng.hpp"
#include "concet/topics.hpp"

using namespace concet;

namespace {

const std::vector<std::string> kFruitVocab = {"apple",  "banana", "cherry",
                                              "fruit",  "sweet",  "juice",
                                              "orange", "ripe"};
const std::vector<std::string> kMotorVocab = {"engine", "wheel", "brake",
                                              "motor",  "road",  "drive",
                                              "gear",   "fuel"};

std::vector<std::string> make_doc(const std::vector<std::string>& vocab,
                                  size_t len, Rng& rng) {
  std::vector<std::string> doc;
  doc.reserve(len);
  for (size_t i = 0; i < len; ++i)
    doc.push_back(vocab[rng.uniform_int(vocab.size())]);
  return doc;
}

// 30 long documents per cluster with disjoint vocabularies.
std::vector<std::vector<std::string>> two_cluster_corpus(Rng& rng) {
  std::vector<std::vector<std::string>> corpus;
  for (int i = 0; i < 30; ++i) corpus.push_back(make_doc(kFruitVocab, 400, rng));
  for (int i = 0; i < 30; ++i) corpus.push_back(make_doc(kMotorVocab, 400, rng));
  return corpus;
}

// Classical Jacobi (largest off-diagonal pivot) over the full matrix; the
// independent eigensolve the truncated SVD is checked against.
std::vector<double> dense_eigenvalues(std::vector<std::vector<double>> a) {
  const size_t n = a.size();
  double scale = 0.0;
  for (size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(a[i][i]));
  for (int iter = 0; iter < 100000; ++iter) {
    size_t p = 0, q = 1;
    double mx = 0.0;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j)
        if (std::fabs(a[i][j]) > mx) {
          mx = std::fabs(a[i][j]);
          p = i;
          q = j;
        }
    if (mx <= 1e-13 * std::max(scale, 1.0)) break;
    const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
    const double t = (theta >= 0 ? 1.0 : -1.0) /
                     (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;
    for (size_t i = 0; i < n; ++i) {
      const double aip = a[i][p], aiq = a[i][q];
      a[i][p] = c * aip - s * aiq;
      a[i][q] = s * aip + c * aiq;
    }
    for (size_t i = 0; i < n; ++i) {
      const double api = a[p][i], aqi = a[q][i];
      a[p][i] = c * api - s * aqi;
      a[q][i] = s * api + c * aqi;
    }
  }
  std::vector<double> values(n);
  for (size_t i = 0; i < n; ++i) values[i] = a[i][i];
  std::sort(values.rbegin(), values.rend());
  return values;
}

}  // namespace

TEST_CASE("LDA separates a two-cluster corpus") {
  Rng rng(5);
  auto corpus = two_cluster_corpus(rng);
  LdaModel model = lda_fit(corpus, 2, 200, 42);

  // Majority topic per cluster; purity over all training docs.
  std::map<int, std::map<int, int>> votes;  // cluster → topic → count
  std::vector<int> argmaxes;
  for (size_t i = 0; i < corpus.size(); ++i) {
    auto dist = model.infer(corpus[i]);
    int am = static_cast<int>(std::max_element(dist.begin(), dist.end()) -
                              dist.begin());
    argmaxes.push_back(am);
    ++votes[i < 30 ? 0 : 1][am];
  }
  int pure = 0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const auto& v = votes[i < 30 ? 0 : 1];
    int majority =
        std::max_element(v.begin(), v.end(), [](const auto& a, const auto& b) {
          return a.second < b.second;
        })->first;
    if (argmaxes[i] == majority) ++pure;
  }
  double purity = static_cast<double>(pure) / static_cast<double>(corpus.size());
  CHECK(purity >= 0.9);
}

TEST_CASE("LDA is bit-identical under the same seed") {
  Rng rng(6);
  auto corpus = two_cluster_corpus(rng);
  LdaModel a = lda_fit(corpus, 2, 50, 7);
  LdaModel b = lda_fit(corpus, 2, 50, 7);
  std::stringstream sa, sb;
  a.save(sa);
  b.save(sb);
  CHECK(sa.str() == sb.str());

  LdaModel c = lda_fit(corpus, 2, 50, 8);
  std::stringstream sc;
  c.save(sc);
  CHECK(sa.str() != sc.str());
}

TEST_CASE("LDA parameter errors") {
  CHECK_THROWS_AS(lda_fit({{"a"}}, 1, 10, 1), DataError);
  CHECK_THROWS_AS(lda_fit({}, 2, 10, 1), DataError);
  CHECK_THROWS_AS(lda_fit({{}, {}}, 2, 10, 1), DataError);
}

TEST_CASE("LDA inference fallback, purity, and normalization") {
  Rng rng(9);
  auto corpus = two_cluster_corpus(rng);
  LdaModel model = lda_fit(corpus, 2, 200, 11);

  auto oov = model.infer({"zzz", "qqq"});
  REQUIRE(oov.size() == 2);
  CHECK(oov[0] == doctest::Approx(0.5));
  CHECK(oov[1] == doctest::Approx(0.5));

  // Which topic owns the fruit cluster?
  auto probe = model.infer(make_doc(kFruitVocab, 400, rng));
  int fruit_topic = probe[0] > probe[1] ? 0 : 1;

  for (int trial = 0; trial < 5; ++trial) {
    auto doc = make_doc(kFruitVocab, 400, rng);
    auto dist = model.infer(doc);
    CHECK(dist[fruit_topic] >= 0.8);
    CHECK(dist[0] + dist[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(dist[0] >= 0.0);
    CHECK(dist[1] >= 0.0);
  }

  // Short and mixed inputs still normalize.
  for (auto doc : {std::vector<std::string>{"apple"},
                   std::vector<std::string>{"apple", "engine", "zzz"}}) {
    auto dist = model.infer(doc);
    double sum = 0.0;
    for (double p : dist) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("rank-1 matrix reconstructs exactly at n=1") {
  // outer([1,2,3], [2,1])
  Tensor a = Tensor::matrix(3, 2, {2, 1, 4, 2, 6, 3});
  SvdResult svd = svd_truncated(a, 1);
  REQUIRE(svd.sigma.size() == 1);

  // u = A v / sigma; reconstruction sigma * u * v^T.
  std::vector<double> u(3, 0.0);
  for (size_t r = 0; r < 3; ++r)
    for (size_t c = 0; c < 2; ++c) u[r] += a.at(r, c) * svd.basis.at(c, 0);
  for (auto& x : u) x /= svd.sigma[0];

  for (size_t r = 0; r < 3; ++r)
    for (size_t c = 0; c < 2; ++c) {
      double recon = svd.sigma[0] * u[r] * svd.basis.at(c, 0);
      CHECK(recon == doctest::Approx(a.at(r, c)).epsilon(1e-6));
    }
}

TEST_CASE("singular values match a dense eigensolve on a 20x30 fixture") {
  Rng rng(21);
  Tensor a(20, 30);
  for (size_t i = 0; i < a.size(); ++i) a[i] = rng.gaussian();

  SvdResult svd = svd_truncated(a, 5);

  // Independent oracle: full 30x30 Gram matrix, classical Jacobi.
  std::vector<std::vector<double>> gram(30, std::vector<double>(30, 0.0));
  for (size_t i = 0; i < 30; ++i)
    for (size_t j = 0; j < 30; ++j)
      for (size_t r = 0; r < 20; ++r) gram[i][j] += a.at(r, i) * a.at(r, j);
  auto eigs = dense_eigenvalues(gram);

  for (int k = 0; k < 5; ++k) {
    double expect = std::sqrt(std::max(eigs[static_cast<size_t>(k)], 0.0));
    CHECK(svd.sigma[static_cast<size_t>(k)] ==
          doctest::Approx(expect).epsilon(1e-6));
  }

  // Non-increasing and unit-norm basis columns.
  for (size_t k = 1; k < svd.sigma.size(); ++k)
    CHECK(svd.sigma[k] <= svd.sigma[k - 1] + 1e-12);
  for (size_t j = 0; j < 5; ++j) {
    double norm = 0.0;
    for (size_t t = 0; t < 30; ++t)
      norm += svd.basis.at(t, j) * svd.basis.at(t, j);
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("SVD rank limits are enforced") {
  Tensor a(3, 2);
  CHECK_THROWS_AS(svd_truncated(a, 3), DataError);
  CHECK_THROWS_AS(svd_truncated(a, 0), DataError);
}

TEST_CASE("LSA projection consistency with the decomposition") {
  Rng rng(31);
  std::vector<std::vector<std::string>> corpus;
  // 12 docs over a 9-term vocabulary, every term used somewhere.
  const std::vector<std::string> pool = {"aa", "bb", "cc", "dd", "ee",
                                         "ff", "gg", "hh", "ii"};
  for (int i = 0; i < 12; ++i) {
    std::vector<std::string> doc = {pool[static_cast<size_t>(i) % pool.size()]};
    for (int j = 0; j < 7; ++j) doc.push_back(pool[rng.uniform_int(pool.size())]);
    corpus.push_back(doc);
  }
  LsaModel model = lsa_fit(corpus, 3);

  // Row i of (A · basis) must equal project(doc_i).
  for (size_t i = 0; i < corpus.size(); ++i) {
    auto row = model.tfidf_row(corpus[i]);
    std::vector<double> expect(3, 0.0);
    for (size_t j = 0; j < 3; ++j)
      for (size_t t = 0; t < row.size(); ++t)
        expect[j] += row[t] * model.basis().at(t, j);
    auto got = model.project(corpus[i]);
    REQUIRE(got.size() == 3);
    for (size_t j = 0; j < 3; ++j)
      CHECK(got[j] == doctest::Approx(expect[j]).epsilon(1e-6));
  }

  // Empty input → zero vector.
  auto zero = model.project({});
  CHECK(zero == std::vector<double>(3, 0.0));
  auto oov = model.project({"unseen", "words"});
  CHECK(oov == std::vector<double>(3, 0.0));

  // Linearity: repeating the tokens doubles the projection.
  std::vector<std::string> doc = corpus[0];
  std::vector<std::string> twice = doc;
  twice.insert(twice.end(), doc.begin(), doc.end());
  auto p1 = model.project(doc);
  auto p2 = model.project(twice);
  for (size_t j = 0; j < p1.size(); ++j)
    CHECK(p2[j] == doctest::Approx(2.0 * p1[j]).epsilon(1e-9));
}

TEST_CASE("lsa_fit enforces its rank precondition") {
  std::vector<std::vector<std::string>> corpus = {{"a", "b"}, {"b", "c"},
                                                  {"c", "a"}};
  CHECK_THROWS_AS(lsa_fit(corpus, 4), DataError);  // only 3 terms
  CHECK_NOTHROW(lsa_fit(corpus, 3));
}

TEST_CASE("topic_features concatenates to length 2n") {
  Rng rng(41);
  // 25 docs over 30 distinct terms so both models support n=20.
  std::vector<std::string> pool;
  for (int i = 0; i < 30; ++i) pool.push_back("term" + std::to_string(i));
  std::vector<std::vector<std::string>> corpus;
  for (int i = 0; i < 25; ++i) {
    std::vector<std::string> doc = {pool[static_cast<size_t>(i) % pool.size()]};
    for (int j = 0; j < 10; ++j)
      doc.push_back(pool[rng.uniform_int(pool.size())]);
    corpus.push_back(doc);
  }

  LdaModel lda = lda_fit(corpus, 20, 30, 3);
  LsaModel lsa = lsa_fit(corpus, 20);
  auto features = topic_features(lda, lsa, corpus[0]);
  REQUIRE(features.size() == 40);

  auto lda_part = lda.infer(corpus[0]);
  auto lsa_part = lsa.project(corpus[0]);
  for (size_t i = 0; i < 20; ++i) {
    CHECK(features[i] == lda_part[i]);
    CHECK(features[20 + i] == lsa_part[i]);
  }

  LsaModel small = lsa_fit(corpus, 5);
  CHECK_THROWS_AS(topic_features(lda, small, corpus[0]), DataError);
}

TEST_CASE("topic models round-trip through serialization") {
  Rng rng(51);
  auto corpus = two_cluster_corpus(rng);
  LdaModel lda = lda_fit(corpus, 2, 50, 13);
  LsaModel lsa = lsa_fit(corpus, 2);

  std::stringstream ls, ss;
  lda.save(ls);
  lsa.save(ss);
  LdaModel lda2 = LdaModel::load(ls);
  LsaModel lsa2 = LsaModel::load(ss);

  auto doc = make_doc(kFruitVocab, 50, rng);
  CHECK(lda.infer(doc) == lda2.infer(doc));
  CHECK(lsa.project(doc) == lsa2.project(doc));
}
