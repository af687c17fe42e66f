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

#include "concet/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace concet {

void matmul_serial(const double* a, const double* b, double* c, size_t m,
                   size_t k, size_t n) {
  for (size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (size_t j = 0; j < n; ++j) ci[j] = 0.0;
    const double* ai = a + i * k;
    for (size_t p = 0; p < k; ++p) {
      const double aip = ai[p];
      const double* bp = b + p * n;
      for (size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

void matmul_omp(const double* a, const double* b, double* c, size_t m,
                size_t k, size_t n, int jobs) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(jobs > 0 ? jobs : 1)
  for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
    const size_t i = static_cast<size_t>(ii);
    double* ci = c + i * n;
    for (size_t j = 0; j < n; ++j) ci[j] = 0.0;
    const double* ai = a + i * k;
    for (size_t p = 0; p < k; ++p) {
      const double aip = ai[p];
      const double* bp = b + p * n;
      for (size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
#else
  (void)jobs;
  matmul_serial(a, b, c, m, k, n);
#endif
}

void matmul_acc_serial(const double* a, const double* b, double* c, size_t m,
                       size_t k, size_t n) {
  for (size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    const double* ai = a + i * k;
    for (size_t p = 0; p < k; ++p) {
      const double aip = ai[p];
      const double* bp = b + p * n;
      for (size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

void matmul_at_serial(const double* a, const double* b, double* c, size_t m,
                      size_t k, size_t n) {
  for (size_t i = 0; i < m * n; ++i) c[i] = 0.0;
  for (size_t p = 0; p < k; ++p) {
    const double* ap = a + p * m;
    const double* bp = b + p * n;
    for (size_t i = 0; i < m; ++i) {
      const double api = ap[i];
      double* ci = c + i * n;
      for (size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
    }
  }
}

void matmul_bt_serial(const double* a, const double* b, double* c, size_t m,
                      size_t k, size_t n) {
  for (size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    for (size_t j = 0; j < n; ++j) {
      const double* bj = b + j * k;
      double sum = 0.0;
      for (size_t p = 0; p < k; ++p) sum += ai[p] * bj[p];
      ci[j] = sum;
    }
  }
}

void matvec_serial(const double* a, const double* x, double* y, size_t m,
                   size_t n) {
  for (size_t i = 0; i < m; ++i) {
    const double* ai = a + i * n;
    double sum = 0.0;
    for (size_t j = 0; j < n; ++j) sum += ai[j] * x[j];
    y[i] = sum;
  }
}

void matvec_omp(const double* a, const double* x, double* y, size_t m,
                size_t n, int jobs) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(jobs > 0 ? jobs : 1)
  for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
    const size_t i = static_cast<size_t>(ii);
    const double* ai = a + i * n;
    double sum = 0.0;
    for (size_t j = 0; j < n; ++j) sum += ai[j] * x[j];
    y[i] = sum;
  }
#else
  (void)jobs;
  matvec_serial(a, x, y, m, n);
#endif
}

void matmul(const double* a, const double* b, double* c, size_t m, size_t k,
            size_t n, int jobs) {
  if (jobs > 1)
    matmul_omp(a, b, c, m, k, n, jobs);
  else
    matmul_serial(a, b, c, m, k, n);
}

void matvec(const double* a, const double* x, double* y, size_t m, size_t n,
            int jobs) {
  if (jobs > 1)
    matvec_omp(a, x, y, m, n, jobs);
  else
    matvec_serial(a, x, y, m, n);
}

}  // namespace concet
