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
// Dense matrix kernels.  Each has a serial reference and an OpenMP variant
// that partitions output rows; both produce bitwise-identical results since
// each output element is summed in the same order.

#ifndef CONCET_KERNELS_HPP_
#define CONCET_KERNELS_HPP_

#include <cstddef>

namespace concet {

// C[m,n] = A[m,k] * B[k,n], row major.
void matmul_serial(const double* a, const double* b, double* c, size_t m,
                   size_t k, size_t n);
void matmul_omp(const double* a, const double* b, double* c, size_t m,
                size_t k, size_t n, int jobs);

// C[m,n] += A[m,k] * B[k,n].
void matmul_acc_serial(const double* a, const double* b, double* c, size_t m,
                       size_t k, size_t n);

// C[m,n] = A^T[m,k] * B[k,n] where A is stored as [k,m].
void matmul_at_serial(const double* a, const double* b, double* c, size_t m,
                      size_t k, size_t n);

// C[m,n] = A[m,k] * B^T[k,n] where B is stored as [n,k].
void matmul_bt_serial(const double* a, const double* b, double* c, size_t m,
                      size_t k, size_t n);

// y[m] = A[m,n] * x[n].
void matvec_serial(const double* a, const double* x, double* y, size_t m,
                   size_t n);
void matvec_omp(const double* a, const double* x, double* y, size_t m,
                size_t n, int jobs);

// Dispatches to the OMP variant when jobs > 1, otherwise serial.
void matmul(const double* a, const double* b, double* c, size_t m, size_t k,
            size_t n, int jobs = 1);
void matvec(const double* a, const double* x, double* y, size_t m, size_t n,
            int jobs = 1);

}  // namespace concet

#endif  // CONCET_KERNELS_HPP_
