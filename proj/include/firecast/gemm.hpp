#ifndef FIRECAST_GEMM_HPP
#define FIRECAST_GEMM_HPP

#include <cstdint>

#ifndef FIRECAST_NO_BLAS
#include <cblas.h>
#endif

namespace firecast {

// C[M,N] (+)= A op * B op, row-major. The MLP stacks over mesh edges are
// the hot path of training, so this routes to BLAS when available; the
// fallback loop keeps the library usable without linking anything.

#ifndef FIRECAST_NO_BLAS

inline void gemm(bool ta, bool tb, int64_t m, int64_t n, int64_t k, float alpha,
                 const float* a, int64_t lda, const float* b, int64_t ldb,
                 float beta, float* c, int64_t ldc) {
    cblas_sgemm(CblasRowMajor, ta ? CblasTrans : CblasNoTrans,
                tb ? CblasTrans : CblasNoTrans, (int)m, (int)n, (int)k, alpha, a,
                (int)lda, b, (int)ldb, beta, c, (int)ldc);
}

inline void gemm(bool ta, bool tb, int64_t m, int64_t n, int64_t k, double alpha,
                 const double* a, int64_t lda, const double* b, int64_t ldb,
                 double beta, double* c, int64_t ldc) {
    cblas_dgemm(CblasRowMajor, ta ? CblasTrans : CblasNoTrans,
                tb ? CblasTrans : CblasNoTrans, (int)m, (int)n, (int)k, alpha, a,
                (int)lda, b, (int)ldb, beta, c, (int)ldc);
}

#else

template <class T>
void gemm(bool ta, bool tb, int64_t m, int64_t n, int64_t k, T alpha, const T* a,
          int64_t lda, const T* b, int64_t ldb, T beta, T* c, int64_t ldc) {
    for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) c[i * ldc + j] *= beta;
    for (int64_t i = 0; i < m; ++i) {
        for (int64_t p = 0; p < k; ++p) {
            T av = ta ? a[p * lda + i] : a[i * lda + p];
            av *= alpha;
            for (int64_t j = 0; j < n; ++j) {
                T bv = tb ? b[j * ldb + p] : b[p * ldb + j];
                c[i * ldc + j] += av * bv;
            }
        }
    }
}

#endif  // FIRECAST_NO_BLAS

}  // namespace firecast

#endif  // FIRECAST_GEMM_HPP
