#pragma once

#include <complex>
#include <cstddef>

// State-vector inner loops. Every kernel has a scalar reference version; on
// x86-64 an AVX2+FMA version is picked at runtime when the CPU supports it.

namespace polarqc::kernels {

using cplx = std::complex<double>;

struct KernelTable {
    const char* name;
    void (*cmul)(cplx* y, const cplx* x, std::size_t n);                // y[i] *= x[i]
    double (*norm2)(const cplx* x, std::size_t n);                      // sum |x[i]|^2
    cplx (*cdot)(const cplx* a, const cplx* b, std::size_t n);          // sum conj(a[i]) b[i]
    void (*caxpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);  // y[i] += alpha x[i]
};

const KernelTable& scalar_table();

// nullptr when the AVX2 variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_table();

// Table used by the simulator. Honors force_scalar() and the
// POLARQC_FORCE_SCALAR environment variable.
const KernelTable& active();

void force_scalar(bool on);

}  // namespace polarqc::kernels
