#include "polarqc/kernels.hpp"

namespace polarqc::kernels {
namespace {

void cmul_ref(cplx* y, const cplx* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double yr = y[i].real(), yi = y[i].imag();
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = {yr * xr - yi * xi, yr * xi + yi * xr};
    }
}

double norm2_ref(const cplx* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return s;
}

cplx cdot_ref(const cplx* a, const cplx* b, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

void caxpy_ref(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const double ar = alpha.real(), ai = alpha.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] += cplx(ar * xr - ai * xi, ar * xi + ai * xr);
    }
}

const KernelTable kScalar{"scalar", cmul_ref, norm2_ref, cdot_ref, caxpy_ref};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace polarqc::kernels
