/// @file grid.cpp
/// @brief FFTW-backed implementation of the spectral grid operations.

#include "lcflow/grid.hpp"

#include <cassert>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include <fftw3.h>

#include "lcflow/errors.hpp"
#include "lcflow/kernels.hpp"

namespace lcflow {

namespace {

/// (i*k)^m for small nonnegative m.
inline std::complex<double> pow_ik(double k, int m) {
    double km = 1.0;
    for (int j = 0; j < m; ++j) km *= k;
    switch (m & 3) {
        case 0: return {km, 0.0};
        case 1: return {0.0, km};
        case 2: return {-km, 0.0};
        default: return {0.0, -km};
    }
}

} // namespace

struct Grid::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    std::vector<double> rbuf;
    Spectrum cbuf;

    ~Plans() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
    }
};

Grid::Grid(std::size_t nx, std::size_t ny, double lx, double ly, double dealias_fraction)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly), dealias_fraction_(dealias_fraction) {
    if (nx_ < 8 || ny_ < 8 || nx_ % 2 != 0 || ny_ % 2 != 0)
        throw std::invalid_argument("Grid: point counts must be even and >= 8");
    if (!(lx_ > 0.0) || !(ly_ > 0.0))
        throw std::invalid_argument("Grid: domain lengths must be positive");
    if (!(dealias_fraction_ > 0.0) || dealias_fraction_ > 1.0)
        throw std::invalid_argument("Grid: dealias fraction must lie in (0, 1]");

    const double fx = 2.0 * M_PI / lx_, fy = 2.0 * M_PI / ly_;
    kx_full_.resize(nkx());
    kx_odd_.resize(nkx());
    for (std::size_t jx = 0; jx < nkx(); ++jx) {
        kx_full_[jx] = fx * static_cast<double>(jx);
        kx_odd_[jx] = (jx == nx_ / 2) ? 0.0 : kx_full_[jx];
    }
    ky_full_.resize(ny_);
    ky_odd_.resize(ny_);
    for (std::size_t iy = 0; iy < ny_; ++iy) {
        const long long s = (iy <= ny_ / 2) ? static_cast<long long>(iy)
                                            : static_cast<long long>(iy) - static_cast<long long>(ny_);
        ky_full_[iy] = fy * static_cast<double>(s);
        ky_odd_[iy] = (iy == ny_ / 2) ? 0.0 : ky_full_[iy];
    }

    const double cut_x = dealias_fraction_ * static_cast<double>(nx_ / 2);
    const double cut_y = dealias_fraction_ * static_cast<double>(ny_ / 2);
    keep_.assign(nmodes(), 1);
    for (std::size_t iy = 0; iy < ny_; ++iy) {
        const long long sy = (iy <= ny_ / 2) ? static_cast<long long>(iy)
                                             : static_cast<long long>(iy) - static_cast<long long>(ny_);
        for (std::size_t jx = 0; jx < nkx(); ++jx) {
            const bool zap = static_cast<double>(jx) > cut_x ||
                             std::abs(static_cast<double>(sy)) > cut_y;
            keep_[iy * nkx() + jx] = zap ? 0 : 1;
        }
    }

    plans_ = std::make_unique<Plans>();
    plans_->rbuf.resize(npoints());
    plans_->cbuf.resize(nmodes());
    plans_->fwd = fftw_plan_dft_r2c_2d(static_cast<int>(ny_), static_cast<int>(nx_),
                                       plans_->rbuf.data(),
                                       reinterpret_cast<fftw_complex*>(plans_->cbuf.data()),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->bwd = fftw_plan_dft_c2r_2d(static_cast<int>(ny_), static_cast<int>(nx_),
                                       reinterpret_cast<fftw_complex*>(plans_->cbuf.data()),
                                       plans_->rbuf.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plans_->fwd || !plans_->bwd)
        throw std::runtime_error("Grid: FFTW plan creation failed");
}

Grid::~Grid() = default;

void Grid::check_shape(const ScalarField& f) const {
    assert(f.grid() == this && f.nx() == nx_ && f.ny() == ny_);
    (void)f;
}

void Grid::forward(const ScalarField& f, Spectrum& out) const {
    check_shape(f);
    if (!f.finite())
        throw NumericalError("spectral transform rejected non-finite field samples");
    out.resize(nmodes());
    fftw_execute_dft_r2c(plans_->fwd, const_cast<double*>(f.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / static_cast<double>(npoints());
    kernels::parallel_for(nmodes(), [&](std::size_t i) { out[i] *= scale; });
}

void Grid::backward(Spectrum& in, ScalarField& out) const {
    assert(in.size() == nmodes());
    if (out.grid() != this) out = scalar();
    fftw_execute_dft_c2r(plans_->bwd, reinterpret_cast<fftw_complex*>(in.data()), out.data());
}

void Grid::apply_symbol_derivative(Spectrum& fk, int mx, int my) const {
    assert(mx >= 0 && my >= 0);
    const std::vector<double>& kx = (mx % 2 == 1) ? kx_odd_ : kx_full_;
    const std::vector<double>& ky = (my % 2 == 1) ? ky_odd_ : ky_full_;
    const std::size_t nk = nkx();
    kernels::parallel_for(nmodes(), [&](std::size_t i) {
        const std::size_t iy = i / nk, jx = i % nk;
        fk[i] *= pow_ik(kx[jx], mx) * pow_ik(ky[iy], my);
    });
}

ScalarField Grid::derivative(const ScalarField& f, int mx, int my) const {
    Spectrum fk;
    forward(f, fk);
    apply_symbol_derivative(fk, mx, my);
    ScalarField out = scalar();
    backward(fk, out);
    return out;
}

VectorField Grid::gradient(const ScalarField& f) const {
    Spectrum fk;
    forward(f, fk);
    VectorField out = vector();
    Spectrum gk = fk;
    apply_symbol_derivative(gk, 1, 0);
    backward(gk, out[0]);
    apply_symbol_derivative(fk, 0, 1);
    backward(fk, out[1]);
    return out;
}

ScalarField Grid::divergence(const VectorField& v) const {
    Spectrum uk, vk;
    forward(v[0], uk);
    forward(v[1], vk);
    apply_symbol_derivative(uk, 1, 0);
    apply_symbol_derivative(vk, 0, 1);
    kernels::parallel_for(nmodes(), [&](std::size_t i) { uk[i] += vk[i]; });
    ScalarField out = scalar();
    backward(uk, out);
    return out;
}

ScalarField Grid::laplacian(const ScalarField& f) const {
    Spectrum fk;
    forward(f, fk);
    const std::size_t nk = nkx();
    kernels::parallel_for(nmodes(), [&](std::size_t i) {
        const std::size_t iy = i / nk, jx = i % nk;
        fk[i] *= -(kx_full_[jx] * kx_full_[jx] + ky_full_[iy] * ky_full_[iy]);
    });
    ScalarField out = scalar();
    backward(fk, out);
    return out;
}

VectorField Grid::laplacian(const VectorField& v) const {
    VectorField out = vector();
    out[0] = laplacian(v[0]);
    out[1] = laplacian(v[1]);
    return out;
}

TensorField Grid::jacobian(const VectorField& v) const {
    TensorField out = tensor();
    for (int i = 0; i < 2; ++i) {
        Spectrum fk;
        forward(v[i], fk);
        Spectrum gx = fk;
        apply_symbol_derivative(gx, 1, 0);
        backward(gx, out(i, 0));
        apply_symbol_derivative(fk, 0, 1);
        backward(fk, out(i, 1));
    }
    return out;
}

VectorField Grid::divergence(const TensorField& t) const {
    VectorField out = vector();
    for (int i = 0; i < 2; ++i) {
        Spectrum ax, ay;
        forward(t(i, 0), ax);
        forward(t(i, 1), ay);
        apply_symbol_derivative(ax, 1, 0);
        apply_symbol_derivative(ay, 0, 1);
        kernels::parallel_for(nmodes(), [&](std::size_t m) { ax[m] += ay[m]; });
        backward(ax, out[i]);
    }
    return out;
}

double Grid::integral(const ScalarField& f) const {
    check_shape(f);
    const double* a = f.data();
    return cell_area() * kernels::reduce_sum(npoints(), [&](std::size_t i) { return a[i]; });
}

double Grid::inner_product(const ScalarField& f, const ScalarField& g) const {
    check_shape(f);
    check_shape(g);
    const double* a = f.data();
    const double* b = g.data();
    return cell_area() *
           kernels::reduce_sum(npoints(), [&](std::size_t i) { return a[i] * b[i]; });
}

double Grid::inner_product(const ScalarField& f, const ScalarField& g, const ScalarField& w) const {
    check_shape(f);
    check_shape(g);
    check_shape(w);
    if (!(min_value(w) > 0.0))
        throw std::invalid_argument("weighted inner product requires a strictly positive weight");
    const double* a = f.data();
    const double* b = g.data();
    const double* c = w.data();
    return cell_area() *
           kernels::reduce_sum(npoints(), [&](std::size_t i) { return a[i] * b[i] * c[i]; });
}

double Grid::inner_product(const VectorField& f, const VectorField& g) const {
    return inner_product(f[0], g[0]) + inner_product(f[1], g[1]);
}

double Grid::inner_product(const VectorField& f, const VectorField& g, const ScalarField& w) const {
    return inner_product(f[0], g[0], w) + inner_product(f[1], g[1], w);
}

double Grid::inner_product(const TensorField& f, const TensorField& g) const {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) s += inner_product(f(i, j), g(i, j));
    return s;
}

double Grid::inner_product(const TensorField& f, const TensorField& g, const ScalarField& w) const {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) s += inner_product(f(i, j), g(i, j), w);
    return s;
}

double Grid::l2_norm(const ScalarField& f) const { return std::sqrt(std::max(0.0, inner_product(f, f))); }
double Grid::l2_norm(const VectorField& f) const { return std::sqrt(std::max(0.0, inner_product(f, f))); }
double Grid::l2_norm(const TensorField& f) const { return std::sqrt(std::max(0.0, inner_product(f, f))); }

double Grid::max_abs(const ScalarField& f) const {
    check_shape(f);
    const double* a = f.data();
    return kernels::reduce_max(npoints(), [&](std::size_t i) { return std::abs(a[i]); });
}

double Grid::max_abs(const VectorField& f) const {
    const double* a = f[0].data();
    const double* b = f[1].data();
    return std::sqrt(kernels::reduce_max(
        npoints(), [&](std::size_t i) { return a[i] * a[i] + b[i] * b[i]; }));
}

double Grid::max_abs(const TensorField& f) const {
    double m = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m = std::max(m, max_abs(f(i, j)));
    return m;
}

double Grid::min_value(const ScalarField& f) const {
    check_shape(f);
    const double* a = f.data();
    return kernels::reduce_min(npoints(), [&](std::size_t i) { return a[i]; });
}

double Grid::sobolev_inner(const ScalarField& f, const ScalarField& g, int s,
                           const ScalarField* w, bool homogeneous) const {
    if (s < 0 || s > 4)
        throw std::invalid_argument("sobolev_inner: order s must satisfy 0 <= s <= 4");
    Spectrum fk, gk;
    forward(f, fk);
    const bool same = (&f == &g);
    if (!same) forward(g, gk);

    double acc = 0.0;
    ScalarField df = scalar(), dg = scalar();
    for (int mx = 0; mx <= s; ++mx) {
        for (int my = 0; my + mx <= s; ++my) {
            if (homogeneous && mx + my == 0) continue;
            Spectrum tf = fk;
            apply_symbol_derivative(tf, mx, my);
            backward(tf, df);
            if (same) {
                acc += w ? inner_product(df, df, *w) : inner_product(df, df);
            } else {
                Spectrum tg = gk;
                apply_symbol_derivative(tg, mx, my);
                backward(tg, dg);
                acc += w ? inner_product(df, dg, *w) : inner_product(df, dg);
            }
        }
    }
    return acc;
}

double Grid::sobolev_inner(const VectorField& f, const VectorField& g, int s,
                           const ScalarField* w, bool homogeneous) const {
    return sobolev_inner(f[0], g[0], s, w, homogeneous) +
           sobolev_inner(f[1], g[1], s, w, homogeneous);
}

double Grid::sobolev_inner(const TensorField& f, const TensorField& g, int s,
                           const ScalarField* w, bool homogeneous) const {
    double acc = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) acc += sobolev_inner(f(i, j), g(i, j), s, w, homogeneous);
    return acc;
}

double Grid::sobolev_norm(const ScalarField& f, int s, const ScalarField* w, bool homogeneous) const {
    return std::sqrt(std::max(0.0, sobolev_inner(f, f, s, w, homogeneous)));
}

double Grid::sobolev_norm(const VectorField& f, int s, const ScalarField* w, bool homogeneous) const {
    return std::sqrt(std::max(0.0, sobolev_inner(f, f, s, w, homogeneous)));
}

double Grid::sobolev_norm(const TensorField& f, int s, const ScalarField* w, bool homogeneous) const {
    return std::sqrt(std::max(0.0, sobolev_inner(f, f, s, w, homogeneous)));
}

VectorField Grid::leray_project(const VectorField& v) const {
    ScalarField unused;
    return leray_project(v, unused);
}

VectorField Grid::leray_project(const VectorField& v, ScalarField& p_out) const {
    Spectrum uk, vk;
    forward(v[0], uk);
    forward(v[1], vk);
    Spectrum pk(nmodes(), std::complex<double>(0.0, 0.0));
    const std::size_t nk = nkx();
    kernels::parallel_for(nmodes(), [&](std::size_t i) {
        const std::size_t iy = i / nk, jx = i % nk;
        const double kx = kx_odd_[jx], ky = ky_odd_[iy];
        const double k2 = kx * kx + ky * ky;
        if (k2 > 0.0) {
            const std::complex<double> s = (kx * uk[i] + ky * vk[i]) / k2;
            uk[i] -= kx * s;
            vk[i] -= ky * s;
            pk[i] = std::complex<double>(0.0, -1.0) * s;
        }
    });
    VectorField out = vector();
    backward(uk, out[0]);
    backward(vk, out[1]);
    if (p_out.grid() != this) p_out = scalar();
    backward(pk, p_out);
    return out;
}

void Grid::dealias(ScalarField& f) const {
    Spectrum fk;
    forward(f, fk);
    kernels::parallel_for(nmodes(), [&](std::size_t i) {
        if (!keep_[i]) fk[i] = std::complex<double>(0.0, 0.0);
    });
    backward(fk, f);
}

void Grid::dealias(VectorField& v) const {
    dealias(v[0]);
    dealias(v[1]);
}

void Grid::dealias(TensorField& t) const {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) dealias(t(i, j));
}

} // namespace lcflow
