#pragma once
/// @file grid.hpp
/// @brief Periodic 2-D grid with Fourier-spectral calculus.
///
/// Provides exact (to round-off) derivatives of trigonometric polynomials
/// below the dealias cutoff, trapezoidal quadrature (exact on the torus for
/// resolved products), multi-index Sobolev norms with pointwise weights,
/// Leray projection, and the 2/3-rule dealias filter.
///
/// Conventions:
///   - wavenumbers are 2*pi*(integer index)/L per axis;
///   - the Nyquist mode is treated as zero in odd-order derivatives, so
///     first derivatives are skew-adjoint under the discrete inner product;
///   - the dealias mask zeroes modes with |index| > dealias_fraction*(n/2)
///     per axis.

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "lcflow/field.hpp"

namespace lcflow {

class Grid {
public:
    using Spectrum = std::vector<std::complex<double>>;

    Grid(std::size_t nx, std::size_t ny,
         double lx = 6.283185307179586476925286766559,
         double ly = 6.283185307179586476925286766559,
         double dealias_fraction = 2.0 / 3.0);
    ~Grid();

    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;

    // ==================== geometry ====================

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }
    double dx() const { return lx_ / static_cast<double>(nx_); }
    double dy() const { return ly_ / static_cast<double>(ny_); }
    double cell_area() const { return dx() * dy(); }
    double area() const { return lx_ * ly_; }
    std::size_t npoints() const { return nx_ * ny_; }
    double dealias_fraction() const { return dealias_fraction_; }
    double x(std::size_t ix) const { return dx() * static_cast<double>(ix); }
    double y(std::size_t iy) const { return dy() * static_cast<double>(iy); }

    // ==================== field factories ====================

    ScalarField scalar(double fill = 0.0) const { return ScalarField(this, nx_, ny_, fill); }
    VectorField vector() const { return VectorField(this, nx_, ny_); }
    TensorField tensor() const { return TensorField(this, nx_, ny_); }

    /// Fill from a callable f(x, y).
    template <typename F>
    ScalarField sample(F&& f) const {
        ScalarField out = scalar();
        for (std::size_t iy = 0; iy < ny_; ++iy)
            for (std::size_t ix = 0; ix < nx_; ++ix)
                out(ix, iy) = f(x(ix), y(iy));
        return out;
    }

    // ==================== transforms ====================

    /// Number of retained complex modes per row of the half-spectrum.
    std::size_t nkx() const { return nx_ / 2 + 1; }
    std::size_t nmodes() const { return nkx() * ny_; }

    /// Signed wavenumbers of half-spectrum entry (jx, row), Nyquist included.
    double kx_at(std::size_t jx) const { return kx_full_[jx]; }
    double ky_at(std::size_t row) const { return ky_full_[row]; }

    /// First-derivative wavenumbers (Nyquist zeroed), matching derivative(),
    /// gradient(), divergence(), and jacobian().
    double kx_odd_at(std::size_t jx) const { return kx_odd_[jx]; }
    double ky_odd_at(std::size_t row) const { return ky_odd_[row]; }

    /// Whether half-spectrum entry (jx, row) survives the dealias mask.
    bool mode_kept(std::size_t row, std::size_t jx) const {
        return keep_[row * nkx() + jx] != 0;
    }

    /// Forward transform to normalized coefficients (division by nx*ny
    /// applied), half-spectrum layout [iy*nkx + jx]. Rejects non-finite input.
    void forward(const ScalarField& f, Spectrum& out) const;

    /// Inverse transform; the input spectrum is consumed (overwritten).
    void backward(Spectrum& in, ScalarField& out) const;

    // ==================== calculus ====================

    /// Mixed spectral partial of order (mx, my); order 0 copies.
    ScalarField derivative(const ScalarField& f, int mx, int my) const;

    VectorField gradient(const ScalarField& f) const;
    ScalarField divergence(const VectorField& v) const;
    ScalarField laplacian(const ScalarField& f) const;
    VectorField laplacian(const VectorField& v) const;

    /// Jacobian J(i, j) = d_j v_i.
    TensorField jacobian(const VectorField& v) const;

    /// Row-wise divergence (div T)_i = d_j T(i, j).
    VectorField divergence(const TensorField& t) const;

    // ==================== quadrature ====================

    double integral(const ScalarField& f) const;
    double mean(const ScalarField& f) const { return integral(f) / area(); }

    double inner_product(const ScalarField& f, const ScalarField& g) const;
    double inner_product(const ScalarField& f, const ScalarField& g, const ScalarField& w) const;
    double inner_product(const VectorField& f, const VectorField& g) const;
    double inner_product(const VectorField& f, const VectorField& g, const ScalarField& w) const;
    double inner_product(const TensorField& f, const TensorField& g) const;
    double inner_product(const TensorField& f, const TensorField& g, const ScalarField& w) const;

    double l2_norm(const ScalarField& f) const;
    double l2_norm(const VectorField& f) const;
    double l2_norm(const TensorField& f) const;

    double max_abs(const ScalarField& f) const;
    double max_abs(const VectorField& f) const;  ///< max over points of |v(x)|
    double max_abs(const TensorField& f) const;
    double min_value(const ScalarField& f) const;

    // ==================== Sobolev norms ====================
    // sum over multi-indices m = (mx, my) with |m| = mx + my <= s of
    // ||d^m f||^2 in the (optionally weighted) discrete L2; the homogeneous
    // variant restricts to 1 <= |m| <= s. Norms are the square roots of the
    // corresponding bilinear forms below. Supported orders: 0 <= s <= 4.

    double sobolev_inner(const ScalarField& f, const ScalarField& g, int s,
                         const ScalarField* w = nullptr, bool homogeneous = false) const;
    double sobolev_inner(const VectorField& f, const VectorField& g, int s,
                         const ScalarField* w = nullptr, bool homogeneous = false) const;
    double sobolev_inner(const TensorField& f, const TensorField& g, int s,
                         const ScalarField* w = nullptr, bool homogeneous = false) const;

    double sobolev_norm(const ScalarField& f, int s,
                        const ScalarField* w = nullptr, bool homogeneous = false) const;
    double sobolev_norm(const VectorField& f, int s,
                        const ScalarField* w = nullptr, bool homogeneous = false) const;
    double sobolev_norm(const TensorField& f, int s,
                        const ScalarField* w = nullptr, bool homogeneous = false) const;

    // ==================== projection and filtering ====================

    /// Orthogonal projection onto discretely divergence-free fields.
    VectorField leray_project(const VectorField& v) const;

    /// Projection that also recovers the zero-mean scalar p with
    /// grad p = v - P v.
    VectorField leray_project(const VectorField& v, ScalarField& p_out) const;

    void dealias(ScalarField& f) const;
    void dealias(VectorField& v) const;
    void dealias(TensorField& t) const;

private:
    struct Plans;

    void apply_symbol_derivative(Spectrum& fk, int mx, int my) const;
    void check_shape(const ScalarField& f) const;

    std::size_t nx_, ny_;
    double lx_, ly_;
    double dealias_fraction_;

    std::vector<double> kx_full_, ky_full_;  // signed wavenumbers incl. Nyquist
    std::vector<double> kx_odd_, ky_odd_;    // Nyquist zeroed (odd derivatives)
    std::vector<unsigned char> keep_;        // dealias mask over nmodes()

    std::unique_ptr<Plans> plans_;
};

} // namespace lcflow
