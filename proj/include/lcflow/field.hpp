#pragma once
/// @file field.hpp
/// @brief Real-space sample containers bound to a Grid.
///
/// Layout is row-major with x contiguous: sample (ix, iy) lives at
/// index iy*nx + ix. Fields are value types; copying a field copies its
/// samples and keeps the (non-owning) grid handle.

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace lcflow {

class Grid;

class ScalarField {
public:
    ScalarField() = default;
    ScalarField(const Grid* g, std::size_t nx, std::size_t ny, double fill = 0.0)
        : grid_(g), nx_(nx), ny_(ny), a_(nx * ny, fill) {}

    const Grid* grid() const { return grid_; }
    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t size() const { return a_.size(); }

    double& operator[](std::size_t i) { return a_[i]; }
    double operator[](std::size_t i) const { return a_[i]; }
    double& operator()(std::size_t ix, std::size_t iy) { return a_[iy * nx_ + ix]; }
    double operator()(std::size_t ix, std::size_t iy) const { return a_[iy * nx_ + ix]; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

    void fill(double c) { std::fill(a_.begin(), a_.end(), c); }

    bool finite() const {
        for (double v : a_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    const Grid* grid_ = nullptr;
    std::size_t nx_ = 0, ny_ = 0;
    std::vector<double> a_;
};

/// Two-component vector field; comp(i) is the i-th Cartesian component.
class VectorField {
public:
    VectorField() = default;
    VectorField(const Grid* g, std::size_t nx, std::size_t ny)
        : c_{ScalarField(g, nx, ny), ScalarField(g, nx, ny)} {}

    ScalarField& comp(int i) { assert(i >= 0 && i < 2); return c_[i]; }
    const ScalarField& comp(int i) const { assert(i >= 0 && i < 2); return c_[i]; }
    ScalarField& operator[](int i) { return comp(i); }
    const ScalarField& operator[](int i) const { return comp(i); }

    const Grid* grid() const { return c_[0].grid(); }
    std::size_t size() const { return c_[0].size(); }
    bool finite() const { return c_[0].finite() && c_[1].finite(); }

private:
    std::array<ScalarField, 2> c_;
};

/// 2x2 tensor field; comp(i, j) is the (row i, column j) component.
class TensorField {
public:
    TensorField() = default;
    TensorField(const Grid* g, std::size_t nx, std::size_t ny)
        : c_{ScalarField(g, nx, ny), ScalarField(g, nx, ny),
             ScalarField(g, nx, ny), ScalarField(g, nx, ny)} {}

    ScalarField& comp(int i, int j) { assert(i >= 0 && i < 2 && j >= 0 && j < 2); return c_[2 * i + j]; }
    const ScalarField& comp(int i, int j) const { assert(i >= 0 && i < 2 && j >= 0 && j < 2); return c_[2 * i + j]; }
    ScalarField& operator()(int i, int j) { return comp(i, j); }
    const ScalarField& operator()(int i, int j) const { return comp(i, j); }

    const Grid* grid() const { return c_[0].grid(); }
    std::size_t size() const { return c_[0].size(); }
    bool finite() const {
        return c_[0].finite() && c_[1].finite() && c_[2].finite() && c_[3].finite();
    }

private:
    std::array<ScalarField, 4> c_;
};

} // namespace lcflow
