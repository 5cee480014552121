#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vortex/model.hpp"

namespace vortex {

enum class GridKind { periodic, planar };

std::string to_string(GridKind kind);

class Transforms;

/// A structured node grid, either a periodic Lx×Ly cell or a square box [-L, L]²
/// truncating the plane.
///
/// Periodic nodes sit at (i·hx, j·hy), i < nx, j < ny. Planar nodes are the
/// interior nodes of the box, (−L + (i+1)·hx, −L + (j+1)·hy); the boundary ring
/// carries Dirichlet data and is not stored. Samples are row-major: index j·nx + i.
class Grid {
public:
    /// nx, ny ≥ 16 and even.
    static std::shared_ptr<const Grid> periodic(double lx, double ly, int nx, int ny);
    /// half_width L > 0, nx, ny ≥ 16 interior samples per direction.
    static std::shared_ptr<const Grid> planar(double half_width, int nx, int ny);

    GridKind kind() const { return kind_; }
    bool is_periodic() const { return kind_ == GridKind::periodic; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    /// Quadrature weight of a node, hx·hy.
    double cell() const { return hx_ * hy_; }
    /// Edge lengths of the sampled region: the cell for periodic grids, 2L for planar boxes.
    double lx() const { return lx_; }
    double ly() const { return ly_; }
    double area() const { return lx_ * ly_; }
    /// Box half-width L (planar only; lx/2 for periodic grids).
    double half_width() const { return lx_ / 2.0; }

    double x(int i) const { return x0_ + i * hx_; }
    double y(int j) const { return y0_ + j * hy_; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }

    /// Periodic: wrap a point into [0, Lx) × [0, Ly).
    Point reduce(Point p) const;

    const Transforms& transforms() const { return *transforms_; }

    bool same_layout(const Grid& other) const;

private:
    Grid(GridKind kind, double lx, double ly, int nx, int ny);

    GridKind kind_;
    int nx_, ny_;
    double lx_, ly_;
    double hx_, hy_;
    double x0_, y0_;
    std::shared_ptr<Transforms> transforms_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// A real function sampled at the nodes of a grid.
class Field {
public:
    Field() = default;
    explicit Field(GridPtr grid, double value = 0.0);
    Field(GridPtr grid, std::vector<double> samples);

    const GridPtr& grid_ptr() const { return grid_; }
    const Grid& grid() const { return *grid_; }
    std::size_t size() const { return data_.size(); }

    double& operator[](std::size_t k) { return data_[k]; }
    double operator[](std::size_t k) const { return data_[k]; }
    double& at(int i, int j) { return data_[grid_->index(i, j)]; }
    double at(int i, int j) const { return data_[grid_->index(i, j)]; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }
    std::vector<double>& samples() { return data_; }
    const std::vector<double>& samples() const { return data_; }

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double s);

    double max() const;
    double min() const;
    double max_abs() const;

private:
    GridPtr grid_;
    std::vector<double> data_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Raised when a periodic Poisson right-hand side has nonzero mean.
class SolvabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Node-sum quadrature Σ f · hx·hy in a fixed order.
double integrate(const Field& f);
double integrate(const Grid& grid, std::span<const double> f);

/// Spectral Laplacian (periodic) or 5-point Laplacian with zero ghost values (planar).
Field apply_laplacian(const Field& f);
void apply_laplacian(const Grid& grid, std::span<const double> f, std::span<double> out);

/// Periodic: the zero-mean solution of Δu = rhs; throws SolvabilityError when the
/// mean of rhs exceeds 1e-8 relative to its mean absolute value.
/// Planar: the solution of the 5-point Dirichlet problem with zero boundary data.
Field solve_poisson(const Field& rhs);

/// Solves the constant-coefficient block system (−diag(diffusion)·Δ + coupling)·z = rhs
/// mode by mode, for `arity` ∈ {1, 2} stacked components. `coupling` is the row-major
/// arity×arity matrix and must be symmetric positive semidefinite; a singular zero mode
/// is projected out.
void solve_shifted(const Grid& grid, int arity, std::span<const double> diffusion, std::span<const double> coupling,
                   std::span<const double> rhs, std::span<double> out);

/// Owns the FFTW plans for one grid layout.
class Transforms {
public:
    Transforms(GridKind kind, int nx, int ny, double lx, double ly);
    ~Transforms();
    Transforms(const Transforms&) = delete;
    Transforms& operator=(const Transforms&) = delete;

    /// Eigenvalues of −Δ for every spectral coefficient, in coefficient order.
    std::span<const double> symbol() const { return symbol_; }
    std::size_t coefficient_count() const { return symbol_.size(); }

    /// Periodic grids use r2c complex coefficients, planar grids DST-I sine coefficients.
    void forward(std::span<const double> in, std::span<double> coeff) const;
    void backward(std::span<const double> coeff, std::span<double> out) const;
    /// Number of doubles per spectral coefficient (2 for complex, 1 for sine).
    int coefficient_width() const { return kind_ == GridKind::periodic ? 2 : 1; }
    /// Normalization of backward(forward(x)).
    double scale() const { return scale_; }

private:
    GridKind kind_;
    int nx_, ny_;
    std::vector<double> symbol_;
    double scale_ = 1.0;
    void* forward_plan_ = nullptr;
    void* backward_plan_ = nullptr;
};

}  // namespace vortex
