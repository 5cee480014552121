#include "vortex/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace vortex {

namespace {

// FFTW planning is not thread-safe; execution with new arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

constexpr unsigned kPlanFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

}  // namespace

std::string to_string(GridKind kind) { return kind == GridKind::periodic ? "periodic" : "planar"; }

Transforms::Transforms(GridKind kind, int nx, int ny, double lx, double ly) : kind_(kind), nx_(nx), ny_(ny) {
    std::lock_guard lock(planner_mutex());
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    if (kind == GridKind::periodic) {
        const int half = nx / 2 + 1;
        const std::size_t nc = static_cast<std::size_t>(ny) * half;
        double* in = fftw_alloc_real(n);
        fftw_complex* out = fftw_alloc_complex(nc);
        forward_plan_ = fftw_plan_dft_r2c_2d(ny, nx, in, out, kPlanFlags);
        backward_plan_ = fftw_plan_dft_c2r_2d(ny, nx, out, in, kPlanFlags);
        fftw_free(in);
        fftw_free(out);
        scale_ = 1.0 / static_cast<double>(n);
        symbol_.resize(nc);
        for (int j = 0; j < ny; ++j) {
            const int jj = j <= ny / 2 ? j : j - ny;
            const double ky = 2.0 * std::numbers::pi * jj / ly;
            for (int i = 0; i < half; ++i) {
                const double kx = 2.0 * std::numbers::pi * i / lx;
                symbol_[static_cast<std::size_t>(j) * half + i] = kx * kx + ky * ky;
            }
        }
    } else {
        double* in = fftw_alloc_real(n);
        double* out = fftw_alloc_real(n);
        forward_plan_ = fftw_plan_r2r_2d(ny, nx, in, out, FFTW_RODFT00, FFTW_RODFT00, kPlanFlags);
        fftw_free(in);
        fftw_free(out);
        scale_ = 1.0 / (4.0 * (nx + 1.0) * (ny + 1.0));
        const double hx = lx / (nx + 1.0);
        const double hy = ly / (ny + 1.0);
        symbol_.resize(n);
        for (int j = 0; j < ny; ++j) {
            const double sy = std::sin(std::numbers::pi * (j + 1) / (2.0 * (ny + 1)));
            for (int i = 0; i < nx; ++i) {
                const double sx = std::sin(std::numbers::pi * (i + 1) / (2.0 * (nx + 1)));
                symbol_[static_cast<std::size_t>(j) * nx + i] = 4.0 * sx * sx / (hx * hx) + 4.0 * sy * sy / (hy * hy);
            }
        }
    }
}

Transforms::~Transforms() {
    std::lock_guard lock(planner_mutex());
    if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void Transforms::forward(std::span<const double> in, std::span<double> coeff) const {
    auto plan = static_cast<fftw_plan>(forward_plan_);
    // FFTW's new-array interface takes non-const input even when it does not modify it.
    auto* src = const_cast<double*>(in.data());
    if (kind_ == GridKind::periodic)
        fftw_execute_dft_r2c(plan, src, reinterpret_cast<fftw_complex*>(coeff.data()));
    else
        fftw_execute_r2r(plan, src, coeff.data());
}

void Transforms::backward(std::span<const double> coeff, std::span<double> out) const {
    if (kind_ == GridKind::periodic) {
        // c2r destroys its input.
        std::vector<double> scratch(coeff.begin(), coeff.end());
        fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_plan_), reinterpret_cast<fftw_complex*>(scratch.data()),
                             out.data());
    } else {
        fftw_execute_r2r(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(coeff.data()), out.data());
    }
}

Grid::Grid(GridKind kind, double lx, double ly, int nx, int ny) : kind_(kind), nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
    if (kind == GridKind::periodic) {
        hx_ = lx / nx;
        hy_ = ly / ny;
        x0_ = 0.0;
        y0_ = 0.0;
    } else {
        hx_ = lx / (nx + 1.0);
        hy_ = ly / (ny + 1.0);
        x0_ = -lx / 2.0 + hx_;
        y0_ = -ly / 2.0 + hy_;
    }
    transforms_ = std::make_shared<Transforms>(kind, nx, ny, lx, ly);
}

std::shared_ptr<const Grid> Grid::periodic(double lx, double ly, int nx, int ny) {
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
        throw ConfigError("periodic cell edges must be positive");
    if (nx < 16 || ny < 16 || nx % 2 != 0 || ny % 2 != 0)
        throw ConfigError("periodic grid needs even sample counts >= 16");
    return std::shared_ptr<const Grid>(new Grid(GridKind::periodic, lx, ly, nx, ny));
}

std::shared_ptr<const Grid> Grid::planar(double half_width, int nx, int ny) {
    if (!(half_width > 0.0) || !std::isfinite(half_width)) throw ConfigError("box half-width must be positive");
    if (nx < 16 || ny < 16) throw ConfigError("planar grid needs >= 16 interior samples per direction");
    return std::shared_ptr<const Grid>(new Grid(GridKind::planar, 2.0 * half_width, 2.0 * half_width, nx, ny));
}

Point Grid::reduce(Point p) const {
    if (kind_ != GridKind::periodic) return p;
    auto wrap = [](double v, double len) {
        double r = std::fmod(v, len);
        if (r < 0.0) r += len;
        if (r >= len) r = 0.0;
        return r;
    };
    return {wrap(p.x, lx_), wrap(p.y, ly_)};
}

bool Grid::same_layout(const Grid& o) const {
    return kind_ == o.kind_ && nx_ == o.nx_ && ny_ == o.ny_ && lx_ == o.lx_ && ly_ == o.ly_;
}

Field::Field(GridPtr grid, double value) : grid_(std::move(grid)), data_(grid_->size(), value) {}

Field::Field(GridPtr grid, std::vector<double> samples) : grid_(std::move(grid)), data_(std::move(samples)) {
    if (data_.size() != grid_->size()) throw ConfigError("field sample count does not match grid");
}

Field& Field::operator+=(const Field& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

Field& Field::operator-=(const Field& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

Field& Field::operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
}

double Field::max() const { return *std::max_element(data_.begin(), data_.end()); }
double Field::min() const { return *std::min_element(data_.begin(), data_.end()); }
double Field::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

double integrate(const Grid& grid, std::span<const double> f) {
    // Neumaier compensated sum in index order.
    double sum = 0.0, comp = 0.0;
    for (double v : f) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    return (sum + comp) * grid.cell();
}

double integrate(const Field& f) { return integrate(f.grid(), f.values()); }

void apply_laplacian(const Grid& grid, std::span<const double> f, std::span<double> out) {
    const int nx = grid.nx(), ny = grid.ny();
    if (grid.is_periodic()) {
        const auto& tr = grid.transforms();
        std::vector<double> coeff(tr.coefficient_count() * 2);
        tr.forward(f, coeff);
        const auto sym = tr.symbol();
        const double s = tr.scale();
        for (std::size_t k = 0; k < sym.size(); ++k) {
            coeff[2 * k] *= -sym[k] * s;
            coeff[2 * k + 1] *= -sym[k] * s;
        }
        tr.backward(coeff, out);
        return;
    }
    const double ihx2 = 1.0 / (grid.hx() * grid.hx());
    const double ihy2 = 1.0 / (grid.hy() * grid.hy());
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = grid.index(i, j);
            const double c = f[k];
            const double w = i > 0 ? f[k - 1] : 0.0;
            const double e = i + 1 < nx ? f[k + 1] : 0.0;
            const double s = j > 0 ? f[k - nx] : 0.0;
            const double n = j + 1 < ny ? f[k + nx] : 0.0;
            out[k] = (w - 2.0 * c + e) * ihx2 + (s - 2.0 * c + n) * ihy2;
        }
    }
}

Field apply_laplacian(const Field& f) {
    Field out(f.grid_ptr());
    apply_laplacian(f.grid(), f.values(), out.values());
    return out;
}

Field solve_poisson(const Field& rhs) {
    const Grid& grid = rhs.grid();
    const auto& tr = grid.transforms();
    const int width = tr.coefficient_width();
    if (grid.is_periodic()) {
        double total = 0.0, total_abs = 0.0;
        for (double v : rhs.values()) {
            total += v;
            total_abs += std::abs(v);
        }
        if (std::abs(total) > 1e-8 * total_abs)
            throw SolvabilityError("periodic Poisson right-hand side has nonzero mean " +
                                   std::to_string(total / rhs.size()));
    }
    std::vector<double> coeff(tr.coefficient_count() * width);
    tr.forward(rhs.values(), coeff);
    const auto sym = tr.symbol();
    const double s = tr.scale();
    for (std::size_t k = 0; k < sym.size(); ++k) {
        const double mult = sym[k] > 0.0 ? -s / sym[k] : 0.0;
        for (int c = 0; c < width; ++c) coeff[width * k + c] *= mult;
    }
    Field out(rhs.grid_ptr());
    tr.backward(coeff, out.values());
    return out;
}

void solve_shifted(const Grid& grid, int arity, std::span<const double> diffusion, std::span<const double> coupling,
                   std::span<const double> rhs, std::span<double> out) {
    const auto& tr = grid.transforms();
    const int width = tr.coefficient_width();
    const std::size_t nc = tr.coefficient_count();
    const std::size_t n = grid.size();
    const auto sym = tr.symbol();
    const double s = tr.scale();

    if (arity == 1) {
        std::vector<double> coeff(nc * width);
        tr.forward(rhs.first(n), coeff);
        for (std::size_t k = 0; k < nc; ++k) {
            const double denom = sym[k] * diffusion[0] + coupling[0];
            const double mult = denom > 0.0 ? s / denom : 0.0;
            for (int c = 0; c < width; ++c) coeff[width * k + c] *= mult;
        }
        tr.backward(coeff, out.first(n));
        return;
    }

    std::vector<double> c1(nc * width), c2(nc * width);
    tr.forward(rhs.first(n), c1);
    tr.forward(rhs.subspan(n, n), c2);
    const double trace_scale = std::abs(coupling[0]) + std::abs(coupling[3]);
    for (std::size_t k = 0; k < nc; ++k) {
        const double m11 = sym[k] * diffusion[0] + coupling[0];
        const double m22 = sym[k] * diffusion[1] + coupling[3];
        const double m12 = coupling[1];
        const double det = m11 * m22 - m12 * m12;
        if (!(det > 1e-14 * (m11 * m22 + trace_scale * trace_scale))) {
            for (int c = 0; c < width; ++c) c1[width * k + c] = c2[width * k + c] = 0.0;
            continue;
        }
        const double inv = s / det;
        for (int c = 0; c < width; ++c) {
            const double r1 = c1[width * k + c], r2 = c2[width * k + c];
            c1[width * k + c] = inv * (m22 * r1 - m12 * r2);
            c2[width * k + c] = inv * (m11 * r2 - m12 * r1);
        }
    }
    tr.backward(c1, out.first(n));
    tr.backward(c2, out.subspan(n, n));
}

}  // namespace vortex
