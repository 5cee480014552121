#include "vortex/background.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace vortex {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double clamp_radius(const Grid& grid) { return std::min(grid.hx(), grid.hy()) / 4.0; }

void check_inside_box(const VortexSet& vortices, const Grid& box) {
    const double limit = 0.75 * box.half_width();
    for (const auto& e : vortices.entries()) {
        if (std::abs(e.point.x) > limit || std::abs(e.point.y) > limit) {
            std::ostringstream os;
            os << "vortex at (" << e.point.x << ", " << e.point.y << ") is closer than L/4 to the box edge (L = "
               << box.half_width() << ")";
            throw ConfigError(os.str());
        }
    }
}

std::vector<double> periodized_gaussian(int n, double h, double len, double center, double sigma) {
    std::vector<double> profile(n, 0.0);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = -2; k <= 2; ++k) {
            const double d = i * h - center + k * len;
            s += std::exp(-d * d * inv);
        }
        profile[i] = s;
    }
    return profile;
}

}  // namespace

double default_sigma(const Grid& grid) { return 2.0 * std::max(grid.hx(), grid.hy()); }

BackgroundScalar periodic_background(const GridPtr& grid, const VortexSet& vortices, double sigma) {
    if (!grid->is_periodic()) throw ConfigError("periodic background needs a periodic grid");
    const double hmax = std::max(grid->hx(), grid->hy());
    if (!(sigma >= 2.0 * hmax * (1.0 - 1e-12)))
        throw ConfigError("smoothing width sigma = " + std::to_string(sigma) +
                          " is below grid resolution (need >= 2*max(hx,hy) = " + std::to_string(2.0 * hmax) + ")");
    if (sigma > 0.25 * std::min(grid->lx(), grid->ly()))
        throw ConfigError("smoothing width sigma exceeds a quarter of the cell edge");

    const int nx = grid->nx(), ny = grid->ny();
    Field g(grid);
    for (const auto& e : vortices.entries()) {
        const Point p = grid->reduce(e.point);
        const auto px = periodized_gaussian(nx, grid->hx(), grid->lx(), p.x, sigma);
        const auto py = periodized_gaussian(ny, grid->hy(), grid->ly(), p.y, sigma);
        double mx = 0.0, my = 0.0;
        for (double v : px) mx += v;
        for (double v : py) my += v;
        const double mass = mx * grid->hx() * my * grid->hy();
        const double scale = kFourPi * e.multiplicity / mass;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) g.at(i, j) += scale * px[i] * py[j];
    }

    const int n_total = vortices.total();
    Field rhs = g;
    const double mean_source = kFourPi * n_total / grid->area();
    for (auto& v : rhs.values()) v -= mean_source;

    BackgroundScalar out;
    out.u0 = n_total == 0 ? Field(grid) : solve_poisson(rhs);
    out.g = std::move(g);
    out.total_mass = integrate(out.g);
    out.clamped.assign(grid->size(), 0);
    out.vortices = vortices;
    return out;
}

double planar_background_at(const VortexSet& vortices, double mu, Point x) {
    double u = 0.0;
    for (const auto& e : vortices.entries()) {
        const double dx = x.x - e.point.x, dy = x.y - e.point.y;
        const double r2 = dx * dx + dy * dy;
        u += e.multiplicity * std::log(r2 / (mu + r2));
    }
    return u;
}

BackgroundScalar planar_background(const VortexSet& vortices, double mu, const GridPtr& box) {
    if (box->is_periodic()) throw ConfigError("planar background needs a planar box");
    if (!(mu > 0.0)) throw ConfigError("mu must be positive");
    check_inside_box(vortices, *box);
    const double eps2 = std::pow(clamp_radius(*box), 2);

    BackgroundScalar out;
    out.u0 = Field(box);
    out.g = Field(box);
    out.clamped.assign(box->size(), 0);
    for (int j = 0; j < box->ny(); ++j) {
        for (int i = 0; i < box->nx(); ++i) {
            const std::size_t k = box->index(i, j);
            double u = 0.0, g = 0.0;
            for (const auto& e : vortices.entries()) {
                const double dx = box->x(i) - e.point.x, dy = box->y(j) - e.point.y;
                double r2 = dx * dx + dy * dy;
                const double denom = mu + r2;
                g += e.multiplicity * 4.0 * mu / (denom * denom);
                if (r2 < eps2) {
                    r2 = eps2;
                    out.clamped[k] = 1;
                }
                u += e.multiplicity * std::log(r2 / (mu + r2));
            }
            out.u0[k] = u;
            out.g[k] = g;
        }
    }
    out.total_mass = integrate(out.g);
    out.vortices = vortices;
    out.mu = mu;
    return out;
}

double log_regularizer_at(const VortexSet& vortices, double mu, Point x) {
    double q = 0.0;
    for (const auto& e : vortices.entries()) {
        const double dx = x.x - e.point.x, dy = x.y - e.point.y;
        q += e.multiplicity * std::log(mu + dx * dx + dy * dy);
    }
    return q;
}

Field log_regularizer(const VortexSet& vortices, double mu, const GridPtr& box) {
    Field q(box);
    for (int j = 0; j < box->ny(); ++j)
        for (int i = 0; i < box->nx(); ++i) q.at(i, j) = log_regularizer_at(vortices, mu, {box->x(i), box->y(j)});
    return q;
}

Field log_potential(const VortexSet& vortices, const GridPtr& box) {
    const double eps2 = std::pow(clamp_radius(*box), 2);
    Field u(box);
    for (int j = 0; j < box->ny(); ++j) {
        for (int i = 0; i < box->nx(); ++i) {
            double s = 0.0;
            for (const auto& e : vortices.entries()) {
                const double dx = box->x(i) - e.point.x, dy = box->y(j) - e.point.y;
                s += e.multiplicity * std::log(std::max(dx * dx + dy * dy, eps2));
            }
            u.at(i, j) = s;
        }
    }
    return u;
}

Field dirichlet_load(const GridPtr& box, const std::function<double(Point)>& boundary_value) {
    Field load(box);
    const int nx = box->nx(), ny = box->ny();
    const double L = box->half_width();
    const double ihx2 = 1.0 / (box->hx() * box->hx());
    const double ihy2 = 1.0 / (box->hy() * box->hy());
    for (int j = 0; j < ny; ++j) {
        load.at(0, j) += boundary_value({-L, box->y(j)}) * ihx2;
        load.at(nx - 1, j) += boundary_value({L, box->y(j)}) * ihx2;
    }
    for (int i = 0; i < nx; ++i) {
        load.at(i, 0) += boundary_value({box->x(i), -L}) * ihy2;
        load.at(i, ny - 1) += boundary_value({box->x(i), L}) * ihy2;
    }
    return load;
}

namespace {

void finish_composites(BackgroundSystem& out, const SystemModel& model) {
    const GridPtr& grid = out.u0_1.grid_ptr();
    out.h1m = Field(grid);
    out.H1 = Field(grid);
    out.H2 = Field(grid);
    out.G1 = Field(grid);
    out.G2 = Field(grid);
    for (std::size_t k = 0; k < grid->size(); ++k) {
        out.h1m[k] = std::exp(model.m * out.u0_1[k]);
        out.H1[k] = std::exp(out.u0_1[k] + out.u0_2[k]);
        out.H2[k] = std::exp(out.u0_1[k] - out.u0_2[k]);
        out.G1[k] = out.g1[k] / model.lambda1 + out.g2[k] / model.lambda2;
        out.G2[k] = out.g1[k] / model.lambda1 - out.g2[k] / model.lambda2;
    }
}

void check_subset(const SystemModel& model, const VortexSet& v1, const VortexSet& v2) {
    if (is_zero_coefficient(model.c2, model)) return;
    // Throws with the offending vortex named.
    (void)VortexSet::difference(v1, v2);
}

}  // namespace

BackgroundSystem composite_fields(const SystemModel& model, const VortexSet& vortices1, const VortexSet& vortices2,
                                  double mu, const GridPtr& box) {
    check_subset(model, vortices1, vortices2);
    auto b1 = planar_background(vortices1, mu, box);
    auto b2 = planar_background(vortices2, mu, box);
    BackgroundSystem out;
    out.mu = mu;
    out.u0_1 = std::move(b1.u0);
    out.u0_2 = std::move(b2.u0);
    out.g1 = std::move(b1.g);
    out.g2 = std::move(b2.g);
    out.clamped = b1.clamped;
    for (std::size_t k = 0; k < out.clamped.size(); ++k) out.clamped[k] |= b2.clamped[k];
    out.vortices1 = vortices1;
    out.vortices2 = vortices2;
    finish_composites(out, model);
    return out;
}

BackgroundSystem periodic_composite_fields(const SystemModel& model, const VortexSet& vortices1,
                                           const VortexSet& vortices2, const GridPtr& grid, double sigma) {
    check_subset(model, vortices1, vortices2);
    auto b1 = periodic_background(grid, vortices1, sigma);
    auto b2 = periodic_background(grid, vortices2, sigma);
    BackgroundSystem out;
    out.mu = 0.0;
    out.u0_1 = std::move(b1.u0);
    out.u0_2 = std::move(b2.u0);
    out.g1 = std::move(b1.g);
    out.g2 = std::move(b2.g);
    out.clamped.assign(grid->size(), 0);
    out.vortices1 = vortices1;
    out.vortices2 = vortices2;
    finish_composites(out, model);
    return out;
}

}  // namespace vortex
