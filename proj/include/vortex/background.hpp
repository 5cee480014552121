#pragma once

#include <functional>
#include <vector>

#include "vortex/grid.hpp"
#include "vortex/model.hpp"

namespace vortex {

/// Singular background u₀ carrying the vortex sources, and the smooth source g it leaves behind.
///
/// Periodic: Δu₀ = g − 4πN/|Ω| with zero mean, g a sum of Gaussian bumps each
/// renormalized to discrete mass 4π·multiplicity.
/// Planar: u₀ = Σ ln(|x−p|²/(μ+|x−p|²)), g = Σ 4μ/(μ+|x−p|²)², so that
/// Δu₀ = 4πΣδ_p − g.
struct BackgroundScalar {
    Field u0;
    Field g;
    double total_mass = 0.0;
    /// Nodes where a planar background was clamped at a vortex (all zero on periodic grids).
    std::vector<unsigned char> clamped;
    VortexSet vortices;
    /// Planar regularization scale; 0 for periodic backgrounds.
    double mu = 0.0;
};

/// Default Gaussian width for periodic sources: 2·max(hx, hy).
double default_sigma(const Grid& grid);

/// Vortices are lattice-reduced into the cell. Throws ConfigError when sigma < 2·max(hx, hy)
/// or sigma exceeds a quarter of the shorter cell edge.
BackgroundScalar periodic_background(const GridPtr& grid, const VortexSet& vortices, double sigma);

/// Requires mu > 0 and every vortex inside [-3L/4, 3L/4]². Nodes closer than
/// ε = min(hx, hy)/4 to a vortex use |x−p| = ε.
BackgroundScalar planar_background(const VortexSet& vortices, double mu, const GridPtr& box);

/// Planar background evaluated at an arbitrary point (no clamping).
double planar_background_at(const VortexSet& vortices, double mu, Point x);

/// Σ mult·ln(μ + |x−p|²), whose Laplacian is the planar source g.
Field log_regularizer(const VortexSet& vortices, double mu, const GridPtr& box);
double log_regularizer_at(const VortexSet& vortices, double mu, Point x);

/// Σ mult·ln|x−p|², the fundamental-solution potential (clamped like the background).
Field log_potential(const VortexSet& vortices, const GridPtr& box);

/// Right-hand-side load of inhomogeneous Dirichlet data for the 5-point Laplacian:
/// for every interior node next to the box edge, Σ boundary_value(ghost)/h² over its
/// ghost neighbours. With Δ₀ the zero-ghost Laplacian, Δ₀v + load is the Laplacian of v
/// extended by the boundary values.
Field dirichlet_load(const GridPtr& box, const std::function<double(Point)>& boundary_value);

/// Background data for the two-field system (vortex sets 1 and 2).
///
/// h1m = e^{m u₀₁}, H1 = e^{u₀₁+u₀₂}, H2 = e^{u₀₁−u₀₂}, G1 = g1/λ₁ + g2/λ₂, G2 = g1/λ₁ − g2/λ₂.
/// H2 is formed from the exponential of the difference of backgrounds, never as a quotient.
struct BackgroundSystem {
    Field u0_1, u0_2;
    Field g1, g2;
    Field h1m, H1, H2;
    Field G1, G2;
    double mu = 0.0;
    std::vector<unsigned char> clamped;
    VortexSet vortices1, vortices2;
};

/// Planar system backgrounds. When c2 is nonzero, vortices2 must be contained in vortices1
/// (as a multiset); a violation throws ConfigError naming the offending vortex.
BackgroundSystem composite_fields(const SystemModel& model, const VortexSet& vortices1, const VortexSet& vortices2,
                                  double mu, const GridPtr& box);

/// Periodic analogue built from two Gaussian-mollified periodic backgrounds.
BackgroundSystem periodic_composite_fields(const SystemModel& model, const VortexSet& vortices1,
                                           const VortexSet& vortices2, const GridPtr& grid, double sigma);

}  // namespace vortex
