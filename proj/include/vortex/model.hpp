#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace vortex {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Raised when a model, vortex set or grid violates its construction invariants.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Prescribed vortex locations with positive integer multiplicities.
///
/// Points that coincide (up to a relative 1e-12 of their magnitude) are merged
/// and their multiplicities summed, so a VortexSet is always in canonical form.
class VortexSet {
public:
    struct Entry {
        Point point;
        int multiplicity = 1;
    };

    VortexSet() = default;
    explicit VortexSet(std::vector<Entry> entries);

    void add(Point p, int multiplicity = 1);

    const std::vector<Entry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    int total() const;

    /// Multiplicity-weighted centroid; the origin for an empty set.
    Point centroid() const;

    /// Multiset union (multiplicities add).
    static VortexSet merged(const VortexSet& a, const VortexSet& b);
    /// Multiset difference a - b. Throws ConfigError naming the first vortex of b
    /// that is not contained in a with at least the same multiplicity.
    static VortexSet difference(const VortexSet& a, const VortexSet& b);
    /// True if b is contained in a as a multiset.
    static bool contains(const VortexSet& a, const VortexSet& b);

    bool operator==(const VortexSet&) const = default;

private:
    std::vector<Entry> entries_;
};

bool operator==(const VortexSet::Entry& a, const VortexSet::Entry& b);
bool same_point(Point a, Point b);

/// Coupling constants of the scalar master equation
///   Δu = λ(m|A|² e^{mu} + n|B|² e^{nu} − ξ) + 4π Σ δ_p.
struct ScalarModel {
    double lambda = 1.0;
    double xi = 1.0;
    double m = 1.0;
    double n = 1.0;
    double a2 = 0.5;
    double b2 = 0.5;

    /// Throws ConfigError unless λ, ξ > 0, m, n ≥ 0, a2, b2 ≥ 0 and m·a2 + n·b2 > 0.
    void validate() const;
    /// m·a2 + n·b2 == ξ within relative `tol`.
    bool on_vacuum(double tol = 1e-9) const;
    /// Linearized decay rate at u = 0: sqrt(λ(m²a2 + n²b2)).
    double decay_rate() const;

    bool operator==(const ScalarModel&) const = default;
};

/// Coupling constants of the two-field system
///   Δu₁ = λ₁(m|A|²e^{mu₁} + |B|²e^{u₁+u₂} + |C|²e^{u₁−u₂} − ξ₁) + 4πΣδ_{p₁}
///   Δu₂ = λ₂(|B|²e^{u₁+u₂} − |C|²e^{u₁−u₂} − ξ₂) + 4πΣδ_{p₂}.
struct SystemModel {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double xi1 = 1.0;
    double xi2 = 0.0;
    int m = 1;
    double a2 = 0.0;
    double b2 = 0.5;
    double c2 = 0.5;

    void validate() const;
    /// m·a2 + b2 + c2 == ξ₁ and b2 − c2 == ξ₂ within relative `tol`.
    bool on_vacuum(double tol = 1e-9) const;
    /// Smallest decay rate of the system linearized at (u₁, u₂) = (0, 0).
    double decay_rate() const;

    bool operator==(const SystemModel&) const = default;
};

enum class Regime { full, ab, ac, a_only, b_only, c_only, none };

std::string to_string(Regime r);

/// Coefficient zero test used by classify_regime: |x| ≤ 1e-12·max(a2, b2, c2, 1).
bool is_zero_coefficient(double value, const SystemModel& model);

Regime classify_regime(const SystemModel& model);

struct FeasibilityVerdict {
    bool feasible = false;
    bool near_critical = false;
    /// Identifiers of violated conditions, e.g. "vortex_bound", "sum_bound".
    std::vector<std::string> violated;
    /// Human-readable line per violated condition, with numbers.
    std::vector<std::string> messages;
    std::map<std::string, double> slacks;
};

class FeasibilityError : public std::runtime_error {
public:
    explicit FeasibilityError(FeasibilityVerdict verdict);
    const FeasibilityVerdict& verdict() const { return verdict_; }

private:
    FeasibilityVerdict verdict_;
};

/// Relative tolerance used for the equality constraints of the B-only and C-only regimes.
inline constexpr double kEqualityTolerance = 1e-9;
/// Slack below this fraction of ξ|Ω| is flagged near-critical.
inline constexpr double kNearCriticalFraction = 1e-6;

/// Existence on a periodic cell: 4πN/λ < ξ|Ω|. Slack "eta" = ξ|Ω| − 4πN/λ.
FeasibilityVerdict feasibility_scalar_periodic(const ScalarModel& model, int n_vortices, double cell_area);

/// Existence conditions for the system on a periodic cell, per regime.
/// Vortex counts are real so the (N₂, ξ₂) → −(N₂, ξ₂) correspondence can be exercised.
/// Throws ConfigError for Regime::none.
FeasibilityVerdict feasibility_system_periodic(const SystemModel& model, double n1, double n2, double cell_area,
                                               Regime regime,
                                               double equality_tolerance = kEqualityTolerance);

struct SignGuarantees {
    bool vacuum = false;
    /// λ₂ > λ₁, b2 > c2 and m²a2 < 2(λ₂/λ₁ − 1)c2.
    bool weighted_condition = false;
    /// λ₂ > λ₁, ξ₂ > 0 and m·a2 < min{1, 2/m}(λ₂/λ₁ − 1)c2.
    bool strong_condition = false;
    /// u₁/λ₁ ± u₂/λ₂ < 0 and u₁ < 0.
    bool weighted_negative = false;
    /// u₁ ± u₂ < 0 in addition.
    bool sum_difference_negative = false;
};

/// Sign properties implied by the model alone. Guarantees are only granted on the
/// vacuum manifold, since the maximum-principle arguments use the vacuum form.
SignGuarantees guaranteed_sign_properties(const SystemModel& model);

}  // namespace vortex
