#include "vortex/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace vortex {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

bool finite_all(std::initializer_list<double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

bool relative_equal(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// Records a strict inequality lhs < rhs under the given identifier.
void require_less(FeasibilityVerdict& verdict, const std::string& id, const std::string& lhs_text, double lhs,
                  const std::string& rhs_text, double rhs) {
    if (lhs < rhs) return;
    verdict.violated.push_back(id);
    verdict.messages.push_back(id + " violated: " + lhs_text + " = " + fmt(lhs) + " >= " + rhs_text + " = " +
                               fmt(rhs));
}

void require_equal(FeasibilityVerdict& verdict, const std::string& id, const std::string& lhs_text, double lhs,
                   const std::string& rhs_text, double rhs, double tol, double scale) {
    if (std::abs(lhs - rhs) <= tol * scale) return;
    verdict.violated.push_back(id);
    verdict.messages.push_back(id + " violated: " + lhs_text + " = " + fmt(lhs) + " != " + rhs_text + " = " +
                               fmt(rhs));
}

}  // namespace

bool same_point(Point a, Point b) {
    const double scale = std::max({1.0, std::abs(a.x), std::abs(a.y), std::abs(b.x), std::abs(b.y)});
    return std::abs(a.x - b.x) <= 1e-12 * scale && std::abs(a.y - b.y) <= 1e-12 * scale;
}

bool operator==(const VortexSet::Entry& a, const VortexSet::Entry& b) {
    return a.multiplicity == b.multiplicity && a.point.x == b.point.x && a.point.y == b.point.y;
}

VortexSet::VortexSet(std::vector<Entry> entries) {
    for (const auto& e : entries) add(e.point, e.multiplicity);
}

void VortexSet::add(Point p, int multiplicity) {
    if (multiplicity < 1) throw ConfigError("vortex multiplicity must be >= 1, got " + std::to_string(multiplicity));
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ConfigError("vortex location must be finite");
    for (auto& e : entries_) {
        if (same_point(e.point, p)) {
            e.multiplicity += multiplicity;
            return;
        }
    }
    entries_.push_back({p, multiplicity});
}

int VortexSet::total() const {
    int n = 0;
    for (const auto& e : entries_) n += e.multiplicity;
    return n;
}

Point VortexSet::centroid() const {
    if (entries_.empty()) return {};
    double sx = 0.0, sy = 0.0;
    for (const auto& e : entries_) {
        sx += e.multiplicity * e.point.x;
        sy += e.multiplicity * e.point.y;
    }
    const double n = total();
    return {sx / n, sy / n};
}

VortexSet VortexSet::merged(const VortexSet& a, const VortexSet& b) {
    VortexSet out = a;
    for (const auto& e : b.entries_) out.add(e.point, e.multiplicity);
    return out;
}

bool VortexSet::contains(const VortexSet& a, const VortexSet& b) {
    for (const auto& eb : b.entries_) {
        auto it = std::find_if(a.entries_.begin(), a.entries_.end(),
                               [&](const Entry& ea) { return same_point(ea.point, eb.point); });
        if (it == a.entries_.end() || it->multiplicity < eb.multiplicity) return false;
    }
    return true;
}

VortexSet VortexSet::difference(const VortexSet& a, const VortexSet& b) {
    VortexSet out;
    for (const auto& eb : b.entries_) {
        auto it = std::find_if(a.entries_.begin(), a.entries_.end(),
                               [&](const Entry& ea) { return same_point(ea.point, eb.point); });
        if (it == a.entries_.end() || it->multiplicity < eb.multiplicity) {
            std::ostringstream os;
            os << "second vortex set is not contained in the first: vortex at (" << eb.point.x << ", " << eb.point.y
               << ") with multiplicity " << eb.multiplicity
               << (it == a.entries_.end() ? " has no match" : " exceeds multiplicity " + std::to_string(it->multiplicity));
            throw ConfigError(os.str());
        }
    }
    for (const auto& ea : a.entries_) {
        int mult = ea.multiplicity;
        for (const auto& eb : b.entries_)
            if (same_point(ea.point, eb.point)) mult -= eb.multiplicity;
        if (mult > 0) out.add(ea.point, mult);
    }
    return out;
}

void ScalarModel::validate() const {
    if (!finite_all({lambda, xi, m, n, a2, b2})) throw ConfigError("scalar model parameters must be finite");
    if (lambda <= 0.0) throw ConfigError("lambda must be positive");
    if (xi <= 0.0) throw ConfigError("xi must be positive");
    if (m < 0.0 || n < 0.0) throw ConfigError("exponents m, n must be nonnegative");
    if (a2 < 0.0 || b2 < 0.0) throw ConfigError("|A|^2 and |B|^2 must be nonnegative");
    if (!(a2 + b2 > 0.0) || !(m * a2 + n * b2 > 0.0))
        throw ConfigError("need |A|^2 + |B|^2 > 0 and m|A|^2 + n|B|^2 > 0");
}

bool ScalarModel::on_vacuum(double tol) const { return relative_equal(m * a2 + n * b2, xi, tol); }

double ScalarModel::decay_rate() const { return std::sqrt(lambda * (m * m * a2 + n * n * b2)); }

void SystemModel::validate() const {
    if (!finite_all({lambda1, lambda2, xi1, xi2, a2, b2, c2})) throw ConfigError("system model parameters must be finite");
    if (lambda1 <= 0.0 || lambda2 <= 0.0) throw ConfigError("lambda1, lambda2 must be positive");
    if (xi1 <= 0.0) throw ConfigError("xi1 must be positive");
    if (m < 1) throw ConfigError("m must be a positive integer");
    if (a2 < 0.0 || b2 < 0.0 || c2 < 0.0) throw ConfigError("|A|^2, |B|^2, |C|^2 must be nonnegative");
}

bool SystemModel::on_vacuum(double tol) const {
    return relative_equal(m * a2 + b2 + c2, xi1, tol) && relative_equal(b2 - c2, xi2, tol);
}

double SystemModel::decay_rate() const {
    const double m11 = lambda1 * (m * m * a2 + b2 + c2);
    const double m12 = lambda1 * (b2 - c2);
    const double m21 = lambda2 * (b2 - c2);
    const double m22 = lambda2 * (b2 + c2);
    const double tr = m11 + m22;
    const double det = m11 * m22 - m12 * m21;
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    const double hi = tr / 2.0 + disc;
    double lo = tr / 2.0 - disc;
    // A rank-one linearization (single nonzero coupling) has one zero rate; report the other.
    if (lo <= 1e-12 * std::max(tr, 1.0)) lo = hi;
    return std::sqrt(std::max(lo, 0.0));
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::full: return "FULL";
        case Regime::ab: return "AB";
        case Regime::ac: return "AC";
        case Regime::a_only: return "A_ONLY";
        case Regime::b_only: return "B_ONLY";
        case Regime::c_only: return "C_ONLY";
        case Regime::none: return "NONE";
    }
    return "NONE";
}

bool is_zero_coefficient(double value, const SystemModel& model) {
    const double scale = std::max({model.a2, model.b2, model.c2, 1.0});
    return std::abs(value) <= 1e-12 * scale;
}

Regime classify_regime(const SystemModel& model) {
    const bool a = !is_zero_coefficient(model.a2, model);
    const bool b = !is_zero_coefficient(model.b2, model);
    const bool c = !is_zero_coefficient(model.c2, model);
    if (b && c) return Regime::full;
    if (a && b) return Regime::ab;
    if (a && c) return Regime::ac;
    if (a) return Regime::a_only;
    if (b) return Regime::b_only;
    if (c) return Regime::c_only;
    return Regime::none;
}

namespace {

std::string join_messages(const FeasibilityVerdict& v) {
    std::string out = "configuration is infeasible";
    for (const auto& m : v.messages) out += "; " + m;
    return out;
}

}  // namespace

FeasibilityError::FeasibilityError(FeasibilityVerdict verdict)
    : std::runtime_error(join_messages(verdict)), verdict_(std::move(verdict)) {}

FeasibilityVerdict feasibility_scalar_periodic(const ScalarModel& model, int n_vortices, double cell_area) {
    if (n_vortices < 0) throw ConfigError("vortex number must be nonnegative");
    if (!(cell_area > 0.0)) throw ConfigError("cell area must be positive");
    FeasibilityVerdict v;
    const double lhs = kFourPi * n_vortices / model.lambda;
    const double rhs = model.xi * cell_area;
    v.slacks["eta"] = rhs - lhs;
    require_less(v, "vortex_bound", "4*pi*N/lambda", lhs, "xi*|Omega|", rhs);
    v.feasible = v.violated.empty();
    v.near_critical = v.feasible && v.slacks["eta"] < kNearCriticalFraction * rhs;
    return v;
}

FeasibilityVerdict feasibility_system_periodic(const SystemModel& model, double n1, double n2, double cell_area,
                                               Regime regime, double equality_tolerance) {
    if (regime == Regime::none)
        throw ConfigError("all of |A|^2, |B|^2, |C|^2 vanish: the system has no nonlinearity to solve");
    if (!(cell_area > 0.0)) throw ConfigError("cell area must be positive");

    const double l1 = model.lambda1, l2 = model.lambda2, x1 = model.xi1, x2 = model.xi2;
    const double area = cell_area;
    const double flux_sum = kFourPi * (n1 / l1 + n2 / l2);
    const double flux_diff = kFourPi * (n1 / l1 - n2 / l2);

    FeasibilityVerdict v;
    const double eta1 = 0.5 * (x1 + x2) * area - 0.5 * flux_sum;
    const double eta2 = 0.5 * (x1 - x2) * area - 0.5 * flux_diff;
    v.slacks["eta1"] = eta1;
    v.slacks["eta2"] = eta2;

    const double balance_scale =
        std::max({1.0, std::abs(n1 / l1) + std::abs(n2 / l2), (std::abs(x1) + std::abs(x2)) * area / kFourPi});

    switch (regime) {
        case Regime::full:
            require_less(v, "sum_bound", "4*pi*(N1/lambda1+N2/lambda2)", flux_sum, "(xi1+xi2)*|Omega|", (x1 + x2) * area);
            require_less(v, "difference_bound", "4*pi*(N1/lambda1-N2/lambda2)", flux_diff, "(xi1-xi2)*|Omega|",
                         (x1 - x2) * area);
            break;
        case Regime::ab:
            v.slacks["eta3"] = eta1 - eta2;
            require_less(v, "difference_bound", "4*pi*(N1/lambda1-N2/lambda2)", flux_diff, "(xi1-xi2)*|Omega|",
                         (x1 - x2) * area);
            require_less(v, "second_bound", "4*pi*N2/lambda2", kFourPi * n2 / l2, "xi2*|Omega|", x2 * area);
            break;
        case Regime::ac:
            v.slacks["eta4"] = eta2 - eta1;
            require_less(v, "sum_bound", "4*pi*(N1/lambda1+N2/lambda2)", flux_sum, "(xi1+xi2)*|Omega|", (x1 + x2) * area);
            require_less(v, "second_excess", "xi2*|Omega|", x2 * area, "4*pi*N2/lambda2", kFourPi * n2 / l2);
            break;
        case Regime::a_only:
            require_less(v, "first_bound", "4*pi*N1/lambda1", kFourPi * n1 / l1, "xi1*|Omega|", x1 * area);
            break;
        case Regime::b_only:
            require_less(v, "first_bound", "4*pi*N1/lambda1", kFourPi * n1 / l1, "xi1*|Omega|", x1 * area);
            require_equal(v, "difference_balance", "N1/lambda1-N2/lambda2", n1 / l1 - n2 / l2,
                          "(xi1-xi2)*|Omega|/(4*pi)", (x1 - x2) * area / kFourPi, equality_tolerance, balance_scale);
            break;
        case Regime::c_only:
            require_less(v, "first_bound", "4*pi*N1/lambda1", kFourPi * n1 / l1, "xi1*|Omega|", x1 * area);
            require_equal(v, "sum_balance", "N1/lambda1+N2/lambda2", n1 / l1 + n2 / l2, "(xi1+xi2)*|Omega|/(4*pi)",
                          (x1 + x2) * area / kFourPi, equality_tolerance, balance_scale);
            break;
        case Regime::none: break;
    }
    v.feasible = v.violated.empty();
    if (v.feasible) {
        const double scale = kNearCriticalFraction * 0.5 * (std::abs(x1) + std::abs(x2)) * area;
        for (const auto& [name, slack] : v.slacks) {
            const bool relevant = (regime == Regime::full) || (regime == Regime::ab && (name == "eta2" || name == "eta3")) ||
                                  (regime == Regime::ac && (name == "eta1" || name == "eta4"));
            if (relevant && slack < scale) v.near_critical = true;
        }
    }
    return v;
}

SignGuarantees guaranteed_sign_properties(const SystemModel& model) {
    SignGuarantees g;
    g.vacuum = model.on_vacuum();
    const double ratio_excess = model.lambda2 / model.lambda1 - 1.0;
    const double m = model.m;
    const bool lambda_order = model.lambda2 > model.lambda1;
    g.weighted_condition = lambda_order && model.b2 > model.c2 && m * m * model.a2 < 2.0 * ratio_excess * model.c2;
    g.strong_condition =
        lambda_order && model.xi2 > 0.0 && m * model.a2 < std::min(1.0, 2.0 / m) * ratio_excess * model.c2;
    g.weighted_negative = g.vacuum && g.weighted_condition;
    g.sum_difference_negative = g.weighted_negative && g.strong_condition;
    return g;
}

}  // namespace vortex
