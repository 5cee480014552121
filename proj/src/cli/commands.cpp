#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vortex/cli.hpp"
#include "vortex/field_io.hpp"

namespace vortex::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

// NaN and infinities become null so the report stays valid JSON.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string fixed(double x, int digits = 6) {
    std::ostringstream ss;
    ss << std::setprecision(digits) << x;
    return ss.str();
}

std::vector<std::string> component_names(const Solution& s) {
    return s.is_system() ? std::vector<std::string>{"1", "2"} : std::vector<std::string>{""};
}

Point plot_center(const Solution& s) {
    const VortexSet all = VortexSet::merged(s.vortices1, s.vortices2);
    if (!all.empty()) return all.centroid();
    const Grid& g = *s.grid;
    return s.grid->is_periodic() ? Point{g.lx() / 2.0, g.ly() / 2.0} : Point{0.0, 0.0};
}

// Columns x, u[, u2] along the grid row nearest the vortex centroid.
void write_linecut(const fs::path& path, const Solution& s) {
    const Grid& g = *s.grid;
    const Point c = plot_center(s);
    int row = 0;
    for (int j = 1; j < g.ny(); ++j)
        if (std::abs(g.y(j) - c.y) < std::abs(g.y(row) - c.y)) row = j;
    std::ofstream out(path);
    out << std::setprecision(17);
    out << "# line cut at y = " << g.y(row) << "\n# x";
    for (const auto& n : component_names(s)) out << " u" << n;
    out << "\n";
    for (int i = 0; i < g.nx(); ++i) {
        out << g.x(i);
        for (const auto& u : s.u) out << ' ' << u.at(i, row);
        out << "\n";
    }
}

// Ring averages of u about the vortex centroid.
void write_radial(const fs::path& path, const Solution& s) {
    const Grid& g = *s.grid;
    const Point c = plot_center(s);
    const double rmax = 0.5 * std::min(g.lx(), g.ly());
    const double dr = std::max(g.hx(), g.hy());
    std::ofstream out(path);
    out << std::setprecision(17);
    out << "# ring averages about (" << c.x << ", " << c.y << ")\n# r";
    for (const auto& n : component_names(s)) out << " u" << n;
    out << "\n";
    for (double r = dr; r < rmax; r += dr) {
        std::vector<double> row;
        for (const auto& u : s.u) {
            const auto avg = ring_average(u, c, r);
            if (!avg) break;
            row.push_back(*avg);
        }
        if (row.size() != s.u.size()) break;
        out << r;
        for (double x : row) out << ' ' << x;
        out << "\n";
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_fields(const fs::path& dir, const Solution& s) {
    const auto names = component_names(s);
    for (std::size_t c = 0; c < names.size(); ++c) {
        write_field(dir / ("u" + names[c] + ".vxf"), s.u[c]);
        write_field(dir / ("v" + names[c] + ".vxf"), s.v[c]);
    }
}

double worst_residual(const Solution& s) {
    double worst = 0.0;
    for (const auto& r : s.diagnostics.residuals) worst = std::max(worst, r.rel_error);
    return worst;
}

void print_diagnostics(std::ostream& out, const DiagnosticsReport& d) {
    for (const auto& r : d.residuals)
        out << "  " << std::left << std::setw(24) << r.name << std::right << " rel_error " << std::setw(12)
            << fixed(r.rel_error, 4) << "  tol " << fixed(r.tolerance, 3) << "  " << (r.pass ? "pass" : "FAIL")
            << (r.note.empty() ? "" : "  (" + r.note + ")") << "\n";
    for (const auto& sc : d.signs)
        out << "  max " << std::left << std::setw(20) << sc.name << std::right << std::setw(13) << fixed(sc.max, 4)
            << "  " << (sc.guaranteed ? (sc.pass ? "pass" : "FAIL") : "reported") << "\n";
    if (d.decay)
        out << "  decay rate " << fixed(d.decay->rate, 5) << " (linearized " << fixed(d.decay->expected_rate, 5)
            << "), R^2 " << fixed(d.decay->r_squared, 5) << "  " << (d.decay->pass ? "pass" : "FAIL") << "\n";
    if (d.log_growth)
        out << "  log growth " << fixed(d.log_growth->coefficient, 5) << " (expected " << fixed(d.log_growth->expected, 5)
            << ")  " << (d.log_growth->pass ? "pass" : "FAIL") << "\n";
    if (d.uniqueness_spread)
        out << "  uniqueness spread " << fixed(*d.uniqueness_spread, 3) << "  "
            << (*d.uniqueness_spread <= kUniquenessTolerance ? "pass" : "FAIL") << "\n";
    if (d.pde_residual) out << "  pde residual (informational) " << fixed(*d.pde_residual, 3) << "\n";
    for (const auto& s : d.skipped) out << "  skipped " << s << "\n";
}

void print_verdict(std::ostream& out, const FeasibilityVerdict& v) {
    out << "feasible: " << (v.feasible ? "yes" : "no") << (v.near_critical ? " (near-critical)" : "") << "\n";
    for (const auto& [name, value] : v.slacks) out << "  slack " << name << " = " << std::setprecision(10) << value << "\n";
    for (const auto& m : v.messages) out << "  " << m << "\n";
}

struct Overrides {
    std::optional<int> grid;
    std::optional<double> box;
    std::optional<double> mu;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> probe;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--grid", o.grid, "Nodes per direction (periodic cell or planar box interior)");
    cmd->add_option("--box", o.box, "Planar box half-width L");
    cmd->add_option("--mu", o.mu, "Planar background parameter mu");
    cmd->add_option("--seed", o.seed, "Seed for random initial fields");
    cmd->add_option("--out", o.out, "Output directory");
}

void apply(const Overrides& o, RunConfig& c) {
    if (o.grid) {
        if (*o.grid < 16) throw ConfigParseError("--grid", 0, "grid must be at least 16");
        if (c.is_planar()) {
            c.box.n = *o.grid;
        } else {
            if (*o.grid % 2 != 0) throw ConfigParseError("--grid", 0, "periodic grids need an even node count");
            c.cell.nx = c.cell.ny = *o.grid;
        }
    }
    if (o.box) {
        if (!c.is_planar()) throw ConfigParseError("--box", 0, "--box only applies to planar problems");
        if (!(*o.box > 0.0)) throw ConfigParseError("--box", 0, "box half-width must be positive");
        c.box.half_width = *o.box;
    }
    if (o.mu) {
        if (!c.is_planar()) throw ConfigParseError("--mu", 0, "--mu only applies to planar problems");
        if (!(*o.mu > 0.0)) throw ConfigParseError("--mu", 0, "mu must be positive");
        c.mu = *o.mu;
    }
    if (o.seed) c.seed = c.solver.seed = *o.seed;
    if (o.out) c.output = *o.out;
    if (o.probe) {
        if (*o.probe < 0 || *o.probe == 1) throw ConfigParseError("--probe", 0, "probe must be 0 or at least 2");
        c.probe = *o.probe;
    }
}

// Planar problems have no feasibility inequality; the solvability preconditions are the
// vacuum constraints and, for |C|² > 0, the subset condition.
bool check_planar(std::ostream& out, const RunConfig& c) {
    bool ok = true;
    if (c.is_system()) {
        const auto regime = classify_regime(c.system);
        out << "regime: " << to_string(regime) << "\n";
        if (regime == Regime::none) {
            out << "  all of |A|^2, |B|^2, |C|^2 vanish\n";
            ok = false;
        }
        const bool vac = c.system.on_vacuum();
        out << "vacuum: " << (vac ? "satisfied" : "violated (need m*a2 + b2 + c2 = xi1 and b2 - c2 = xi2)") << "\n";
        ok = ok && vac;
        if (!is_zero_coefficient(c.system.c2, c.system)) {
            const bool sub = VortexSet::contains(c.vortices1, c.vortices2);
            out << "subset: " << (sub ? "satisfied" : "violated (second vortex set must lie in the first)") << "\n";
            ok = ok && sub;
        }
    } else {
        const bool vac = c.scalar.on_vacuum();
        out << "vacuum: " << (vac ? "satisfied" : "violated (need m*a2 + n*b2 = xi)") << "\n";
        ok = vac;
    }
    out << "feasible: " << (ok ? "yes" : "no") << "\n";
    return ok;
}

void print_guarantees(std::ostream& out, const SystemModel& m) {
    const auto g = guaranteed_sign_properties(m);
    out << "sign guarantees:\n"
        << "  u1 < 0, u1/lambda1 +- u2/lambda2 < 0: " << (g.weighted_negative ? "yes" : "no") << "\n"
        << "  u1 +- u2 < 0: " << (g.sum_difference_negative ? "yes" : "no") << "\n";
}

int cmd_check(const RunConfig& c, std::ostream& out) {
    out << "problem: " << to_string(c.problem) << "\n";
    bool ok;
    if (c.is_planar()) {
        ok = check_planar(out, c);
    } else {
        const auto grid = make_grid(c);
        FeasibilityVerdict v;
        if (c.is_system()) {
            const auto regime = classify_regime(c.system);
            out << "regime: " << to_string(regime) << "\n";
            if (regime == Regime::none) {
                out << "feasible: no\n  all of |A|^2, |B|^2, |C|^2 vanish\n";
                return kFailed;
            }
            v = feasibility_system_periodic(c.system, c.vortices1.total(), c.vortices2.total(), grid->area(), regime);
        } else {
            v = feasibility_scalar_periodic(c.scalar, c.vortices1.total(), grid->area());
        }
        print_verdict(out, v);
        ok = v.feasible;
    }
    if (c.is_system()) print_guarantees(out, c.system);
    return ok ? kSuccess : kFailed;
}

Solution solve_with_probe(const RunConfig& c) {
    Solution s = run_pipeline(c, c.solver);
    if (c.probe >= 2) {
        const auto pipeline = [&](const SolverOptions& o) { return run_pipeline(c, o); };
        s.diagnostics.uniqueness_spread = uniqueness_probe(pipeline, c.solver, c.probe, c.seed);
    }
    return s;
}

int cmd_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    Solution s;
    try {
        s = solve_with_probe(c);
    } catch (const FeasibilityError& e) {
        err << "infeasible configuration\n";
        print_verdict(err, e.verdict());
        return kFailed;
    } catch (const ConvergenceError& e) {
        const auto& r = e.report();
        err << "solver did not converge: " << to_string(r.status) << " after " << r.iterations
            << " iterations, residual " << fixed(r.gradient_norm, 3) << "\n";
        return kNotConverged;
    } catch (const ConfigError& e) {
        err << "cannot solve: " << e.what() << "\n";
        return kFailed;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const fs::path dir = c.output;
    fs::create_directories(dir);
    write_text(dir / "config.json", to_json_text(c));
    write_text(dir / "report.json", report_json(c, s));
    write_fields(dir, s);
    write_linecut(dir / "linecut.dat", s);
    write_radial(dir / "radial.dat", s);

    const bool pass = s.diagnostics.pass();
    out << to_string(s.problem_class);
    if (s.is_system()) out << " (" << to_string(s.regime) << ")";
    out << ": converged in " << s.report.iterations << " Newton steps (" << s.report.cg_iterations
        << " CG), energy " << std::setprecision(12) << s.report.energy << ", residual "
        << fixed(s.report.gradient_norm, 3) << ", " << fixed(seconds, 3) << " s\n";
    print_diagnostics(out, s.diagnostics);
    out << "checks: " << (pass ? "PASS" : "FAIL") << "\nwrote " << dir.string() << "\n";
    return pass ? kSuccess : kFailed;
}

// Deterministic layout of n unit vortices: the centre for one, otherwise a ring.
VortexSet vortex_layout(const RunConfig& c, int n) {
    VortexSet set;
    if (n <= 0) return set;
    const Point center = c.is_planar() ? Point{0.0, 0.0} : Point{c.cell.lx / 2.0, c.cell.ly / 2.0};
    const double radius = c.is_planar() ? 1.0 : 0.25 * std::min(c.cell.lx, c.cell.ly);
    if (n == 1) {
        set.add(center);
        return set;
    }
    for (int k = 0; k < n; ++k) {
        const double t = 2.0 * std::numbers::pi * k / n;
        set.add({center.x + radius * std::cos(t), center.y + radius * std::sin(t)});
    }
    return set;
}

// Feasibility slack of the periodic problems (the smallest slack); NaN on the plane.
double slack_of(const RunConfig& c) {
    if (c.is_planar()) return std::nan("");
    const double area = c.cell.lx * c.cell.ly;
    FeasibilityVerdict v;
    if (c.is_system()) {
        const auto regime = classify_regime(c.system);
        if (regime == Regime::none) return std::nan("");
        v = feasibility_system_periodic(c.system, c.vortices1.total(), c.vortices2.total(), area, regime);
    } else {
        v = feasibility_scalar_periodic(c.scalar, c.vortices1.total(), area);
    }
    double slack = std::numeric_limits<double>::infinity();
    for (const auto& [name, value] : v.slacks) slack = std::min(slack, value);
    return slack;
}

int cmd_sweep(RunConfig base, const std::string& param, const std::vector<double>& values, std::ostream& out,
              std::ostream& err) {
    static const std::set<std::string> known = {"N", "area", "lambda", "mu", "grid"};
    if (!known.count(param)) {
        err << "unknown sweep parameter '" << param << "' (expected N, area, lambda, mu or grid)\n";
        return kUsage;
    }
    if (param == "mu" && !base.is_planar()) {
        err << "mu sweeps need a planar problem\n";
        return kUsage;
    }
    if (param == "area" && base.is_planar()) {
        err << "area sweeps need a periodic problem\n";
        return kUsage;
    }
    // The mu sweep compares fields, so every row must use the same box.
    if (param == "mu") base.box.half_width = box_half_width(base);

    out << "# sweep of " << param << " for " << to_string(base.problem) << "\n";
    out << "# value outcome slack iterations residual" << (param == "mu" ? " u_diff" : "") << "\n";
    std::optional<Solution> first;
    bool any_failed = false;
    for (double value : values) {
        RunConfig c = base;
        std::string bad;
        if (param == "N") {
            if (value < 0 || value != std::floor(value)) bad = "N must be a non-negative integer";
            else c.vortices1 = vortex_layout(c, static_cast<int>(value));
        } else if (param == "area") {
            if (!(value > 0.0)) {
                bad = "area must be positive";
            } else {
                const double s = std::sqrt(value / (c.cell.lx * c.cell.ly));
                c.cell.lx *= s;
                c.cell.ly *= s;
                VortexSet scaled1, scaled2;
                for (const auto& e : c.vortices1.entries()) scaled1.add({e.point.x * s, e.point.y * s}, e.multiplicity);
                for (const auto& e : c.vortices2.entries()) scaled2.add({e.point.x * s, e.point.y * s}, e.multiplicity);
                c.vortices1 = scaled1;
                c.vortices2 = scaled2;
            }
        } else if (param == "lambda") {
            if (!(value > 0.0)) bad = "lambda must be positive";
            else if (c.is_system()) c.system.lambda1 = value;
            else c.scalar.lambda = value;
        } else if (param == "mu") {
            if (!(value > 0.0)) bad = "mu must be positive";
            else c.mu = value;
        } else {
            const int n = static_cast<int>(value);
            if (value != n || n < 16 || (!c.is_planar() && n % 2 != 0)) bad = "grid must be an integer >= 16 (even if periodic)";
            else if (c.is_planar()) c.box.n = n;
            else c.cell.nx = c.cell.ny = n;
        }
        if (!bad.empty()) {
            err << "row " << value << ": " << bad << "\n";
            return kUsage;
        }

        out << std::setprecision(10) << value << ' ';
        const double slack_value = slack_of(c);
        std::ostringstream slack_text;
        slack_text << std::setprecision(8) << slack_value;
        const std::string slack = std::isnan(slack_value) ? "-" : slack_text.str();
        try {
            Solution s = run_pipeline(c, c.solver);
            out << "converged " << slack << ' ' << s.report.iterations << ' '
                << std::setprecision(6) << worst_residual(s);
            if (param == "mu") {
                double diff = 0.0;
                if (first) {
                    for (std::size_t k = 0; k < s.u[0].size(); ++k)
                        if (!s.clamped[k] && !first->clamped[k])
                            for (std::size_t j = 0; j < s.u.size(); ++j)
                                diff = std::max(diff, std::abs(s.u[j][k] - first->u[j][k]));
                } else {
                    first = std::move(s);
                }
                out << ' ' << diff;
            }
            out << "\n";
        } catch (const FeasibilityError&) {
            out << "rejected " << slack << " - -" << (param == "mu" ? " -" : "") << "\n";
        } catch (const ConfigError& e) {
            out << "rejected " << slack << " - -" << (param == "mu" ? " -" : "") << "  # "
                << e.what() << "\n";
        } catch (const ConvergenceError& e) {
            any_failed = true;
            out << "failed " << slack << ' ' << e.report().iterations << " -"
                << (param == "mu" ? " -" : "") << "\n";
        }
    }
    return any_failed ? kFailed : kSuccess;
}

// Euler–Lagrange residual of the stored regular parts, for the classes solved by one functional.
std::optional<double> stored_gradient_norm(const RunConfig& c, const Solution& s) {
    std::unique_ptr<Problem> problem;
    if (c.problem == ProblemClass::scalar_periodic) {
        problem = build_problem(c.problem, c.scalar, periodic_background(s.grid, c.vortices1, s.sigma));
    } else if (c.problem == ProblemClass::scalar_planar) {
        problem = build_problem(c.problem, c.scalar, planar_background(c.vortices1, c.mu, s.grid));
    } else if (s.regime == Regime::full || s.regime == Regime::ab || s.regime == Regime::ac) {
        const auto bg = c.problem == ProblemClass::system_periodic
                            ? periodic_composite_fields(c.system, c.vortices1, c.vortices2, s.grid, s.sigma)
                            : composite_fields(c.system, c.vortices1, c.vortices2, c.mu, s.grid);
        problem = build_problem(c.problem, c.system, bg);
    } else {
        return std::nullopt;
    }
    std::vector<double> v;
    for (const auto& f : s.v) v.insert(v.end(), f.samples().begin(), f.samples().end());
    double norm = 0.0;
    for (double g : gradient(*problem, v)) norm = std::max(norm, std::abs(g));
    return norm;
}

int cmd_verify(const fs::path& target, std::ostream& out, std::ostream& err) {
    const fs::path dir = fs::is_directory(target) ? target : target.parent_path();
    if (!fs::exists(dir / "config.json")) {
        err << "no config.json next to " << target.string() << "\n";
        return kUsage;
    }
    const RunConfig c = load_config(dir / "config.json");
    const auto grid = make_grid(c);
    const std::vector<std::string> names = c.is_system() ? std::vector<std::string>{"1", "2"}
                                                         : std::vector<std::string>{""};
    std::vector<Field> v, u;
    for (const auto& n : names) {
        for (const auto& [prefix, target_list] : {std::pair{"v", &v}, std::pair{"u", &u}}) {
            const fs::path file = dir / (std::string(prefix) + n + ".vxf");
            if (!fs::exists(file)) {
                err << "missing " << file.string() << "\n";
                return kUsage;
            }
            Field f = read_field(file);
            if (!f.grid().same_layout(*grid)) {
                err << file.string() << ": header " << field_header(f.grid()) << " does not match the configuration\n";
                return kFailed;
            }
            target_list->push_back(Field(grid, std::move(f.samples())));
        }
    }

    Solution s;
    try {
        s = assemble_solution(c.problem, c.scalar, c.system, c.vortices1, c.vortices2, grid, c.mu, c.sigma, v);
    } catch (const ConfigError& e) {
        err << "cannot rebuild the solution: " << e.what() << "\n";
        return kFailed;
    }

    bool pass = true;
    for (std::size_t j = 0; j < u.size(); ++j) {
        double diff = 0.0;
        for (std::size_t k = 0; k < u[j].size(); ++k) diff = std::max(diff, std::abs(u[j][k] - s.u[j][k]));
        const bool ok = diff <= 1e-12 * (1.0 + u[j].max_abs());
        out << "  u" << names[j] << " = u0 + v" << names[j] << "   max deviation " << fixed(diff, 3) << "  "
            << (ok ? "pass" : "FAIL") << "\n";
        pass = pass && ok;
    }
    if (const auto g = stored_gradient_norm(c, s)) {
        const bool ok = *g <= c.solver.grad_tol;
        out << "  euler-lagrange residual " << fixed(*g, 3) << "  tol " << fixed(c.solver.grad_tol, 3) << "  "
            << (ok ? "pass" : "FAIL") << "\n";
        pass = pass && ok;
    } else {
        out << "  euler-lagrange residual: not applicable to the " << to_string(s.regime) << " reduction\n";
    }
    print_diagnostics(out, s.diagnostics);
    pass = pass && s.diagnostics.pass();
    out << "verify: " << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kSuccess : kFailed;
}

}  // namespace

std::string report_json(const RunConfig& c, const Solution& s) {
    json doc;
    doc["problem"] = to_string(s.problem_class);
    if (s.is_system()) doc["regime"] = to_string(s.regime);
    doc["grid"] = field_header(*s.grid);
    const auto& r = s.report;
    doc["solve"] = {{"status", to_string(r.status)},
                    {"iterations", r.iterations},
                    {"cg_iterations", r.cg_iterations},
                    {"energy", number(r.energy)},
                    {"gradient_norm", number(r.gradient_norm)},
                    {"roundoff_steps", r.roundoff_steps},
                    {"initial_guess", r.initial_guess},
                    {"seed", c.seed},
                    {"energy_history", json::array()}};
    for (double e : r.energy_history) doc["solve"]["energy_history"].push_back(number(e));

    const auto& d = s.diagnostics;
    json residuals = json::object();
    for (const auto& x : d.residuals) {
        residuals[x.name] = {{"value", number(x.value)},
                             {"rhs", number(x.rhs)},
                             {"rel_error", number(x.rel_error)},
                             {"tolerance", x.tolerance},
                             {"pass", x.pass}};
        if (!x.note.empty()) residuals[x.name]["note"] = x.note;
    }
    doc["residuals"] = residuals;
    json signs = json::object();
    for (const auto& x : d.signs) signs[x.name] = {{"max", number(x.max)}, {"guaranteed", x.guaranteed}, {"pass", x.pass}};
    doc["signs"] = signs;
    if (d.decay)
        doc["decay"] = {{"rate", number(d.decay->rate)},
                        {"r_squared", number(d.decay->r_squared)},
                        {"window", {d.decay->window_min, d.decay->window_max}},
                        {"expected_rate", number(d.decay->expected_rate)},
                        {"pass", d.decay->pass}};
    if (d.log_growth)
        doc["log_growth"] = {{"coefficient", number(d.log_growth->coefficient)},
                             {"expected", number(d.log_growth->expected)},
                             {"rel_error", number(d.log_growth->rel_error)},
                             {"r_squared", number(d.log_growth->r_squared)},
                             {"tolerance", d.log_growth->tolerance},
                             {"pass", d.log_growth->pass}};
    if (d.uniqueness_spread)
        doc["uniqueness"] = {{"spread", number(*d.uniqueness_spread)},
                             {"starts", c.probe},
                             {"tolerance", kUniquenessTolerance},
                             {"pass", *d.uniqueness_spread <= kUniquenessTolerance}};
    if (d.pde_residual) doc["pde_residual"] = number(*d.pde_residual);
    doc["skipped"] = d.skipped;
    doc["pass"] = d.pass();
    return doc.dump(2) + "\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Vortex master-equation solver"};
    app.require_subcommand(1);

    std::string config_path, verify_path, param;
    std::vector<double> values;
    Overrides overrides;

    auto* check = app.add_subcommand("check", "Report feasibility, regime and sign guarantees");
    check->add_option("config", config_path, "Configuration file")->required();
    add_override_flags(check, overrides);

    auto* solve = app.add_subcommand("solve", "Solve and write fields, report and plot tables");
    solve->add_option("config", config_path, "Configuration file")->required();
    add_override_flags(solve, overrides);
    solve->add_option("--probe", overrides.probe, "Run the uniqueness probe with this many random starts");

    auto* sweep = app.add_subcommand("sweep", "Solve across a parameter range, one row per value");
    sweep->add_option("config", config_path, "Configuration file")->required();
    sweep->add_option("--param", param, "N, area, lambda, mu or grid")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
    add_override_flags(sweep, overrides);

    auto* verify = app.add_subcommand("verify", "Re-check a solve output directory (or a dump inside it)");
    verify->add_option("dump", verify_path, "Output directory or field dump")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << "run with --help for usage\n";
        return kUsage;
    }

    try {
        if (verify->parsed()) return cmd_verify(verify_path, out, err);
        RunConfig config = load_config(config_path);
        apply(overrides, config);
        if (check->parsed()) return cmd_check(config, out);
        if (solve->parsed()) return cmd_solve(config, out, err);
        return cmd_sweep(config, param, values, out, err);
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailed;
    }
}

}  // namespace vortex::cli
