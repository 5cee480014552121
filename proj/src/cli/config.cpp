#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vortex/cli.hpp"

namespace vortex::cli {

using json = nlohmann::json;

namespace {

// JSON pointer → 1-based line where the key (or array element) appears. nlohmann::json does
// not keep source positions, so a small scanner walks the text once after a successful parse.
class LineIndex {
public:
    explicit LineIndex(const std::string& text) { scan(text); }

    int line_of(std::string pointer) const {
        while (true) {
            if (auto it = lines_.find(pointer); it != lines_.end()) return it->second;
            if (pointer.empty()) return 1;
            pointer.erase(pointer.rfind('/'));
        }
    }

private:
    struct Frame {
        bool object;
        std::string path;
        std::string key;
        int index = 0;
        bool expect_key = false;
    };

    std::map<std::string, int> lines_;
    std::vector<Frame> stack_;

    static std::string escape(const std::string& key) {
        std::string out;
        for (char c : key) {
            if (c == '~') out += "~0";
            else if (c == '/') out += "~1";
            else out += c;
        }
        return out;
    }

    std::string value_path() const {
        if (stack_.empty()) return "";
        const Frame& top = stack_.back();
        return top.path + "/" + (top.object ? escape(top.key) : std::to_string(top.index));
    }

    void record(const std::string& path, int line) { lines_.emplace(path, line); }

    void scan(const std::string& text) {
        int line = 1;
        for (std::size_t i = 0; i < text.size(); ++i) {
            const char c = text[i];
            if (c == '\n') {
                ++line;
            } else if (c == '{' || c == '[') {
                const std::string path = value_path();
                record(path, line);
                stack_.push_back({c == '{', path, {}, 0, c == '{'});
            } else if (c == '}' || c == ']') {
                if (!stack_.empty()) stack_.pop_back();
            } else if (c == ',') {
                if (stack_.empty()) continue;
                if (stack_.back().object) stack_.back().expect_key = true;
                else ++stack_.back().index;
            } else if (c == '"') {
                std::string s;
                for (++i; i < text.size() && text[i] != '"'; ++i) {
                    if (text[i] == '\\' && i + 1 < text.size()) ++i;
                    s += text[i];
                }
                if (!stack_.empty() && stack_.back().object && stack_.back().expect_key) {
                    stack_.back().key = s;
                    stack_.back().expect_key = false;
                    record(value_path(), line);
                } else {
                    record(value_path(), line);
                }
            } else if (c != ':' && !std::isspace(static_cast<unsigned char>(c))) {
                record(value_path(), line);
                while (i + 1 < text.size() && std::string_view(",]}\n \t\r").find(text[i + 1]) == std::string_view::npos)
                    ++i;
            }
        }
    }
};

int line_at_byte(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    int line = 1;
    for (std::size_t i = 0; i + 1 < byte; ++i)
        if (text[i] == '\n') ++line;
    return line;
}

class Reader {
public:
    Reader(const std::string& text, std::string source) : index_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
        throw ConfigParseError(source_, index_.line_of(pointer), message + (pointer.empty() ? "" : " (" + pointer + ")"));
    }

    void only_keys(const json& obj, const std::string& pointer, const std::set<std::string>& allowed) const {
        if (!obj.is_object()) fail(pointer, "expected an object");
        for (const auto& [key, value] : obj.items())
            if (!allowed.count(key)) fail(pointer + "/" + key, "unknown key '" + key + "'");
    }

    double number(const json& v, const std::string& pointer) const {
        if (!v.is_number()) fail(pointer, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(pointer, "expected a finite number");
        return x;
    }

    long long integer(const json& v, const std::string& pointer) const {
        if (v.is_number_integer()) return v.get<long long>();
        if (v.is_number_float()) {
            const double x = v.get<double>();
            if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15) return static_cast<long long>(x);
        }
        fail(pointer, "expected an integer");
    }

    std::string string(const json& v, const std::string& pointer) const {
        if (!v.is_string()) fail(pointer, "expected a string");
        return v.get<std::string>();
    }

    // |A|² from a real number or a [re, im] pair.
    double modulus_squared(const json& v, const std::string& pointer) const {
        if (v.is_array()) {
            if (v.size() != 2) fail(pointer, "complex constant must be [re, im]");
            const double re = number(v[0], pointer + "/0"), im = number(v[1], pointer + "/1");
            return re * re + im * im;
        }
        const double x = number(v, pointer);
        return x * x;
    }

private:
    LineIndex index_;
    std::string source_;
};

ProblemClass parse_problem(const std::string& name, const Reader& r) {
    std::string upper;
    for (char c : name) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (auto cls : {ProblemClass::scalar_periodic, ProblemClass::system_periodic, ProblemClass::scalar_planar,
                     ProblemClass::system_planar})
        if (to_string(cls) == upper) return cls;
    r.fail("/problem", "unknown problem class '" + name +
                           "' (expected scalar_periodic, system_periodic, scalar_planar or system_planar)");
}

// Reads a squared constant given either as "a2" or as the complex constant "A".
void read_constant(const json& model, const Reader& r, const char* squared, const char* complex, double& target) {
    const bool has_sq = model.contains(squared), has_c = model.contains(complex);
    if (has_sq && has_c)
        r.fail(std::string("/model/") + complex, std::string("give either '") + squared + "' or '" + complex + "'");
    if (has_sq) target = r.number(model[squared], std::string("/model/") + squared);
    if (has_c) target = r.modulus_squared(model[complex], std::string("/model/") + complex);
}

ScalarModel parse_scalar(const json& model, const Reader& r) {
    r.only_keys(model, "/model", {"lambda", "xi", "m", "n", "a2", "b2", "A", "B"});
    ScalarModel s;
    if (model.contains("lambda")) s.lambda = r.number(model["lambda"], "/model/lambda");
    if (model.contains("m")) s.m = r.number(model["m"], "/model/m");
    if (model.contains("n")) s.n = r.number(model["n"], "/model/n");
    read_constant(model, r, "a2", "A", s.a2);
    read_constant(model, r, "b2", "B", s.b2);
    // ξ defaults to its vacuum value.
    s.xi = model.contains("xi") ? r.number(model["xi"], "/model/xi") : s.m * s.a2 + s.n * s.b2;
    try {
        s.validate();
    } catch (const ConfigError& e) {
        r.fail("/model", e.what());
    }
    return s;
}

SystemModel parse_system(const json& model, const Reader& r) {
    r.only_keys(model, "/model", {"lambda1", "lambda2", "xi1", "xi2", "m", "a2", "b2", "c2", "A", "B", "C"});
    SystemModel s;
    if (model.contains("lambda1")) s.lambda1 = r.number(model["lambda1"], "/model/lambda1");
    if (model.contains("lambda2")) s.lambda2 = r.number(model["lambda2"], "/model/lambda2");
    if (model.contains("m")) {
        const long long m = r.integer(model["m"], "/model/m");
        if (m < 1 || m > 1000) r.fail("/model/m", "m must be a positive integer");
        s.m = static_cast<int>(m);
    }
    read_constant(model, r, "a2", "A", s.a2);
    read_constant(model, r, "b2", "B", s.b2);
    read_constant(model, r, "c2", "C", s.c2);
    s.xi1 = model.contains("xi1") ? r.number(model["xi1"], "/model/xi1") : s.m * s.a2 + s.b2 + s.c2;
    s.xi2 = model.contains("xi2") ? r.number(model["xi2"], "/model/xi2") : s.b2 - s.c2;
    try {
        s.validate();
    } catch (const ConfigError& e) {
        r.fail("/model", e.what());
    }
    return s;
}

VortexSet parse_vortices(const json& list, const std::string& pointer, const Reader& r) {
    if (!list.is_array()) r.fail(pointer, "expected a list of vortices");
    VortexSet set;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string p = pointer + "/" + std::to_string(i);
        const json& e = list[i];
        Point pt;
        long long mult = 1;
        if (e.is_array()) {
            if (e.size() != 2 && e.size() != 3) r.fail(p, "vortex must be [x, y] or [x, y, multiplicity]");
            pt = {r.number(e[0], p + "/0"), r.number(e[1], p + "/1")};
            if (e.size() == 3) mult = r.integer(e[2], p + "/2");
        } else if (e.is_object()) {
            r.only_keys(e, p, {"x", "y", "multiplicity"});
            if (!e.contains("x") || !e.contains("y")) r.fail(p, "vortex needs 'x' and 'y'");
            pt = {r.number(e["x"], p + "/x"), r.number(e["y"], p + "/y")};
            if (e.contains("multiplicity")) mult = r.integer(e["multiplicity"], p + "/multiplicity");
        } else {
            r.fail(p, "vortex must be [x, y, multiplicity] or {\"x\", \"y\", \"multiplicity\"}");
        }
        if (mult < 1 || mult > 1000000) r.fail(p, "multiplicity must be a positive integer");
        set.add(pt, static_cast<int>(mult));
    }
    return set;
}

SolverOptions parse_solver(const json& s, const Reader& r) {
    r.only_keys(s, "/solver",
                {"grad_tol", "max_newton", "cg_tol", "max_cg", "armijo_c", "backtrack", "max_backtracks",
                 "initial_guess"});
    SolverOptions o;
    const auto num = [&](const char* key, double& target) {
        if (s.contains(key)) target = r.number(s[key], std::string("/solver/") + key);
    };
    const auto count = [&](const char* key, int& target) {
        if (!s.contains(key)) return;
        const long long v = r.integer(s[key], std::string("/solver/") + key);
        if (v < 1 || v > 1000000) r.fail(std::string("/solver/") + key, "expected a positive count");
        target = static_cast<int>(v);
    };
    num("grad_tol", o.grad_tol);
    num("cg_tol", o.cg_tol);
    num("armijo_c", o.armijo_c);
    num("backtrack", o.backtrack);
    count("max_newton", o.max_newton);
    count("max_cg", o.max_cg);
    count("max_backtracks", o.max_backtracks);
    if (s.contains("initial_guess")) {
        const std::string g = r.string(s["initial_guess"], "/solver/initial_guess");
        if (g == "zero") o.initial_guess = InitialGuess::zero;
        else if (g == "random") o.initial_guess = InitialGuess::random;
        else r.fail("/solver/initial_guess", "initial_guess must be 'zero' or 'random'");
    }
    try {
        o.validate();
    } catch (const ConfigError& e) {
        r.fail("/solver", e.what());
    }
    return o;
}

json vortex_json(const VortexSet& set) {
    json list = json::array();
    for (const auto& e : set.entries()) list.push_back({e.point.x, e.point.y, e.multiplicity});
    return list;
}

}  // namespace

ConfigParseError::ConfigParseError(const std::string& source, int line, const std::string& message)
    : ConfigError(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message), line_(line) {}

bool RunConfig::is_system() const {
    return problem == ProblemClass::system_periodic || problem == ProblemClass::system_planar;
}

bool RunConfig::is_planar() const {
    return problem == ProblemClass::scalar_planar || problem == ProblemClass::system_planar;
}

bool RunConfig::operator==(const RunConfig& o) const {
    const auto& a = solver;
    const auto& b = o.solver;
    const bool same_solver = a.grad_tol == b.grad_tol && a.max_newton == b.max_newton && a.cg_tol == b.cg_tol &&
                             a.max_cg == b.max_cg && a.armijo_c == b.armijo_c && a.backtrack == b.backtrack &&
                             a.max_backtracks == b.max_backtracks && a.initial_guess == b.initial_guess;
    const bool same_model = is_system() ? system == o.system : scalar == o.scalar;
    const bool same_geometry = is_planar()
                                   ? box.half_width == o.box.half_width && box.n == o.box.n
                                   : cell.lx == o.cell.lx && cell.ly == o.cell.ly && cell.nx == o.cell.nx &&
                                         cell.ny == o.cell.ny && sigma == o.sigma;
    return problem == o.problem && same_model && same_geometry && same_solver && vortices1 == o.vortices1 &&
           (!is_system() || vortices2 == o.vortices2) && (!is_planar() || mu == o.mu) && seed == o.seed &&
           probe == o.probe && output == o.output;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigParseError(source, line_at_byte(text, e.byte), "malformed JSON: " + std::string(e.what()));
    }
    const Reader r(text, source);
    if (!doc.is_object()) r.fail("", "top level must be an object");
    r.only_keys(doc, "",
                {"problem", "model", "vortices", "vortices2", "cell", "box", "mu", "sigma", "solver", "seed", "probe",
                 "output"});

    RunConfig c;
    if (!doc.contains("problem")) r.fail("", "missing 'problem'");
    c.problem = parse_problem(r.string(doc["problem"], "/problem"), r);

    const json model = doc.contains("model") ? doc["model"] : json::object();
    if (c.is_system()) c.system = parse_system(model, r);
    else c.scalar = parse_scalar(model, r);

    if (doc.contains("vortices")) c.vortices1 = parse_vortices(doc["vortices"], "/vortices", r);
    if (doc.contains("vortices2")) {
        if (!c.is_system()) r.fail("/vortices2", "'vortices2' only applies to system problems");
        c.vortices2 = parse_vortices(doc["vortices2"], "/vortices2", r);
    }

    if (c.is_planar()) {
        if (doc.contains("cell")) r.fail("/cell", "planar problems take 'box', not 'cell'");
        if (doc.contains("sigma")) r.fail("/sigma", "'sigma' only applies to periodic problems");
        if (doc.contains("box")) {
            const json& b = doc["box"];
            r.only_keys(b, "/box", {"half_width", "n"});
            if (b.contains("half_width") && !b["half_width"].is_null()) {
                const double L = r.number(b["half_width"], "/box/half_width");
                if (!(L > 0.0)) r.fail("/box/half_width", "half_width must be positive");
                c.box.half_width = L;
            }
            if (b.contains("n")) {
                const long long n = r.integer(b["n"], "/box/n");
                if (n < 16 || n > 1 << 14) r.fail("/box/n", "n must lie in [16, 16384]");
                c.box.n = static_cast<int>(n);
            }
        }
        if (doc.contains("mu")) {
            c.mu = r.number(doc["mu"], "/mu");
            if (!(c.mu > 0.0)) r.fail("/mu", "mu must be positive");
        }
    } else {
        if (doc.contains("box")) r.fail("/box", "periodic problems take 'cell', not 'box'");
        if (doc.contains("mu")) r.fail("/mu", "'mu' only applies to planar problems");
        if (doc.contains("cell")) {
            const json& g = doc["cell"];
            r.only_keys(g, "/cell", {"lx", "ly", "nx", "ny"});
            const auto edge = [&](const char* key, double& target) {
                if (!g.contains(key)) return;
                target = r.number(g[key], std::string("/cell/") + key);
                if (!(target > 0.0)) r.fail(std::string("/cell/") + key, "cell edges must be positive");
            };
            const auto nodes = [&](const char* key, int& target) {
                if (!g.contains(key)) return;
                const long long n = r.integer(g[key], std::string("/cell/") + key);
                if (n < 16 || n % 2 != 0 || n > 1 << 14)
                    r.fail(std::string("/cell/") + key, "node counts must be even and in [16, 16384]");
                target = static_cast<int>(n);
            };
            edge("lx", c.cell.lx);
            edge("ly", c.cell.ly);
            nodes("nx", c.cell.nx);
            nodes("ny", c.cell.ny);
        }
        if (doc.contains("sigma")) c.sigma = r.number(doc["sigma"], "/sigma");
    }

    if (doc.contains("solver")) c.solver = parse_solver(doc["solver"], r);
    if (doc.contains("seed")) {
        const json& s = doc["seed"];
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            r.fail("/seed", "seed must be a non-negative integer");
        c.seed = s.get<std::uint64_t>();
    }
    c.solver.seed = c.seed;
    if (doc.contains("probe")) {
        const long long k = r.integer(doc["probe"], "/probe");
        if (k < 0 || k == 1 || k > 100) r.fail("/probe", "probe must be 0 or a start count in [2, 100]");
        c.probe = static_cast<int>(k);
    }
    if (doc.contains("output")) c.output = r.string(doc["output"], "/output");
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigParseError(path.string(), 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string to_json_text(const RunConfig& c) {
    json doc;
    doc["problem"] = to_string(c.problem);
    if (c.is_system()) {
        const auto& s = c.system;
        doc["model"] = {{"lambda1", s.lambda1}, {"lambda2", s.lambda2}, {"xi1", s.xi1}, {"xi2", s.xi2},
                        {"m", s.m},             {"a2", s.a2},           {"b2", s.b2},   {"c2", s.c2}};
        doc["vortices2"] = vortex_json(c.vortices2);
    } else {
        const auto& s = c.scalar;
        doc["model"] = {{"lambda", s.lambda}, {"xi", s.xi}, {"m", s.m}, {"n", s.n}, {"a2", s.a2}, {"b2", s.b2}};
    }
    doc["vortices"] = vortex_json(c.vortices1);
    if (c.is_planar()) {
        doc["box"] = {{"half_width", c.box.half_width ? json(*c.box.half_width) : json(nullptr)}, {"n", c.box.n}};
        doc["mu"] = c.mu;
    } else {
        doc["cell"] = {{"lx", c.cell.lx}, {"ly", c.cell.ly}, {"nx", c.cell.nx}, {"ny", c.cell.ny}};
        doc["sigma"] = c.sigma;
    }
    const auto& o = c.solver;
    doc["solver"] = {{"grad_tol", o.grad_tol},
                     {"max_newton", o.max_newton},
                     {"cg_tol", o.cg_tol},
                     {"max_cg", o.max_cg},
                     {"armijo_c", o.armijo_c},
                     {"backtrack", o.backtrack},
                     {"max_backtracks", o.max_backtracks},
                     {"initial_guess", o.initial_guess == InitialGuess::zero ? "zero" : "random"}};
    doc["seed"] = c.seed;
    doc["probe"] = c.probe;
    doc["output"] = c.output;
    return doc.dump(2) + "\n";
}

double box_half_width(const RunConfig& c) {
    if (c.box.half_width) return *c.box.half_width;
    const double rate = c.is_system() ? c.system.decay_rate() : c.scalar.decay_rate();
    return default_box_half_width(c.mu, rate);
}

GridPtr make_grid(const RunConfig& c) {
    if (c.is_planar()) return Grid::planar(box_half_width(c), c.box.n, c.box.n);
    return Grid::periodic(c.cell.lx, c.cell.ly, c.cell.nx, c.cell.ny);
}

Solution run_pipeline(const RunConfig& c, const SolverOptions& options) {
    const auto grid = make_grid(c);
    switch (c.problem) {
        case ProblemClass::scalar_periodic: return solve_scalar_periodic(c.scalar, c.vortices1, grid, options, c.sigma);
        case ProblemClass::system_periodic:
            return solve_system_periodic(c.system, c.vortices1, c.vortices2, grid, options, c.sigma);
        case ProblemClass::scalar_planar: return solve_scalar_planar(c.scalar, c.vortices1, grid, c.mu, options);
        case ProblemClass::system_planar:
            return solve_system_planar(c.system, c.vortices1, c.vortices2, grid, c.mu, options);
    }
    throw ConfigError("unknown problem class");
}

}  // namespace vortex::cli
