#include "porolux/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace porolux {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        out.push_back(trim(cur));
    }
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

std::optional<double> to_double(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    if (const auto slash = s.find('/'); slash != std::string::npos) {
        const auto num = to_double(s.substr(0, slash));
        const auto den = to_double(s.substr(slash + 1));
        if (!num || !den || *den == 0.0 || s.find('/', slash + 1) != std::string::npos) return std::nullopt;
        return *num / *den;
    }
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<int> to_int(const std::string& raw) {
    const std::string s = trim(raw);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

struct Call {
    std::string name;
    std::vector<std::string> args;
};

Call parse_call(const std::string& raw) {
    const std::string s = trim(raw);
    Call c;
    const auto open = s.find('(');
    if (open == std::string::npos) {
        c.name = s;
        return c;
    }
    if (s.back() != ')') {
        throw std::invalid_argument("expected name(args...) but got '" + s + "'");
    }
    c.name = trim(s.substr(0, open));
    const std::string inner = trim(s.substr(open + 1, s.size() - open - 2));
    if (!inner.empty()) c.args = split(inner, ',');
    return c;
}

std::vector<double> numeric_args(const Call& c, std::size_t from, std::size_t count, const std::string& usage) {
    if (c.args.size() != from + count) {
        throw std::invalid_argument("'" + c.name + "' takes " + usage);
    }
    std::vector<double> v;
    for (std::size_t a = from; a < c.args.size(); ++a) {
        const auto x = to_double(c.args[a]);
        if (!x) throw std::invalid_argument("'" + c.args[a] + "' is not a number in " + c.name + "(...)");
        v.push_back(*x);
    }
    return v;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "run.mode",          "run.output_dir",       "params.mu",          "params.mu_eff",
        "params.K",          "params.k",             "params.b",           "geometry.lx",
        "geometry.ly",       "geometry.nx",          "geometry.ny",        "geometry.nz",
        "geometry.gap",      "forcing.spec",         "dilated.epsilon",    "dilated.nz",
        "converge.eps",      "solver.reynolds_tol",  "solver.reynolds_maxit", "solver.uzawa_tol",
        "solver.uzawa_maxit", "solver.inner_tol",    "solver.inner_maxit", "solver.heat_tol",
        "solver.heat_maxit",
    };
    return keys;
}

struct Entry {
    std::string value;
    int line = 0;
};

class Reader {
public:
    Reader(std::map<std::string, Entry> entries, std::vector<ConfigIssue>& issues)
        : entries_(std::move(entries)), issues_(issues) {}

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    int line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }
    const std::string& raw(const std::string& key) const { return entries_.at(key).value; }

    void error(const std::string& key, const std::string& message) { issues_.push_back({line(key), message}); }

    double number(const std::string& key, double fallback, bool required = false) {
        if (!has(key)) {
            if (required) issues_.push_back({0, "missing required key " + key});
            return fallback;
        }
        const auto v = to_double(raw(key));
        if (!v) {
            error(key, key + ": expected a number, got '" + raw(key) + "'");
            return fallback;
        }
        return *v;
    }
    double positive(const std::string& key, double fallback, bool required = false) {
        const double v = number(key, fallback, required);
        if (has(key) && !(v > 0.0)) {
            error(key, key + " must be > 0 (got " + raw(key) + ")");
            return fallback;
        }
        return v;
    }
    int integer(const std::string& key, int fallback, int min_value) {
        if (!has(key)) return fallback;
        const auto v = to_int(raw(key));
        if (!v) {
            error(key, key + ": expected an integer, got '" + raw(key) + "'");
            return fallback;
        }
        if (*v < min_value) {
            error(key, key + " must be >= " + std::to_string(min_value) + " (got " + raw(key) + ")");
            return fallback;
        }
        return *v;
    }

private:
    std::map<std::string, Entry> entries_;
    std::vector<ConfigIssue>& issues_;
};

std::vector<std::pair<std::string, std::string>> resolve(const RunConfig& c) {
    std::vector<std::pair<std::string, std::string>> r;
    const auto& s = c.solver;
    std::string eps;
    for (std::size_t t = 0; t < c.eps_list.size(); ++t) {
        eps += (t ? ", " : "") + fmt_double(c.eps_list[t]);
    }
    r = {
        {"run.mode", to_string(c.mode)},
        {"run.output_dir", c.output_dir},
        {"params.mu", fmt_double(c.params.mu())},
        {"params.mu_eff", fmt_double(c.params.mu_eff())},
        {"params.K", fmt_double(c.params.K())},
        {"params.k", fmt_double(c.params.k())},
        {"params.b", fmt_double(c.params.b())},
        {"geometry.lx", fmt_double(c.grid.lx)},
        {"geometry.ly", fmt_double(c.grid.ly)},
        {"geometry.nx", std::to_string(c.grid.nx)},
        {"geometry.ny", std::to_string(c.grid.ny)},
        {"geometry.nz", std::to_string(c.nz)},
        {"geometry.gap", describe(c.gap)},
        {"forcing.spec", describe(c.forcing)},
        {"dilated.epsilon", fmt_double(c.epsilon)},
        {"dilated.nz", std::to_string(c.dilated_nz)},
        {"converge.eps", eps},
        {"solver.reynolds_tol", fmt_double(s.reynolds_tol)},
        {"solver.reynolds_maxit", std::to_string(s.reynolds_maxit)},
        {"solver.uzawa_tol", fmt_double(s.uzawa_tol)},
        {"solver.uzawa_maxit", std::to_string(s.uzawa_maxit)},
        {"solver.inner_tol", fmt_double(s.inner_tol)},
        {"solver.inner_maxit", std::to_string(s.inner_maxit)},
        {"solver.heat_tol", fmt_double(s.heat_tol)},
        {"solver.heat_maxit", std::to_string(s.heat_maxit)},
    };
    return r;
}

}  // namespace

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::reduced: return "reduced";
        case RunMode::dilated: return "dilated";
        case RunMode::converge: return "converge";
    }
    return "reduced";
}

std::optional<RunMode> parse_mode(const std::string& text) {
    const std::string s = trim(text);
    if (s == "reduced") return RunMode::reduced;
    if (s == "dilated") return RunMode::dilated;
    if (s == "converge") return RunMode::converge;
    return std::nullopt;
}

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error([&] {
          std::ostringstream msg;
          msg << issues.size() << " configuration error(s):";
          for (const auto& i : issues) {
              msg << "\n  ";
              if (i.line > 0) msg << "line " << i.line << ": ";
              msg << i.message;
          }
          return msg.str();
      }()),
      issues_(std::move(issues)) {}

GapSpec parse_gap_spec(const std::string& text) {
    const Call c = parse_call(text);
    if (c.name == "constant") {
        return ConstantGap{numeric_args(c, 0, 1, "one argument: constant(h)")[0]};
    }
    if (c.name == "parabolic") {
        const auto a = numeric_args(c, 0, 2, "two arguments: parabolic(curvature, base)");
        return ParabolicGap{a[0], a[1]};
    }
    if (c.name == "sinusoidal") {
        const auto a = numeric_args(c, 0, 4, "four arguments: sinusoidal(mean, amp, kx, ky)");
        return SinusoidalGap{a[0], a[1], a[2], a[3]};
    }
    throw std::invalid_argument("unknown gap '" + c.name + "' (constant, parabolic, sinusoidal)");
}

ForcingSpec parse_forcing_spec(const std::string& text) {
    const Call c = parse_call(text);
    if (c.name == "zero") {
        if (!c.args.empty()) throw std::invalid_argument("'zero' takes no arguments");
        return ZeroForcing{};
    }
    if (c.name == "constant") {
        const auto a = numeric_args(c, 0, 2, "two arguments: constant(cx, cy)");
        return ConstantForcing{a[0], a[1]};
    }
    if (c.name == "sinusoidal") {
        const auto a = numeric_args(c, 0, 4, "four arguments: sinusoidal(a1, a2, m, n)");
        return SinusoidalForcing{a[0], a[1], a[2], a[3]};
    }
    if (c.name == "gradient") {
        if (c.args.empty()) throw std::invalid_argument("gradient(...) needs a potential kind: linear or cosine");
        if (c.args[0] == "linear") {
            const auto a = numeric_args(c, 1, 2, "gradient(linear, ax, ay)");
            return GradientForcing{LinearPotential{a[0], a[1]}};
        }
        if (c.args[0] == "cosine") {
            const auto a = numeric_args(c, 1, 3, "gradient(cosine, a, m, n)");
            return GradientForcing{CosinePotential{a[0], a[1], a[2]}};
        }
        throw std::invalid_argument("unknown potential '" + c.args[0] + "' (linear, cosine)");
    }
    throw std::invalid_argument("unknown forcing '" + c.name + "' (zero, constant, sinusoidal, gradient)");
}

std::vector<double> parse_number_list(const std::string& text) {
    std::string s = trim(text);
    if (!s.empty() && s.front() == '{') {
        if (s.back() != '}') throw std::invalid_argument("unbalanced braces in list");
        s = s.substr(1, s.size() - 2);
    }
    std::vector<double> out;
    if (trim(s).empty()) return out;
    for (const std::string& item : split(s, ',')) {
        const auto v = to_double(item);
        if (!v) throw std::invalid_argument("'" + item + "' is not a number");
        out.push_back(*v);
    }
    return out;
}

RunConfig parse_config(const std::string& text, std::optional<RunMode> mode_override) {
    std::vector<ConfigIssue> issues;
    std::map<std::string, Entry> entries;
    {
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                issues.push_back({lineno, "expected 'section.key = value', got '" + line + "'"});
                continue;
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (!known_keys().count(key)) {
                issues.push_back({lineno, "unknown key '" + key + "'"});
                continue;
            }
            if (value.empty()) {
                issues.push_back({lineno, key + ": empty value"});
                continue;
            }
            if (const auto it = entries.find(key); it != entries.end()) {
                issues.push_back(
                    {lineno, "duplicate key " + key + " (first set on line " + std::to_string(it->second.line) + ")"});
                continue;
            }
            entries[key] = Entry{value, lineno};
        }
    }

    Reader rd(std::move(entries), issues);
    RunConfig cfg;

    if (rd.has("run.mode")) {
        if (const auto m = parse_mode(rd.raw("run.mode"))) {
            cfg.mode = *m;
        } else {
            rd.error("run.mode", "run.mode must be reduced, dilated or converge (got '" + rd.raw("run.mode") + "')");
        }
    }
    if (mode_override) cfg.mode = *mode_override;
    if (rd.has("run.output_dir")) cfg.output_dir = rd.raw("run.output_dir");

    const double mu = rd.positive("params.mu", 1.0, true);
    const double mu_eff = rd.positive("params.mu_eff", 1.0, true);
    const double K = rd.positive("params.K", 1.0, true);
    const double k = rd.positive("params.k", 1.0, true);
    const double b = rd.number("params.b", 0.0);
    try {
        cfg.params = make_params(mu, mu_eff, K, k, b);
    } catch (const std::invalid_argument& e) {
        issues.push_back({0, e.what()});
    }

    const double lx = rd.positive("geometry.lx", 1.0);
    const double ly = rd.positive("geometry.ly", 1.0);
    const int nx = rd.integer("geometry.nx", 32, 1);
    const int ny = rd.integer("geometry.ny", 32, 1);
    cfg.grid = make_grid(nx, ny, lx, ly);
    cfg.nz = rd.integer("geometry.nz", 64, 2);

    if (rd.has("geometry.gap")) {
        try {
            cfg.gap = parse_gap_spec(rd.raw("geometry.gap"));
            make_gap_field(cfg.gap, cfg.grid);
        } catch (const std::invalid_argument& e) {
            rd.error("geometry.gap", std::string("geometry.gap: ") + e.what());
        }
    }
    if (rd.has("forcing.spec")) {
        try {
            cfg.forcing = parse_forcing_spec(rd.raw("forcing.spec"));
        } catch (const std::invalid_argument& e) {
            rd.error("forcing.spec", std::string("forcing.spec: ") + e.what());
        }
    }

    cfg.epsilon = rd.number("dilated.epsilon", 0.125);
    if (rd.has("dilated.epsilon") && !(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0)) {
        rd.error("dilated.epsilon", "dilated.epsilon must lie in (0, 1] (got " + rd.raw("dilated.epsilon") + ")");
    }
    cfg.dilated_nz = rd.integer("dilated.nz", 16, 2);
    if (rd.has("converge.eps")) {
        try {
            auto list = parse_number_list(rd.raw("converge.eps"));
            if (list.empty()) throw std::invalid_argument("list is empty");
            for (std::size_t t = 0; t < list.size(); ++t) {
                if (!(list[t] > 0.0 && list[t] <= 1.0)) {
                    throw std::invalid_argument("every epsilon must lie in (0, 1]");
                }
                if (t > 0 && !(list[t] < list[t - 1])) {
                    throw std::invalid_argument("values must be strictly decreasing");
                }
            }
            cfg.eps_list = std::move(list);
        } catch (const std::invalid_argument& e) {
            rd.error("converge.eps", std::string("converge.eps: ") + e.what());
        }
    }

    SolverSettings& s = cfg.solver;
    s.reynolds_tol = rd.positive("solver.reynolds_tol", s.reynolds_tol);
    s.reynolds_maxit = rd.integer("solver.reynolds_maxit", s.reynolds_maxit, 1);
    s.uzawa_tol = rd.positive("solver.uzawa_tol", s.uzawa_tol);
    s.uzawa_maxit = rd.integer("solver.uzawa_maxit", s.uzawa_maxit, 1);
    s.inner_tol = rd.positive("solver.inner_tol", s.inner_tol);
    s.inner_maxit = rd.integer("solver.inner_maxit", s.inner_maxit, 1);
    s.heat_tol = rd.positive("solver.heat_tol", s.heat_tol);
    s.heat_maxit = rd.integer("solver.heat_maxit", s.heat_maxit, 1);

    if (cfg.mode != RunMode::reduced) {
        if (!std::holds_alternative<ConstantGap>(cfg.gap)) {
            rd.error("geometry.gap", "the 3D solver (mode " + to_string(cfg.mode) + ") needs a constant gap");
        }
        if (cfg.grid.nx < 2 || cfg.grid.ny < 2) {
            issues.push_back({std::max(rd.line("geometry.nx"), rd.line("geometry.ny")),
                              "mode " + to_string(cfg.mode) + " needs geometry.nx and geometry.ny >= 2"});
        }
    }

    if (!issues.empty()) {
        std::stable_sort(issues.begin(), issues.end(),
                         [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
        throw ConfigError(std::move(issues));
    }
    cfg.resolved = resolve(cfg);
    return cfg;
}

}  // namespace porolux
