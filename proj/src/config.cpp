#include "spde/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "spde/experiments.hpp"

namespace spde::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid numeric value for " + key + ": '" + v + "'");
    }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer value for " + key + ": '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid unsigned value for " + key + ": '" + v + "'");
    }
}

std::vector<std::int64_t> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<std::int64_t> out;
    std::istringstream is(v);
    std::string tok;
    while (is >> tok) {
        // Allow comma separators as well as whitespace.
        while (!tok.empty() && tok.back() == ',') tok.pop_back();
        if (tok.empty()) continue;
        out.push_back(parse_int(key, tok));
    }
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "model.kind") cfg.model_kind = value;
    else if (key == "model.modes") cfg.modes = static_cast<int>(parse_int(key, value));
    else if (key == "model.nu") cfg.nu = parse_double(key, value);
    else if (key == "model.kappa") cfg.kappa = parse_double(key, value);
    else if (key == "model.c") cfg.c = parse_double(key, value);
    else if (key == "model.rho") cfg.rho = parse_double(key, value);
    else if (key == "model.delta") cfg.delta = parse_double(key, value);
    else if (key == "model.xi") cfg.xi = value;
    else if (key == "scheme.kind") cfg.scheme_kind = value;
    else if (key == "grid.T") cfg.T = parse_double(key, value);
    else if (key == "grid.N") cfg.N_list = parse_int_list(key, value);
    else if (key == "grid.N_ref") cfg.N_ref = parse_int(key, value);
    else if (key == "mc.samples") cfg.samples = parse_int(key, value);
    else if (key == "mc.seed") cfg.seed = parse_u64(key, value);
    else if (key == "output.path") cfg.out_path = value;
    else if (key == "output.format") cfg.format = value;
    else if (key == "functional.name") cfg.functional = value;
    else if (key == "perturbation.eps") cfg.perturbation_eps = parse_double(key, value);
    else throw ConfigError("unknown configuration key: " + key);
}

bool is_pow2(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        set_key(cfg, section + "." + key, value);
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides) {
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos) throw ConfigError("malformed override (want key=value): " + ov);
        set_key(cfg, trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
    }
}

void validate(const RunConfig& cfg) {
    if (cfg.model_kind != "anderson" && cfg.model_kind != "chc" && cfg.model_kind != "diagonal-additive")
        throw ConfigError("model.kind must be anderson, chc or diagonal-additive");
    if (cfg.modes < 1) throw ConfigError("model.modes must be >= 1");
    if (cfg.scheme_kind != "exponential-euler" && cfg.scheme_kind != "linear-implicit-euler")
        throw ConfigError("scheme.kind must be exponential-euler or linear-implicit-euler");
    if (!(cfg.T > 0.0)) throw ConfigError("grid.T must be positive");
    if (!is_pow2(cfg.N_ref)) throw ConfigError("grid.N_ref must be a power of two");
    for (std::int64_t n : cfg.N_list) {
        if (!is_pow2(n)) throw ConfigError("grid.N entries must be powers of two (got " + std::to_string(n) + ")");
        if (cfg.N_ref % n != 0) throw ConfigError("grid.N entry " + std::to_string(n) + " does not divide N_ref");
    }
    if (cfg.samples < 2) throw ConfigError("mc.samples must be >= 2");
    if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("output.format must be csv or json");
    if (test_functional_registry().find(cfg.functional) == test_functional_registry().end())
        throw ConfigError("functional.name does not resolve: " + cfg.functional);
    if (cfg.model_kind == "anderson" && !(cfg.nu > 0.0)) throw ConfigError("model.nu must be positive");
    if (cfg.model_kind == "diagonal-additive" && cfg.c < 0.0) throw ConfigError("model.c must be positive");
    if (cfg.model_kind == "diagonal-additive" && !(cfg.rho > 0.0)) throw ConfigError("model.rho must be positive");
    if (cfg.xi != "zero") {
        if (cfg.xi.size() < 2 || cfg.xi[0] != 'e') throw ConfigError("model.xi must be 'zero' or 'e<k>'");
        const std::int64_t k = parse_int("model.xi", cfg.xi.substr(1));
        if (k < 1 || k > cfg.modes) throw ConfigError("model.xi index out of range");
    }
}

ModelSpec RunConfig::build_model() const {
    CoeffState xi_state(static_cast<size_t>(modes), 0.0);
    if (xi != "zero") {
        const auto k = static_cast<size_t>(std::stoll(xi.substr(1)));
        xi_state[k - 1] = 1.0;
    }
    if (model_kind == "anderson") return build_anderson(modes, nu, kappa, std::move(xi_state), T);
    if (model_kind == "chc") return build_chc(modes, kappa, std::move(xi_state), T);
    const double pi = std::acos(-1.0);
    const double c_eff = (c > 0.0) ? c : pi * pi;
    return build_diagonal_additive(modes, c_eff, rho, delta, T);
}

SchemeKind RunConfig::build_scheme() const {
    return (scheme_kind == "exponential-euler") ? SchemeKind::ExponentialEuler
                                                : SchemeKind::LinearImplicitEuler;
}

std::map<std::string, std::string> RunConfig::echo() const {
    std::map<std::string, std::string> m;
    m["model.kind"] = model_kind;
    m["model.modes"] = std::to_string(modes);
    if (model_kind == "anderson") m["model.nu"] = fmt(nu);
    if (model_kind != "diagonal-additive") m["model.kappa"] = fmt(kappa);
    if (model_kind == "diagonal-additive") {
        const double pi = std::acos(-1.0);
        m["model.c"] = fmt(c > 0.0 ? c : pi * pi);
        m["model.rho"] = fmt(rho);
        m["model.delta"] = fmt(delta);
    }
    m["model.xi"] = (model_kind == "diagonal-additive") ? "zero" : xi;
    m["scheme.kind"] = scheme_kind;
    m["grid.T"] = fmt(T);
    {
        std::ostringstream os;
        for (size_t i = 0; i < N_list.size(); ++i) os << (i ? " " : "") << N_list[i];
        m["grid.N"] = os.str();
    }
    m["grid.N_ref"] = std::to_string(N_ref);
    m["mc.samples"] = std::to_string(samples);
    m["mc.seed"] = std::to_string(seed);
    m["output.format"] = format;
    if (!out_path.empty()) m["output.path"] = out_path;
    m["functional.name"] = functional;
    m["perturbation.eps"] = fmt(perturbation_eps);
    return m;
}

}  // namespace spde::cli
