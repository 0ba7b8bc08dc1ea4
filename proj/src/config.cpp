#include "hspde/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "hspde/rng.hpp"

namespace hspde {
namespace {

struct Entry {
    std::string value;
    int line;
    mutable bool used = false;
};

using KeyMap = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class Reader {
public:
    explicit Reader(KeyMap keys) : keys_(std::move(keys)) {}

    bool has(const std::string& key) const { return keys_.count(key) != 0; }

    const Entry* find(const std::string& key) const {
        auto it = keys_.find(key);
        if (it == keys_.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const Entry* e = find(key);
        return e ? e->value : fallback;
    }

    std::string require_string(const std::string& key) const {
        const Entry* e = find(key);
        if (!e) throw ConfigError("missing required key '" + key + "'");
        return e->value;
    }

    double get_double(const std::string& key, double fallback) const {
        const Entry* e = find(key);
        return e ? to_double(*e, key) : fallback;
    }

    double require_double(const std::string& key) const {
        const Entry* e = find(key);
        if (!e) throw ConfigError("missing required key '" + key + "'");
        return to_double(*e, key);
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        const Entry* e = find(key);
        if (!e) return fallback;
        try {
            std::size_t pos = 0;
            std::uint64_t v = std::stoull(e->value, &pos);
            if (pos != e->value.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw ConfigError(e->line, "'" + key + "': expected an unsigned integer, got '" + e->value + "'");
        }
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const Entry* e = find(key);
        if (!e) return fallback;
        if (e->value == "true" || e->value == "1") return true;
        if (e->value == "false" || e->value == "0") return false;
        throw ConfigError(e->line, "'" + key + "': expected true/false");
    }

    void check_all_used() const {
        for (const auto& [key, e] : keys_)
            if (!e.used) throw ConfigError(e.line, "unknown key '" + key + "'");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        auto it = keys_.find(key);
        if (it != keys_.end()) throw ConfigError(it->second.line, "'" + key + "': " + msg);
        throw ConfigError("'" + key + "': " + msg);
    }

private:
    static double to_double(const Entry& e, const std::string& key) {
        try {
            std::size_t pos = 0;
            double v = std::stod(e.value, &pos);
            if (pos != e.value.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw ConfigError(e.line, "'" + key + "': expected a number, got '" + e.value + "'");
        }
    }

    KeyMap keys_;
};

KernelSpec parse_kernel(const Reader& r, const std::string& prefix) {
    std::string type = r.get_string(prefix + ".type", "zero");
    try {
        KernelSpec k = [&] {
            if (type == "zero") return KernelSpec::zero();
            if (type == "constant") return KernelSpec::constant(r.require_double(prefix + ".c"));
            if (type == "exponential") return KernelSpec::exponential(r.require_double(prefix + ".alpha"));
            if (type == "bjerksund")
                return KernelSpec::bjerksund(r.require_double(prefix + ".a"),
                                             r.require_double(prefix + ".b"),
                                             r.require_double(prefix + ".alpha"));
            if (type == "power_fbm") return KernelSpec::power_fbm(r.require_double(prefix + ".H"));
            if (type == "regularized_fbm")
                return KernelSpec::regularized_fbm(r.require_double(prefix + ".H"),
                                                   r.require_double(prefix + ".eps"));
            throw std::invalid_argument("unknown kernel type '" + type + "'");
        }();
        if (r.has(prefix + ".support")) k = k.with_support(r.require_double(prefix + ".support"));
        return k;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        r.fail(prefix + ".type", e.what());
    }
}

DriverSpec parse_driver(const Reader& r, const std::string& prefix, bool default_compensated) {
    std::string type = r.require_string(prefix + ".type");
    bool comp = r.get_bool(prefix + ".compensated", default_compensated);
    try {
        if (type == "brownian") return DriverSpec::brownian(r.get_double(prefix + ".v", 1.0));
        if (type == "ig")
            return DriverSpec::inverse_gaussian(r.require_double(prefix + ".delta"),
                                                r.require_double(prefix + ".gamma"), comp);
        if (type == "cpoisson")
            return DriverSpec::compound_poisson(r.require_double(prefix + ".rho"),
                                                r.require_double(prefix + ".jump_mean"),
                                                r.require_double(prefix + ".jump_sq"), comp);
        throw std::invalid_argument("unknown driver type '" + type + "'");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        r.fail(prefix + ".type", e.what());
    }
}

VolatilityModel parse_volatility(const Reader& r, const std::string& prefix, double default_const) {
    std::string type = r.get_string(prefix + ".type", "constant");
    try {
        if (type == "constant")
            return VolatilityModel::constant(r.get_double(prefix + ".value", default_const));
        if (type == "ou") {
            DriverSpec sub = parse_driver(r, prefix + ".subordinator", /*default_compensated=*/false);
            auto m = VolatilityModel::ou_subordinator(r.require_double(prefix + ".lambda"), sub,
                                                      r.get_double(prefix + ".burn_in_tol", 1e-6));
            if (r.has(prefix + ".z0")) m = m.with_initial_z(r.require_double(prefix + ".z0"));
            return m;
        }
        throw std::invalid_argument("unknown volatility type '" + type + "'");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        r.fail(prefix + ".type", e.what());
    }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    KeyMap keys;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(lineno, "expected 'key = value', got '" + t + "'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigError(lineno, "empty key");
        if (keys.count(key)) throw ConfigError(lineno, "duplicate key '" + key + "'");
        keys.emplace(key, Entry{value, lineno});
    }
    Reader r(std::move(keys));

    RunConfig cfg;
    cfg.text = text;
    cfg.config_hash = fnv1a64(text);

    cfg.model.mu = r.get_double("model.mu", 0.0);
    cfg.model.g = parse_kernel(r, "model.kernel.g");
    cfg.model.p = parse_kernel(r, "model.kernel.p");
    cfg.model.sigma_model = parse_volatility(r, "model.volatility", 1.0);
    cfg.model.a_model = parse_volatility(r, "model.drift", 0.0);
    cfg.model.driver = parse_driver(r, "model.driver", true);
    std::string bmode = r.get_string("model.boundary", "extended_triangle");
    if (bmode == "extended_triangle")
        cfg.model.boundary = BoundaryMode::ExtendedTriangle;
    else if (bmode == "zero_at_xJ")
        cfg.model.boundary = BoundaryMode::ZeroAtXJ;
    else
        r.fail("model.boundary", "expected extended_triangle or zero_at_xJ");

    cfg.grid.t0 = r.get_double("grid.t0", 0.0);
    cfg.grid.dt = r.require_double("grid.dt");
    cfg.grid.n_steps = static_cast<std::size_t>(r.get_u64("grid.steps", 0));
    cfg.grid.dx = r.require_double("grid.dx");
    cfg.grid.j_nodes = static_cast<std::size_t>(r.get_u64("grid.nodes", 0));
    if (cfg.grid.n_steps == 0) r.fail("grid.steps", "must be >= 1");

    cfg.seed = r.get_u64("run.seed", 0);
    cfg.paths = static_cast<std::size_t>(r.get_u64("run.paths", 1));
    cfg.out_dir = r.get_string("run.out", ".");
    std::string outputs = r.get_string("run.outputs", "boundary");
    std::istringstream os(outputs);
    std::string tok;
    while (std::getline(os, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        if (tok != "boundary" && tok != "field" && tok != "moments" && tok != "budget")
            r.fail("run.outputs", "unknown output '" + tok + "'");
        cfg.outputs.insert(tok);
    }
    cfg.outputs.insert("boundary");
    if (cfg.paths == 0) r.fail("run.paths", "must be >= 1");

    r.check_all_used();
    return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace hspde
