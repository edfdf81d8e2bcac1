#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "alloy/diagnostics/fractional.hpp"
#include "alloy/diagnostics/model_spec.hpp"

namespace alloy::cli {

using json = nlohmann::json;

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"spectrum", "envelope", "wegner", "fracmom", "fvc",
                                                "regular-pairs", "suitability", "dynloc", "verify-bounds", "stone"};
    return names;
}

// Every schema violation found, each prefixed with its key path.
class ConfigError : public InvalidArgument {
public:
    explicit ConfigError(std::vector<std::string> errors)
        : InvalidArgument(join(errors)), errors_(std::move(errors)) {}
    const std::vector<std::string>& errors() const noexcept { return errors_; }

private:
    static std::string join(const std::vector<std::string>& e) {
        std::string out;
        for (const auto& s : e) out += (out.empty() ? "" : "\n") + s;
        return out;
    }
    std::vector<std::string> errors_;
};

/// Reads one JSON object, remembering which keys were consumed so leftovers can be reported.
class ObjectReader {
public:
    ObjectReader(const json* j, std::string path, std::vector<std::string>* errors)
        : j_(j), path_(std::move(path)), errors_(errors) {
        if (j_ && !j_->is_object()) {
            error("", "expected an object");
            j_ = nullptr;
        }
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void error(const std::string& key, const std::string& msg) const {
        errors_->push_back((key.empty() ? path_ : key_path(key)) + ": " + msg);
    }

    bool has(const std::string& key) const { return j_ && j_->contains(key); }

    template <class T>
    std::optional<T> optional(const std::string& key) {
        used_.insert(key);
        if (!has(key)) return std::nullopt;
        const json& v = j_->at(key);
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw std::runtime_error("");
            } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
                if (!v.is_number_integer()) throw std::runtime_error("");
                if constexpr (std::is_unsigned_v<T>)
                    if (v.is_number_integer() && !v.is_number_unsigned()) throw std::runtime_error("");
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw std::runtime_error("");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw std::runtime_error("");
            }
            return v.get<T>();
        } catch (const std::exception&) {
            error(key, std::string("expected ") + type_name<T>());
            return std::nullopt;
        }
    }

    template <class T>
    T get(const std::string& key, T fallback) {
        auto v = optional<T>(key);
        return v ? *v : fallback;
    }

    template <class T>
    std::optional<T> required(const std::string& key) {
        if (!has(key)) {
            used_.insert(key);
            error(key, "required key missing");
            return std::nullopt;
        }
        return optional<T>(key);
    }

    ObjectReader child(const std::string& key) {
        used_.insert(key);
        return ObjectReader(has(key) ? &j_->at(key) : nullptr, key_path(key), errors_);
    }

    const json* raw(const std::string& key) {
        used_.insert(key);
        return has(key) ? &j_->at(key) : nullptr;
    }

    // Unknown keys are hard errors.
    void finish() const {
        if (!j_) return;
        for (auto it = j_->begin(); it != j_->end(); ++it)
            if (!used_.count(it.key())) error(it.key(), "unknown key");
    }

    std::vector<std::string>& errors() const { return *errors_; }

private:
    template <class T>
    static const char* type_name() {
        if constexpr (std::is_same_v<T, double>) return "a number";
        else if constexpr (std::is_same_v<T, bool>) return "a boolean";
        else if constexpr (std::is_same_v<T, std::string>) return "a string";
        else if constexpr (std::is_unsigned_v<T>) return "a nonnegative integer";
        else if constexpr (std::is_integral_v<T>) return "an integer";
        else if constexpr (std::is_same_v<T, std::vector<double>>) return "an array of numbers";
        else if constexpr (std::is_same_v<T, std::vector<int>>) return "an array of integers";
        else return "a value of the documented type";
    }

    const json* j_;
    std::string path_;
    std::vector<std::string>* errors_;
    std::set<std::string> used_;
};

struct Geometry {
    int L = 10;
    Site center;
    Site x, y;       // pair centers (regular-pairs); x is also the source site elsewhere
    int gamma_L = 0; // half-width of Gamma for fvc
};

struct EstimatorParams {
    double energy = 0.0;
    std::vector<double> eps{0.02, 0.04, 0.08};
    std::vector<int> L_grid;
    double fixed_eps = 0.04;
    cplx z{0.0, 1.0};
    double s = 0.5;
    std::vector<int> distances;
    MomentExponent exponent = MomentExponent::Plain;
    double m = 0.3;
    double lo = -0.5, hi = 0.5;  // energy interval I, or [a,b] for stone
    double p_exponent = 0.0;
    int max_depth = 40;
    double gamma = 0.3;
    std::vector<int> r{4, 8};
    std::vector<double> t_grid;
    double p = 2.0;
    bool full_window = true;
    double stone_eps = 0.1;
    int max_degree = 8;
    int max_dim = 6;
    int cartan_samples = 20000;
};

struct ExperimentConfig {
    std::string estimator;
    ModelSpec model;
    Geometry geometry;
    EstimatorParams params;
    EnsembleConfig ensemble;
    std::string output_path;
    json resolved;  // defaults filled in; ensemble.workers is kept out of it
};

namespace detail {

inline std::optional<Site> read_site(ObjectReader& r, const std::string& key, int d) {
    auto v = r.optional<std::vector<int>>(key);
    if (!v) return std::nullopt;
    if (static_cast<int>(v->size()) != d) {
        r.error(key, "expected " + std::to_string(d) + " coordinates");
        return std::nullopt;
    }
    return Site(v->begin(), v->end());
}

inline json site_json(const Site& s) { return json(std::vector<int>(s.begin(), s.end())); }

inline std::optional<SingleSitePotential> read_potential(ObjectReader& model, int d, json& out) {
    const json* raw = model.raw("u");
    if (!raw) {
        model.error("u", "required key missing");
        return std::nullopt;
    }
    ObjectReader u(raw, model.key_path("u"), &model.errors());
    const auto before = model.errors().size();
    const std::string kind = u.get<std::string>("kind", "table");
    std::optional<SingleSitePotential> pot;
    try {
        if (kind == "dirac") {
            pot = SingleSitePotential::dirac(d);
            out = {{"kind", "dirac"}};
        } else if (kind == "exponential") {
            const double C = u.get<double>("C", 1.0), c = u.get<double>("c", 1.0);
            const bool alt = u.get<bool>("alternating", false);
            const double cutoff = u.get<double>("cutoff", 1e-12);
            if (model.errors().size() == before) pot = SingleSitePotential::exponential(d, C, c, alt, cutoff);
            out = {{"kind", "exponential"}, {"C", C}, {"c", c}, {"alternating", alt}, {"cutoff", cutoff}};
        } else if (kind == "table") {
            const json* entries = u.raw("entries");
            std::map<Site, double> vals;
            json echo = json::array();
            if (!entries || !entries->is_array() || entries->empty()) {
                u.error("entries", "expected a nonempty array of {offset, value}");
            } else {
                for (std::size_t i = 0; i < entries->size(); ++i) {
                    ObjectReader e(&(*entries)[i], u.key_path("entries") + "[" + std::to_string(i) + "]",
                                   &model.errors());
                    auto off = e.required<std::vector<int>>("offset");
                    auto val = e.required<double>("value");
                    e.finish();
                    if (!off || !val) continue;
                    if (static_cast<int>(off->size()) != d) {
                        e.error("offset", "expected " + std::to_string(d) + " coordinates");
                        continue;
                    }
                    if (!vals.emplace(Site(off->begin(), off->end()), *val).second) e.error("offset", "duplicate offset");
                    echo.push_back({{"offset", *off}, {"value", *val}});
                }
            }
            if (model.errors().size() == before) pot = SingleSitePotential(vals);
            out = {{"kind", "table"}, {"entries", echo}};
        } else {
            u.error("kind", "expected one of dirac, exponential, table");
        }
    } catch (const InvalidArgument& e) {
        u.error("", e.what());
        pot.reset();
    }
    u.finish();
    return pot;
}

inline std::optional<DisorderSpec> read_disorder(ObjectReader& model, json& out) {
    const json* raw = model.raw("mu");
    ObjectReader mu(raw, model.key_path("mu"), &model.errors());
    const auto before = model.errors().size();
    const std::string kind = mu.get<std::string>("kind", "uniform");
    std::optional<DisorderSpec> spec;
    try {
        if (kind == "uniform") {
            const double lo = mu.get<double>("lower", 0.0), hi = mu.get<double>("upper", 1.0);
            out = {{"kind", "uniform"}, {"lower", lo}, {"upper", hi}};
            if (model.errors().size() == before) spec = DisorderSpec::uniform(lo, hi);
        } else if (kind == "table") {
            auto x = mu.required<std::vector<double>>("x");
            auto rho = mu.required<std::vector<double>>("rho");
            if (x && rho) {
                out = {{"kind", "table"}, {"x", *x}, {"rho", *rho}};
                if (model.errors().size() == before) spec = DisorderSpec::table(*x, *rho);
            }
        } else {
            mu.error("kind", "expected one of uniform, table");
        }
    } catch (const InvalidArgument& e) {
        mu.error("", e.what());
        spec.reset();
    }
    mu.finish();
    return spec;
}

inline std::vector<double> default_t_grid(const std::string& estimator) {
    std::vector<double> t;
    if (estimator == "envelope")
        for (int i = 0; i <= 20; ++i) t.push_back(i / 20.0);
    else
        t = {0.0, 1.0, 10.0, 100.0};
    return t;
}

} // namespace detail

/// Validates the whole document and either returns a config or throws ConfigError listing every problem.
inline ExperimentConfig parse_config(const json& doc, const std::string& subcommand) {
    std::vector<std::string> errors;
    ExperimentConfig cfg;
    cfg.estimator = subcommand;
    if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end())
        errors.push_back("subcommand: unknown '" + subcommand + "'");
    ObjectReader top(&doc, "", &errors);
    json res;

    // model
    {
        ObjectReader model = top.child("model");
        auto d = model.required<int>("d");
        if (d && (*d < 1 || *d > 3)) {
            model.error("d", "must be 1, 2 or 3");
            d.reset();
        }
        const int dim = d.value_or(1);
        json ujson, mujson;
        auto u = d ? detail::read_potential(model, dim, ujson) : std::nullopt;
        if (!d) model.raw("u");
        auto mu = detail::read_disorder(model, mujson);
        auto lambda = model.required<double>("lambda");
        if (lambda && !(*lambda >= 0.0 && std::isfinite(*lambda))) {
            model.error("lambda", "must be a finite number >= 0");
            lambda.reset();
        }
        model.finish();
        if (u && mu && lambda) cfg.model = ModelSpec(*u, *mu, *lambda);
        res["model"] = {{"d", dim}, {"u", ujson}, {"mu", mujson}, {"lambda", lambda.value_or(0.0)}};
    }
    const int d = res["model"]["d"].get<int>();
    const int diam = cfg.model.u.dimension() == d ? cfg.model.u.diameter() : 0;

    // geometry
    {
        ObjectReader g = top.child("geometry");
        cfg.geometry.L = g.get<int>("L", 10);
        if (cfg.geometry.L < 0) g.error("L", "must be >= 0");
        cfg.geometry.center = detail::read_site(g, "center", d).value_or(origin(d));
        cfg.geometry.x = detail::read_site(g, "x", d).value_or(cfg.geometry.center);
        cfg.geometry.y = detail::read_site(g, "y", d)
                             .value_or(cfg.geometry.x + unit_vector(d, 0, 2 * cfg.geometry.L + diam + 1));
        cfg.geometry.gamma_L = g.get<int>("gamma_L", 2 * cfg.geometry.L + diam + 2);
        if (cfg.geometry.gamma_L < 0) g.error("gamma_L", "must be >= 0");
        g.finish();
        res["geometry"] = {{"L", cfg.geometry.L},
                           {"center", detail::site_json(cfg.geometry.center)},
                           {"x", detail::site_json(cfg.geometry.x)},
                           {"y", detail::site_json(cfg.geometry.y)},
                           {"gamma_L", cfg.geometry.gamma_L}};
    }

    // estimator: only the keys of the chosen subcommand are accepted
    {
        ObjectReader e = top.child("estimator");
        auto& p = cfg.params;
        json ej;
        if (auto name = e.optional<std::string>("name"); name && *name != subcommand)
            e.error("name", "estimator '" + *name + "' does not match subcommand '" + subcommand + "'");
        ej["name"] = subcommand;
        auto read_z = [&] {
            auto z = e.optional<std::vector<double>>("z");
            if (z && z->size() != 2) e.error("z", "expected [re, im]");
            else if (z) p.z = cplx((*z)[0], (*z)[1]);
            ej["z"] = {p.z.real(), p.z.imag()};
        };
        auto read_s = [&](bool allow_zero) {
            p.s = e.get<double>("s", p.s);
            if (!((allow_zero ? p.s >= 0.0 : p.s > 0.0) && p.s < 1.0)) e.error("s", "must lie in (0, 1)");
            ej["s"] = p.s;
        };
        auto read_interval = [&](const std::string& key, double lo, double hi) {
            auto v = e.optional<std::vector<double>>(key);
            p.lo = lo;
            p.hi = hi;
            if (v && (v->size() != 2 || !((*v)[0] <= (*v)[1]))) e.error(key, "expected [lo, hi] with lo <= hi");
            else if (v) {
                p.lo = (*v)[0];
                p.hi = (*v)[1];
            }
            ej[key] = {p.lo, p.hi};
        };
        auto read_t_grid = [&] {
            p.t_grid = e.get<std::vector<double>>("t_grid", detail::default_t_grid(subcommand));
            if (p.t_grid.empty()) e.error("t_grid", "must be nonempty");
            ej["t_grid"] = p.t_grid;
        };
        if (subcommand == "envelope") {
            read_t_grid();
        } else if (subcommand == "wegner") {
            p.energy = e.get<double>("energy", 0.0);
            p.eps = e.get<std::vector<double>>("eps", p.eps);
            for (double v : p.eps)
                if (!(v >= 0.0)) e.error("eps", "entries must be >= 0");
            if (p.eps.empty()) e.error("eps", "must be nonempty");
            p.L_grid = e.get<std::vector<int>>("L_grid", {cfg.geometry.L});
            for (int v : p.L_grid)
                if (v < 0) e.error("L_grid", "entries must be >= 0");
            p.fixed_eps = e.get<double>("fixed_eps", p.fixed_eps);
            if (!(p.fixed_eps > 0.0)) e.error("fixed_eps", "must be > 0");
            ej.update({{"energy", p.energy}, {"eps", p.eps}, {"L_grid", p.L_grid}, {"fixed_eps", p.fixed_eps}});
        } else if (subcommand == "fracmom") {
            read_z();
            read_s(true);
            std::vector<int> def;
            for (int r = 0; r <= cfg.geometry.L; ++r) def.push_back(r);
            p.distances = e.get<std::vector<int>>("distances", def);
            if (p.distances.size() < 2) e.error("distances", "need at least two distances");
            for (int v : p.distances)
                if (v < 0) e.error("distances", "entries must be >= 0");
            const auto mode = e.get<std::string>("exponent", "plain");
            if (mode == "theorem") p.exponent = MomentExponent::Theorem;
            else if (mode != "plain") e.error("exponent", "expected plain or theorem");
            ej.update({{"distances", p.distances}, {"exponent", to_string(p.exponent)}});
        } else if (subcommand == "fvc") {
            read_z();
            read_s(false);
        } else if (subcommand == "regular-pairs") {
            read_interval("interval", -0.5, 0.5);
            p.m = e.get<double>("m", p.m);
            if (!(p.m >= 0.0)) e.error("m", "must be >= 0");
            p.p_exponent = e.get<double>("p", d + 0.1);
            if (!(p.p_exponent > 0.0)) e.error("p", "must be > 0");
            p.max_depth = e.get<int>("max_depth", p.max_depth);
            if (p.max_depth < 0 || p.max_depth > 60) e.error("max_depth", "must lie in [0, 60]");
            ej.update({{"m", p.m}, {"p", p.p_exponent}, {"max_depth", p.max_depth}});
        } else if (subcommand == "suitability") {
            p.energy = e.get<double>("energy", 0.0);
            p.gamma = e.get<double>("gamma", p.gamma);
            if (!(p.gamma >= 0.0)) e.error("gamma", "must be >= 0");
            p.r = e.get<std::vector<int>>("r", p.r);
            if (p.r.empty()) e.error("r", "must be nonempty");
            for (int v : p.r)
                if (v < 1) e.error("r", "entries must be >= 1");
            ej.update({{"energy", p.energy}, {"gamma", p.gamma}, {"r", p.r}});
        } else if (subcommand == "dynloc") {
            read_t_grid();
            p.p = e.get<double>("p", p.p);
            if (!(p.p >= 0.0)) e.error("p", "must be >= 0");
            p.full_window = !e.has("window");
            read_interval("window", -std::numeric_limits<double>::max(), std::numeric_limits<double>::max());
            if (p.full_window) ej["window"] = "all";
            ej["p"] = p.p;
        } else if (subcommand == "verify-bounds") {
            p.max_degree = e.get<int>("max_degree", p.max_degree);
            if (p.max_degree < 1 || p.max_degree > 12) e.error("max_degree", "must lie in [1, 12]");
            p.max_dim = e.get<int>("max_dim", p.max_dim);
            if (p.max_dim < 1 || p.max_dim > 8) e.error("max_dim", "must lie in [1, 8]");
            p.cartan_samples = e.get<int>("cartan_samples", p.cartan_samples);
            if (p.cartan_samples < 1) e.error("cartan_samples", "must be >= 1");
            ej.update({{"max_degree", p.max_degree}, {"max_dim", p.max_dim}, {"cartan_samples", p.cartan_samples}});
        } else if (subcommand == "stone") {
            read_interval("interval", -1.0, 1.0);
            p.stone_eps = e.get<double>("eps", p.stone_eps);
            if (!(p.stone_eps > 0.0 && p.stone_eps <= p.hi - p.lo)) e.error("eps", "must lie in (0, b - a]");
            ej["eps"] = p.stone_eps;
        }
        e.finish();
        res["estimator"] = ej;
    }

    // ensemble
    {
        ObjectReader en = top.child("ensemble");
        cfg.ensemble.samples = en.get<std::uint64_t>("samples", 100);
        if (cfg.ensemble.samples < 1) en.error("samples", "must be >= 1");
        cfg.ensemble.master_seed = en.get<std::uint64_t>("seed", 0);
        cfg.ensemble.workers = static_cast<unsigned>(en.get<std::uint64_t>("workers", 1));
        if (cfg.ensemble.workers < 1) en.error("workers", "must be >= 1");
        cfg.ensemble.failure_threshold = en.get<double>("failure_threshold", 0.01);
        if (!(cfg.ensemble.failure_threshold >= 0.0 && cfg.ensemble.failure_threshold <= 1.0))
            en.error("failure_threshold", "must lie in [0, 1]");
        en.finish();
        res["ensemble"] = {{"samples", cfg.ensemble.samples},
                           {"seed", cfg.ensemble.master_seed},
                           {"failure_threshold", cfg.ensemble.failure_threshold}};
    }

    // output
    {
        ObjectReader o = top.child("output");
        cfg.output_path = o.get<std::string>("path", subcommand + ".csv");
        if (cfg.output_path.empty()) o.error("path", "must be nonempty");
        const auto format = o.get<std::string>("format", "csv");
        if (format != "csv") o.error("format", "only csv is supported");
        o.finish();
        res["output"] = {{"format", "csv"}};
    }
    top.finish();
    if (!errors.empty()) throw ConfigError(errors);
    cfg.resolved = res;
    return cfg;
}

inline ExperimentConfig parse_config(const std::string& text, const std::string& subcommand) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("config: not valid JSON: ") + e.what()});
    }
    return parse_config(doc, subcommand);
}

// --seed / --samples overrides, reflected in the resolved config.
inline void apply_overrides(ExperimentConfig& cfg, std::optional<std::uint64_t> seed,
                            std::optional<std::uint64_t> samples, std::optional<unsigned> workers,
                            std::optional<std::string> out) {
    if (seed) {
        cfg.ensemble.master_seed = *seed;
        cfg.resolved["ensemble"]["seed"] = *seed;
    }
    if (samples) {
        if (*samples < 1) throw ConfigError({"--samples: must be >= 1"});
        cfg.ensemble.samples = *samples;
        cfg.resolved["ensemble"]["samples"] = *samples;
    }
    if (workers) {
        if (*workers < 1) throw ConfigError({"--workers: must be >= 1"});
        cfg.ensemble.workers = *workers;
    }
    if (out) cfg.output_path = *out;
}

} // namespace alloy::cli
