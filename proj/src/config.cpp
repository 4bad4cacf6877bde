#include "noperr/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace noperr {

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

namespace {

// minimal scanner; the text has already been accepted by nlohmann, so it
// only needs to track where each value starts
struct Scanner {
    const std::string& s;
    std::size_t i = 0;
    std::map<std::string, std::size_t>& out;

    void ws() {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
    }
    std::string str() {
        std::string r;
        ++i;  // opening quote
        while (i < s.size() && s[i] != '"') {
            if (s[i] == '\\') {
                ++i;
                if (i < s.size() && s[i] == 'u') {
                    r += "?";
                    i += 5;
                    continue;
                }
            }
            if (i < s.size()) r += s[i++];
        }
        ++i;
        return r;
    }
    static std::string escape(const std::string& k) {
        std::string r;
        for (char c : k) {
            if (c == '~') r += "~0";
            else if (c == '/') r += "~1";
            else r += c;
        }
        return r;
    }
    void value(const std::string& ptr) {
        ws();
        out[ptr] = i;
        if (i >= s.size()) return;
        char c = s[i];
        if (c == '{') {
            ++i;
            ws();
            if (s[i] == '}') {
                ++i;
                return;
            }
            while (i < s.size()) {
                ws();
                std::string key = str();
                ws();
                ++i;  // ':'
                value(ptr + "/" + escape(key));
                ws();
                if (s[i] == ',') {
                    ++i;
                    continue;
                }
                ++i;  // '}'
                return;
            }
        } else if (c == '[') {
            ++i;
            ws();
            if (s[i] == ']') {
                ++i;
                return;
            }
            for (std::size_t k = 0; i < s.size(); ++k) {
                value(ptr + "/" + std::to_string(k));
                ws();
                if (s[i] == ',') {
                    ++i;
                    continue;
                }
                ++i;
                return;
            }
        } else if (c == '"') {
            str();
        } else {
            while (i < s.size() && s[i] != ',' && s[i] != '}' && s[i] != ']' && s[i] != ' ' && s[i] != '\n' &&
                   s[i] != '\r' && s[i] != '\t')
                ++i;
        }
    }
};

}  // namespace

JsonLocator::JsonLocator(const std::string& text) {
    std::map<std::string, std::size_t> off;
    Scanner sc{text, 0, off};
    sc.value("");
    for (auto& [k, v] : off) pos_[k] = line_col(text, v);
}

std::pair<std::size_t, std::size_t> JsonLocator::find(const std::string& pointer) const {
    // fall back to the closest existing parent
    std::string p = pointer;
    while (true) {
        auto it = pos_.find(p);
        if (it != pos_.end()) return it->second;
        if (p.empty()) return {0, 0};
        p = p.substr(0, p.rfind('/'));
    }
}

namespace {

struct Ctx {
    std::string path;
    const JsonLocator* loc;

    [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
        auto [l, c] = loc->find(ptr);
        std::ostringstream os;
        os << path << ":" << l << ":" << c << ": " << (ptr.empty() ? "/" : ptr) << ": " << msg;
        throw ConfigError(os.str());
    }
};

// object reader that remembers which keys were consumed
class Obj {
public:
    Obj(const json& j, std::string ptr, const Ctx& ctx) : j_(j), ptr_(std::move(ptr)), ctx_(ctx) {
        if (!j_.is_object()) ctx_.fail(ptr_, "expected an object");
    }

    bool has(const std::string& k) const { return j_.contains(k); }
    std::string at(const std::string& k) const { return ptr_ + "/" + k; }

    Obj child(const std::string& k) {
        seen_.insert(k);
        return Obj(j_.at(k), at(k), ctx_);
    }

    template <class T>
    T get(const std::string& k, T def) {
        if (!has(k)) return def;
        seen_.insert(k);
        return convert<T>(j_.at(k), at(k));
    }

    template <class T>
    T need(const std::string& k) {
        if (!has(k)) ctx_.fail(ptr_, "missing required key '" + k + "'");
        seen_.insert(k);
        return convert<T>(j_.at(k), at(k));
    }

    template <class T>
    T convert(const json& v, const std::string& p) const {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) ctx_.fail(p, "expected a boolean");
            return v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) ctx_.fail(p, "expected a string");
            return v.get<std::string>();
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) ctx_.fail(p, "expected a number");
            return v.get<T>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) ctx_.fail(p, "expected an integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_unsigned()) return v.get<T>();
                if (v.get<long long>() < 0) ctx_.fail(p, "expected a non-negative integer");
            }
            return v.get<T>();
        } else {
            // std::vector<...>
            if (!v.is_array()) ctx_.fail(p, "expected an array");
            T r;
            for (std::size_t k = 0; k < v.size(); ++k)
                r.push_back(convert<typename T::value_type>(v[k], p + "/" + std::to_string(k)));
            return r;
        }
    }

    // rejects keys that were never read
    void done() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) ctx_.fail(at(it.key()), "unknown key '" + it.key() + "'");
    }

    template <class F>
    auto guard(const std::string& k, F&& f) const -> decltype(f()) {
        try {
            return f();
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            ctx_.fail(at(k), e.what());
        }
    }

    const Ctx& ctx() const { return ctx_; }
    const std::string& ptr() const { return ptr_; }

private:
    const json& j_;
    std::string ptr_;
    const Ctx& ctx_;
    std::set<std::string> seen_;
};

void positive(Obj& o, const std::string& k, double v) {
    if (!(v > 0)) o.ctx().fail(o.at(k), "must be positive");
}

template <class T>
void nonempty(Obj& o, const std::string& k, const std::vector<T>& v) {
    if (v.empty()) o.ctx().fail(o.at(k), "must not be empty");
}

void read_model(Obj o, RunConfig& c) {
    if (o.has("file")) {
        c.model_file = o.need<std::string>("file");
        for (const char* k : {"dim", "depth", "d_a", "channels", "d_u", "kernel", "modes", "activation"})
            if (o.has(k)) o.ctx().fail(o.at(k), "cannot be combined with 'file'");
    }
    Architecture& a = c.arch;
    a.dim = o.get<int>("dim", a.dim);
    if (a.dim != 1 && a.dim != 2) o.ctx().fail(o.at("dim"), "dim must be 1 or 2");
    a.depth = o.get<std::size_t>("depth", a.depth);
    a.d_a = o.get<std::size_t>("d_a", a.d_a);
    a.channels = o.get<std::size_t>("channels", a.channels);
    a.d_u = o.get<std::size_t>("d_u", a.d_u);
    a.modes = o.get<std::size_t>("modes", a.modes);
    for (const char* k : {"depth", "d_a", "channels", "d_u", "modes"})
        if (o.has(k) && o.get<std::size_t>(k, 1) == 0) o.ctx().fail(o.at(k), "must be positive");
    if (o.has("kernel")) {
        std::string s = o.get<std::string>("kernel", "");
        a.kernel = o.guard("kernel", [&] { return parse_kernel_kind(s); });
    }
    if (o.has("activation")) {
        std::string s = o.get<std::string>("activation", "");
        a.act = o.guard("activation", [&] { return Activation::parse(s); });
    }
    if (o.has("seed")) c.model_seed = o.get<std::uint64_t>("seed", 0);
    o.done();
}

void read_conv(Obj o, RunConfig& c) {
    std::string m = o.get<std::string>("mode", "cutoff");
    std::size_t k = o.get<std::size_t>("cutoff", 16);
    c.mode = o.guard("mode", [&] { return ConvMode::parse(m, k); });
    o.done();
}

void read_input(Obj o, InputSpec& in) {
    in.eps = o.get<double>("eps", in.eps);
    positive(o, "eps", in.eps);
    std::string conv = o.get<std::string>("convention", "variance");
    if (conv == "variance") in.convention = GrfConvention::Variance;
    else if (conv == "amplitude") in.convention = GrfConvention::Amplitude;
    else o.ctx().fail(o.at("convention"), "expected 'variance' or 'amplitude'");
    in.normalize = o.get<bool>("normalize", in.normalize);
    o.done();
}

void read_sweep(Obj o, SweepConfig& s) {
    s.n_full = o.get<std::size_t>("n_full", s.n_full);
    s.factors = o.get<std::vector<std::size_t>>("factors", s.factors);
    nonempty(o, "factors", s.factors);
    s.smoothness = o.get<std::vector<double>>("smoothness", s.smoothness);
    nonempty(o, "smoothness", s.smoothness);
    s.samples = o.get<std::size_t>("samples", s.samples);
    positive(o, "samples", double(s.samples));
    s.seed_offset = o.get<std::size_t>("seed_offset", s.seed_offset);
    if (o.has("metric")) {
        std::string m = o.get<std::string>("metric", "");
        s.metric = o.guard("metric", [&] { return parse_metric(m); });
    }
    if (o.has("lift")) {
        std::string m = o.get<std::string>("lift", "");
        s.lift = o.guard("lift", [&] { return parse_lift(m); });
    }
    std::string r = o.get<std::string>("regime", "cutoff");
    if (r == "cutoff") s.regime = Regime::Cutoff;
    else if (r == "polynomial") s.regime = Regime::PolynomialDecay;
    else o.ctx().fail(o.at("regime"), "expected 'cutoff' or 'polynomial'");
    s.kernel_alpha = o.get<double>("kernel_alpha", s.kernel_alpha);
    s.c_ds = o.get<double>("c_ds", s.c_ds);
    positive(o, "c_ds", s.c_ds);
    o.done();
}

void read_stability(Obj o, StabilityConfig& s) {
    s.n = o.get<std::size_t>("n", s.n);
    s.s = o.get<double>("s", s.s);
    s.inputs = o.get<std::size_t>("inputs", s.inputs);
    s.directions = o.get<std::size_t>("directions", s.directions);
    s.lipschitz_pairs = o.get<std::size_t>("lipschitz_pairs", s.lipschitz_pairs);
    if (o.has("epsilons") && (o.has("eps_max") || o.has("eps_step")))
        o.ctx().fail(o.at("epsilons"), "give either 'epsilons' or 'eps_max'/'eps_step'");
    s.epsilons = o.get<std::vector<double>>("epsilons", s.epsilons);
    if (o.has("eps_max") || o.has("eps_step")) {
        double mx = o.get<double>("eps_max", 0.8), st = o.get<double>("eps_step", 0.025);
        positive(o, "eps_max", mx);
        positive(o, "eps_step", st);
        s.epsilons.clear();
        for (std::size_t k = 0; k * st <= mx * (1 + 1e-12); ++k) s.epsilons.push_back(k * st);
    }
    o.done();
}

void read_nyquist(Obj o, NyquistConfig& n) {
    n.ks = o.get<std::vector<long>>("ks", n.ks);
    n.Ls = o.get<std::vector<std::size_t>>("Ls", n.Ls);
    nonempty(o, "ks", n.ks);
    nonempty(o, "Ls", n.Ls);
    n.n_ref = o.get<std::size_t>("n_ref", n.n_ref);
    n.samples = o.get<std::size_t>("samples", n.samples);
    o.done();
}

void read_iss(Obj o, RunConfig& c) {
    c.iss_s = o.get<double>("s", c.iss_s);
    c.iss_deltas = o.get<std::vector<double>>("deltas", c.iss_deltas);
    nonempty(o, "deltas", c.iss_deltas);
    for (std::size_t k = 0; k < c.iss_deltas.size(); ++k)
        if (c.iss_deltas[k] < 0) o.ctx().fail(o.at("deltas") + "/" + std::to_string(k), "must be non-negative");
    if (o.has("c_ds")) {
        c.iss_c_ds = o.get<double>("c_ds", 1.0);
        positive(o, "c_ds", *c.iss_c_ds);
    }
    if (o.has("calibration")) {
        Obj k = o.child("calibration");
        c.iss_calibration.samples = k.get<std::size_t>("samples", c.iss_calibration.samples);
        positive(k, "samples", double(c.iss_calibration.samples));
        k.done();
    }
    o.done();
}

void read_grf(Obj o, GrfCheckConfig& g) {
    g.dim = o.get<int>("dim", g.dim);
    g.n = o.get<std::size_t>("n", g.n);
    g.smoothness = o.get<std::vector<double>>("smoothness", g.smoothness);
    g.seeds = o.get<std::size_t>("seeds", g.seeds);
    g.xi_min = o.get<double>("xi_min", g.xi_min);
    g.xi_max = o.get<double>("xi_max", g.xi_max);
    if (!(g.xi_min > 0 && g.xi_max > g.xi_min)) o.ctx().fail(o.at("xi_max"), "need 0 < xi_min < xi_max");
    o.done();
}

void read_kernel_check(Obj o, KernelCheckConfig& k) {
    k.seeds = o.get<std::size_t>("seeds", k.seeds);
    k.channels = o.get<std::size_t>("channels", k.channels);
    k.modes = o.get<std::size_t>("modes", k.modes);
    k.xi_min = o.get<double>("xi_min", k.xi_min);
    k.xi_max = o.get<double>("xi_max", k.xi_max);
    k.grid = o.get<std::vector<std::size_t>>("grid", k.grid);
    if (!(k.xi_min > 0 && k.xi_max > k.xi_min)) o.ctx().fail(o.at("xi_max"), "need 0 < xi_min < xi_max");
    o.done();
}

}  // namespace

void RunConfig::finalize() {
    const std::uint64_t ms = effective_model_seed();
    sweep.name = name;
    sweep.arch = arch;
    sweep.model_seed = ms;
    sweep.seed = seed;
    sweep.input = input;
    sweep.mode = mode;
    sweep.threads = threads;

    stability.name = name;
    stability.arch = arch;
    stability.model_seed = ms;
    stability.seed = seed;
    stability.input = input;
    stability.mode = mode;
    stability.threads = threads;

    nyquist.name = name;
    nyquist.arch = arch;
    nyquist.model_seed = ms;
    nyquist.seed = seed;
    nyquist.mode = mode;
    nyquist.threads = threads;

    grf.input = input;
    grf.seed = seed;
    grf.threads = threads;
    kernel_check.seed = seed;
}

RunConfig parse_run_config(const std::string& text, const std::string& path) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [l, c] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ConfigError(path + ":" + std::to_string(l) + ":" + std::to_string(c) + ": invalid JSON: " + e.what());
    }
    JsonLocator loc(text);
    Ctx ctx{path, &loc};
    Obj top(j, "", ctx);

    RunConfig c;
    c.path = path;
    c.raw = j;
    c.experiment = top.need<std::string>("experiment");
    if (std::find(kCommands.begin(), kCommands.end(), c.experiment) == kCommands.end())
        ctx.fail("/experiment", "unknown experiment '" + c.experiment + "'");
    c.name = top.get<std::string>("name", c.experiment);
    c.seed = top.get<std::uint64_t>("seed", c.seed);
    c.threads = top.get<unsigned>("threads", 0);

    // per-experiment defaults that differ from the sweep's
    if (c.experiment == "stability" || c.experiment == "depth") {
        c.arch = StabilityConfig{}.arch;
        c.mode = ConvMode::sampled();
    } else if (c.experiment == "nyquist") {
        c.arch = NyquistConfig{}.arch;
        c.mode = ConvMode::sampled();
    }

    if (top.has("model")) read_model(top.child("model"), c);
    if (top.has("conv")) read_conv(top.child("conv"), c);
    if (top.has("input")) read_input(top.child("input"), c.input);
    if (top.has("sweep")) read_sweep(top.child("sweep"), c.sweep);
    if (top.has("stability")) read_stability(top.child("stability"), c.stability);
    if (top.has("depth")) {
        Obj d = top.child("depth");
        c.depths = d.get<std::vector<std::size_t>>("depths", c.depths);
        nonempty(d, "depths", c.depths);
        d.done();
    }
    if (top.has("nyquist")) read_nyquist(top.child("nyquist"), c.nyquist);
    if (top.has("iss")) read_iss(top.child("iss"), c);
    if (top.has("bounds")) {
        Obj b = top.child("bounds");
        c.bounds_n = b.get<std::size_t>("N", c.bounds_n);
        c.bounds_s = b.get<double>("s", c.bounds_s);
        b.done();
    }
    if (top.has("grf_check")) read_grf(top.child("grf_check"), c.grf);
    if (top.has("kernel_check")) read_kernel_check(top.child("kernel_check"), c.kernel_check);
    top.done();

    if (c.model_file && !path.empty() && path != "<config>") {
        std::filesystem::path p(*c.model_file);
        if (p.is_relative()) c.model_file = (std::filesystem::path(path).parent_path() / p).string();
    }

    c.finalize();
    // semantic checks with the section that owns them
    auto check = [&](const std::string& section, auto&& f) {
        try {
            f();
        } catch (const std::exception& e) {
            ctx.fail("/" + section, e.what());
        }
    };
    if (c.experiment == "sweep" || c.experiment == "iss") check("sweep", [&] { c.sweep.validate(); });
    if (c.experiment == "stability" || c.experiment == "depth") check("stability", [&] { c.stability.validate(); });
    if (c.experiment == "nyquist") check("nyquist", [&] { c.nyquist.validate(); });
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), path);
}

OperatorModel build_model(const RunConfig& cfg) {
    if (cfg.model_file) return model_load(*cfg.model_file);
    return model_random_init(cfg.arch, cfg.effective_model_seed());
}

}  // namespace noperr
