#include "pite/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace pite {

using nlohmann::json;

// ---- line index -----------------------------------------------------------

namespace {

std::string escape_token(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

struct Scanner {
    const std::string& s;
    std::size_t i = 0;
    int line = 1;
    std::map<std::string, int>& out;

    void ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) {
            if (s[i] == '\n') ++line;
            ++i;
        }
    }
    std::string str() {
        std::string v;
        ++i;  // opening quote
        while (i < s.size() && s[i] != '"') {
            if (s[i] == '\\' && i + 1 < s.size()) {
                v += s[i + 1];
                i += 2;
                continue;
            }
            v += s[i++];
        }
        ++i;
        return v;
    }
    void value(const std::string& path) {
        ws();
        if (i >= s.size()) return;
        out.emplace(path, line);
        const char c = s[i];
        if (c == '{') {
            ++i;
            for (;;) {
                ws();
                if (i >= s.size() || s[i] == '}') break;
                const std::string k = str();
                ws();
                ++i;  // ':'
                value(path + "/" + escape_token(k));
                ws();
                if (i < s.size() && s[i] == ',') ++i;
            }
            ++i;
        } else if (c == '[') {
            ++i;
            for (int idx = 0;; ++idx) {
                ws();
                if (i >= s.size() || s[i] == ']') break;
                value(path + "/" + std::to_string(idx));
                ws();
                if (i < s.size() && s[i] == ',') ++i;
            }
            ++i;
        } else if (c == '"') {
            str();
        } else {
            while (i < s.size() && s[i] != ',' && s[i] != '}' && s[i] != ']' &&
                   !std::isspace(static_cast<unsigned char>(s[i])))
                ++i;
        }
    }
};

}  // namespace

LineIndex::LineIndex(const std::string& text) {
    Scanner sc{text, 0, 1, lines_};
    sc.value("");
}

bool LineIndex::has(const std::string& pointer) const { return lines_.count(pointer) > 0; }

int LineIndex::line_of(const std::string& pointer) const {
    std::string p = pointer;
    for (;;) {
        auto it = lines_.find(p);
        if (it != lines_.end()) return it->second;
        if (p.empty()) return 1;
        p = p.substr(0, p.rfind('/'));
    }
}

// ---- typed reader ---------------------------------------------------------

namespace {

std::string dotted(const std::string& ptr) {
    if (ptr.empty()) return "(root)";
    std::string out = ptr.substr(1);
    std::replace(out.begin(), out.end(), '/', '.');
    return out;
}

class Reader {
public:
    Reader(const LineIndex& idx, std::string source) : idx_(idx), src_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
        std::ostringstream os;
        os << src_ << ":" << idx_.line_of(ptr) << ": " << dotted(ptr) << ": " << msg;
        throw ConfigError(os.str());
    }

    void object(const json& j, const std::string& ptr, std::initializer_list<const char*> allowed) const {
        if (!j.is_object()) fail(ptr, "expected an object");
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!ok.count(it.key())) fail(ptr + "/" + escape_token(it.key()), "unknown key");
    }

    double num(const json& j, const std::string& ptr, const char* key, double def) const {
        if (!j.contains(key)) return def;
        const auto& v = j[key];
        if (!v.is_number()) fail(ptr + "/" + key, "expected a number");
        return v.get<double>();
    }
    int integer(const json& j, const std::string& ptr, const char* key, int def) const {
        if (!j.contains(key)) return def;
        const auto& v = j[key];
        if (!v.is_number_integer()) fail(ptr + "/" + key, "expected an integer");
        return v.get<int>();
    }
    bool boolean(const json& j, const std::string& ptr, const char* key, bool def) const {
        if (!j.contains(key)) return def;
        const auto& v = j[key];
        if (!v.is_boolean()) fail(ptr + "/" + key, "expected true or false");
        return v.get<bool>();
    }
    std::string text(const json& j, const std::string& ptr, const char* key, const std::string& def) const {
        if (!j.contains(key)) return def;
        const auto& v = j[key];
        if (!v.is_string()) fail(ptr + "/" + key, "expected a string");
        return v.get<std::string>();
    }
    RVec vec(const json& j, const std::string& ptr, const char* key, const RVec& def) const {
        if (!j.contains(key)) return def;
        const auto& v = j[key];
        if (v.is_number()) return {v.get<double>()};
        if (!v.is_array()) fail(ptr + "/" + key, "expected a number or an array of numbers");
        RVec out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) fail(ptr + "/" + key + "/" + std::to_string(i), "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    // Runs f, rethrowing module ConfigErrors at `ptr`.
    template <class F>
    auto at(const std::string& ptr, F&& f) const {
        try {
            return f();
        } catch (const ConfigError& e) {
            // "module: key must ..." -> point at the key when it exists
            std::string msg = e.what();
            const auto colon = msg.find(": ");
            if (colon != std::string::npos && msg.find(' ') > colon) msg = msg.substr(colon + 2);
            const std::string key = msg.substr(0, msg.find(' '));
            const std::string sub = ptr + "/" + key;
            fail(idx_.has(sub) ? sub : ptr, idx_.has(sub) ? msg.substr(key.size() + 1) : msg);
        }
    }

private:
    const LineIndex& idx_;
    std::string src_;
};

int log2_exact(std::size_t N) {
    int n = 0;
    while ((std::size_t{1} << n) < N) ++n;
    return (std::size_t{1} << n) == N ? n : -1;
}

GridSpec read_grid(const Reader& r, const json& j, const std::string& ptr, GridSpec def) {
    const int d = r.integer(j, ptr, "d", def.d);
    int n = r.integer(j, ptr, "n", def.n);
    if (j.contains("N")) {
        const int N = r.integer(j, ptr, "N", 0);
        n = N > 0 ? log2_exact(static_cast<std::size_t>(N)) : -1;
        if (n < 1) r.fail(ptr + "/N", "N must be a power of two >= 2");
    }
    double L = def.L;
    if (j.contains("L")) {
        if (j["L"].is_string()) {
            const std::string s = j["L"].get<std::string>();
            if (s == "2pi") L = 2 * kPi;
            else if (s == "pi") L = kPi;
            else r.fail(ptr + "/L", "expected a number, \"pi\" or \"2pi\"");
        } else {
            L = r.num(j, ptr, "L", def.L);
        }
    }
    return r.at(ptr, [&] { return GridSpec(d, n, L); });
}

InitialSpec read_initial(const Reader& r, const json& j, const std::string& ptr) {
    r.object(j, ptr,
             {"kind", "amplitude", "grid_normalized", "x0", "sigma", "centers", "mode", "table", "species",
              "coefficients"});
    InitialSpec u;
    u.kind = r.text(j, ptr, "kind", u.kind);
    static const std::set<std::string> kinds{"sine", "delta", "gaussian", "gaussian_sum", "burgers", "mode", "table"};
    if (!kinds.count(u.kind)) r.fail(ptr + "/kind", "unknown initial condition '" + u.kind + "'");
    u.amplitude = r.num(j, ptr, "amplitude", u.amplitude);
    u.grid_normalized = r.boolean(j, ptr, "grid_normalized", u.grid_normalized);
    u.x0 = r.vec(j, ptr, "x0", {});
    u.sigma = r.num(j, ptr, "sigma", u.sigma);
    if (j.contains("centers")) {
        const auto& c = j["centers"];
        if (!c.is_array()) r.fail(ptr + "/centers", "expected an array of points");
        for (std::size_t i = 0; i < c.size(); ++i) {
            const std::string p = ptr + "/centers/" + std::to_string(i);
            if (!c[i].is_array()) r.fail(p, "expected an array of numbers");
            RVec x;
            for (const auto& e : c[i]) {
                if (!e.is_number()) r.fail(p, "expected numbers");
                x.push_back(e.get<double>());
            }
            u.centers.push_back(x);
        }
    }
    for (double m : r.vec(j, ptr, "mode", {})) u.mode.push_back(static_cast<int>(m));
    for (double x : r.vec(j, ptr, "table", {})) u.table.emplace_back(x);
    u.species = r.integer(j, ptr, "species", u.species);
    if (u.species != 1 && u.species != 2) r.fail(ptr + "/species", "must be 1 or 2");
    u.coefficients = r.text(j, ptr, "coefficients", u.coefficients);
    if (u.coefficients != "auto" && u.coefficients != "samples" && u.coefficients != "oversampled")
        r.fail(ptr + "/coefficients", "must be auto, samples or oversampled");
    return u;
}

Variant read_variant(const Reader& r, const json& j, const std::string& ptr, const char* key, Variant def) {
    if (!j.contains(key)) return def;
    const std::string s = r.text(j, ptr, key, "");
    return r.at(ptr + "/" + key, [&] { return parse_variant(s); });
}

Schedule read_schedule(const Reader& r, const json& j, const std::string& ptr, Schedule def) {
    r.object(j, ptr, {"dtau_min", "dtau_max", "K"});
    def.dtau_min = r.num(j, ptr, "dtau_min", def.dtau_min);
    def.dtau_max = r.num(j, ptr, "dtau_max", def.dtau_max);
    def.K = r.integer(j, ptr, "K", def.K);
    return def;
}

PiteConfig read_pite(const Reader& r, const json& j, const std::string& ptr) {
    r.object(j, ptr,
             {"variant", "order", "m0", "dtau", "schedule", "trotter_order", "potential_variant", "apite_form",
              "clamp_theta", "block_mode"});
    PiteConfig c;
    c.variant = read_variant(r, j, ptr, "variant", c.variant);
    c.order = r.integer(j, ptr, "order", c.order);
    c.m0 = r.num(j, ptr, "m0", c.m0);
    c.dtau = r.num(j, ptr, "dtau", c.dtau);
    if (j.contains("schedule")) c.schedule = read_schedule(r, j["schedule"], ptr + "/schedule", Schedule{});
    c.trotter_order = r.integer(j, ptr, "trotter_order", c.trotter_order);
    if (j.contains("potential_variant")) c.potential_variant = read_variant(r, j, ptr, "potential_variant", c.variant);
    const std::string form = r.text(j, ptr, "apite_form", "joint");
    if (form == "joint") c.apite_form = ApiteForm::joint;
    else if (form == "split") c.apite_form = ApiteForm::split;
    else r.fail(ptr + "/apite_form", "must be joint or split");
    c.clamp_theta = r.boolean(j, ptr, "clamp_theta", c.clamp_theta);
    const std::string bm = r.text(j, ptr, "block_mode", "direct");
    if (bm == "direct") c.block_mode = BlockMode::direct;
    else if (bm == "circuit") c.block_mode = BlockMode::circuit;
    else r.fail(ptr + "/block_mode", "must be direct or circuit");
    r.at(ptr, [&] {
        c.validate();
        return 0;
    });
    return c;
}

EquationConfig read_equation(const Reader& r, const json& j, const std::string& ptr) {
    r.object(j, ptr, {"d", "n", "N", "L", "a", "v", "potential", "advection_convention"});
    EquationConfig e;
    e.grid = read_grid(r, j, ptr, e.grid);
    e.a = r.num(j, ptr, "a", e.a);
    if (e.a < 0) r.fail(ptr + "/a", "diffusion coefficient must be >= 0");
    e.v = r.vec(j, ptr, "v", RVec(e.grid.d, 0.0));
    if (static_cast<int>(e.v.size()) != e.grid.d) r.fail(ptr + "/v", "length must equal d");
    if (j.contains("potential")) {
        const auto& p = j["potential"];
        const std::string pp = ptr + "/potential";
        r.object(p, pp, {"kind", "height", "center", "halfwidth", "amplitude", "x0", "sigma", "table"});
        PotentialSpec s;
        s.kind = r.text(p, pp, "kind", s.kind);
        s.height = r.num(p, pp, "height", s.height);
        s.center = r.num(p, pp, "center", s.center);
        s.halfwidth = r.num(p, pp, "halfwidth", s.halfwidth);
        s.amplitude = r.num(p, pp, "amplitude", s.amplitude);
        s.x0 = r.vec(p, pp, "x0", {});
        s.sigma = r.num(p, pp, "sigma", s.sigma);
        s.table = r.vec(p, pp, "table", {});
        e.potential = s;
        r.at(pp, [&] { return make_potential(e.grid, s); });
    }
    const std::string conv = r.text(j, ptr, "advection_convention", "pde");
    if (conv == "pde") e.convention = AdvectionConvention::pde;
    else if (conv == "printed") e.convention = AdvectionConvention::printed;
    else r.fail(ptr + "/advection_convention", "must be pde or printed");
    return e;
}

std::vector<double> read_positive_list(const Reader& r, const json& j, const std::string& ptr, const char* key,
                                       std::vector<double> def) {
    auto v = r.vec(j, ptr, key, def);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!(v[i] >= 0)) r.fail(ptr + "/" + key + "/" + std::to_string(i), "must be >= 0");
    return v;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
        const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos > 0 ? pos - 1 : 0), '\n'));
        std::string msg = e.what();
        const auto colon = msg.find("syntax error");
        if (colon != std::string::npos) msg = msg.substr(colon);
        throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
    }
    const LineIndex idx(text);
    const Reader r(idx, source);
    r.object(j, "", {"name", "equation", "initial", "pite", "time", "reference", "output", "decompose", "compare",
                     "system"});

    RunConfig c;
    c.raw = j;
    c.name = r.text(j, "", "name", c.name);
    if (j.contains("equation")) c.equation = read_equation(r, j["equation"], "/equation");
    if (j.contains("initial")) c.initial = read_initial(r, j["initial"], "/initial");
    if (j.contains("pite")) c.pite = read_pite(r, j["pite"], "/pite");

    if (j.contains("time")) {
        const auto& t = j["time"];
        r.object(t, "/time", {"T", "snapshots"});
        c.time.T = r.num(t, "/time", "T", c.time.T);
        if (!(c.time.T >= 0)) r.fail("/time/T", "must be >= 0");
        c.time.snapshots = read_positive_list(r, t, "/time", "snapshots", {});
        r.at("/time/T", [&] { return step_sizes(c.pite, c.time.T); });
    }
    if (j.contains("reference")) {
        const auto& f = j["reference"];
        const std::string p = "/reference";
        r.object(f, p,
                 {"kind", "case", "n_trun", "grid_truncation", "fdm_n", "fdm_scheme", "fdm_dtau", "fdm_dtau_rule",
                  "divide_by_n"});
        auto& R = c.reference;
        R.kind = r.text(f, p, "kind", R.kind);
        static const std::set<std::string> kinds{"none", "analytic", "dense", "exact_pite", "fdm", "hhl"};
        if (!kinds.count(R.kind)) r.fail(p + "/kind", "unknown reference kind '" + R.kind + "'");
        if (f.contains("case")) R.analytic_case = r.at(p + "/case", [&] { return parse_analytic_case(r.text(f, p, "case", "")); });
        R.n_trun = r.integer(f, p, "n_trun", R.n_trun);
        R.grid_truncation = r.boolean(f, p, "grid_truncation", R.grid_truncation);
        R.fdm_n = r.integer(f, p, "fdm_n", R.fdm_n);
        if (R.fdm_n < 4) r.fail(p + "/fdm_n", "must be >= 4");
        if (f.contains("fdm_scheme")) R.fdm_scheme = r.at(p + "/fdm_scheme", [&] { return parse_fdm_scheme(r.text(f, p, "fdm_scheme", "")); });
        R.fdm_dtau = r.num(f, p, "fdm_dtau", R.fdm_dtau);
        const std::string rule = r.text(f, p, "fdm_dtau_rule", "fixed");
        if (rule == "t_over_1000") R.fdm_dtau_t_over_1000 = true;
        else if (rule != "fixed") r.fail(p + "/fdm_dtau_rule", "must be fixed or t_over_1000");
        R.divide_by_n = r.boolean(f, p, "divide_by_n", R.divide_by_n);
    }
    if (j.contains("output")) {
        const auto& o = j["output"];
        r.object(o, "/output", {"n_f", "dump"});
        const int nf = r.integer(o, "/output", "n_f", 0);
        if (nf != 0 && (log2_exact(static_cast<std::size_t>(nf)) < 0 || nf < static_cast<int>(c.equation.grid.N())))
            r.fail("/output/n_f", "must be a power of two >= N");
        c.output.n_f = static_cast<std::size_t>(nf);
        c.output.dump = r.boolean(o, "/output", "dump", false);
    }
    if (j.contains("decompose")) {
        const auto& o = j["decompose"];
        r.object(o, "/decompose", {"dtaus", "ns", "t"});
        c.decompose.dtaus = read_positive_list(r, o, "/decompose", "dtaus", c.decompose.dtaus);
        c.decompose.ns.clear();
        for (double x : r.vec(o, "/decompose", "ns", {4, 5, 6})) c.decompose.ns.push_back(static_cast<int>(x));
        c.decompose.t = r.num(o, "/decompose", "t", c.decompose.t);
    }
    if (j.contains("compare")) {
        const auto& o = j["compare"];
        const std::string p = "/compare";
        r.object(o, p, {"methods", "m0", "apite_dtau", "schedule"});
        if (o.contains("methods")) {
            if (!o["methods"].is_array()) r.fail(p + "/methods", "expected an array of strings");
            c.compare.methods.clear();
            static const std::set<std::string> ok{"aapite", "apite", "vs_apite", "hhl", "fdm", "analytic", "dense"};
            for (std::size_t i = 0; i < o["methods"].size(); ++i) {
                const auto& m = o["methods"][i];
                if (!m.is_string() || !ok.count(m.get<std::string>()))
                    r.fail(p + "/methods/" + std::to_string(i), "unknown method");
                c.compare.methods.push_back(m.get<std::string>());
            }
        }
        c.compare.m0 = r.num(o, p, "m0", c.compare.m0);
        c.compare.apite_dtau = r.num(o, p, "apite_dtau", c.compare.apite_dtau);
        if (o.contains("schedule")) c.compare.schedule = read_schedule(r, o["schedule"], p + "/schedule", c.compare.schedule);
    }
    if (j.contains("system")) {
        const auto& o = j["system"];
        const std::string p = "/system";
        r.object(o, p,
                 {"model", "d", "n", "N", "L", "dtau", "T", "reversed", "a1", "a2", "nu", "p11", "p12", "p21", "p22",
                  "initial", "snapshots"});
        SystemConfig s;
        const std::string model = r.text(o, p, "model", "turing");
        s.params = default_system_params(r.at(p + "/model", [&] { return parse_model(model); }));
        s.grid = read_grid(r, o, p, s.grid);
        s.dtau = r.num(o, p, "dtau", s.params.model == NonlinearModel::burgers ? 0.04 : 0.05);
        s.T = r.num(o, p, "T", s.params.model == NonlinearModel::burgers ? 1.0 : 30.0);
        if (!(s.dtau > 0)) r.fail(p + "/dtau", "must be > 0");
        s.reversed = r.boolean(o, p, "reversed", false);
        s.params.a1 = r.num(o, p, "a1", s.params.a1);
        s.params.a2 = r.num(o, p, "a2", s.params.a2);
        s.params.nu = r.num(o, p, "nu", s.params.nu);
        if (s.params.model == NonlinearModel::burgers) s.params.a1 = s.params.a2 = s.params.nu;
        s.params.p11 = r.num(o, p, "p11", s.params.p11);
        s.params.p12 = r.num(o, p, "p12", s.params.p12);
        s.params.p21 = r.num(o, p, "p21", s.params.p21);
        s.params.p22 = r.num(o, p, "p22", s.params.p22);
        s.snapshots = read_positive_list(r, o, p, "snapshots", {});
        if (o.contains("initial")) {
            s.initial = read_initial(r, o["initial"], p + "/initial");
        } else if (s.params.model == NonlinearModel::burgers) {
            s.initial.kind = "burgers";
        } else {
            s.initial.kind = "gaussian_sum";
            s.initial.sigma = std::sqrt(0.05);
            s.initial.grid_normalized = true;
            s.initial.coefficients = "samples";
            s.initial.species = 2;
            const double a = s.grid.L / 4, b = 3 * s.grid.L / 4;
            s.initial.centers = {{a, a}, {a, b}, {b, a}, {b, b}};
        }
        c.system = s;
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError(path + ": cannot open config file");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), path);
}

RunConfig with_override(const RunConfig& cfg, const std::string& field, const std::string& value) {
    json j = cfg.raw;
    json v;
    try {
        v = json::parse(value);
    } catch (const json::parse_error&) {
        v = value;  // bare word: treat as a string
    }
    std::string ptr;
    std::stringstream ss(field);
    std::string part;
    while (std::getline(ss, part, '.')) ptr += "/" + part;
    if (ptr.empty()) throw ConfigError("--sweep: empty field name");
    j[json::json_pointer(ptr)] = v;
    return parse_config(j.dump(2), "<sweep " + field + "=" + value + ">");
}

HamiltonianParams make_params(const EquationConfig& eq) {
    return make_params(eq.grid, eq.a, eq.v, eq.potential, eq.convention);
}

}  // namespace pite
