#include "pite/harness.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "pite/postproc.hpp"
#include "pite/reference.hpp"

namespace pite {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_time(double t) {
    std::ostringstream os;
    os << std::setprecision(10) << t;
    return os.str();
}

std::vector<double> report_times(const RunConfig& cfg) {
    std::vector<double> t = cfg.time.snapshots;
    t.push_back(cfg.time.T);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), t.end());
    return t;
}

State initial_state(const RunConfig& cfg) {
    return prepare_initial_state(fourier_coefficients(cfg.initial, cfg.equation.grid));
}

namespace {

int log2_exact(std::size_t N) {
    int n = 0;
    while ((std::size_t{1} << n) < N) ++n;
    if ((std::size_t{1} << n) != N) throw ConfigError("grid size " + std::to_string(N) + " is not a power of two");
    return n;
}

bool potential_is_zero(const RunConfig& cfg) {
    const auto pot = make_potential(cfg.equation.grid, cfg.equation.potential);
    return std::all_of(pot.raw.values.begin(), pot.raw.values.end(), [](double x) { return x == 0.0; });
}

std::size_t output_points(const RunConfig& cfg) {
    return cfg.output.n_f ? cfg.output.n_f : cfg.equation.grid.N();
}

// Closed-form samples of the initial condition where the catalog has one;
// otherwise the pixel reconstruction of the prepared state.
RVec initial_samples_1d(const RunConfig& cfg, std::size_t M) {
    const GridSpec& g = cfg.equation.grid;
    const InitialSpec& u = cfg.initial;
    RVec out(M);
    const double L = g.L;
    if (u.kind == "sine") {
        for (std::size_t q = 0; q < M; ++q) out[q] = u.amplitude * std::sin(kPi * q / static_cast<double>(M));
        return out;
    }
    if (u.kind == "gaussian" && !u.grid_normalized) {
        const double x0 = u.x0.empty() ? L / 2 : u.x0[0];
        for (std::size_t q = 0; q < M; ++q) {
            const double x = L * q / static_cast<double>(M);
            out[q] = u.amplitude * std::exp(-(x - x0) * (x - x0) / (2 * u.sigma * u.sigma));
        }
        return out;
    }
    const State st = initial_state(cfg);
    const CVec f = reconstruct_solution(st, M).front();
    for (std::size_t q = 0; q < M; ++q) out[q] = f[q].real();
    return out;
}

AnalyticCase analytic_case_for(const RunConfig& cfg) {
    if (cfg.equation.grid.d != 1) throw ConfigError("analytic reference is one-dimensional only");
    if (!potential_is_zero(cfg)) throw ConfigError("analytic reference needs V = 0");
    if (cfg.initial.kind == "sine") return AnalyticCase::sine;
    if (cfg.initial.kind == "delta") {
        if (!cfg.initial.x0.empty() && std::abs(cfg.initial.x0[0] - cfg.equation.grid.L / 2) > 1e-12)
            throw ConfigError("analytic delta reference assumes x0 = L/2");
        return AnalyticCase::delta;
    }
    throw ConfigError("no analytic reference for initial condition '" + cfg.initial.kind + "'");
}

double fdm_step(const RunConfig& cfg, double t) {
    const auto& R = cfg.reference;
    if (R.fdm_dtau > 0) return R.fdm_dtau;
    if (R.fdm_dtau_t_over_1000) return t / 1000.0;
    return cfg.pite.dtau;
}

Eigen::VectorXcd initial_vector(const RunConfig& cfg) {
    const State st = initial_state(cfg);
    if (st.layout.n_species != 0) throw ConfigError("dense references support a single species");
    Eigen::VectorXcd v = to_eigen(st.amps);
    return v * st.scale;
}

CVec field_of(const CVec& amps, const GridSpec& g, double factor, std::size_t M) {
    return reconstruct_block(amps, g, factor, M);
}

}  // namespace

CVec reference_field(const RunConfig& cfg, const std::string& kind, double t, std::size_t M) {
    const GridSpec& g = cfg.equation.grid;
    if (kind == "analytic") {
        const AnalyticCase c = analytic_case_for(cfg);
        const auto& R = cfg.reference;
        CVec w(M);
        const double v = cfg.equation.v.empty() ? 0.0 : cfg.equation.v[0];
        for (std::size_t q = 0; q < M; ++q)
            w[q] = cfg.initial.amplitude *
                   truncated_analytic_1d(c, R.n_trun, g.L * q / static_cast<double>(M), t, cfg.equation.a, v, g.L,
                                         R.grid_truncation);
        return w;
    }
    if (kind == "dense" || kind == "hhl") {
        if (g.d * g.n > 12) throw ConfigError("dense reference guard: d*n must be <= 12");
        const auto H = assemble_dense_hamiltonian(g, make_params(cfg.equation));
        const Eigen::VectorXcd v0 = initial_vector(cfg);
        Eigen::VectorXcd r;
        if (kind == "dense") {
            r = dense_ite(H, t, v0);
        } else {
            const long K = std::lround(t / cfg.pite.dtau);
            if (std::abs(K * cfg.pite.dtau - t) > 1e-9 * std::max(1.0, t))
                throw ConfigError("hhl reference: t is off the step lattice");
            r = hhl_run(H, cfg.pite.dtau, static_cast<int>(K), v0).final;
        }
        return field_of(from_eigen(r), g, 1.0, M);
    }
    if (kind == "exact_pite") {
        const auto res = exact_pite_reference_run(initial_state(cfg), make_params(cfg.equation), cfg.pite, t);
        return reconstruct_solution(res.final, M).front();
    }
    if (kind == "fdm") {
        if (g.d != 1) throw ConfigError("fdm reference is one-dimensional only");
        const std::size_t Nf = static_cast<std::size_t>(cfg.reference.fdm_n);
        if (M != Nf) throw ConfigError("fdm reference lives on its own grid; set output.n_f = reference.fdm_n");
        const GridSpec fine(1, log2_exact(Nf), g.L);
        const RVec V = make_potential(fine, cfg.equation.potential).raw.values;
        const RVec u0 = initial_samples_1d(cfg, Nf);
        if (t == 0.0) return CVec(u0.begin(), u0.end());
        const double v = cfg.equation.v.empty() ? 0.0 : cfg.equation.v[0];
        const auto r = fdm_solve(cfg.reference.fdm_scheme, static_cast<int>(Nf), fdm_step(cfg, t), t, cfg.equation.a,
                                 v, V, u0, g.L);
        if (r.unstable) throw NumericalAbort("forward Euler FDM reference blew up");
        return CVec(r.states.back().begin(), r.states.back().end());
    }
    throw ConfigError("unknown reference kind '" + kind + "'");
}

namespace {

void add_errors(std::vector<Metric>& out, const CVec& u, const CVec& w, const Metric& base, bool divide_by,
                double N) {
    Metric m = base;
    m.kind = "l2_normalized";
    m.value = l2_error(u, w, true);
    out.push_back(m);
    m.kind = "l2_raw";
    m.value = l2_error(u, w, false);
    out.push_back(m);
    m.kind = "mse";
    if (divide_by) {
        CVec a = u, b = w;
        for (auto& z : a) z /= N;
        for (auto& z : b) z /= N;
        m.value = mse(a, b);
    } else {
        m.value = mse(u, w);
    }
    out.push_back(m);
}

}  // namespace

SolveOutput solve(const RunConfig& cfg) {
    if (cfg.initial.species != 1 || cfg.initial.kind == "burgers")
        throw ConfigError("solve handles one species; use the system command for coupled models");
    SolveOutput out;
    out.times = report_times(cfg);
    out.n_f = output_points(cfg);
    const GridSpec& g = cfg.equation.grid;
    out.run = run(initial_state(cfg), make_params(cfg.equation), cfg.pite, cfg.time.T, out.times);
    const std::string ref = cfg.reference.kind;
    for (const auto& s : out.run.snapshots) {
        Metric base;
        base.t = s.t;
        base.dtau = cfg.pite.dtau;
        base.N = static_cast<int>(g.N());
        base.variant = to_string(cfg.pite.variant);
        base.reference = ref;
        Metric p = base;
        p.kind = "success_prob";
        p.value = std::exp(s.log_prob);
        out.metrics.push_back(p);
        p.kind = "log10_success_prob";
        p.value = s.log_prob / std::log(10.0);
        out.metrics.push_back(p);
        if (ref != "none") {
            const CVec u = field_of(s.amps, g, std::exp(0.5 * s.log_prob) * s.scale, out.n_f);
            const CVec w = reference_field(cfg, ref, s.t, out.n_f);
            add_errors(out.metrics, u, w, base, cfg.reference.divide_by_n, static_cast<double>(g.N()));
        }
    }
    return out;
}

std::vector<CompareRow> compare(const RunConfig& cfg) {
    const GridSpec& g = cfg.equation.grid;
    const auto times = report_times(cfg);
    const std::size_t M = g.N();
    const auto params = make_params(cfg.equation);
    const State init = initial_state(cfg);

    // Error reference: analytic where it exists, else dense ITE when small enough.
    std::string err_ref = "none";
    try {
        analytic_case_for(cfg);
        err_ref = "analytic";
    } catch (const ConfigError&) {
        if (g.d * g.n <= 12) err_ref = "dense";
    }
    auto reference_at = [&](double t) { return reference_field(cfg, err_ref, t, M); };

    std::vector<CompareRow> rows;
    auto add = [&](const std::string& method, double t, double lp, const CVec* u) {
        CompareRow r;
        r.method = method;
        r.t = t;
        r.log10_success_prob = lp / std::log(10.0);
        r.success_prob = std::exp(lp);
        if (u && err_ref != "none") {
            const CVec w = reference_at(t);
            r.l2_normalized = l2_error(*u, w, true);
            r.mse = mse(*u, w);
            r.error_reference = err_ref;
        }
        rows.push_back(r);
    };
    auto pite_rows = [&](const std::string& method, const PiteConfig& pc) {
        const RunResult res = run(init, params, pc, cfg.time.T, times);
        for (const auto& s : res.snapshots) {
            const CVec u = field_of(s.amps, g, std::exp(0.5 * s.log_prob) * s.scale, M);
            add(method, s.t, s.log_prob, &u);
        }
    };

    for (const auto& m : cfg.compare.methods) {
        if (m == "aapite") {
            PiteConfig pc = cfg.pite;
            pc.variant = Variant::aapite;
            pc.m0 = 1.0;
            pite_rows(m, pc);
        } else if (m == "apite" || m == "vs_apite") {
            PiteConfig pc = cfg.pite;
            pc.variant = m == "apite" ? Variant::apite : Variant::vs_apite;
            pc.m0 = cfg.compare.m0;
            pc.potential_variant.reset();
            if (m == "apite") {
                pc.dtau = cfg.compare.apite_dtau;
                pc.schedule.reset();
            } else {
                pc.schedule = cfg.compare.schedule;
            }
            pite_rows(m, pc);
        } else if (m == "hhl") {
            if (g.d * g.n > 12) continue;
            const auto H = assemble_dense_hamiltonian(g, params);
            const Eigen::VectorXcd v0 = initial_vector(cfg);
            for (double t : times) {
                const long K = std::lround(t / cfg.pite.dtau);
                const auto r = hhl_run(H, cfg.pite.dtau, static_cast<int>(K), v0);
                const CVec u = field_of(from_eigen(r.final), g, 1.0, M);
                add(m, t, 2.0 * std::log(r.norm_ratio), &u);
            }
        } else if (m == "fdm") {
            if (g.d != 1) continue;
            for (double t : times) {
                RunConfig c2 = cfg;
                const std::size_t Nf = static_cast<std::size_t>(cfg.reference.fdm_n);
                const CVec u = reference_field(c2, "fdm", t, Nf);
                CompareRow r;
                r.method = m;
                r.t = t;
                r.success_prob = 1.0;
                if (err_ref == "analytic") {
                    const CVec w = reference_field(cfg, "analytic", t, Nf);
                    r.l2_normalized = l2_error(u, w, true);
                    r.mse = mse(u, w);
                    r.error_reference = err_ref;
                }
                rows.push_back(r);
            }
        } else if (m == "analytic" || m == "dense") {
            for (double t : times) {
                try {
                    const CVec u = reference_field(cfg, m, t, M);
                    add(m, t, 0.0, m == err_ref ? nullptr : &u);
                } catch (const ConfigError&) {
                    break;  // not applicable to this equation
                }
            }
        }
    }
    return rows;
}

Decomposition error_decomposition(const RunConfig& cfg) {
    Decomposition D;
    const double t = cfg.decompose.t;
    const GridSpec& g = cfg.equation.grid;

    // (i) discretization: exact PITE without splitting vs the analytic series.
    bool analytic = true;
    try {
        analytic_case_for(cfg);
    } catch (const ConfigError&) {
        analytic = false;
    }
    if (analytic) {
        const std::size_t M = cfg.output.n_f ? cfg.output.n_f : 256;
        for (int n : cfg.decompose.ns) {
            RunConfig c = cfg;
            c.equation.grid = GridSpec(1, n, g.L);
            if (c.equation.grid.N() > M) continue;
            PiteConfig pc = c.pite;
            pc.variant = Variant::exact;
            pc.m0 = 1.0;
            pc.schedule.reset();
            pc.potential_variant.reset();
            const auto res = run(initial_state(c), make_params(c.equation), pc, t);
            const CVec u = reconstruct_solution(res.final, M).front();
            const CVec w = reference_field(c, "analytic", t, M);
            Metric m;
            m.kind = "l2_weighted";
            m.value = l2_error(u, w, false) * std::sqrt(g.L / static_cast<double>(M));
            m.t = t;
            m.dtau = pc.dtau;
            m.N = static_cast<int>(c.equation.grid.N());
            m.variant = "exact";
            m.reference = "analytic";
            m.series = "quantum";
            D.discretization.push_back(m);
        }
        const std::size_t Nf = static_cast<std::size_t>(cfg.reference.fdm_n);
        RunConfig c = cfg;
        c.reference.fdm_scheme = FdmScheme::backward_euler;
        const CVec u = reference_field(c, "fdm", t, Nf);
        const CVec w = reference_field(cfg, "analytic", t, Nf);
        Metric m;
        m.kind = "l2_weighted";
        m.value = l2_error(u, w, false) * std::sqrt(g.L / static_cast<double>(Nf));
        m.t = t;
        m.dtau = fdm_step(cfg, t);
        m.N = static_cast<int>(Nf);
        m.variant = "backward_euler";
        m.reference = "analytic";
        m.series = "fdm";
        D.discretization.push_back(m);
    }

    // (ii) Trotter: exact PITE with splitting vs dense ITE; (iii) approximation.
    const bool dense_ok = g.d * g.n <= 12;
    const auto params = make_params(cfg.equation);
    const State init = initial_state(cfg);
    CVec dense;
    if (dense_ok) {
        const auto H = assemble_dense_hamiltonian(g, params);
        dense = from_eigen(dense_ite(H, t, initial_vector(cfg)));
        const double f = std::pow(static_cast<double>(g.N()) / g.L, g.d / 2.0);
        for (auto& z : dense) z *= f;
    }
    auto slope_of = [&](const std::vector<Metric>& ms, const std::string& series, const std::string& label) {
        std::vector<std::pair<double, double>> pr;
        double top = 0.0;
        for (const auto& m : ms)
            if (m.series == series) {
                pr.emplace_back(m.dtau, m.value);
                top = std::max(top, m.value);
            }
        // no splitting error to measure (single-factor step): roundoff only
        if (pr.size() < 3 || top < 1e-10) return;
        Metric s;
        s.kind = "slope";
        s.value = convergence_slope(pr);
        s.t = t;
        s.N = static_cast<int>(g.N());
        s.series = label;
        s.variant = to_string(cfg.pite.variant);
        D.slopes.push_back(s);
    };
    for (int order : {1, 2}) {
        const std::string series = "trotter_order_" + std::to_string(order);
        for (double dt : cfg.decompose.dtaus) {
            PiteConfig pc = cfg.pite;
            pc.trotter_order = order;
            pc.dtau = dt;
            pc.schedule.reset();
            const auto ex = exact_pite_reference_run(init, params, pc, t);
            const CVec ue = grid_solution(ex.final);
            if (dense_ok) {
                Metric m;
                m.kind = "l2_raw";
                m.value = l2_error(ue, dense, false);
                m.t = t;
                m.dtau = dt;
                m.N = static_cast<int>(g.N());
                m.variant = "exact";
                m.reference = "dense";
                m.series = series;
                D.trotter.push_back(m);
            }
            if (order == cfg.pite.trotter_order && cfg.pite.variant != Variant::vs_apite) {
                const auto ap = run(init, params, pc, t);
                Metric m;
                m.kind = "l2_raw";
                m.value = l2_error(grid_solution(ap.final), ue, false);
                m.t = t;
                m.dtau = dt;
                m.N = static_cast<int>(g.N());
                m.variant = to_string(pc.variant);
                m.reference = "exact_pite";
                m.series = "approximation";
                D.approximation.push_back(m);
            }
        }
        slope_of(D.trotter, series, series);
    }
    slope_of(D.approximation, "approximation", "approximation");
    return D;
}

std::vector<std::vector<double>> funcs_table(double ymax, int points, double m0) {
    if (!(ymax > 0) || points < 1) throw ConfigError("funcs: need ymax > 0 and points >= 1");
    std::vector<std::vector<double>> rows;
    const Method ms[] = {Method::exa, Method::hhl, Method::aap, Method::aap2, Method::aap4, Method::oap};
    for (int j = 0; j < points; ++j) {
        const double y = ymax * (j + 1) / points;
        std::vector<double> r{y};
        for (Method m : ms) r.push_back(underlying_function(m, y, m0));
        rows.push_back(r);
    }
    return rows;
}

SystemResult run_system(const RunConfig& cfg) {
    if (!cfg.system) throw ConfigError("config has no system block");
    const SystemConfig& s = *cfg.system;
    const auto coeffs = fourier_coefficients(s.initial, s.grid);
    if (coeffs.n_species != 1) throw ConfigError("system initial condition must provide two species");
    CoupledOptions opt;
    opt.pite = cfg.pite;
    opt.variant = cfg.pite.variant == Variant::exact ? Variant::exact : Variant::aapite;
    opt.reversed = s.reversed;
    return nonlinear_run(prepare_initial_state(coeffs), s.params, s.dtau, s.T, opt, s.snapshots);
}

// ---- output ----------------------------------------------------------------

namespace {

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw ConfigError("cannot write '" + p.string() + "'");
    os << std::setprecision(17);
    return os;
}

}  // namespace

void write_probability_csv(const fs::path& p, const RunResult& r) {
    auto os = open_out(p);
    os << "step,t,step_prob,cumulative_prob,log10_cumulative_prob,scale\n";
    os << 0 << ',' << 0.0 << ',' << 1.0 << ',' << 1.0 << ',' << 0.0 << ',' << r.initial_scale << '\n';
    for (const auto& s : r.steps)
        os << s.step << ',' << s.t << ',' << std::exp(s.log_step_prob) << ',' << std::exp(s.log_prob) << ','
           << s.log_prob / std::log(10.0) << ',' << s.scale << '\n';
}

void write_probability_csv(const fs::path& p, const SystemResult& r) {
    auto os = open_out(p);
    os << "step,t,step_prob,cumulative_prob,log10_cumulative_prob,scale,P0,P1\n";
    for (const auto& s : r.steps)
        os << s.step << ',' << s.t << ',' << std::exp(s.log_step_prob) << ',' << std::exp(s.log_prob) << ','
           << s.log_prob / std::log(10.0) << ',' << s.scale << ',' << s.P0 << ',' << s.P1 << '\n';
}

void write_metrics_csv(const fs::path& p, const std::vector<Metric>& m) {
    auto os = open_out(p);
    os << "kind,value,t,dtau,N,variant,reference,series\n";
    for (const auto& x : m)
        os << x.kind << ',' << x.value << ',' << x.t << ',' << x.dtau << ',' << x.N << ',' << x.variant << ','
           << x.reference << ',' << x.series << '\n';
}

void write_solution_csv(const fs::path& p, const CVec& field, int d, std::size_t M, double L) {
    auto os = open_out(p);
    for (int a = 0; a < d; ++a) os << 'i' << a << ',';
    for (int a = 0; a < d; ++a) os << 'x' << a << ',';
    os << "re,im,abs\n";
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t j = 0; j < field.size(); ++j) {
        std::size_t r = j;
        for (int a = d - 1; a >= 0; --a) {
            idx[a] = r % M;
            r /= M;
        }
        for (int a = 0; a < d; ++a) os << idx[a] << ',';
        for (int a = 0; a < d; ++a) os << L * idx[a] / static_cast<double>(M) << ',';
        os << field[j].real() << ',' << field[j].imag() << ',' << std::abs(field[j]) << '\n';
    }
}

void write_compare_csv(const fs::path& p, const std::vector<CompareRow>& rows) {
    auto os = open_out(p);
    os << "method,t,success_prob,log10_success_prob,l2_normalized,mse,error_reference\n";
    auto opt = [](double v) { return v < 0 ? std::string() : [&] {
        std::ostringstream s;
        s << std::setprecision(17) << v;
        return s.str();
    }(); };
    for (const auto& r : rows)
        os << r.method << ',' << r.t << ',' << r.success_prob << ',' << r.log10_success_prob << ','
           << opt(r.l2_normalized) << ',' << opt(r.mse) << ',' << r.error_reference << '\n';
}

void write_funcs_csv(const fs::path& p, const std::vector<std::vector<double>>& rows, double m0) {
    auto os = open_out(p);
    os << "y,exa,hhl,aap,aap2,aap4,oap_" << format_time(m0) << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    }
}

void write_manifest(const fs::path& p, const RunConfig& cfg, const std::string& command,
                    const std::vector<Metric>& metrics, const json& summary,
                    const std::vector<std::string>& warnings) {
    json m;
    m["command"] = command;
    m["config"] = cfg.raw;
    m["versions"] = {{"artifact", kArtifactVersion},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                     {"compiler", __VERSION__},
                     {"cxx_standard", __cplusplus}};
    json ms = json::array();
    for (const auto& x : metrics)
        ms.push_back({{"kind", x.kind}, {"value", x.value}, {"t", x.t}, {"dtau", x.dtau}, {"N", x.N},
                      {"variant", x.variant}, {"reference", x.reference}, {"series", x.series}});
    m["metrics"] = ms;
    m["summary"] = summary;
    m["warnings"] = warnings;
    auto os = open_out(p);
    os << m.dump(2) << '\n';
}

void write_solve(const fs::path& dir, const RunConfig& cfg, const SolveOutput& out) {
    fs::create_directories(dir);
    const GridSpec& g = cfg.equation.grid;
    for (const auto& s : out.run.snapshots) {
        const CVec u = reconstruct_block(s.amps, g, std::exp(0.5 * s.log_prob) * s.scale, out.n_f);
        write_solution_csv(dir / ("solution_t" + format_time(s.t) + ".csv"), u, g.d, out.n_f, g.L);
    }
    write_probability_csv(dir / "probability.csv", out.run);
    write_metrics_csv(dir / "metrics.csv", out.metrics);
    json summary = {{"success_prob", out.run.success_prob()},
                    {"log10_success_prob", out.run.log10_success_prob()},
                    {"steps", out.run.steps.size()},
                    {"over_range", out.run.over_range},
                    {"n_f", out.n_f}};
    write_manifest(dir / "manifest.json", cfg, "solve", out.metrics, summary, out.run.warnings);
    if (cfg.output.dump) dump_state(out.run.final, (dir / "final.psv1").string());
}

}  // namespace pite
