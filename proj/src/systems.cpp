#include "pite/systems.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pite/postproc.hpp"

namespace pite {

void CoupledModel::update_shifts() {
    if (p11.empty() || p11.size() != p12.size() || p11.size() != p21.size() || p11.size() != p22.size())
        throw ConfigError("coupled model: reaction fields must share one length");
    const double m11 = *std::min_element(p11.begin(), p11.end());
    const double m22 = *std::min_element(p22.begin(), p22.end());
    P0 = -std::min(m11, m22);
    P1 = 0.0;
    for (std::size_t j = 0; j < p12.size(); ++j) P1 = std::max(P1, std::abs(p12[j] + p21[j]));
}

namespace {

void check_nonnegative(const RVec& d, const char* what) {
    for (double x : d)
        if (x < -1e-12) throw NumericalAbort(std::string("coupled step: negative shifted diagonal in ") + what);
}

double block(State& st, RVec diag, double dtau, const CoupledOptions& opt, const char* what) {
    check_nonnegative(diag, what);
    for (auto& x : diag) x = std::max(x, 0.0);
    const auto th = build_theta(diag, dtau, opt.variant, opt.pite);
    const double lp0 = st.log_prob;
    pite_block(st, th, opt.pite.block_mode);
    return st.log_prob - lp0;
}

}  // namespace

double coupled_step(State& st, const CoupledModel& m, double dtau, const CoupledOptions& opt) {
    const GridSpec& g = st.layout.grid;
    const std::size_t G = g.size();
    if (st.layout.n_species != 1) throw ConfigError("coupled step needs a species qubit");
    if (st.basis != Basis::position) throw ConfigError("coupled step: state must be in the position basis");
    if (m.p11.size() != G) throw ConfigError("coupled step: reaction fields do not match the grid");
    const int sq = species_qubit(g);
    double lp = 0.0;

    auto antisym = [&] {
        RVec ph(2 * G);
        for (std::size_t j = 0; j < G; ++j) {
            const double q = m.p12[j] - m.p21[j];
            ph[j] = q * dtau / 2;
            ph[G + j] = -q * dtau / 2;
        }
        apply_single_qubit_gate(st, Gate::Wdag, sq);
        apply_diagonal_phase(st, ph, 1.0, Basis::position);
        apply_single_qubit_gate(st, Gate::W, sq);
    };
    auto sym = [&] {
        RVec d(2 * G);
        for (std::size_t j = 0; j < G; ++j) {
            const double s = m.p12[j] + m.p21[j];
            d[j] = s / 2 + m.P1 / 2;
            d[G + j] = -s / 2 + m.P1 / 2;
        }
        apply_single_qubit_gate(st, Gate::H, sq);
        lp += block(st, std::move(d), dtau, opt, "symmetric coupling");
        apply_single_qubit_gate(st, Gate::H, sq);
    };
    auto diag = [&] {
        RVec d(2 * G);
        for (std::size_t j = 0; j < G; ++j) {
            d[j] = m.p11[j] + m.P0;
            d[G + j] = m.p22[j] + m.P0;
        }
        lp += block(st, std::move(d), dtau, opt, "self reaction");
    };
    auto kinetic = [&] {
        const RVec k1 = kinetic_diagonal(g, m.a1).values, k2 = kinetic_diagonal(g, m.a2).values;
        RVec d(k1);
        d.insert(d.end(), k2.begin(), k2.end());
        apply_shifted_qft(st, QftDirection::inverse);
        lp += block(st, std::move(d), dtau, opt, "kinetic");
        apply_shifted_qft(st, QftDirection::forward);
    };

    if (!opt.reversed) {
        antisym();
        sym();
        diag();
        kinetic();
    } else {
        kinetic();
        diag();
        sym();
        antisym();
    }
    st.scale *= std::exp(dtau * (m.P0 + m.P1 / 2));
    return lp;
}

CVec spectral_gradient(const CVec& field, const GridSpec& spec, int axis) {
    if (axis < 0 || axis >= spec.d) throw ConfigError("spectral_gradient: axis out of range");
    if (field.empty() || field.size() % spec.size() != 0) throw ConfigError("spectral_gradient: length mismatch");
    CVec c = field;
    shifted_qft_blocks(c, spec, QftDirection::inverse);
    const RVec w = advection_diagonal(spec, 1.0, axis).values;  // (2 pi / L)(k - N/2)
    for (std::size_t j = 0; j < c.size(); ++j) {
        const std::size_t k = spec.component(j % spec.size(), axis);
        c[j] *= cplx(0.0, w[k]);
    }
    shifted_qft_blocks(c, spec, QftDirection::forward);
    return c;
}

NonlinearModel parse_model(const std::string& s) {
    if (s == "turing") return NonlinearModel::turing;
    if (s == "burgers") return NonlinearModel::burgers;
    if (s == "linear") return NonlinearModel::linear;
    throw ConfigError("unknown system model '" + s + "' (turing|burgers|linear)");
}

std::string to_string(NonlinearModel m) {
    switch (m) {
        case NonlinearModel::turing: return "turing";
        case NonlinearModel::burgers: return "burgers";
        case NonlinearModel::linear: return "linear";
    }
    return "?";
}

SystemParams default_system_params(NonlinearModel m) {
    SystemParams p;
    p.model = m;
    if (m == NonlinearModel::turing) {
        p.a1 = 0.005;
        p.a2 = 0.1;
        p.p12 = 1.0;
        p.p21 = -1.5;
        p.p22 = 2.0;
        p.p11 = -0.6;  // plus u1^2
    } else if (m == NonlinearModel::burgers) {
        p.a1 = p.a2 = p.nu = 0.05;
    }
    return p;
}

CoupledModel build_model(const SystemParams& p, const GridSpec& spec, const CVec& fields) {
    const std::size_t G = spec.size();
    if (fields.size() != 2 * G) throw ConfigError("build_model: expected two field blocks");
    CoupledModel m;
    m.a1 = p.a1;
    m.a2 = p.a2;
    switch (p.model) {
        case NonlinearModel::turing:
            m.p11.resize(G);
            for (std::size_t j = 0; j < G; ++j) m.p11[j] = fields[j].real() * fields[j].real() + p.p11;
            m.p12.assign(G, p.p12);
            m.p21.assign(G, p.p21);
            m.p22.assign(G, p.p22);
            break;
        case NonlinearModel::burgers: {
            if (spec.d < 2) throw ConfigError("burgers model needs d = 2");
            m.a1 = m.a2 = p.nu;
            const CVec u1(fields.begin(), fields.begin() + static_cast<std::ptrdiff_t>(G));
            const CVec u2(fields.begin() + static_cast<std::ptrdiff_t>(G), fields.end());
            auto re = [](const CVec& v) {
                RVec r(v.size());
                for (std::size_t j = 0; j < v.size(); ++j) r[j] = v[j].real();
                return r;
            };
            m.p11 = re(spectral_gradient(u1, spec, 0));
            m.p12 = re(spectral_gradient(u1, spec, 1));
            m.p21 = re(spectral_gradient(u2, spec, 0));
            m.p22 = re(spectral_gradient(u2, spec, 1));
            break;
        }
        case NonlinearModel::linear:
            m.p11.assign(G, p.p11);
            m.p12.assign(G, p.p12);
            m.p21.assign(G, p.p21);
            m.p22.assign(G, p.p22);
            break;
    }
    m.update_shifts();
    return m;
}

SystemResult nonlinear_run(const State& initial, const SystemParams& p, double dtau, double T,
                           const CoupledOptions& opt, const std::vector<double>& snapshot_times) {
    if (!(dtau > 0)) throw ConfigError("system: dtau must be > 0");
    const long K = std::lround(T / dtau);
    if (K < 0 || std::abs(K * dtau - T) > 1e-9 * std::max(1.0, T)) throw ConfigError("system: T is not a multiple of dtau");
    std::vector<long> snaps;
    for (double ts : snapshot_times) snaps.push_back(std::clamp(std::lround(ts / dtau), 0L, K));

    SystemResult res;
    State st = initial;
    auto take = [&](long m) {
        if (std::find(snaps.begin(), snaps.end(), m) != snaps.end())
            res.snapshots.push_back({static_cast<int>(m), m * dtau, grid_solution(st)});
    };
    take(0);
    for (long m = 1; m <= K; ++m) {
        const CVec u = grid_solution(st);
        const CoupledModel cm = build_model(p, st.layout.grid, u);
        for (const RVec* f : {&cm.p11, &cm.p12, &cm.p21, &cm.p22})
            for (double x : *f)
                if (!std::isfinite(x)) {
                    std::ostringstream os;
                    os << "non-finite reaction sample at step " << m;
                    throw NumericalAbort(os.str());
                }
        const double lp = coupled_step(st, cm, dtau, opt);
        res.steps.push_back({static_cast<int>(m), m * dtau, lp, st.log_prob, st.scale, cm.P0, cm.P1});
        take(m);
    }
    res.final = std::move(st);
    return res;
}

}  // namespace pite
