#include "pite/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pite {

StepOperators make_step_operators(const GridSpec& spec, const HamiltonianParams& params) {
    StepOperators ops;
    ops.kinetic = kinetic_diagonal(spec, params.a).values;
    ops.advection = advection_total(spec, params.v).values;
    if (params.pot.shifted.values.empty()) {
        ops.potential.assign(spec.size(), 0.0);
    } else {
        if (params.pot.shifted.values.size() != spec.size()) throw ConfigError("potential does not match grid");
        ops.potential = params.pot.shifted.values;
    }
    ops.V0 = params.pot.V0;
    ops.adv_sign = params.adv_sign();
    ops.has_potential = std::any_of(ops.potential.begin(), ops.potential.end(), [](double x) { return x != 0.0; });
    ops.has_advection = std::any_of(params.v.begin(), params.v.end(), [](double x) { return x != 0.0; });
    return ops;
}

namespace {

bool uses_m0(Variant v) { return v == Variant::apite || v == Variant::vs_apite || v == Variant::exact; }

void scale_for_block(State& st, Variant v, double m0) {
    if (uses_m0(v) && m0 < 1.0) st.scale /= m0;
}

// F · e^{-i sign w dtau D1} · cos(Theta_kin) · F†
void kinetic_factor(State& st, const StepOperators& ops, const PiteConfig& cfg, double dt, StepInfo& info) {
    apply_shifted_qft(st, QftDirection::inverse);
    const auto th = build_theta(ops.kinetic, dt, cfg.variant, cfg);
    info.over_range |= th.over_range;
    const double lp0 = st.log_prob;
    pite_block(st, th, cfg.block_mode);
    info.log_prob += st.log_prob - lp0;
    scale_for_block(st, cfg.variant, cfg.m0);
    if (ops.has_advection) {
        RVec ph(ops.advection.size());
        for (std::size_t j = 0; j < ph.size(); ++j) ph[j] = dt * ops.advection[j];
        apply_diagonal_phase(st, ph, ops.adv_sign, Basis::fourier);
    }
    apply_shifted_qft(st, QftDirection::forward);
}

void potential_factor(State& st, const StepOperators& ops, const PiteConfig& cfg, double dt, StepInfo& info) {
    const Variant v = cfg.potential_variant.value_or(cfg.variant);
    const auto th = build_theta(ops.potential, dt, v, cfg);
    info.over_range |= th.over_range;
    const double lp0 = st.log_prob;
    pite_block(st, th, cfg.block_mode);
    info.log_prob += st.log_prob - lp0;
    scale_for_block(st, v, cfg.m0);
}

void advection_unitary(State& st, const StepOperators& ops, double dt) {
    if (!ops.has_advection) return;
    apply_shifted_qft(st, QftDirection::inverse);
    RVec ph(ops.advection.size());
    for (std::size_t j = 0; j < ph.size(); ++j) ph[j] = dt * ops.advection[j];
    apply_diagonal_phase(st, ph, ops.adv_sign, Basis::fourier);
    apply_shifted_qft(st, QftDirection::forward);
}

// Single ancilla use realizing cos(theta0 + s0 dt (D2 + V~)) with the
// real-time factor A = F e^{i s0 dt D2} F† e^{i s0 dt V~}:
// post-selected branch = (e^{i theta0} A + e^{-i theta0} A†) / 2.
void apite_joint(State& st, const StepOperators& ops, const PiteConfig& cfg, double dt, StepInfo& info) {
    const double th0 = apite_theta0(cfg.m0), s0 = apite_s0(cfg.m0);
    const GridSpec& g = st.layout.grid;
    double lam_max = 0.0;
    for (double x : ops.kinetic) lam_max = std::max(lam_max, x);
    double vmax = 0.0;
    for (double x : ops.potential) vmax = std::max(vmax, x);
    if (th0 + s0 * dt * (lam_max + vmax) > kPi / 2) info.over_range = true;

    const CVec psi = st.amps;
    CVec a = psi;  // A psi
    for (std::size_t j = 0; j < a.size(); ++j) a[j] *= std::polar(1.0, s0 * dt * ops.potential[j % ops.potential.size()]);
    shifted_qft_blocks(a, g, QftDirection::inverse);
    for (std::size_t j = 0; j < a.size(); ++j) a[j] *= std::polar(1.0, s0 * dt * ops.kinetic[j % ops.kinetic.size()]);
    shifted_qft_blocks(a, g, QftDirection::forward);

    CVec b = psi;  // A† psi
    shifted_qft_blocks(b, g, QftDirection::inverse);
    for (std::size_t j = 0; j < b.size(); ++j) b[j] *= std::polar(1.0, -s0 * dt * ops.kinetic[j % ops.kinetic.size()]);
    shifted_qft_blocks(b, g, QftDirection::forward);
    for (std::size_t j = 0; j < b.size(); ++j) b[j] *= std::polar(1.0, -s0 * dt * ops.potential[j % ops.potential.size()]);

    const cplx ep = std::polar(0.5, th0), em = std::polar(0.5, -th0);
    double p = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j) {
        st.amps[j] = ep * a[j] + em * b[j];
        p += std::norm(st.amps[j]);
    }
    if (!(p >= kMinStepProb)) throw NumericalAbort("vanished success probability");
    const double r = 1.0 / std::sqrt(p);
    for (auto& z : st.amps) z *= r;
    st.log_prob += std::log(p);
    info.log_prob += std::log(p);
    st.scale /= cfg.m0;
}

}  // namespace

StepInfo step(State& st, const StepOperators& ops, const PiteConfig& cfg, double dtau) {
    if (st.basis != Basis::position) throw ConfigError("step: state must be in the position basis");
    StepInfo info;
    const bool apite_like = cfg.variant == Variant::apite || cfg.variant == Variant::vs_apite;
    if (apite_like && cfg.apite_form == ApiteForm::joint) {
        if (cfg.trotter_order == 2) {
            advection_unitary(st, ops, dtau / 2);
            apite_joint(st, ops, cfg, dtau, info);
            advection_unitary(st, ops, dtau / 2);
        } else {
            apite_joint(st, ops, cfg, dtau, info);
            advection_unitary(st, ops, dtau);
        }
    } else if (cfg.trotter_order == 2 && ops.has_potential) {
        kinetic_factor(st, ops, cfg, dtau / 2, info);
        potential_factor(st, ops, cfg, dtau, info);
        kinetic_factor(st, ops, cfg, dtau / 2, info);
    } else {
        if (ops.has_potential) potential_factor(st, ops, cfg, dtau, info);
        kinetic_factor(st, ops, cfg, dtau, info);
    }
    st.scale *= std::exp(-ops.V0 * dtau);
    return info;
}

StepInfo step(State& st, const HamiltonianParams& params, const PiteConfig& cfg) {
    cfg.validate();
    const auto ops = make_step_operators(st.layout.grid, params);
    const double dt = cfg.variant == Variant::vs_apite && cfg.schedule ? cfg.schedule->dtau_min : cfg.dtau;
    return step(st, ops, cfg, dt);
}

RunResult run(const State& initial, const HamiltonianParams& params, const PiteConfig& cfg, double T,
              const std::vector<double>& snapshot_times) {
    cfg.validate();
    const auto dts = step_sizes(cfg, T);
    const auto ops = make_step_operators(initial.layout.grid, params);

    std::vector<double> tgrid(dts.size() + 1, 0.0);
    const bool uniform = std::all_of(dts.begin(), dts.end(), [&](double x) { return x == dts.front(); });
    for (std::size_t j = 0; j < dts.size(); ++j)
        tgrid[j + 1] = uniform ? static_cast<double>(j + 1) * dts.front() : tgrid[j] + dts[j];

    RunResult res;
    res.initial_scale = initial.scale;
    std::vector<int> snap_steps;
    for (double ts : snapshot_times) {
        const auto it = std::min_element(tgrid.begin(), tgrid.end(),
                                         [&](double a, double b) { return std::abs(a - ts) < std::abs(b - ts); });
        const int m = static_cast<int>(it - tgrid.begin());
        if (std::abs(tgrid[m] - ts) > 1e-9 * std::max(1.0, std::abs(ts))) {
            std::ostringstream os;
            os << "snapshot time " << ts << " is off the step lattice; using t = " << tgrid[m];
            res.warnings.push_back(os.str());
        }
        snap_steps.push_back(m);
    }

    State st = initial;
    auto take = [&](int m) {
        for (int s : snap_steps)
            if (s == m) {
                res.snapshots.push_back({m, tgrid[m], st.amps, st.log_prob, st.scale});
                break;
            }
    };
    take(0);
    res.steps.reserve(dts.size());
    for (std::size_t j = 0; j < dts.size(); ++j) {
        const auto info = step(st, ops, cfg, dts[j]);
        res.over_range |= info.over_range;
        const int m = static_cast<int>(j + 1);
        res.steps.push_back({m, tgrid[m], dts[j], info.log_prob, st.log_prob, st.scale});
        take(m);
    }
    if (res.over_range) res.warnings.push_back("theta exceeded its admissible range; dtau may be too large");
    res.final = std::move(st);
    return res;
}

}  // namespace pite
