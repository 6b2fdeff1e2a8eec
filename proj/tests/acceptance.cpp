// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "pite/harness.hpp"
#include "pite/postproc.hpp"
#include "pite/reference.hpp"

using namespace pite;

namespace {

std::string config_path(const char* name) { return std::string(PITE_SOURCE_DIR) + "/configs/" + name; }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
    }
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

double total_prob(const RunConfig& cfg) {
    return run(initial_state(cfg), make_params(cfg.equation), cfg.pite, cfg.time.T).success_prob();
}

double slope(const Decomposition& d, const std::string& series) {
    for (const auto& m : d.slopes)
        if (m.series == series) return m.value;
    return std::nan("");
}

double metric_at(const std::vector<Metric>& ms, const std::string& kind, double t) {
    for (const auto& m : ms)
        if (m.kind == kind && std::abs(m.t - t) < 1e-9) return m.value;
    return std::nan("");
}

void c1(Outcome& o) {
    const auto cfg = load_config(config_path("sine_1d.json"));
    const double dts[] = {0.002, 0.001, 0.0005}, want[] = {0.81387, 0.81395, 0.81400};
    for (int j = 0; j < 3; ++j) {
        const double p = total_prob(with_override(cfg, "pite.dtau", fmt("%.17g", dts[j])));
        o.require(std::abs(p - want[j]) <= 1e-3, "dtau " + fmt("%g", dts[j]) + ": P " + fmt("%.5f", p));
    }
}

void c2(Outcome& o) {
    const auto cfg = load_config(config_path("gaussian_2d.json"));
    const double dts[] = {0.005, 0.0025, 0.00125}, want[] = {0.26172, 0.26187, 0.26194};
    for (int j = 0; j < 3; ++j) {
        const double p = total_prob(with_override(cfg, "pite.dtau", fmt("%.17g", dts[j])));
        o.require(std::abs(p - want[j]) <= 1e-3, "dtau " + fmt("%g", dts[j]) + ": P " + fmt("%.5f", p));
    }
}

void c3(Outcome& o) {
    auto c1d = load_config(config_path("sine_1d.json"));
    c1d.decompose.ns.clear();
    const double s1 = slope(error_decomposition(c1d), "approximation");
    o.require(std::abs(s1 - 1.0) <= 0.15, "1D slope " + fmt("%.3f", s1));
    const double s2 = slope(error_decomposition(load_config(config_path("gaussian_2d.json"))), "approximation");
    o.require(std::abs(s2 - 1.0) <= 0.15, "2D slope " + fmt("%.3f", s2));
}

void c4(Outcome& o) {
    const auto d = error_decomposition(load_config(config_path("gaussian_2d.json")));
    const double s1 = slope(d, "trotter_order_1"), s2 = slope(d, "trotter_order_2");
    o.require(std::abs(s1 - 1.0) <= 0.15, "order 1 slope " + fmt("%.3f", s1));
    o.require(std::abs(s2 - 2.0) <= 0.2, "order 2 slope " + fmt("%.3f", s2));
}

void c5(Outcome& o) {
    auto cfg = load_config(config_path("sine_1d.json"));
    cfg.decompose.ns = {4};
    cfg.decompose.dtaus.clear();
    for (double t : {0.01, 0.05, 0.1}) {
        cfg.decompose.t = t;
        const auto d = error_decomposition(cfg);
        double q = std::nan(""), f = std::nan("");
        for (const auto& m : d.discretization) (m.series == "fdm" ? f : q) = m.value;
        o.require(q < 1e-6 && q < f, "t " + fmt("%g", t) + ": N=16 " + fmt("%.2e", q) + " fdm " + fmt("%.2e", f));
    }
}

void c6(Outcome& o) {
    const auto cfg = load_config(config_path("delta_mse.json"));
    const double T = cfg.time.T;
    const auto a = solve(cfg);
    const double ma = metric_at(a.metrics, "mse", T);
    bool monotone = true;
    double prev = INFINITY;
    for (double t : a.times) {
        const double m = metric_at(a.metrics, "mse", t);
        monotone = monotone && m < prev;
        prev = m;
    }
    o.require(ma >= 2e-8 && ma <= 5e-7 && monotone, "dtau 1e-3 MSE " + fmt("%.2e", ma) + (monotone ? " monotone" : " not monotone"));
    const double mb = metric_at(solve(with_override(cfg, "pite.dtau", "0.0001")).metrics, "mse", T);
    o.require(mb <= 5e-9, "dtau 1e-4 MSE " + fmt("%.2e", mb));
    const double mc = metric_at(solve(with_override(cfg, "pite.order", "2")).metrics, "mse", T);
    o.require(mc <= 5e-12, "order 2 MSE " + fmt("%.2e", mc));
}

void c7(Outcome& o) {
    const auto cfg = load_config(config_path("potential_1d.json"));
    bool seen[3] = {false, false, false};
    for (const auto& r : compare(cfg)) {
        if (std::abs(r.t - cfg.time.T) > 1e-9) continue;
        if (r.method == "aapite") {
            seen[0] = true;
            o.require(std::abs(r.success_prob - 0.299) <= 0.01, "AAPITE P " + fmt("%.5f", r.success_prob));
        } else if (r.method == "vs_apite") {
            seen[1] = true;
            o.require(r.log10_success_prob <= -15.0, "VS-APITE log10 P " + fmt("%.2f", r.log10_success_prob));
        } else if (r.method == "apite") {
            seen[2] = true;
            o.require(r.log10_success_prob <= -150.0, "APITE log10 P " + fmt("%.2f", r.log10_success_prob));
        }
    }
    o.require(seen[0] && seen[1] && seen[2], "all three methods reported");
}

void c8(Outcome& o) {
    const auto b = load_config(config_path("burgers.json"));
    const double pb = run_system(b).success_prob();
    o.require(pb >= 5e-5 && pb <= 8e-4, "Burgers N=32 P " + fmt("%.3e", pb));
    const double pb16 = run_system(with_override(b, "system.n", "4")).success_prob();
    o.detail << "; Burgers N=16 P " << fmt("%.3e", pb16) << " (informational)";
    const double pt = run_system(load_config(config_path("turing.json"))).success_prob();
    o.require(pt >= 1e-23 && pt <= 1e-19, "Turing P " + fmt("%.3e", pt));
}

CVec random_unit(std::mt19937& rng, std::size_t n) {
    std::normal_distribution<double> g;
    CVec v(n);
    for (auto& z : v) z = {g(rng), g(rng)};
    const double s = norm(v);
    for (auto& z : v) z /= s;
    return v;
}

double max_diff(const CVec& a, const CVec& b) {
    double m = 0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

Eigen::MatrixXcd random_psd(std::mt19937& rng, Eigen::Index n, double lmax) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd b(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) b(i, j) = {g(rng), g(rng)};
    Eigen::MatrixXcd h = b * b.adjoint();
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    return h * (lmax / es.eigenvalues().maxCoeff());
}

void c9(Outcome& o) {
    std::mt19937 rng(2024);

    double qft = 0;
    for (int d = 1; d <= 2; ++d)
        for (int n = 1; n <= (d == 1 ? 10 : 5); ++n) {
            GridSpec g(d, n, 1.0);
            const CVec psi = random_unit(rng, g.size());
            for (auto dir : {QftDirection::inverse, QftDirection::forward}) {
                CVec fast = psi, slow = psi;
                shifted_qft_blocks(fast, g, dir);
                shifted_qft_direct(slow, g, dir);
                qft = std::max({qft, max_diff(fast, slow), std::abs(norm(fast) - 1.0)});
            }
        }
    o.require(qft < 1e-12, "QFT " + fmt("%.1e", qft));

    double blk = 0;
    std::uniform_real_distribution<double> u(0.0, kPi / 2 - 0.05);
    for (int n = 1; n <= 8; ++n) {
        GridSpec g(1, n, 1.0);
        State a = make_state(g);
        set_statevector(a, random_unit(rng, g.size()));
        State b = a;
        ThetaDiagonal th;
        for (std::size_t j = 0; j < g.size(); ++j) th.values.push_back(u(rng));
        const double pa = pite_block(a, th, BlockMode::direct), pb = pite_block(b, th, BlockMode::circuit);
        blk = std::max({blk, std::abs(pa - pb), max_diff(a.amps, b.amps)});
    }
    o.require(blk < 1e-12, "circuit vs direct " + fmt("%.1e", blk));

    double qc = 0;
    const auto Qm = gate_matrix(Gate::Q);
    for (int n = 1; n <= 4; ++n) {
        const Eigen::Index S = Eigen::Index{1} << n;
        Eigen::MatrixXcd Mt = Eigen::MatrixXcd::Zero(2 * S, 2 * S), M = Mt, Q = Mt;
        for (Eigen::Index j = 0; j < S; ++j) {
            const double t = u(rng), c = std::cos(t), s = std::sin(t);
            Mt(j, j) = Mt(S + j, S + j) = M(j, j) = M(S + j, S + j) = c;
            Mt(j, S + j) = -s;
            Mt(S + j, j) = s;
            M(j, S + j) = M(S + j, j) = cplx(0, s);
            Q(j, j) = Qm[0];
            Q(S + j, S + j) = Qm[3];
        }
        qc = std::max(qc, (Q * Mt * Q.adjoint() - M).cwiseAbs().maxCoeff());
    }
    o.require(qc < 1e-12, "Q-conjugation " + fmt("%.1e", qc));

    double pix = 0;
    for (double L : {1.0, 2 * kPi})
        for (std::size_t N : {2u, 4u, 8u, 16u, 32u}) {
            const PixelKernel k{N, L, 1};
            for (std::size_t m = 0; m < N; ++m)
                for (std::size_t l = 0; l < N; ++l)
                    pix = std::max(pix, std::abs(pixel_eval(k, L * m / N, L * l / N) - (m == l ? std::sqrt(N / L) : 0.0)));
        }
    o.require(pix < 1e-12, "pixel delta " + fmt("%.1e", pix));

    double dense = 0;
    for (int n = 2; n <= 6; ++n) {
        GridSpec g(1, n, 1.0);
        const auto prm = make_params(g, 0.3, {5.0}, PotentialSpec{});
        PiteConfig pc;
        pc.variant = Variant::exact;
        pc.dtau = 2e-3;
        State st = make_state(g);
        set_statevector(st, random_unit(rng, g.size()));
        const auto res = run(st, prm, pc, 0.02);
        const Eigen::VectorXcd got = to_eigen(res.final.amps) * (std::sqrt(res.success_prob()) * res.final.scale);
        const Eigen::VectorXcd want = dense_ite(assemble_dense_hamiltonian(g, prm), 0.02, to_eigen(st.amps) * st.scale);
        dense = std::max(dense, (got - want).norm());
    }
    o.require(dense < 1e-10, "exact V=0 vs dense " + fmt("%.1e", dense));

    int viol_aap = 0, viol_ap = 0, checked = 0;
    std::uniform_real_distribution<double> r01(0.0, 1.0);
    std::uniform_int_distribution<int> dim(2, 32), steps(1, 200);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = dim(rng);
        const auto H = DenseHamiltonian::from(random_psd(rng, n, 1.0 + 200.0 * r01(rng)));
        Eigen::VectorXcd psi = Eigen::VectorXcd::Random(n);
        psi /= psi.norm();
        const double dtau = std::pow(10.0, -4.0 + 2.0 * r01(rng));
        const int K = steps(rng);
        const auto b = error_budget(H, psi, trial % 2 ? 1e-4 : 0.0);
        const double ite = dense_ite_eigen(H, K * dtau, psi).norm();
        if (!(measured_aapite_error(H, psi, dtau, K) <= b.aapite_bound(K * dtau, dtau, ite))) ++viol_aap;

        const auto H8 = DenseHamiltonian::from(random_psd(rng, 8, 1.0 + 20.0 * r01(rng)));
        Eigen::VectorXcd p8 = Eigen::VectorXcd::Random(8);
        p8 /= p8.norm();
        const double dt8 = 1e-4 * (1.0 + 9.0 * r01(rng));
        const int K8 = 1 + static_cast<int>(100 * r01(rng));
        const auto ab = apite_budget(H8, p8, 0.0, 0.9, dt8, K8);
        if (!ab.vacuous) {
            ++checked;
            if (!(measured_apite_error(H8, p8, 0.9, dt8, K8) <= ab.value)) ++viol_ap;
        }
    }
    o.require(viol_aap == 0 && viol_ap == 0 && checked >= 100,
              "bounds: " + std::to_string(viol_aap + viol_ap) + " violations, " + std::to_string(200 + checked) + " instances");

    int order_bad = 0;
    for (int j = 1; j <= 1000; ++j) {
        const double y = 0.1 * j / 1000.0, exa = underlying_function(Method::exa, y);
        if (!(std::abs(underlying_function(Method::aap, y) - exa) < std::abs(underlying_function(Method::hhl, y) - exa)))
            ++order_bad;
    }
    o.require(order_bad == 0, "residual ordering " + std::to_string(order_bad) + " bad points");
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<void(Outcome&)>> criteria[] = {
        {"1 one-dimensional success probabilities", c1},
        {"2 two-dimensional success probabilities", c2},
        {"3 approximation-error slopes", c3},
        {"4 Trotter-error slopes", c4},
        {"5 discretization error vs finite differences", c5},
        {"6 delta-source MSE", c6},
        {"7 success-probability collapse", c7},
        {"8 Burgers and Turing orders of magnitude", c8},
        {"9 property suites", c9},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            fn(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << (o.detail.tellp() > 0 ? "; " : "") << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failed;
        std::printf("%s criterion %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", name, secs, o.detail.str().c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
