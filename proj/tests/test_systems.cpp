#include <doctest.h>

#include <cmath>
#include <random>

#include "pite/postproc.hpp"
#include "pite/reference.hpp"
#include "pite/systems.hpp"

using namespace pite;

namespace {

CVec random_vec(std::mt19937& rng, std::size_t n) {
    std::normal_distribution<double> g;
    CVec v(n);
    for (auto& z : v) z = {g(rng), g(rng)};
    return v;
}

Eigen::VectorXcd unnormalized(const State& st) {
    return to_eigen(st.amps) * (std::sqrt(st.success_prob()) * st.scale);
}

CoupledModel constant_model(std::size_t G, double a1, double a2, double p11, double p12, double p21, double p22) {
    CoupledModel m;
    m.a1 = a1;
    m.a2 = a2;
    m.p11.assign(G, p11);
    m.p12.assign(G, p12);
    m.p21.assign(G, p21);
    m.p22.assign(G, p22);
    m.update_shifts();
    return m;
}

CoupledOptions exact_options() {
    CoupledOptions o;
    o.variant = Variant::exact;
    o.pite.variant = Variant::exact;
    return o;
}

// -a_j Lap on each species block plus the reaction matrix, species qubit on top
Eigen::MatrixXcd dense_two_species(const GridSpec& g, const CoupledModel& m) {
    const auto G = static_cast<Eigen::Index>(g.size());
    const auto F = shifted_dft_matrix(g);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(2 * G, 2 * G);
    for (int s = 0; s < 2; ++s) {
        const auto k = kinetic_diagonal(g, s == 0 ? m.a1 : m.a2).values;
        Eigen::VectorXcd dk(G);
        for (Eigen::Index j = 0; j < G; ++j) dk[j] = k[static_cast<std::size_t>(j)];
        H.block(s * G, s * G, G, G) = F * dk.asDiagonal() * F.adjoint();
    }
    const RVec* p[2][2] = {{&m.p11, &m.p12}, {&m.p21, &m.p22}};
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            for (Eigen::Index j = 0; j < G; ++j) H(r * G + j, c * G + j) += (*p[r][c])[static_cast<std::size_t>(j)];
    return H;
}

}  // namespace

TEST_CASE("model shifts") {
    CoupledModel m;
    m.p11 = {-1.0, 0.5};
    m.p22 = {0.2, -0.3};
    m.p12 = {1.0, -2.0};
    m.p21 = {0.5, 0.5};
    m.update_shifts();
    CHECK(m.P0 == 1.0);
    CHECK(m.P1 == 1.5);
    m.p12.pop_back();
    CHECK_THROWS_AS(m.update_shifts(), ConfigError);
}

TEST_CASE("zero reaction: each species is an independent diffusion run") {
    std::mt19937 rng(201);
    GridSpec g(1, 4, 2 * kPi);
    const std::size_t G = g.size();
    State st = make_state(g, 1);
    set_statevector(st, random_vec(rng, 2 * G));
    const Eigen::VectorXcd u0 = unnormalized(st);
    const auto m = constant_model(G, 0.3, 0.3, 0, 0, 0, 0);
    CoupledOptions opt;
    opt.pite.dtau = 0.01;
    State cs = st;
    for (int k = 0; k < 20; ++k) coupled_step(cs, m, 0.01, opt);
    const Eigen::VectorXcd uc = unnormalized(cs);

    const auto prm = make_params(g, 0.3, {0.0}, PotentialSpec{});
    PiteConfig cfg;
    cfg.dtau = 0.01;
    for (int s = 0; s < 2; ++s) {
        State one = make_state(g);
        set_statevector(one, from_eigen(u0.segment(static_cast<Eigen::Index>(s * G), static_cast<Eigen::Index>(G))));
        const auto r = run(one, prm, cfg, 0.2);
        const Eigen::VectorXcd want = unnormalized(r.final);
        CHECK((uc.segment(static_cast<Eigen::Index>(s * G), static_cast<Eigen::Index>(G)) - want).norm() <
              1e-10 * want.norm());
    }
}

TEST_CASE("no cross coupling: species follow their own reactions") {
    std::mt19937 rng(203);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    GridSpec g(1, 4, 2 * kPi);
    const std::size_t G = g.size();
    CoupledModel m;
    m.a1 = 0.05;
    m.a2 = 0.2;
    for (std::size_t j = 0; j < G; ++j) {
        m.p11.push_back(u(rng));
        m.p22.push_back(u(rng));
    }
    m.p12.assign(G, 0.0);
    m.p21.assign(G, 0.0);
    m.update_shifts();

    State st = make_state(g, 1);
    set_statevector(st, random_vec(rng, 2 * G));
    const Eigen::VectorXcd u0 = unnormalized(st);
    State cs = st;
    const auto opt = exact_options();
    for (int k = 0; k < 10; ++k) coupled_step(cs, m, 0.02, opt);
    const Eigen::VectorXcd uc = unnormalized(cs);

    PiteConfig cfg;
    cfg.variant = Variant::exact;
    cfg.dtau = 0.02;
    for (int s = 0; s < 2; ++s) {
        auto prm = make_params(g, s == 0 ? m.a1 : m.a2, {0.0}, PotentialSpec{});
        prm.pot = potential_from_table(g, s == 0 ? m.p11 : m.p22);
        State one = make_state(g);
        set_statevector(one, from_eigen(u0.segment(static_cast<Eigen::Index>(s * G), static_cast<Eigen::Index>(G))));
        const Eigen::VectorXcd want = unnormalized(run(one, prm, cfg, 0.2).final);
        CHECK((uc.segment(static_cast<Eigen::Index>(s * G), static_cast<Eigen::Index>(G)) - want).norm() <
              1e-10 * want.norm());
    }
}

TEST_CASE("antisymmetric coupling is a norm-preserving rotation") {
    std::mt19937 rng(207);
    GridSpec g(1, 3, 1.0);
    const std::size_t G = g.size();
    State st = make_state(g, 1);
    set_statevector(st, random_vec(rng, 2 * G));
    const CVec before = st.amps;
    // u1' = -u2, u2' = u1; diffusion negligible
    const auto m = constant_model(G, 1e-300, 1e-300, 0.0, 1.0, -1.0, 0.0);
    const double dt = 0.1;
    coupled_step(st, m, dt, exact_options());
    CHECK(std::abs(norm(st.amps) - 1.0) < 1e-12);
    CHECK(std::abs(st.log_prob) < 1e-14);
    for (std::size_t j = 0; j < G; ++j) {
        CHECK(std::abs(st.amps[j] - (std::cos(dt) * before[j] - std::sin(dt) * before[G + j])) < 1e-12);
        CHECK(std::abs(st.amps[G + j] - (std::sin(dt) * before[j] + std::cos(dt) * before[G + j])) < 1e-12);
    }
}

TEST_CASE("linear model converges to the dense two-species ITE at first order") {
    std::mt19937 rng(211);
    GridSpec g(1, 3, 2 * kPi);
    const auto m = constant_model(g.size(), 0.05, 0.1, 0.3, 1.0, -0.5, 0.8);
    const auto H = dense_two_species(g, m);
    State st = make_state(g, 1);
    set_statevector(st, random_vec(rng, 2 * g.size()));
    const double T = 0.5;
    const Eigen::VectorXcd want = dense_ite(H, T, unnormalized(st));

    for (bool reversed : {false, true}) {
        auto opt = exact_options();
        opt.reversed = reversed;
        std::vector<std::pair<double, double>> errs;
        for (double dt : {0.05, 0.025, 0.0125, 0.00625}) {
            State s = st;
            const int K = static_cast<int>(std::lround(T / dt));
            for (int k = 0; k < K; ++k) coupled_step(s, m, dt, opt);
            errs.push_back({dt, (unnormalized(s) - want).norm() / want.norm()});
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [x, y] : errs) {
            const double lx = std::log(x), ly = std::log(y);
            sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
        }
        const double n = static_cast<double>(errs.size());
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        CHECK(slope == doctest::Approx(1.0).epsilon(0.15));
        CHECK(errs.back().second < 1e-2);
    }
}

TEST_CASE("spectral gradient") {
    GridSpec g(1, 5, 2 * kPi);
    const auto pts = grid_points(g);
    CVec f(g.size()), c(g.size(), 3.0);
    for (std::size_t j = 0; j < g.size(); ++j) f[j] = std::sin(2 * pts[j][0]);
    const auto df = spectral_gradient(f, g, 0);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(df[j] - 2 * std::cos(2 * pts[j][0])) < 1e-10);
    for (const auto& z : spectral_gradient(c, g, 0)) CHECK(std::abs(z) < 1e-12);

    GridSpec g2(2, 3, 1.5);
    const auto p2 = grid_points(g2);
    CVec mode(g2.size());
    const double k0 = 2 * kPi / 1.5 * 3, k1 = 2 * kPi / 1.5 * -2;
    for (std::size_t j = 0; j < g2.size(); ++j) mode[j] = std::polar(1.0, k0 * p2[j][0] + k1 * p2[j][1]);
    const auto d0 = spectral_gradient(mode, g2, 0), d1 = spectral_gradient(mode, g2, 1);
    for (std::size_t j = 0; j < g2.size(); ++j) {
        CHECK(std::abs(d0[j] - cplx(0, k0) * mode[j]) < 1e-10);
        CHECK(std::abs(d1[j] - cplx(0, k1) * mode[j]) < 1e-10);
    }
    CHECK_THROWS_AS(spectral_gradient(mode, g2, 2), ConfigError);
}

TEST_CASE("Burgers run stays one-dimensional") {
    GridSpec g(2, 4, 2 * kPi);
    InitialSpec u0;
    u0.kind = "burgers";
    const State st = prepare_initial_state(fourier_coefficients(u0, g));
    const auto p = default_system_params(NonlinearModel::burgers);
    const auto res = nonlinear_run(st, p, 0.04, 1.0, {}, {0.2, 0.6, 1.0});
    CHECK(res.steps.size() == 25);
    REQUIRE(res.snapshots.size() == 3);
    const std::size_t N = g.N();
    for (const auto& s : res.snapshots)
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 1; j < N; ++j) {
                CHECK(std::abs(s.fields[i * N + j] - s.fields[i * N]) < 1e-8);
                CHECK(std::abs(s.fields[g.size() + i * N + j] - s.fields[g.size() + i * N]) < 1e-8);
            }
    for (std::size_t k = 1; k < res.steps.size(); ++k) CHECK(res.steps[k].log_prob <= res.steps[k - 1].log_prob);
    CHECK(res.log10_success_prob() < 0.0);
}

TEST_CASE("Turing run is finite and matches the catalog parameters") {
    const auto p = default_system_params(NonlinearModel::turing);
    CHECK(p.a1 == 0.005);
    CHECK(p.a2 == 0.1);
    CHECK(p.p12 == 1.0);
    CHECK(p.p21 == -1.5);
    CHECK(p.p22 == 2.0);

    GridSpec g(2, 3, 2 * kPi);
    InitialSpec u0;
    u0.kind = "gaussian_sum";
    u0.sigma = std::sqrt(0.05);
    u0.centers = {{kPi / 2, kPi / 2}, {3 * kPi / 2, 3 * kPi / 2}};
    u0.species = 2;
    u0.coefficients = "samples";
    u0.grid_normalized = true;
    const State st = prepare_initial_state(fourier_coefficients(u0, g));
    const auto res = nonlinear_run(st, p, 0.05, 1.0);
    CHECK(res.steps.size() == 20);
    for (const auto& z : grid_solution(res.final)) CHECK(std::isfinite(std::abs(z)));

    // reaction samples follow u1^2 - 0.6
    const CVec f = grid_solution(st);
    const auto m = build_model(p, g, f);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(m.p11[j] - (f[j].real() * f[j].real() - 0.6)) < 1e-14);
}

TEST_CASE("non-finite reaction aborts with the step index") {
    GridSpec g(2, 2, 2 * kPi);
    State st = make_state(g, 1);
    st.amps.assign(st.amps.size(), 0.25);
    st.amps[0] = std::nan("");
    try {
        nonlinear_run(st, default_system_params(NonlinearModel::turing), 0.05, 0.1);
        FAIL("expected an abort");
    } catch (const NumericalAbort& e) {
        CHECK(std::string(e.what()).find("step 1") != std::string::npos);
    }
    CHECK_THROWS_AS(nonlinear_run(st, default_system_params(NonlinearModel::turing), 0.03, 0.1), ConfigError);
    CHECK_THROWS_AS(parse_model("gray_scott"), ConfigError);
}
