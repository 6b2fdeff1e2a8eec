#include <doctest.h>

#include <cmath>
#include <random>

#include "pite/postproc.hpp"

using namespace pite;

namespace {

// composite Simpson for (1/sqrt(L)) int_0^L exp(-(x-x0)^2/(2 s^2)) exp(-i kappa x) dx
cplx simpson_gaussian(double kappa, double x0, double s, double L, int m = 20000) {
    const double h = L / m;
    cplx acc = 0.0;
    for (int j = 0; j <= m; ++j) {
        const double x = j * h;
        const double w = (j == 0 || j == m) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        acc += w * std::exp(-(x - x0) * (x - x0) / (2 * s * s)) * std::polar(1.0, -kappa * x);
    }
    return acc * (h / 3.0) / std::sqrt(L);
}

double max_abs_diff(const CVec& a, const CVec& b) {
    double m = 0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

}  // namespace

TEST_CASE("sine coefficients") {
    GridSpec g(1, 4, 1.0);
    InitialSpec u0;
    const auto c = fourier_coefficients(u0, g);
    double n2 = 0;
    for (std::size_t kt = 0; kt < g.N(); ++kt) {
        const double k = static_cast<double>(kt) - 8.0;
        const double want = -2.0 / (kPi * (4 * k * k - 1));
        CHECK(std::abs(c.c[kt] - want) < 1e-15);
        n2 += want * want;
    }
    CHECK(std::abs(c.norm0 - std::sqrt(n2)) < 1e-15);
    CHECK(c.n_species == 0);
}

TEST_CASE("single Fourier mode") {
    GridSpec g(2, 3, 1.0);
    InitialSpec u0;
    u0.kind = "mode";
    u0.mode = {2, 5};
    const auto c = fourier_coefficients(u0, g);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(c.c[j] == (j == 2 * 8 + 5 ? cplx(1.0) : cplx(0.0)));

    u0.mode = {4, 4};  // zero frequency
    const State st = prepare_initial_state(fourier_coefficients(u0, g));
    CHECK(st.basis == Basis::position);
    CHECK(st.success_prob() == 1.0);
    for (const auto& z : st.amps) CHECK(std::abs(z - 1.0 / 8.0) < 1e-14);

    u0.mode = {8, 0};
    CHECK_THROWS_AS(fourier_coefficients(u0, g), ConfigError);
    u0.kind = "nope";
    CHECK_THROWS_AS(fourier_coefficients(u0, g), ConfigError);
}

TEST_CASE("Gaussian coefficients agree with an independent quadrature") {
    for (int d = 1; d <= 2; ++d) {
        GridSpec g(d, 4, 2 * kPi);
        InitialSpec u0;
        u0.kind = "gaussian";
        u0.x0 = d == 1 ? RVec{kPi / 2} : RVec{kPi / 2, kPi / 2};
        u0.sigma = 0.5;
        const auto c = fourier_coefficients(u0, g);
        CVec ax(g.N());
        for (std::size_t kt = 0; kt < g.N(); ++kt)
            ax[kt] = simpson_gaussian(static_cast<double>(kt) - 8.0, kPi / 2, 0.5, 2 * kPi);
        for (std::size_t j = 0; j < g.size(); ++j) {
            cplx want = 1.0;
            for (int a = 0; a < d; ++a) want *= ax[g.component(j, a)];
            CHECK(std::abs(c.c[j] - want) < 1e-8);
        }
    }
}

TEST_CASE("oversampled DFT is exact for band-limited functions") {
    GridSpec g(1, 4, 2.0);
    auto f = [](const RVec& x) { return 0.5 + std::polar(1.0, 2 * kPi * 3 * x[0] / 2.0) - 0.25 * std::polar(1.0, -2 * kPi * 5 * x[0] / 2.0); };
    const auto c = coefficients_from_function(f, g);
    for (std::size_t kt = 0; kt < g.N(); ++kt) {
        const int k = static_cast<int>(kt) - 8;
        const cplx want = std::sqrt(2.0) * (k == 0 ? 0.5 : k == 3 ? 1.0 : k == -5 ? -0.25 : 0.0);
        CHECK(std::abs(c.c[kt] - want) < 1e-13);
    }
    CHECK_THROWS_AS(coefficients_from_function(f, g, 3), ConfigError);
}

TEST_CASE("prepared states") {
    SUBCASE("sine samples at large N") {
        GridSpec g(1, 7, 1.0);
        const State st = prepare_initial_state(fourier_coefficients(InitialSpec{}, g));
        CHECK(std::abs(st.scale - fourier_coefficients(InitialSpec{}, g).norm0) < 1e-15);
        const CVec u = grid_solution(st);
        const auto pts = grid_points(g);
        for (std::size_t l = 0; l < g.size(); ++l) CHECK(std::abs(u[l] - std::sin(kPi * pts[l][0])) < 5e-3);
    }
    SUBCASE("separable 2D state is the tensor product of 1D states") {
        GridSpec g1(1, 3, 2 * kPi), g2(2, 3, 2 * kPi);
        InitialSpec u0;
        u0.kind = "gaussian";
        u0.sigma = 0.7;
        u0.x0 = {1.0};
        const State a = prepare_initial_state(fourier_coefficients(u0, g1));
        u0.x0 = {1.0, 1.0};
        const State b = prepare_initial_state(fourier_coefficients(u0, g2));
        for (std::size_t j = 0; j < g2.size(); ++j)
            CHECK(std::abs(b.amps[j] - a.amps[g2.component(j, 0)] * a.amps[g2.component(j, 1)]) < 1e-13);
    }
}

TEST_CASE("pixel function") {
    for (double L : {1.0, 2 * kPi})
        for (std::size_t N : {2u, 4u, 8u, 16u, 32u}) {
            const PixelKernel k{N, L, 1};
            for (std::size_t m = 0; m < N; ++m)
                for (std::size_t l = 0; l < N; ++l) {
                    const cplx h = pixel_eval(k, L * m / N, L * l / N);
                    const double want = m == l ? std::sqrt(N / L) : 0.0;
                    CHECK(std::abs(h - want) < 1e-12);
                }
        }
    // off grid: modulus is the Dirichlet kernel |sin(N pi y / L) / sin(pi y / L)| / sqrt(N L)
    for (std::size_t N : {8u, 64u, 512u}) {
        const PixelKernel k{N, 1.0, 1};
        for (double y : {0.013, 0.1, 0.37}) {
            const double want = std::abs(std::sin(N * kPi * y) / std::sin(kPi * y)) / std::sqrt(static_cast<double>(N));
            CHECK(std::abs(std::abs(pixel_eval(k, 0.2 + y, 0.2)) - want) < 1e-10);
        }
    }
    const PixelKernel k2{4, 1.0, 2};
    CHECK(std::abs(pixel_eval(k2, RVec{0.25, 0.5}, RVec{0.25, 0.5}) - 4.0) < 1e-14);
}

TEST_CASE("reconstruction") {
    std::mt19937 rng(151);
    std::normal_distribution<double> nd;
    GridSpec g(2, 3, 1.5);
    State st = make_state(g);
    CVec psi(g.size());
    for (auto& z : psi) z = {nd(rng), nd(rng)};
    set_statevector(st, psi);
    st.log_prob = std::log(0.3);

    SUBCASE("N_f = N is the grid solution") {
        const auto r = reconstruct_solution(st, g.N());
        REQUIRE(r.size() == 1);
        CHECK(max_abs_diff(r[0], grid_solution(st)) < 1e-12);
        const double f = std::sqrt(0.3) * st.scale * (8 / 1.5);
        for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(r[0][j] - f * st.amps[j]) < 1e-12);
    }
    SUBCASE("fine grid keeps the coarse values") {
        const auto fine = reconstruct_solution(st, 32)[0];
        const auto coarse = grid_solution(st);
        for (std::size_t j = 0; j < g.size(); ++j) {
            const std::size_t q0 = g.component(j, 0) * 4, q1 = g.component(j, 1) * 4;
            CHECK(std::abs(fine[q0 * 32 + q1] - coarse[j]) < 1e-11);
        }
    }
    SUBCASE("linear in psi") {
        const cplx c(0.3, -1.7);
        CVec scaled = st.amps;
        for (auto& z : scaled) z *= c;
        const auto a = reconstruct_block(st.amps, g, 1.0, 16);
        const auto b = reconstruct_block(scaled, g, 1.0, 16);
        for (std::size_t j = 0; j < a.size(); ++j) CHECK(std::abs(b[j] - c * a[j]) < 1e-12);
    }
    SUBCASE("uniform psi interpolates to a constant") {
        GridSpec g1(1, 3, 1.0);
        const auto r = reconstruct_block(CVec(8, 1.0), g1, 1.0, 16);
        for (const auto& z : r) CHECK(std::abs(z - std::sqrt(8.0)) < 1e-12);
    }
    CHECK_THROWS_AS(reconstruct_solution(st, 24), ConfigError);
    CHECK_THROWS_AS(reconstruct_solution(st, 4), ConfigError);
}

TEST_CASE("round trip through the grid solution") {
    for (const char* kind : {"sine", "gaussian", "delta"}) {
        GridSpec g(1, 5, 1.0);
        InitialSpec u0;
        u0.kind = kind;
        u0.sigma = 0.1;
        const auto c = fourier_coefficients(u0, g);
        const auto back = coefficients_from_samples(grid_solution(prepare_initial_state(c)), g);
        for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(back.c[j] - c.c[j]) < 1e-10 * c.norm0);
    }
}

TEST_CASE("reconstruction error shrinks with N at fixed N_f") {
    const std::size_t Nf = 256;
    double prev = 1e300;
    for (int n : {3, 4, 5, 6}) {
        GridSpec g(1, n, 1.0);
        const State st = prepare_initial_state(fourier_coefficients(InitialSpec{}, g));
        const auto r = reconstruct_solution(st, Nf)[0];
        double err = 0;
        for (std::size_t q = 0; q < Nf; ++q) err = std::max(err, std::abs(r[q] - std::sin(kPi * q / double(Nf))));
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("two-species initial data") {
    GridSpec g(2, 3, 2 * kPi);
    InitialSpec u0;
    u0.kind = "burgers";
    const auto c = fourier_coefficients(u0, g);
    CHECK(c.n_species == 1);
    const State st = prepare_initial_state(c);
    const auto r = reconstruct_solution(st, 8);
    REQUIRE(r.size() == 2);
    const auto pts = grid_points(g);
    for (std::size_t j = 0; j < g.size(); ++j) {
        CHECK(std::abs(r[0][j] - std::sin(2 * pts[j][0])) < 1e-12);
        CHECK(std::abs(r[1][j] - 0.5) < 1e-12);
    }
}
