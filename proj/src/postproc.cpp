#include "pite/postproc.hpp"

#include <cmath>

namespace pite {

namespace {

struct GaussLegendre {
    RVec x, w;  // on [-1, 1]
};

GaussLegendre gauss_legendre(int n) {
    GaussLegendre g{RVec(n), RVec(n)};
    for (int i = 0; i < n; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        g.x[i] = z;
        g.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return g;
}

double kappa_of(std::size_t kt, std::size_t N, double L) {
    return 2.0 * kPi / L * (static_cast<double>(kt) - static_cast<double>(N / 2));
}

// Separable coefficients: c_k = amp * prod_a axis[a][k_a].
void add_separable(CVec& c, const GridSpec& spec, const std::vector<CVec>& axis, cplx amp) {
    for (std::size_t j = 0; j < spec.size(); ++j) {
        cplx v = amp;
        for (int a = 0; a < spec.d; ++a) v *= axis[a][spec.component(j, a)];
        c[j] += v;
    }
}

RVec default_center(const GridSpec& spec, const RVec& x0) {
    if (x0.empty()) return RVec(spec.d, spec.L / 2);
    if (static_cast<int>(x0.size()) != spec.d) throw ConfigError("initial: x0 length must equal d");
    return x0;
}

CVec grid_samples(const std::function<cplx(const RVec&)>& f, const GridSpec& spec) {
    const auto pts = grid_points(spec);
    CVec s(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) s[j] = f(pts[j]);
    return s;
}

CoeffVector finish(CVec c, const GridSpec& spec, int n_species) {
    CoeffVector out{std::move(c), 0.0, spec, n_species};
    out.norm0 = norm(out.c);
    if (!(out.norm0 > 0.0) || !std::isfinite(out.norm0)) throw ConfigError("initial condition has zero coefficients");
    return out;
}

}  // namespace

cplx gaussian_axis_coefficient(double kappa, double x0, double sigma, double L) {
    static const GaussLegendre gl = gauss_legendre(20);
    const int panels = 64 + static_cast<int>(std::ceil(std::abs(kappa) * L / kPi)) * 4;
    const double h = L / panels;
    cplx acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        for (std::size_t i = 0; i < gl.x.size(); ++i) {
            const double x = mid + 0.5 * h * gl.x[i];
            const double g = std::exp(-(x - x0) * (x - x0) / (2.0 * sigma * sigma));
            acc += 0.5 * h * gl.w[i] * g * std::polar(1.0, -kappa * x);
        }
    }
    return acc / std::sqrt(L);
}

CoeffVector coefficients_from_samples(const CVec& samples, const GridSpec& spec) {
    if (samples.size() != spec.size() && samples.size() != 2 * spec.size())
        throw ConfigError("initial table length " + std::to_string(samples.size()) + " does not match grid size " +
                          std::to_string(spec.size()));
    CVec c = samples;
    shifted_qft_blocks(c, spec, QftDirection::inverse);
    const double f = std::pow(spec.L / static_cast<double>(spec.N()), spec.d / 2.0);
    for (auto& z : c) z *= f;
    return finish(std::move(c), spec, samples.size() == spec.size() ? 0 : 1);
}

CoeffVector coefficients_from_function(const std::function<cplx(const RVec&)>& f, const GridSpec& spec,
                                       int oversample) {
    int extra = 0;
    while ((1 << extra) < oversample) ++extra;
    if ((1 << extra) != oversample) throw ConfigError("oversampling factor must be a power of two");
    const GridSpec fine(spec.d, spec.n + extra, spec.L);
    CVec s = grid_samples(f, fine);
    fft_axes(s, fine, -1);
    const std::size_t N = spec.N(), M = fine.N();
    const double w = std::pow(spec.L / static_cast<double>(M), spec.d) / std::pow(spec.L, spec.d / 2.0);
    CVec c(spec.size());
    for (std::size_t j = 0; j < spec.size(); ++j) {
        std::size_t fj = 0;
        for (int a = 0; a < spec.d; ++a) {
            const long long k = static_cast<long long>(spec.component(j, a)) - static_cast<long long>(N / 2);
            const std::size_t m = static_cast<std::size_t>((k + static_cast<long long>(M)) % static_cast<long long>(M));
            fj += m * fine.stride(a);
        }
        c[j] = w * s[fj];
    }
    return finish(std::move(c), spec, 0);
}

CoeffVector fourier_coefficients(const InitialSpec& u0, const GridSpec& spec) {
    const std::size_t N = spec.N();
    const double L = spec.L;
    CVec c(spec.size(), 0.0);
    const std::string& kind = u0.kind;

    if (kind == "sine") {
        CVec ax(N);
        for (std::size_t kt = 0; kt < N; ++kt) {
            const double k = static_cast<double>(kt) - static_cast<double>(N / 2);
            ax[kt] = std::sqrt(L) * (-2.0 / (kPi * (4.0 * k * k - 1.0)));
        }
        add_separable(c, spec, std::vector<CVec>(spec.d, ax), u0.amplitude);
        return finish(std::move(c), spec, 0);
    }
    if (kind == "delta") {
        const RVec x0 = default_center(spec, u0.x0);
        std::vector<CVec> axes(spec.d, CVec(N));
        for (int a = 0; a < spec.d; ++a)
            for (std::size_t kt = 0; kt < N; ++kt)
                axes[a][kt] = std::polar(1.0 / std::sqrt(L), -kappa_of(kt, N, L) * x0[a]);
        add_separable(c, spec, axes, u0.amplitude);
        return finish(std::move(c), spec, 0);
    }
    if (kind == "mode") {
        if (static_cast<int>(u0.mode.size()) != spec.d) throw ConfigError("initial mode: index length must equal d");
        std::size_t j = 0;
        for (int a = 0; a < spec.d; ++a) {
            if (u0.mode[a] < 0 || u0.mode[a] >= static_cast<int>(N)) throw ConfigError("initial mode: index out of range");
            j += static_cast<std::size_t>(u0.mode[a]) * spec.stride(a);
        }
        c[j] = u0.amplitude;
        return finish(std::move(c), spec, 0);
    }
    if (kind == "gaussian" || kind == "gaussian_sum") {
        if (!(u0.sigma > 0)) throw ConfigError("initial gaussian: sigma must be > 0");
        std::vector<RVec> centers = u0.centers;
        if (kind == "gaussian") centers = {default_center(spec, u0.x0)};
        if (centers.empty()) throw ConfigError("initial gaussian_sum: no centers");
        for (const auto& x0 : centers)
            if (static_cast<int>(x0.size()) != spec.d) throw ConfigError("initial gaussian: center length must equal d");
        auto f = [&](const RVec& x) {
            double s = 0.0;
            for (const auto& x0 : centers) {
                double r2 = 0.0;
                for (int a = 0; a < spec.d; ++a) r2 += (x[a] - x0[a]) * (x[a] - x0[a]);
                s += std::exp(-r2 / (2 * u0.sigma * u0.sigma));
            }
            return cplx(s);
        };
        double amp = u0.amplitude;
        if (u0.grid_normalized) amp = 1.0 / norm(grid_samples(f, spec));
        CoeffVector one;
        if (u0.coefficients == "samples") {
            CVec s = grid_samples(f, spec);
            for (auto& z : s) z *= amp;
            one = coefficients_from_samples(s, spec);
        } else if (u0.coefficients == "oversampled") {
            one = coefficients_from_function([&](const RVec& x) { return amp * f(x); }, spec);
        } else {
            for (const auto& x0 : centers) {
                std::vector<CVec> axes(spec.d, CVec(N));
                for (int a = 0; a < spec.d; ++a)
                    for (std::size_t kt = 0; kt < N; ++kt)
                        axes[a][kt] = gaussian_axis_coefficient(kappa_of(kt, N, L), x0[a], u0.sigma, L);
                add_separable(c, spec, axes, amp);
            }
            one = finish(std::move(c), spec, 0);
        }
        if (u0.species == 2) {
            CVec both(one.c);
            both.insert(both.end(), one.c.begin(), one.c.end());
            return finish(std::move(both), spec, 1);
        }
        return one;
    }
    if (kind == "burgers") {
        if (spec.d < 1) throw ConfigError("burgers initial condition needs d >= 1");
        auto a = coefficients_from_function([](const RVec& x) { return cplx(std::sin(2.0 * x[0])); }, spec);
        auto b = coefficients_from_function([](const RVec&) { return cplx(0.5); }, spec);
        CVec both = a.c;
        both.insert(both.end(), b.c.begin(), b.c.end());
        return finish(std::move(both), spec, 1);
    }
    if (kind == "table") return coefficients_from_samples(u0.table, spec);
    throw ConfigError("unknown initial condition kind '" + kind + "'");
}

State prepare_initial_state(const CoeffVector& coeffs) {
    State st = make_state(coeffs.spec, coeffs.n_species, 1);
    st.basis = Basis::fourier;
    set_statevector(st, coeffs.c);
    apply_shifted_qft(st, QftDirection::forward);
    st.scale = coeffs.norm0;
    return st;
}

cplx pixel_eval(const PixelKernel& k, double x, double p) {
    const double y = x - p;
    double s = 0.0;
    for (std::size_t j = 0; j < k.N / 2; ++j) s += std::cos(kPi * (2.0 * j + 1.0) * y / k.L);
    return 2.0 / std::sqrt(static_cast<double>(k.N) * k.L) * std::polar(1.0, -kPi * y / k.L) * s;
}

cplx pixel_eval(const PixelKernel& k, const RVec& x, const RVec& p) {
    cplx v = 1.0;
    for (int a = 0; a < k.d; ++a) v *= pixel_eval(k, x[a], p[a]);
    return v;
}

CVec grid_solution(const State& st) {
    if (st.basis != Basis::position) throw ConfigError("grid_solution: state must be in the position basis");
    const GridSpec& g = st.layout.grid;
    const double f = std::exp(0.5 * st.log_prob) * st.scale * std::pow(static_cast<double>(g.N()) / g.L, g.d / 2.0);
    CVec out = st.amps;
    for (auto& z : out) z *= f;
    return out;
}

CVec reconstruct_block(const CVec& psi, const GridSpec& spec, double factor, std::size_t N_f) {
    const std::size_t N = spec.N();
    if (N_f == 0 || (N_f & (N_f - 1)) != 0) throw ConfigError("N_f must be a power of two");
    if (N_f < N) throw ConfigError("N_f must be >= N");
    if (psi.size() != spec.size()) throw ConfigError("reconstruct: block length mismatch");
    const PixelKernel pk{N, spec.L, 1};
    // one-axis kernel G[q][l] = h_N(q L / N_f; l L / N)
    std::vector<CVec> G(N_f, CVec(N));
    for (std::size_t q = 0; q < N_f; ++q)
        for (std::size_t l = 0; l < N; ++l)
            G[q][l] = pixel_eval(pk, spec.L * q / static_cast<double>(N_f), spec.L * l / static_cast<double>(N));

    // apply axis by axis; dims[a] goes from N to N_f
    std::vector<std::size_t> dims(spec.d, N);
    CVec cur = psi;
    for (int a = 0; a < spec.d; ++a) {
        std::size_t outer = 1, inner = 1;
        for (int b = 0; b < a; ++b) outer *= dims[b];
        for (int b = a + 1; b < spec.d; ++b) inner *= dims[b];
        CVec next(outer * N_f * inner, 0.0);
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t q = 0; q < N_f; ++q)
                for (std::size_t l = 0; l < N; ++l) {
                    const cplx gq = G[q][l];
                    const cplx* src = &cur[(o * N + l) * inner];
                    cplx* dst = &next[(o * N_f + q) * inner];
                    for (std::size_t i = 0; i < inner; ++i) dst[i] += gq * src[i];
                }
        dims[a] = N_f;
        cur = std::move(next);
    }
    for (auto& z : cur) z *= factor;
    return cur;
}

std::vector<CVec> reconstruct_solution(const State& st, std::size_t N_f) {
    if (st.basis != Basis::position) throw ConfigError("reconstruct: state must be in the position basis");
    const GridSpec& g = st.layout.grid;
    const double factor = std::exp(0.5 * st.log_prob) * st.scale;
    std::vector<CVec> out;
    for (std::size_t s = 0; s < st.layout.species_count(); ++s) {
        CVec block(st.amps.begin() + static_cast<std::ptrdiff_t>(s * g.size()),
                   st.amps.begin() + static_cast<std::ptrdiff_t>((s + 1) * g.size()));
        out.push_back(reconstruct_block(block, g, factor, N_f));
    }
    return out;
}

}  // namespace pite
