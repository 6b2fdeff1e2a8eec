#include "pite/reference.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pite {

Eigen::VectorXcd to_eigen(const CVec& v) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t j = 0; j < v.size(); ++j) out[static_cast<Eigen::Index>(j)] = v[j];
    return out;
}

CVec from_eigen(const Eigen::VectorXcd& v) { return CVec(v.data(), v.data() + v.size()); }

DenseHamiltonian DenseHamiltonian::from(Eigen::MatrixXcd m) {
    if (m.rows() != m.cols()) throw ConfigError("dense Hamiltonian must be square");
    if (m.rows() > kDenseMaxDim) throw ConfigError("dense Hamiltonian exceeds the dimension guard");
    DenseHamiltonian h;
    const double dev = m.rows() == 0 ? 0.0 : (m - m.adjoint()).cwiseAbs().maxCoeff();
    h.hermitian = dev < 1e-12;
    h.matrix = std::move(m);
    if (h.hermitian) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.matrix);
        if (es.info() != Eigen::Success) throw NumericalAbort("eigendecomposition failed");
        h.evals = es.eigenvalues();
        h.evecs = es.eigenvectors();
    }
    return h;
}

Eigen::VectorXcd dense_ite(const Eigen::MatrixXcd& H, double t, const Eigen::VectorXcd& psi0) {
    if (t < 0) throw ConfigError("dense_ite: t must be >= 0");
    if (H.rows() > kDenseMaxDim) throw ConfigError("dense_ite: dimension guard exceeded");
    if (H.rows() != psi0.size()) throw ConfigError("dense_ite: shape mismatch");
    const Eigen::MatrixXcd E = (-t * H).exp();
    return E * psi0;
}

namespace {

void require_hermitian(const DenseHamiltonian& H, const char* who) {
    if (!H.hermitian) throw ConfigError(std::string(who) + ": operator is not Hermitian");
}

double clamp_eval(double l) {
    if (l < -1e-10) throw ConfigError("operator is not positive semidefinite");
    return std::max(l, 0.0);
}

// Applies the scalar map g to H's spectrum and acts on psi.
template <class G>
Eigen::VectorXcd spectral_apply(const DenseHamiltonian& H, const Eigen::VectorXcd& psi, G g) {
    Eigen::VectorXcd c = H.evecs.adjoint() * psi;
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= g(clamp_eval(H.evals[k]));
    return H.evecs * c;
}

}  // namespace

Eigen::VectorXcd dense_ite_eigen(const DenseHamiltonian& H, double t, const Eigen::VectorXcd& psi0) {
    require_hermitian(H, "dense_ite_eigen");
    Eigen::VectorXcd c = H.evecs.adjoint() * psi0;
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::exp(-t * H.evals[k]);
    return H.evecs * c;
}

Eigen::MatrixXcd dense_matrix_function(const DenseHamiltonian& H, MatrixFn f, double dtau, int K) {
    require_hermitian(H, "dense_matrix_function");
    const Eigen::Index n = H.matrix.rows();
    Eigen::VectorXd d(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double l = clamp_eval(H.evals[k]);
        switch (f) {
            case MatrixFn::cos_sqrt: d[k] = std::cos(std::sqrt(2 * dtau * l)); break;
            case MatrixFn::exp_neg: d[k] = std::exp(-dtau * l); break;
            case MatrixFn::cos_sqrt_pow: d[k] = std::pow(std::cos(std::sqrt(2 * dtau * l)), K); break;
        }
    }
    return H.evecs * d.cast<cplx>().asDiagonal() * H.evecs.adjoint();
}

double ErrorBudget::aapite_bound(double T, double dtau, double ite_norm) const {
    return (4.0 * C1 * T * dtau / 3.0 + 4.0 * std::sqrt(delta)) / ite_norm;
}

ErrorBudget error_budget(const DenseHamiltonian& H, const Eigen::VectorXcd& psi, double delta) {
    require_hermitian(H, "error_budget");
    if (!(delta >= 0.0 && delta < 1.0)) throw ConfigError("error_budget: delta must lie in [0, 1)");
    if (std::abs(psi.norm() - 1.0) > 1e-10) throw ConfigError("error_budget: psi must be unit norm");
    const Eigen::VectorXcd c = H.evecs.adjoint() * psi;
    const Eigen::Index n = c.size();
    ErrorBudget b;
    b.delta = delta;
    double cum = 0.0;
    b.N_delta = static_cast<int>(n - 1);
    for (Eigen::Index k = 0; k < n; ++k) {
        cum += std::norm(c[k]);
        if (cum >= 1.0 - delta - 1e-14) {
            b.N_delta = static_cast<int>(k);
            break;
        }
    }
    double s = 0.0;
    for (int k = 0; k <= b.N_delta; ++k) {
        b.K_delta.push_back(k);
        const double l = clamp_eval(H.evals[k]);
        s += l * l * l * l * std::norm(c[k]);
    }
    b.C1 = std::sqrt(s);
    b.lambda_N = clamp_eval(H.evals[b.N_delta]);
    return b;
}

double measured_aapite_error(const DenseHamiltonian& H, const Eigen::VectorXcd& psi, double dtau, int K) {
    require_hermitian(H, "measured_aapite_error");
    const Eigen::VectorXcd a =
        spectral_apply(H, psi, [&](double l) { return std::pow(std::cos(std::sqrt(2 * dtau * l)), K); });
    const Eigen::VectorXcd b = spectral_apply(H, psi, [&](double l) { return std::exp(-K * dtau * l); });
    return (a / a.norm() - b / b.norm()).norm();
}

ApiteBound apite_budget(const DenseHamiltonian& H, const Eigen::VectorXcd& psi, double delta, double m0,
                        double dtau, int K) {
    if (!(m0 > 0.0 && m0 < 1.0)) throw ConfigError("apite_budget: m0 must lie in (0, 1)");
    ApiteBound r;
    r.budget = error_budget(H, psi, delta);
    const double T = K * dtau;
    const double l = r.budget.lambda_N;
    r.numerator = l * l * T * dtau / (1.0 - m0 * m0) + 4.0 * std::sqrt(delta);
    const double ite = spectral_apply(H, psi, [&](double x) { return std::exp(-T * x); }).norm();
    const double den = ite - r.numerator;
    if (den <= 0.0) {
        r.vacuous = true;
        r.value = std::numeric_limits<double>::infinity();
    } else {
        r.value = r.numerator / den;
    }
    return r;
}

double measured_apite_error(const DenseHamiltonian& H, const Eigen::VectorXcd& psi, double m0, double dtau, int K) {
    require_hermitian(H, "measured_apite_error");
    const double th0 = apite_theta0(m0), s0 = apite_s0(m0);
    const Eigen::VectorXcd a =
        spectral_apply(H, psi, [&](double l) { return std::pow(std::cos(th0 + s0 * dtau * l), K); });
    const Eigen::VectorXcd b = spectral_apply(H, psi, [&](double l) { return std::exp(-K * dtau * l); });
    return (a / a.norm() - b / b.norm()).norm();
}

ProbabilitySandwich apite_sandwich(const DenseHamiltonian& H, const Eigen::VectorXcd& psi, double m0, double dtau,
                                   int K) {
    require_hermitian(H, "apite_sandwich");
    const double th0 = apite_theta0(m0), s0 = apite_s0(m0);
    const Eigen::VectorXcd a =
        spectral_apply(H, psi, [&](double l) { return std::pow(std::cos(th0 + s0 * dtau * l), K); });
    const Eigen::VectorXcd b =
        std::pow(m0, K) * spectral_apply(H, psi, [&](double l) { return std::exp(-K * dtau * l); });
    const double e = (a - b).norm();
    return {a.norm(), b.norm() - e, b.norm() + e};
}

AnalyticCase parse_analytic_case(const std::string& s) {
    if (s == "sine") return AnalyticCase::sine;
    if (s == "delta") return AnalyticCase::delta;
    throw ConfigError("unknown analytic case '" + s + "' (sine|delta)");
}

cplx truncated_analytic_1d(AnalyticCase c, int N_trun, double x, double t, double a, double v, double L,
                           bool grid_truncation) {
    if (t < 0) throw ConfigError("analytic solution needs t >= 0");
    // Cosine-series weight of mode k and the constant term.
    auto weight = [&](int k) {
        if (c == AnalyticCase::sine) return -4.0 / (kPi * (4.0 * k * k - 1.0));
        return (k % 2 == 0 ? 2.0 : -2.0) / L;
    };
    const double c0 = c == AnalyticCase::sine ? 2.0 / kPi : 1.0 / L;
    const double y = x - v * t;
    cplx u = c0;
    const int kmax = grid_truncation ? N_trun / 2 - 1 : N_trun;
    for (int k = 1; k <= kmax; ++k) {
        const double w = 2 * kPi * k / L;
        u += weight(k) * std::cos(w * y) * std::exp(-a * w * w * t);
    }
    if (grid_truncation && N_trun >= 2) {
        const int k = N_trun / 2;
        const double w = 2 * kPi * k / L;
        u += 0.5 * weight(k) * std::polar(1.0, -w * y) * std::exp(-a * w * w * t);
    }
    return u;
}

FdmScheme parse_fdm_scheme(const std::string& s) {
    if (s == "backward_euler" || s == "be") return FdmScheme::backward_euler;
    if (s == "forward_euler" || s == "fe") return FdmScheme::forward_euler;
    throw ConfigError("unknown FDM scheme '" + s + "'");
}

Eigen::MatrixXd fdm_operator(int N, double a, double v, const RVec& V, double L) {
    if (N < 4) throw ConfigError("fdm: N must be >= 4");
    if (!V.empty() && V.size() != static_cast<std::size_t>(N)) throw ConfigError("fdm: potential length != N");
    const double h = L / N;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) {
        const int ip = (i + 1) % N, im = (i + N - 1) % N;
        A(i, i) += 2 * a / (h * h) + (V.empty() ? 0.0 : V[i]);
        A(i, ip) += -a / (h * h) + v / (2 * h);
        A(i, im) += -a / (h * h) - v / (2 * h);
    }
    return A;
}

FdmResult fdm_solve(FdmScheme scheme, int N, double dtau, double T, double a, double v, const RVec& V,
                    const RVec& u0, double L, int record_every) {
    if (u0.size() != static_cast<std::size_t>(N)) throw ConfigError("fdm: initial data length != N");
    if (!(dtau > 0)) throw ConfigError("fdm: dtau must be positive");
    const long K = std::lround(T / dtau);
    if (std::abs(K * dtau - T) > 1e-9 * std::max(1.0, T)) throw ConfigError("fdm: T is not a multiple of dtau");
    const Eigen::MatrixXd A = fdm_operator(N, a, v, V, L);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    if (scheme == FdmScheme::backward_euler) lu.compute(I + dtau * A);
    const Eigen::MatrixXd E = I - dtau * A;

    Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(u0.data(), N);
    const double n0 = std::max(u.norm(), 1e-300);
    FdmResult r;
    r.times.push_back(0.0);
    r.states.push_back(u0);
    for (long m = 1; m <= K; ++m) {
        u = scheme == FdmScheme::backward_euler ? Eigen::VectorXd(lu.solve(u)) : Eigen::VectorXd(E * u);
        if (scheme == FdmScheme::forward_euler && !(u.norm() <= 1e6 * n0)) {
            r.unstable = true;
            r.times.push_back(m * dtau);
            r.states.emplace_back(u.data(), u.data() + N);
            return r;
        }
        if (m == K || (record_every > 0 && m % record_every == 0)) {
            r.times.push_back(m * dtau);
            r.states.emplace_back(u.data(), u.data() + N);
        }
    }
    return r;
}

Eigen::VectorXcd hhl_surrogate_step(const Eigen::MatrixXcd& H, double dtau, const Eigen::VectorXcd& v) {
    const Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(H.rows(), H.cols()) + dtau * H;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
    if (!lu.isInvertible()) throw NumericalAbort("hhl surrogate: singular system");
    return lu.solve(v);
}

HhlRun hhl_run(const Eigen::MatrixXcd& H, double dtau, int K, const Eigen::VectorXcd& v) {
    const Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(H.rows(), H.cols()) + dtau * H;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    if (std::abs(lu.determinant()) == 0.0) throw NumericalAbort("hhl surrogate: singular system");
    HhlRun r;
    r.final = v;
    const double n0 = v.norm();
    for (int m = 0; m < K; ++m) {
        const double before = r.final.norm();
        r.final = lu.solve(r.final);
        r.step_ratio.push_back(r.final.norm() / before);
    }
    r.norm_ratio = n0 > 0 ? r.final.norm() / n0 : 0.0;
    return r;
}

RunResult exact_pite_reference_run(const State& initial, const HamiltonianParams& params, const PiteConfig& cfg,
                                   double T, const std::vector<double>& snapshot_times) {
    PiteConfig c = cfg;
    const auto dts = step_sizes(cfg, T);
    c.variant = Variant::exact;
    c.m0 = 1.0;
    c.order = 1;
    c.potential_variant.reset();
    c.schedule.reset();
    c.dtau = dts.empty() ? cfg.dtau : dts.front();
    const bool uniform =
        std::all_of(dts.begin(), dts.end(), [&](double x) { return std::abs(x - c.dtau) < 1e-15 * c.dtau; });
    if (!uniform) throw ConfigError("exact reference needs a uniform step size");
    auto r = run(initial, params, c, T, snapshot_times);
    r.reference = "exact_pite";
    return r;
}

}  // namespace pite
