// Classical oracles: dense ITE, Hermitian matrix functions and error budgets,
// truncated analytic series, Euler finite differences and the HHL surrogate.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "pite/evolve.hpp"
#include "pite/grid.hpp"

namespace pite {

/// Dense operator with an eigensystem cached when Hermitian (ascending order).
struct DenseHamiltonian {
    Eigen::MatrixXcd matrix;
    bool hermitian = false;
    Eigen::VectorXd evals;
    Eigen::MatrixXcd evecs;

    /// Detects hermiticity (1e-12) and, if set, diagonalizes.
    static DenseHamiltonian from(Eigen::MatrixXcd m);
};

/// Largest dimension the dense oracles accept (2^14).
inline constexpr Eigen::Index kDenseMaxDim = Eigen::Index{1} << 14;

/// e^{-tH} psi0 by Pade scaling-and-squaring; works for non-normal H.
Eigen::VectorXcd dense_ite(const Eigen::MatrixXcd& H, double t, const Eigen::VectorXcd& psi0);
/// Same through the eigensystem; Hermitian only.
Eigen::VectorXcd dense_ite_eigen(const DenseHamiltonian& H, double t, const Eigen::VectorXcd& psi0);

enum class MatrixFn { cos_sqrt, exp_neg, cos_sqrt_pow };

/// f(H) through the eigendecomposition:
///   cos_sqrt      cos(sqrt(2 dtau H))
///   exp_neg       exp(-dtau H)
///   cos_sqrt_pow  cos^K(sqrt(2 dtau H))
/// Eigenvalues down to -1e-10 are clamped to zero.
Eigen::MatrixXcd dense_matrix_function(const DenseHamiltonian& H, MatrixFn f, double dtau, int K = 1);

struct ErrorBudget {
    double delta = 0.0;
    int N_delta = 0;
    std::vector<int> K_delta;  // {0..N_delta}
    double C1 = 0.0;
    double lambda_N = 0.0;     // eigenvalue at N_delta

    /// (4 C1 T dtau / 3 + 4 sqrt(delta)) / ite_norm, ite_norm = ||e^{-TH} psi||.
    double aapite_bound(double T, double dtau, double ite_norm) const;
};

/// N_delta is the smallest index whose cumulative overlap reaches 1 - delta
/// (relative slack 1e-14). `psi` must be unit norm.
ErrorBudget error_budget(const DenseHamiltonian& H, const Eigen::VectorXcd& psi, double delta);

/// Normalized distance between cos^K(sqrt(2 dtau H)) psi and e^{-K dtau H} psi.
double measured_aapite_error(const DenseHamiltonian& H, const Eigen::VectorXcd& psi, double dtau, int K);

struct ApiteBound {
    double numerator = 0.0;  // (1 - m0^2)^{-1} lambda_N^2 T dtau + 4 sqrt(delta)
    double value = 0.0;      // numerator / (||e^{-TH} psi|| - numerator)
    bool vacuous = false;    // denominator <= 0
    ErrorBudget budget;
};

ApiteBound apite_budget(const DenseHamiltonian& H, const Eigen::VectorXcd& psi, double delta, double m0,
                        double dtau, int K);

/// Normalized distance between cos^K(theta0 + s0 dtau H) psi and e^{-K dtau H} psi.
double measured_apite_error(const DenseHamiltonian& H, const Eigen::VectorXcd& psi, double m0, double dtau, int K);

/// sqrt(P) after K APITE steps versus m0^K ||e^{-TH} psi|| +- ||cos^K psi - m0^K e^{-TH} psi||.
struct ProbabilitySandwich {
    double sqrt_prob = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool holds(double tol = 1e-12) const { return sqrt_prob >= lower - tol && sqrt_prob <= upper + tol; }
};
ProbabilitySandwich apite_sandwich(const DenseHamiltonian& H, const Eigen::VectorXcd& psi, double m0, double dtau,
                                   int K);

enum class AnalyticCase { sine, delta };
AnalyticCase parse_analytic_case(const std::string& s);

/// Fourier-series solution of u_t = a u_xx - v u_x on [0, L).
///   sine   u0 = sin(pi x / L)
///   delta  u0 = delta(x - L/2)
/// With grid_truncation the modes are those of an N_trun-point grid, the top
/// mode -N_trun/2 entering once (half weight, complex). Otherwise modes 1..N_trun.
cplx truncated_analytic_1d(AnalyticCase c, int N_trun, double x, double t, double a, double v, double L = 1.0,
                           bool grid_truncation = false);

enum class FdmScheme { backward_euler, forward_euler };
FdmScheme parse_fdm_scheme(const std::string& s);

struct FdmResult {
    std::vector<double> times;  // times of `states`, step 0 included
    std::vector<RVec> states;
    bool unstable = false;      // forward Euler blow-up (norm grew x1e6)
};

/// Periodic 1D Euler scheme with A = -a Lap_h + v D_h + V, central differences.
/// Backward Euler solves (I + dtau A) u_m = u_{m-1} by dense LU.
/// `record_every` controls which steps are kept (the last is always kept).
FdmResult fdm_solve(FdmScheme scheme, int N, double dtau, double T, double a, double v, const RVec& V,
                    const RVec& u0, double L = 1.0, int record_every = 0);

/// Dense A of the scheme above.
Eigen::MatrixXd fdm_operator(int N, double a, double v, const RVec& V, double L = 1.0);

/// Solves (I + dtau H) x = v.
Eigen::VectorXcd hhl_surrogate_step(const Eigen::MatrixXcd& H, double dtau, const Eigen::VectorXcd& v);

struct HhlRun {
    Eigen::VectorXcd final;
    double norm_ratio = 1.0;  // ||x_K|| / ||x_0||, squared: the surrogate success proxy
    std::vector<double> step_ratio;
};
HhlRun hhl_run(const Eigen::MatrixXcd& H, double dtau, int K, const Eigen::VectorXcd& v);

/// The evolve pipeline with exact angles on every factor (m0 = 1): Trotter
/// error retained, approximation error removed.
RunResult exact_pite_reference_run(const State& initial, const HamiltonianParams& params, const PiteConfig& cfg,
                                   double T, const std::vector<double>& snapshot_times = {});

Eigen::VectorXcd to_eigen(const CVec& v);
CVec from_eigen(const Eigen::VectorXcd& v);

}  // namespace pite
