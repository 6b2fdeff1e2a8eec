// Fourier pre-processing, initial-state preparation and pixel-function reconstruction.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pite/grid.hpp"
#include "pite/statevector.hpp"

namespace pite {

/// Initial-condition catalog entry.
///   sine          prod_a sin(pi x_a / L)
///   delta         prod_a delta(x_a - x0_a), x0 defaults to L/2
///   gaussian      A exp(-|x - x0|^2 / (2 sigma^2)), integrated over [0, L]^d
///   gaussian_sum  sum over `centers` of the same Gaussian
///   burgers       two species: sin(2 x_1) and 0.5
///   mode          unit vector at shifted Fourier index `mode`
///   table         grid samples (one block per species)
struct InitialSpec {
    std::string kind = "sine";
    double amplitude = 1.0;
    bool grid_normalized = false;  // rescale so grid samples have unit l2 norm
    RVec x0;
    double sigma = 0.5;
    std::vector<RVec> centers;
    std::vector<int> mode;
    CVec table;
    int species = 1;  // 1 or 2 copies (gaussian_sum may seed both species)
    std::string coefficients = "auto";  // auto | samples | oversampled
};

/// Coefficients c_k stored at k~ = k + N/2, species blocks concatenated.
struct CoeffVector {
    CVec c;
    double norm0 = 0.0;
    GridSpec spec;
    int n_species = 0;
};

CoeffVector fourier_coefficients(const InitialSpec& u0, const GridSpec& spec);

/// Oversampled DFT path (default factor 8) for an arbitrary function.
CoeffVector coefficients_from_function(const std::function<cplx(const RVec&)>& f, const GridSpec& spec,
                                       int oversample = 8);

/// Plain DFT of grid samples: c = (L/N)^{d/2} F† u. `samples` may hold two species blocks.
CoeffVector coefficients_from_samples(const CVec& samples, const GridSpec& spec);

/// One-axis truncated integral (1/sqrt(L)) int_0^L exp(-(x-x0)^2/(2 s^2)) exp(-i kappa x) dx.
cplx gaussian_axis_coefficient(double kappa, double x0, double sigma, double L);

State prepare_initial_state(const CoeffVector& coeffs);

struct PixelKernel {
    std::size_t N = 2;
    double L = 1.0;
    int d = 1;
};

/// h_N(x; p) on one axis.
cplx pixel_eval(const PixelKernel& k, double x, double p);
/// Product over axes.
cplx pixel_eval(const PixelKernel& k, const RVec& x, const RVec& p);

/// Values sqrt(P) scale (N/L)^{d/2} psi on the native grid, species blocks concatenated.
CVec grid_solution(const State& st);

/// (N, N_f) solution, one vector per species block, row-major over {0..N_f-1}^d.
std::vector<CVec> reconstruct_solution(const State& st, std::size_t N_f);

/// Same kernel applied to a raw position-basis block with an explicit prefactor.
CVec reconstruct_block(const CVec& psi, const GridSpec& spec, double factor, std::size_t N_f);

}  // namespace pite
