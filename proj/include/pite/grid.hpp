// Spatial grid, Fourier diagonals and the discretized Hamiltonian.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "pite/common.hpp"

namespace pite {

/// Uniform periodic grid on [0, L)^d with N = 2^n points per axis.
/// Register layout is row-major, axis 0 most significant.
struct GridSpec {
    int d = 1;
    int n = 1;
    double L = 1.0;

    GridSpec() = default;
    GridSpec(int d_, int n_, double L_);

    std::size_t N() const { return std::size_t{1} << n; }
    std::size_t size() const { return std::size_t{1} << (n * d); }
    double h() const { return L / static_cast<double>(N()); }

    /// Per-axis component of a flat index.
    std::size_t component(std::size_t flat, int axis) const {
        return (flat >> (n * (d - 1 - axis))) & (N() - 1);
    }
    /// Stride of one step along `axis`.
    std::size_t stride(int axis) const { return std::size_t{1} << (n * (d - 1 - axis)); }
};

struct SpectralDiagonal {
    RVec values;
    Basis basis = Basis::position;
};

/// Sampled potential with its grid extremes; `shifted` = V - V0.
struct PotentialSamples {
    SpectralDiagonal raw;
    SpectralDiagonal shifted;
    double V0 = 0.0;
    double V1 = 0.0;
};

/// Sign convention for the advection term.
/// `pde`: H_N = F(D2 + iD1)F† + V, transport toward +v.
/// `printed`: H_N = F(D2 - iD1)F† + V.
enum class AdvectionConvention { pde, printed };

struct HamiltonianParams {
    double a = 1.0;
    RVec v;  // length d
    PotentialSamples pot;
    AdvectionConvention convention = AdvectionConvention::pde;

    /// +1 for `pde`, -1 for `printed`: H_N contains (adv_sign)·i·D1.
    double adv_sign() const { return convention == AdvectionConvention::pde ? 1.0 : -1.0; }
};

std::vector<RVec> grid_points(const GridSpec& spec);

/// a (2π/L)^2 |k - N/2|^2 over all Fourier indices.
SpectralDiagonal kinetic_diagonal(const GridSpec& spec, double a);

/// v (2π/L)(k - N/2) along one axis (length N).
SpectralDiagonal advection_diagonal(const GridSpec& spec, double v, int axis);

/// Sum over axes of the per-axis advection diagonals (length N^d).
SpectralDiagonal advection_total(const GridSpec& spec, const RVec& v);

using PotentialFn = std::function<double(const RVec&)>;

PotentialSamples potential_diagonal(const GridSpec& spec, const PotentialFn& V);
PotentialSamples potential_from_table(const GridSpec& spec, const RVec& table);

/// Named potentials: zero, box1d, box2d, gaussian.
struct PotentialSpec {
    std::string kind = "zero";
    double height = 10.0;
    double center = 0.5;     // box1d
    double halfwidth = 0.25; // box1d
    double amplitude = 1.0;  // gaussian
    RVec x0;                 // gaussian
    double sigma = 1.0;      // gaussian
    RVec table;              // inline samples
};

PotentialSamples make_potential(const GridSpec& spec, const PotentialSpec& p);

HamiltonianParams make_params(const GridSpec& spec, double a, const RVec& v,
                              const PotentialSpec& p,
                              AdvectionConvention conv = AdvectionConvention::pde);

/// Dense shifted-DFT matrix for one axis, entries N^{-1/2} exp(i 2π/N (k - N/2) l).
Eigen::MatrixXcd shifted_dft_matrix(std::size_t N);

/// Kronecker power of the one-axis matrix (row-major axis order).
Eigen::MatrixXcd shifted_dft_matrix(const GridSpec& spec);

/// Explicit H_N, guarded at d·n <= 14.
Eigen::MatrixXcd assemble_dense_hamiltonian(const GridSpec& spec, const HamiltonianParams& params);

}  // namespace pite
