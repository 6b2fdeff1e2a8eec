// Statevector over (ancilla)(species)(grid axes) with the primitives PITE circuits use.
#pragma once

#include <array>
#include <string>

#include "pite/common.hpp"
#include "pite/grid.hpp"

namespace pite {

/// Register layout. The ancilla is the most significant qubit; the species
/// qubit (if any) sits between it and the grid register.
struct Layout {
    int n_anc = 1;
    int n_species = 0;
    GridSpec grid;

    std::size_t species_count() const { return std::size_t{1} << n_species; }
    /// Amplitudes kept in memory: the ancilla-|0> branch.
    std::size_t stored_size() const { return species_count() * grid.size(); }
    /// Full register including ancillas.
    std::size_t full_size() const { return stored_size() << n_anc; }
    int stored_qubits() const { return n_species + grid.d * grid.n; }
};

/// Rotation angles of one PITE block. Entries may exceed pi/2 (flagged).
struct ThetaDiagonal {
    RVec values;
    bool over_range = false;
};

/// Only the ancilla-|0> branch is stored: every block ends with a projection
/// onto that branch, so the other half is identically zero between operations.
class State {
public:
    State() = default;
    explicit State(Layout layout);

    Layout layout;
    CVec amps;
    double log_prob = 0.0;  // natural log of the cumulative success probability
    double scale = 1.0;     // classical prefactor
    Basis basis = Basis::position;

    double success_prob() const;
    double log10_success_prob() const;
};

enum class QftDirection { forward, inverse };
enum class BlockMode { direct, circuit };
enum class Gate { H, W, Wdag, Q, Qdag, Rz };

using Mat2 = std::array<cplx, 4>;  // row-major 2x2

Mat2 gate_matrix(Gate g, double phi = 0.0);

/// Minimum admissible step probability; below this a run aborts.
inline constexpr double kMinStepProb = 1e-300;

State make_state(const GridSpec& grid, int n_species = 0, int n_anc = 1);

/// Accepts either the stored branch or the full register (whose ancilla-|1>
/// half must vanish). Resets success probability; scale becomes the input norm.
void set_statevector(State& st, const CVec& amps);

/// amp_j *= exp(-i sign theta_j). `theta` spans the stored register or one
/// species block (then broadcast over species).
void apply_diagonal_phase(State& st, const RVec& theta, double sign, Basis required);

void apply_shifted_qft(State& st, QftDirection dir);

/// Multiplies by cos(Theta), post-selects and renormalizes. Returns the step
/// probability. Throws NumericalAbort below kMinStepProb.
double pite_block(State& st, const ThetaDiagonal& theta, BlockMode mode = BlockMode::direct);

/// `qubit` counts bit positions in the stored index, 0 = least significant.
void apply_single_qubit_gate(State& st, Gate g, int qubit, double phi = 0.0);

/// Raw helpers on flat vectors.
void apply_gate_raw(CVec& v, const Mat2& m, int bit);
void shifted_qft_blocks(CVec& v, const GridSpec& grid, QftDirection dir);
/// Unnormalized per-axis DFT with kernel exp(sign 2 pi i k l / N), blocks of grid.size().
void fft_axes(CVec& v, const GridSpec& grid, int sign);
/// O(N^2) per-axis reference transform.
void shifted_qft_direct(CVec& v, const GridSpec& grid, QftDirection dir);
/// Unnormalized radix-2 DFT, sign = -1 forward kernel exp(-2 pi i kl/N).
void fft_radix2(cplx* data, std::size_t N, int sign);

/// PSV1 binary dump: magic "PSV1", u16 n_anc, u16 n_species, u32 d, u32 n,
/// then the full register as little-endian f64 (re, im) pairs.
void dump_state(const State& st, const std::string& path);

struct StateDump {
    int n_anc = 0, n_species = 0, d = 0, n = 0;
    CVec full;
};
StateDump read_dump(const std::string& path);
State load_state(const std::string& path, double L);

}  // namespace pite
