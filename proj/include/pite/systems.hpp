// Two-species diffusion-reaction stepping and the nonlinear feedback drivers.
#pragma once

#include <string>
#include <vector>

#include "pite/evolve.hpp"
#include "pite/grid.hpp"
#include "pite/pite_variants.hpp"
#include "pite/statevector.hpp"

namespace pite {

/// u_t = a_j Lap u_j - sum_l p_jl u_l, j = 1, 2. Reaction fields are grid samples.
struct CoupledModel {
    double a1 = 1.0, a2 = 1.0;
    RVec p11, p12, p21, p22;
    double P0 = 0.0;  // -min(min p11, min p22)
    double P1 = 0.0;  // max |p12 + p21|

    void update_shifts();
};

/// Species qubit position in the stored index: just above the grid register.
inline int species_qubit(const GridSpec& g) { return g.d * g.n; }

struct CoupledOptions {
    Variant variant = Variant::aapite;  // aapite (order from cfg) or exact
    PiteConfig pite;                    // order / clamp / block mode
    bool reversed = false;              // apply the four factors in the opposite order
};

/// One first-order step. Right to left:
///   W (e^{-i Z(p12-p21) dt/2}) W†
///   H PITE[(Z (p12+p21) + P1) dt / 2] H
///   PITE[(diag(p11, p22) + P0) dt]
///   F PITE[diag(a1 K^2, a2 K^2) dt] F†
/// and scale *= e^{dt (P0 + P1/2)}. Returns the natural log of the step probability.
double coupled_step(State& st, const CoupledModel& m, double dtau, const CoupledOptions& opt = {});

/// i (2 pi / L)(k - N/2) applied along `axis` in Fourier space; blocks of grid size.
CVec spectral_gradient(const CVec& field, const GridSpec& spec, int axis);

enum class NonlinearModel { turing, burgers, linear };
NonlinearModel parse_model(const std::string& s);
std::string to_string(NonlinearModel m);

struct SystemParams {
    NonlinearModel model = NonlinearModel::turing;
    double a1 = 0.005, a2 = 0.1;  // turing
    double nu = 0.05;             // burgers
    // linear model: constant reaction coefficients
    double p11 = 0.0, p12 = 0.0, p21 = 0.0, p22 = 0.0;
};

/// Catalog defaults for a model.
SystemParams default_system_params(NonlinearModel m);

/// Reaction samples from the current unnormalized fields (two blocks).
CoupledModel build_model(const SystemParams& p, const GridSpec& spec, const CVec& fields);

struct SystemStep {
    int step = 0;
    double t = 0.0;
    double log_step_prob = 0.0;
    double log_prob = 0.0;
    double scale = 1.0;
    double P0 = 0.0, P1 = 0.0;
};

struct FieldSnapshot {
    int step = 0;
    double t = 0.0;
    CVec fields;  // unnormalized, species blocks concatenated
};

struct SystemResult {
    std::vector<SystemStep> steps;
    std::vector<FieldSnapshot> snapshots;
    State final;

    double success_prob() const { return final.success_prob(); }
    double log10_success_prob() const { return final.log10_success_prob(); }
};

/// Feedback loop: read exact amplitudes, un-normalize, rebuild the reaction
/// fields, take one coupled step. Aborts on non-finite reaction samples.
SystemResult nonlinear_run(const State& initial, const SystemParams& p, double dtau, double T,
                           const CoupledOptions& opt = {}, const std::vector<double>& snapshot_times = {});

}  // namespace pite
