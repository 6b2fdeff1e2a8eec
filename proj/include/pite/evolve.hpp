// One PITE time step for the single advection-diffusion equation, and the multi-step driver.
#pragma once

#include <string>
#include <vector>

#include "pite/grid.hpp"
#include "pite/pite_variants.hpp"
#include "pite/statevector.hpp"

namespace pite {

/// Diagonals a step needs, built once per run.
struct StepOperators {
    RVec kinetic;    // D2, fourier basis
    RVec advection;  // D1 summed over axes, fourier basis
    RVec potential;  // V - V0, position basis
    double V0 = 0.0;
    double adv_sign = 1.0;
    bool has_potential = false;
    bool has_advection = false;
};

StepOperators make_step_operators(const GridSpec& spec, const HamiltonianParams& params);

struct StepInfo {
    double log_prob = 0.0;  // natural log of this step's success probability
    bool over_range = false;
};

/// Advances `st` by `dtau`. Factors whose generator vanishes are omitted,
/// so a second-order plan with V - V0 = 0 is the first-order plan.
StepInfo step(State& st, const StepOperators& ops, const PiteConfig& cfg, double dtau);
StepInfo step(State& st, const HamiltonianParams& params, const PiteConfig& cfg);

struct StepRecord {
    int step = 0;
    double t = 0.0;
    double dtau = 0.0;
    double log_step_prob = 0.0;
    double log_prob = 0.0;
    double scale = 1.0;
};

struct Snapshot {
    int step = 0;
    double t = 0.0;
    CVec amps;
    double log_prob = 0.0;
    double scale = 1.0;
};

struct RunResult {
    std::vector<Snapshot> snapshots;
    std::vector<StepRecord> steps;
    State final;
    double initial_scale = 1.0;
    bool over_range = false;
    std::vector<std::string> warnings;
    std::string reference = "none";

    double success_prob() const { return final.success_prob(); }
    double log10_success_prob() const { return final.log10_success_prob(); }
};

/// Runs until T. Snapshot times off the step lattice snap to the nearest step
/// with a warning. A snapshot at t = 0 records the initial state.
RunResult run(const State& initial, const HamiltonianParams& params, const PiteConfig& cfg, double T,
              const std::vector<double>& snapshot_times = {});

}  // namespace pite
