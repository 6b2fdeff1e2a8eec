// Experiment drivers behind the command-line tool: solve, compare, decompose, system, funcs.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pite/config.hpp"
#include "pite/evolve.hpp"
#include "pite/metrics.hpp"
#include "pite/systems.hpp"

namespace pite {

inline constexpr const char* kArtifactVersion = "0.3.0";

/// Snapshot times a run reports: configured snapshots plus T, sorted, unique.
std::vector<double> report_times(const RunConfig& cfg);

/// Initial state of cfg.initial on cfg.equation.grid.
State initial_state(const RunConfig& cfg);

/// Reference field at time t on an M-point-per-axis grid (M = N_f), per kind.
/// kinds: analytic, dense, exact_pite, hhl, fdm.
CVec reference_field(const RunConfig& cfg, const std::string& kind, double t, std::size_t M);

struct SolveOutput {
    RunResult run;
    std::vector<Metric> metrics;
    std::vector<double> times;
    std::size_t n_f = 0;
};

SolveOutput solve(const RunConfig& cfg);

struct CompareRow {
    std::string method;
    double t = 0.0;
    double success_prob = 0.0;       // probability, or norm-ratio proxy for hhl
    double log10_success_prob = 0.0;
    double l2_normalized = -1.0;     // < 0: not available
    double mse = -1.0;
    std::string error_reference;
};

std::vector<CompareRow> compare(const RunConfig& cfg);

struct Decomposition {
    std::vector<Metric> discretization;  // over N, plus fdm rows
    std::vector<Metric> trotter;         // over dtau, series trotter_order_1 / _2
    std::vector<Metric> approximation;   // over dtau
    std::vector<Metric> slopes;
};

Decomposition error_decomposition(const RunConfig& cfg);

/// Rows (y, exa, hhl, aap, aap2, aap4, oap) for y = ymax (j+1) / points.
std::vector<std::vector<double>> funcs_table(double ymax, int points, double m0);

SystemResult run_system(const RunConfig& cfg);

// ---- output ----------------------------------------------------------------

void write_probability_csv(const std::filesystem::path& p, const RunResult& r);
void write_probability_csv(const std::filesystem::path& p, const SystemResult& r);
void write_metrics_csv(const std::filesystem::path& p, const std::vector<Metric>& m);
/// Columns: index per axis, x per axis, re, im, abs.
void write_solution_csv(const std::filesystem::path& p, const CVec& field, int d, std::size_t M, double L);
void write_compare_csv(const std::filesystem::path& p, const std::vector<CompareRow>& rows);
void write_funcs_csv(const std::filesystem::path& p, const std::vector<std::vector<double>>& rows, double m0);

/// manifest.json: config echo, versions, metrics, summary, warnings.
void write_manifest(const std::filesystem::path& p, const RunConfig& cfg, const std::string& command,
                    const std::vector<Metric>& metrics, const nlohmann::json& summary,
                    const std::vector<std::string>& warnings);

/// Writes every artifact of a solve into `dir`.
void write_solve(const std::filesystem::path& dir, const RunConfig& cfg, const SolveOutput& out);

std::string format_time(double t);

}  // namespace pite
