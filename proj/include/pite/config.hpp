// Experiment configuration (JSON) with line-precise error reporting.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pite/grid.hpp"
#include "pite/pite_variants.hpp"
#include "pite/postproc.hpp"
#include "pite/reference.hpp"
#include "pite/systems.hpp"

namespace pite {

/// Source line of every JSON pointer in a document (1-based).
class LineIndex {
public:
    LineIndex() = default;
    explicit LineIndex(const std::string& text);
    int line_of(const std::string& pointer) const;
    bool has(const std::string& pointer) const;

private:
    std::map<std::string, int> lines_;
};

struct EquationConfig {
    GridSpec grid{1, 6, 1.0};
    double a = 0.5;
    RVec v{0.0};
    PotentialSpec potential;
    AdvectionConvention convention = AdvectionConvention::pde;
};

struct TimeConfig {
    double T = 0.1;
    std::vector<double> snapshots;  // final time always reported
};

struct ReferenceConfig {
    std::string kind = "none";  // none | analytic | dense | exact_pite | fdm | hhl
    AnalyticCase analytic_case = AnalyticCase::sine;
    int n_trun = 1000;
    bool grid_truncation = false;
    int fdm_n = 256;
    FdmScheme fdm_scheme = FdmScheme::backward_euler;
    double fdm_dtau = 0.0;        // 0: same as the PITE step
    bool fdm_dtau_t_over_1000 = false;
    bool divide_by_n = false;     // MSE on u/N and w/N
};

struct OutputConfig {
    std::size_t n_f = 0;  // 0: native grid
    bool dump = false;
};

struct DecomposeConfig {
    std::vector<double> dtaus{2e-3, 1e-3, 5e-4, 2.5e-4, 1.25e-4};
    std::vector<int> ns{4, 5, 6};
    double t = 0.1;
};

struct CompareConfig {
    std::vector<std::string> methods{"aapite", "apite", "vs_apite", "hhl", "fdm", "analytic"};
    double m0 = 0.9;
    double apite_dtau = 5e-5;
    Schedule schedule{1e-4, 9e-4, 200};
};

struct SystemConfig {
    SystemParams params;
    GridSpec grid{2, 4, 2 * kPi};
    double dtau = 0.05;
    double T = 30.0;
    bool reversed = false;
    InitialSpec initial;
    std::vector<double> snapshots;
};

struct RunConfig {
    std::string name = "run";
    EquationConfig equation;
    InitialSpec initial;
    PiteConfig pite;
    TimeConfig time;
    ReferenceConfig reference;
    OutputConfig output;
    DecomposeConfig decompose;
    CompareConfig compare;
    std::optional<SystemConfig> system;
    nlohmann::json raw;
};

/// Parses a config document. Errors are ConfigError with "source:line: path: message".
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Re-parses after setting a dotted field (e.g. "pite.dtau") to a JSON scalar.
RunConfig with_override(const RunConfig& cfg, const std::string& field, const std::string& value);

HamiltonianParams make_params(const EquationConfig& eq);

}  // namespace pite
