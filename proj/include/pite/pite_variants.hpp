// Rotation-angle builders for the PITE flavours and their scalar underlying functions.
#pragma once

#include <array>
#include <optional>
#include <string>

#include "pite/common.hpp"
#include "pite/statevector.hpp"

namespace pite {

enum class Variant { exact, aapite, apite, vs_apite };

/// How m0 < 1 variants are applied per step.
/// joint: one ancilla use for cos(theta0 + s0 dtau H) with H realized by a
/// real-time product; split: one block for the potential and one for the kinetic part.
enum class ApiteForm { joint, split };

Variant parse_variant(const std::string& s);
std::string to_string(Variant v);

struct Schedule {
    double dtau_min = 0.0;
    double dtau_max = 0.0;
    int K = 1;
};

struct PiteConfig {
    Variant variant = Variant::aapite;
    int order = 1;                    // aapite only: 1, 2 or 4
    double m0 = 1.0;
    double dtau = 1e-3;
    std::optional<Schedule> schedule; // vs_apite
    int trotter_order = 1;
    std::optional<Variant> potential_variant;  // overrides the potential factor only
    ApiteForm apite_form = ApiteForm::joint;
    bool clamp_theta = false;
    BlockMode block_mode = BlockMode::direct;

    /// Throws ConfigError on incompatible fields.
    void validate() const;
};

/// Taylor coefficients of arccos(exp(-x^2)) on x, x^3, x^5, x^7.
inline const std::array<double, 4>& aapite_coefficients() {
    static const double r2 = 1.41421356237309504880168872420969808;
    static const std::array<double, 4> c{r2, -r2 / 6.0, r2 / 120.0, r2 / 336.0};
    return c;
}

struct ThetaValue {
    double value = 0.0;
    bool over_range = false;
};

double theta_exact(double lambda, double dtau, double m0);
ThetaValue theta_aapite(double lambda, double dtau, int order, bool clamp = false);
ThetaValue theta_apite(double lambda, double dtau, double m0);

/// theta0 = arccos(m0), s0 = m0 / sqrt(1 - m0^2).
double apite_theta0(double m0);
double apite_s0(double m0);

/// Angles for a whole diagonal of eigenvalues (all >= 0).
ThetaDiagonal build_theta(const RVec& lambda, double dtau, Variant variant, const PiteConfig& cfg);

std::vector<double> vs_schedule(double dtau_min, double dtau_max, int K);

/// Step sizes a run uses to reach T; throws if T is not on the step lattice.
std::vector<double> step_sizes(const PiteConfig& cfg, double T);

enum class Method { exa, hhl, aap, aap2, aap4, oap };
Method parse_method(const std::string& s);

double underlying_function(Method m, double y, double m0 = 0.9);

/// Second-order Taylor coefficient of g_OAP: -m0^2 / (2 (1 - m0^2)).
double oap_second_order_coefficient(double m0);

}  // namespace pite
