#include "pite/pite_variants.hpp"

#include <cmath>

namespace pite {

Variant parse_variant(const std::string& s) {
    if (s == "exact") return Variant::exact;
    if (s == "aapite") return Variant::aapite;
    if (s == "apite") return Variant::apite;
    if (s == "vs_apite") return Variant::vs_apite;
    throw ConfigError("unknown PITE variant '" + s + "' (expected exact, aapite, apite, vs_apite)");
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::exact: return "exact";
        case Variant::aapite: return "aapite";
        case Variant::apite: return "apite";
        case Variant::vs_apite: return "vs_apite";
    }
    return "?";
}

void PiteConfig::validate() const {
    if (!(m0 > 0.0 && m0 <= 1.0)) throw ConfigError("pite: m0 must lie in (0, 1]");
    if (variant == Variant::aapite) {
        if (order != 1 && order != 2 && order != 4) throw ConfigError("pite: aapite order must be 1, 2 or 4");
        if (m0 != 1.0) throw ConfigError("pite: aapite requires m0 = 1");
    }
    if ((variant == Variant::apite || variant == Variant::vs_apite) && !(m0 < 1.0))
        throw ConfigError("pite: apite/vs_apite require m0 < 1");
    if (variant == Variant::vs_apite) {
        if (!schedule) throw ConfigError("pite: vs_apite needs a schedule");
    } else if (!(dtau > 0.0)) {
        throw ConfigError("pite: dtau must be > 0");
    }
    if (schedule) {
        if (!(schedule->dtau_min > 0.0) || schedule->dtau_min > schedule->dtau_max)
            throw ConfigError("pite: schedule needs 0 < dtau_min <= dtau_max");
        if (schedule->K < 1) throw ConfigError("pite: schedule K must be >= 1");
    }
    if (trotter_order != 1 && trotter_order != 2) throw ConfigError("pite: trotter_order must be 1 or 2");
    if (potential_variant && (*potential_variant == Variant::apite || *potential_variant == Variant::vs_apite))
        throw ConfigError("pite: potential_variant must be exact or aapite");
}

double theta_exact(double lambda, double dtau, double m0) {
    if (lambda < 0.0) throw ConfigError("theta_exact: negative eigenvalue, shift the spectrum first");
    if (!(m0 > 0.0 && m0 <= 1.0)) throw ConfigError("theta_exact: m0 must lie in (0, 1]");
    return std::acos(m0 * std::exp(-dtau * lambda));
}

ThetaValue theta_aapite(double lambda, double dtau, int order, bool clamp) {
    if (lambda < 0.0) throw ConfigError("theta_aapite: negative eigenvalue, shift the spectrum first");
    const auto& c = aapite_coefficients();
    const double x = std::sqrt(dtau * lambda);
    double t = 0.0;
    switch (order) {
        case 1: t = c[0] * x; break;
        case 2: t = c[0] * x + c[1] * x * x * x; break;
        case 4: {
            const double x2 = x * x;
            t = x * (c[0] + x2 * (c[1] + x2 * (c[2] + x2 * c[3])));
            break;
        }
        default: throw ConfigError("theta_aapite: order must be 1, 2 or 4");
    }
    ThetaValue r{t, t > kPi || t < 0.0};
    if (clamp) r.value = std::min(std::max(t, 0.0), kPi);
    return r;
}

double apite_theta0(double m0) { return std::acos(m0); }

double apite_s0(double m0) {
    if (!(m0 > 0.0 && m0 < 1.0)) throw ConfigError("apite: m0 must lie in (0, 1)");
    return m0 / std::sqrt(1.0 - m0 * m0);
}

ThetaValue theta_apite(double lambda, double dtau, double m0) {
    if (lambda < 0.0) throw ConfigError("theta_apite: negative eigenvalue, shift the spectrum first");
    const double t = apite_theta0(m0) + apite_s0(m0) * dtau * lambda;
    return {t, t > kPi / 2};
}

ThetaDiagonal build_theta(const RVec& lambda, double dtau, Variant variant, const PiteConfig& cfg) {
    ThetaDiagonal out;
    out.values.resize(lambda.size());
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        // round-off from shifts can leave tiny negatives
        const double lam = lambda[j] < 0.0 && lambda[j] > -1e-12 ? 0.0 : lambda[j];
        switch (variant) {
            case Variant::exact: out.values[j] = theta_exact(lam, dtau, cfg.m0); break;
            case Variant::aapite: {
                const auto t = theta_aapite(lam, dtau, cfg.order, cfg.clamp_theta);
                out.values[j] = t.value;
                out.over_range |= t.over_range;
                break;
            }
            case Variant::apite:
            case Variant::vs_apite: {
                const auto t = theta_apite(lam, dtau, cfg.m0);
                out.values[j] = t.value;
                out.over_range |= t.over_range;
                break;
            }
        }
    }
    return out;
}

std::vector<double> vs_schedule(double dtau_min, double dtau_max, int K) {
    if (!(dtau_min > 0.0) || dtau_min > dtau_max) throw ConfigError("vs_schedule: need 0 < dtau_min <= dtau_max");
    if (K < 1) throw ConfigError("vs_schedule: K must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(K), dtau_min);
    for (int j = 1; j < K; ++j)
        out[static_cast<std::size_t>(j)] = dtau_min + static_cast<double>(j) / (K - 1) * (dtau_max - dtau_min);
    return out;
}

std::vector<double> step_sizes(const PiteConfig& cfg, double T) {
    if (T < 0.0) throw ConfigError("time: T must be >= 0");
    if (cfg.variant == Variant::vs_apite || cfg.schedule) {
        if (!cfg.schedule) throw ConfigError("vs_apite needs a schedule");
        auto s = vs_schedule(cfg.schedule->dtau_min, cfg.schedule->dtau_max, cfg.schedule->K);
        double sum = 0.0;
        for (double x : s) sum += x;
        if (std::abs(sum - T) > 1e-12 * std::max(1.0, T))
            throw ConfigError("time: schedule sums to " + std::to_string(sum) + ", not T = " + std::to_string(T));
        return s;
    }
    const double k = T / cfg.dtau;
    const double kr = std::round(k);
    if (std::abs(k - kr) > 1e-9 * std::max(1.0, k))
        throw ConfigError("time: T = " + std::to_string(T) + " is not a multiple of dtau = " + std::to_string(cfg.dtau));
    return std::vector<double>(static_cast<std::size_t>(kr), cfg.dtau);
}

Method parse_method(const std::string& s) {
    if (s == "exa") return Method::exa;
    if (s == "hhl") return Method::hhl;
    if (s == "aap") return Method::aap;
    if (s == "aap2") return Method::aap2;
    if (s == "aap4") return Method::aap4;
    if (s == "oap") return Method::oap;
    throw ConfigError("unknown underlying function '" + s + "'");
}

double underlying_function(Method m, double y, double m0) {
    if (y < 0.0) throw ConfigError("underlying_function: y must be >= 0");
    switch (m) {
        case Method::exa: return std::exp(-y);
        case Method::hhl: return 1.0 / (1.0 + y);
        case Method::aap: return std::cos(std::sqrt(2.0 * y));
        case Method::aap2: return std::cos(theta_aapite(y, 1.0, 2).value);
        case Method::aap4: return std::cos(theta_aapite(y, 1.0, 4).value);
        case Method::oap: return std::cos(apite_theta0(m0) + apite_s0(m0) * y) / m0;
    }
    return 0.0;
}

double oap_second_order_coefficient(double m0) { return -m0 * m0 / (2.0 * (1.0 - m0 * m0)); }

}  // namespace pite
