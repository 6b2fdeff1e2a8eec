#include "pite/metrics.hpp"

#include <cmath>

namespace pite {

double l2_error(const CVec& u, const CVec& w, bool normalized) {
    if (u.size() != w.size()) throw ConfigError("l2_error: length mismatch");
    double nu = 1.0, nw = 1.0;
    if (normalized) {
        nu = norm(u);
        nw = norm(w);
        if (!(nu > 0.0) || !(nw > 0.0)) throw ConfigError("l2_error: zero vector in normalized mode");
    }
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) s += std::norm(u[j] / nu - w[j] / nw);
    return std::sqrt(s);
}

double mse(const CVec& u, const CVec& w) {
    if (u.size() != w.size()) throw ConfigError("mse: length mismatch");
    if (u.empty()) throw ConfigError("mse: empty input");
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) s += std::norm(u[j] - w[j]);
    return s / static_cast<double>(u.size());
}

double convergence_slope(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 3) throw ConfigError("convergence_slope: need at least 3 pairs");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [h, e] : pairs) {
        if (!(h > 0.0) || !(e > 0.0)) throw ConfigError("convergence_slope: inputs must be positive");
        const double x = std::log(h), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(pairs.size());
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw ConfigError("convergence_slope: step sizes must differ");
    return (n * sxy - sx * sy) / den;
}

}  // namespace pite
