// Error metrics and convergence slopes.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pite/common.hpp"

namespace pite {

struct Metric {
    std::string kind;  // l2_normalized | l2_raw | mse | slope | success_prob | ...
    double value = 0.0;
    double t = 0.0;
    double dtau = 0.0;
    int N = 0;
    std::string variant;
    std::string reference;
    std::string series;  // grouping label, e.g. "trotter_order_2"
};

/// normalized: || u/|u| - w/|w| ||, raw: || u - w ||.
double l2_error(const CVec& u, const CVec& w, bool normalized);
double mse(const CVec& u, const CVec& w);
/// Least-squares slope of log(error) against log(dtau); needs >= 3 positive pairs.
double convergence_slope(const std::vector<std::pair<double, double>>& pairs);

}  // namespace pite
