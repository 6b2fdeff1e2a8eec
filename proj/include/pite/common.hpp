// Shared scalar types and error classes.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace pite {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Bad user input: invalid parameters, malformed config, shape mismatch.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure during a run (vanished probability, blow-up).
class NumericalAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Basis a grid register currently lives in.
enum class Basis { position, fourier };

inline const char* to_string(Basis b) { return b == Basis::position ? "position" : "fourier"; }

double norm2(const CVec& v);  // squared l2 norm
double norm(const CVec& v);

}  // namespace pite
