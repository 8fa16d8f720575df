#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace kltomo {

inline constexpr double kPi = 3.14159265358979323846;

// Raised when an iterative or adaptive scheme fails to meet its tolerance.
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

class NonConvergence : public NumericalError {
  public:
    explicit NonConvergence(const std::string& msg) : NumericalError(msg) {}
};

// Surface area of the unit sphere S^d in R^{d+1}:
//   sigma_d = 2 pi^{(d+1)/2} / Gamma((d+1)/2),
// so sigma_0 = 2, sigma_1 = 2 pi, sigma_2 = 4 pi, ...
inline double sphere_surface(int d) {
    if (d < 0) throw std::invalid_argument("sphere_surface: negative sphere dimension");
    const double h = 0.5 * (d + 1);
    return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

inline double beta_function(double a, double b) { return std::exp(log_beta(a, b)); }

inline double square(double x) { return x * x; }

} // namespace kltomo
