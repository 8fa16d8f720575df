#pragma once

// Chebyshev interpolation on [0,1] with spectral differentiation. All d/dt
// derivatives in the toolkit are taken on these interpolants rather than by
// finite differences.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "constants.hpp"

namespace kltomo {

class ChebyshevInterpolant {
  public:
    // Second-kind points mapped to [0,1], increasing: t_j = (1 - cos(pi j / N)) / 2.
    static std::vector<double> nodes(int degree) {
        std::vector<double> t(static_cast<std::size_t>(degree) + 1);
        for (int j = 0; j <= degree; ++j) t[j] = 0.5 * (1.0 - std::cos(kPi * j / degree));
        return t;
    }

    // First-kind (open) points mapped to (0,1), increasing; no endpoints.
    static std::vector<double> open_nodes(int count) {
        std::vector<double> t(static_cast<std::size_t>(count));
        for (int j = 0; j < count; ++j)
            t[j] = 0.5 * (1.0 - std::cos((2.0 * j + 1.0) * kPi / (2.0 * count)));
        return t;
    }

    template <typename F>
    static ChebyshevInterpolant fit(F&& f, int degree) {
        if (degree < 1) throw std::invalid_argument("ChebyshevInterpolant: degree >= 1");
        std::vector<double> values(static_cast<std::size_t>(degree) + 1);
        const auto ts = nodes(degree);
        for (int j = 0; j <= degree; ++j) values[j] = f(ts[j]);
        return from_values(std::move(values));
    }

    // values[j] = f(t_j) at the increasing second-kind nodes.
    static ChebyshevInterpolant from_values(std::vector<double> values) {
        const int N = static_cast<int>(values.size()) - 1;
        if (N < 1) throw std::invalid_argument("ChebyshevInterpolant: need >= 2 values");
        ChebyshevInterpolant p;
        p.coeff_.assign(static_cast<std::size_t>(N) + 1, 0.0);
        // t_j corresponds to x = cos(pi (N-j)/N); DCT-I with halved end terms.
        for (int k = 0; k <= N; ++k) {
            double s = 0.0;
            for (int m = 0; m <= N; ++m) {
                const double vm = values[N - m];
                const double term = vm * std::cos(kPi * m * k / N);
                s += (m == 0 || m == N) ? 0.5 * term : term;
            }
            double c = 2.0 * s / N;
            if (k == 0 || k == N) c *= 0.5;
            p.coeff_[k] = c;
        }
        return p;
    }

    int degree() const { return static_cast<int>(coeff_.size()) - 1; }
    const std::vector<double>& coefficients() const { return coeff_; }

    double operator()(double t) const {
        const double x = 2.0 * t - 1.0;
        // Clenshaw on sum c_k T_k(x)
        double b1 = 0.0, b2 = 0.0;
        for (int k = degree(); k >= 1; --k) {
            const double b0 = 2.0 * x * b1 - b2 + coeff_[k];
            b2 = b1;
            b1 = b0;
        }
        return x * b1 - b2 + coeff_[0];
    }

    // d/dt on [0,1] (includes the factor 2 from x = 2t - 1).
    ChebyshevInterpolant derivative() const {
        const int N = degree();
        ChebyshevInterpolant d;
        d.coeff_.assign(static_cast<std::size_t>(N), 0.0);
        if (N >= 1) {
            std::vector<double> dk(static_cast<std::size_t>(N) + 2, 0.0);
            for (int k = N - 1; k >= 0; --k) dk[k] = dk[k + 2] + 2.0 * (k + 1) * coeff_[k + 1];
            dk[0] *= 0.5;
            for (int k = 0; k < N; ++k) d.coeff_[k] = 2.0 * dk[k];
        }
        if (d.coeff_.empty()) d.coeff_.assign(1, 0.0);
        return d;
    }

    double tail_magnitude(int count = 4) const {
        double m = 0.0;
        for (int k = std::max(0, degree() - count + 1); k <= degree(); ++k)
            m = std::max(m, std::abs(coeff_[k]));
        return m;
    }

  private:
    std::vector<double> coeff_;
};

} // namespace kltomo
