#pragma once

// One-variable radial profiles of K_ell-invariant functions and bodies:
// rho(theta) = f0(t) with t = cos^2(angle from theta to R^ell).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chebyshev.hpp"
#include "constants.hpp"

namespace kltomo {

class Profile {
  public:
    enum class Kind { ClosedForm, Grid };

    static Profile closed_form(std::function<double(double)> eval) {
        Profile p;
        p.kind_ = Kind::ClosedForm;
        p.eval_ = std::move(eval);
        p.validate();
        return p;
    }

    // Values on an increasing grid covering [0,1]; evaluated between nodes by
    // local cubic interpolation (4-point Lagrange stencils).
    static Profile from_grid(std::vector<double> ts, std::vector<double> values) {
        if (ts.size() != values.size() || ts.size() < 4)
            throw std::invalid_argument("Profile::from_grid: need >= 4 matching nodes");
        for (std::size_t k = 1; k < ts.size(); ++k)
            if (!(ts[k] > ts[k - 1])) throw std::invalid_argument("Profile::from_grid: grid not increasing");
        Profile p;
        p.kind_ = Kind::Grid;
        auto data = std::make_shared<GridData>();
        data->ts = std::move(ts);
        data->values = std::move(values);
        p.grid_ = data;
        p.eval_ = [data](double t) { return data->eval(t); };
        p.validate();
        return p;
    }

    // Radial profile of the (q,ell)-ball |x'|^q + |x''|^q <= 1 in bi-spherical
    // coordinates: rho(t) = (t^{q/2} + (1-t)^{q/2})^{-1/q}.
    static Profile ql_ball(double q) {
        if (q <= 0.0) throw std::invalid_argument("Profile::ql_ball: require q > 0");
        return closed_form([q](double t) {
            return std::pow(std::pow(t, 0.5 * q) + std::pow(1.0 - t, 0.5 * q), -1.0 / q);
        });
    }

    double operator()(double t) const { return eval_(t); }

    Kind kind() const { return kind_; }
    int node_count() const { return grid_ ? static_cast<int>(grid_->ts.size()) : 0; }
    const std::vector<double>* grid_nodes() const { return grid_ ? &grid_->ts : nullptr; }
    double lipschitz_estimate() const { return lipschitz_; }

    // header "t,rho"
    void save_csv(std::ostream& os, int samples = 257) const {
        os << "t,rho\n";
        if (grid_) {
            for (std::size_t k = 0; k < grid_->ts.size(); ++k)
                write_row(os, grid_->ts[k], grid_->values[k]);
        } else {
            const auto ts = ChebyshevInterpolant::nodes(samples - 1);
            for (double t : ts) write_row(os, t, eval_(t));
        }
    }

    void save_csv_file(const std::string& path, int samples = 257) const {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("Profile::save_csv_file: cannot open " + path);
        save_csv(os, samples);
    }

    static Profile load_csv(std::istream& is) {
        std::string line;
        if (!std::getline(is, line)) throw std::runtime_error("Profile::load_csv: empty input");
        std::vector<double> ts, vs;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos) throw std::runtime_error("Profile::load_csv: bad row");
            ts.push_back(std::stod(line.substr(0, comma)));
            vs.push_back(std::stod(line.substr(comma + 1)));
        }
        return from_grid(std::move(ts), std::move(vs));
    }

    static Profile load_csv_file(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("Profile::load_csv_file: cannot open " + path);
        return load_csv(is);
    }

  private:
    struct GridData {
        std::vector<double> ts, values;

        double eval(double t) const {
            const int n = static_cast<int>(ts.size());
            t = std::clamp(t, ts.front(), ts.back());
            int lo = static_cast<int>(std::lower_bound(ts.begin(), ts.end(), t) - ts.begin());
            if (lo > 0) --lo;
            int start = std::clamp(lo - 1, 0, n - 4);
            double out = 0.0;
            for (int a = 0; a < 4; ++a) {
                double term = values[start + a];
                for (int b = 0; b < 4; ++b) {
                    if (a == b) continue;
                    term *= (t - ts[start + b]) / (ts[start + a] - ts[start + b]);
                }
                out += term;
            }
            return out;
        }
    };

    static void write_row(std::ostream& os, double t, double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, v);
        os << buf;
    }

    // Positivity on 512 Chebyshev points plus endpoints; records a grid
    // Lipschitz estimate alongside.
    void validate() {
        auto pts = ChebyshevInterpolant::open_nodes(512);
        pts.insert(pts.begin(), 0.0);
        pts.push_back(1.0);
        double prev = 0.0, prev_t = 0.0, lip = 0.0;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double v = eval_(pts[k]);
            if (!(v > 0.0) || !std::isfinite(v))
                throw std::invalid_argument("Profile: non-positive or non-finite value at t=" +
                                            std::to_string(pts[k]));
            if (k > 0) lip = std::max(lip, std::abs(v - prev) / (pts[k] - prev_t));
            prev = v;
            prev_t = pts[k];
        }
        lipschitz_ = lip;
    }

    Kind kind_ = Kind::ClosedForm;
    std::function<double(double)> eval_;
    std::shared_ptr<GridData> grid_;
    double lipschitz_ = 0.0;
};

} // namespace kltomo
