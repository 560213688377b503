#pragma once

// Piecewise cubic Hermite interpolation on an irregular grid. Knot values
// come with exact derivatives, so the interpolant is C^1 and locally as
// accurate as the integrator that produced the samples.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "qreset/errors.hpp"

namespace qreset {

class PiecewiseCubic {
public:
    PiecewiseCubic() = default;

    PiecewiseCubic(std::vector<double> t, std::vector<double> value,
                   std::vector<double> derivative)
        : t_(std::move(t)), v_(std::move(value)), d_(std::move(derivative)) {
        if (t_.size() < 2 || t_.size() != v_.size() || t_.size() != d_.size()) {
            throw ConfigError("interpolant needs matching arrays of >= 2 knots");
        }
        for (std::size_t i = 1; i < t_.size(); ++i) {
            if (!(t_[i] > t_[i - 1])) {
                throw ConfigError("interpolant knots must be strictly increasing");
            }
        }
    }

    double t_min() const { return t_.front(); }
    double t_max() const { return t_.back(); }
    std::size_t knots() const { return t_.size(); }

    double operator()(double t) const {
        // Clamp to the covered interval; queries land outside only through
        // floating-point slop at the endpoints.
        if (t <= t_.front()) return v_.front();
        if (t >= t_.back()) return v_.back();
        const auto it = std::upper_bound(t_.begin(), t_.end(), t);
        const std::size_t hi = static_cast<std::size_t>(it - t_.begin());
        const std::size_t lo = hi - 1;
        const double h = t_[hi] - t_[lo];
        const double s = (t - t_[lo]) / h;
        return hermite(v_[lo], d_[lo] * h, v_[hi], d_[hi] * h, s);
    }

    /// Hermite basis on the unit interval with endpoint values y0, y1 and
    /// endpoint slopes m0, m1 already scaled by the interval width.
    static double hermite(double y0, double m0, double y1, double m1, double s) {
        const double s2 = s * s;
        const double s3 = s2 * s;
        return (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 +
               (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1;
    }

private:
    std::vector<double> t_;
    std::vector<double> v_;
    std::vector<double> d_;
};

}  // namespace qreset
