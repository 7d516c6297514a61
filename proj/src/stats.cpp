#include "frogtoad/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace frogtoad::stats {

namespace {

// m2 below this fraction of the mean square is cancellation noise, not
// signal; such columns are flagged degenerate rather than given shape stats.
constexpr double kNoiseFloor = 1e-12;

MomentSummary from_central_moments(std::int64_t n, double mean, double m2,
                                   double m3, double m4, double mean_square) {
    MomentSummary out;
    out.count = n;
    out.mean = mean;
    if (m2 <= 0.0 || m2 <= kNoiseFloor * mean_square) {
        out.degenerate = true;
        out.variance =
            m2 > 0.0 ? m2 * static_cast<double>(n) / static_cast<double>(n - 1)
                     : 0.0;
        return out;
    }
    out.variance = m2 * static_cast<double>(n) / static_cast<double>(n - 1);
    out.skewness = m3 / std::pow(m2, 1.5);
    out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    return out;
}

}  // namespace

double RunningMoments::mean() const {
    if (n_ < 1) throw std::invalid_argument("moments: no samples");
    return s1_ / static_cast<double>(n_);
}

double RunningMoments::population_variance() const {
    const double mu = mean();
    const double m2 = s2_ / static_cast<double>(n_) - mu * mu;
    return m2 > 0.0 ? m2 : 0.0;
}

MomentSummary RunningMoments::summary() const {
    if (n_ < 2)
        throw std::invalid_argument("moments: need at least 2 samples");
    const double n = static_cast<double>(n_);
    const double mu = s1_ / n;
    const double m2 = s2_ / n - mu * mu;
    const double m3 = s3_ / n - 3.0 * mu * (s2_ / n) + 2.0 * mu * mu * mu;
    const double m4 = s4_ / n - 4.0 * mu * (s3_ / n) +
                      6.0 * mu * mu * (s2_ / n) - 3.0 * mu * mu * mu * mu;
    return from_central_moments(n_, mu, m2, m3, m4, s2_ / n);
}

MomentSummary naive_moments(const std::vector<double>& xs) {
    if (xs.size() < 2)
        throw std::invalid_argument("moments: need at least 2 samples");
    const double n = static_cast<double>(xs.size());
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double x : xs) {
        sum += x;
        sum_sq += x * x;
    }
    const double mu = sum / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - mu;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    return from_central_moments(static_cast<std::int64_t>(xs.size()), mu, m2, m3,
                                m4, sum_sq / n);
}

}  // namespace frogtoad::stats
