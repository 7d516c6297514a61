#pragma once

#include <cstdint>
#include <vector>

namespace frogtoad::stats {

struct MomentSummary {
    std::int64_t count = 0;
    double mean = 0.0;
    double variance = 0.0;         // unbiased sample variance
    double skewness = 0.0;         // g1 = m3 / m2^1.5 (population moments)
    double excess_kurtosis = 0.0;  // g2 = m4 / m2^2 - 3
    bool degenerate = false;       // constant column: g1/g2 undefined

    bool operator==(const MomentSummary&) const = default;
};

// One-pass moment accumulator over raw power sums (n, Σx, Σx², Σx³, Σx⁴).
// Exact for integer-valued inputs (so analytic fixtures come out bit-exact)
// and accurate to ~1e-12 for the unit-scale activation data used here; not
// suitable for large-offset data, which this project never produces.
class RunningMoments {
public:
    void add(double x) {
        ++n_;
        const double x2 = x * x;
        s1_ += x;
        s2_ += x2;
        s3_ += x2 * x;
        s4_ += x2 * x2;
    }

    std::int64_t count() const { return n_; }

    // Throws std::invalid_argument when fewer than 2 samples were added.
    MomentSummary summary() const;

    // Mean and population variance (m2); defined from 1 sample up.
    double mean() const;
    double population_variance() const;

private:
    std::int64_t n_ = 0;
    double s1_ = 0.0, s2_ = 0.0, s3_ = 0.0, s4_ = 0.0;
};

// Brute-force reference: explicit mean pass, then central-moment pass.
// Same conventions as RunningMoments::summary().
MomentSummary naive_moments(const std::vector<double>& xs);

}  // namespace frogtoad::stats
