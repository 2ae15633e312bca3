#pragma once

#include <cstddef>
#include <vector>

namespace levybridge {

// Welford accumulator; merge() implements the parallel combination rule so
// block-wise accumulation gives the same moments as a single pass.
class RunningStat {
public:
    void add(double x);
    void merge(const RunningStat& other);

    long count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const;       // unbiased, needs n >= 2
    double standard_error() const;

private:
    long n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

double z_score(double lhs, double lhs_se, double rhs, double rhs_se);

struct KsResult {
    double statistic;       // sup |F1 - F2|
    double scaled;          // D * sqrt(n m / (n + m))
    double p_value;         // asymptotic Kolmogorov tail
};

// Two-sample Kolmogorov-Smirnov. Inputs need not be sorted.
KsResult two_sample_ks(std::vector<double> a, std::vector<double> b);

// Critical scaled statistic for level alpha: sqrt(-ln(alpha/2)/2).
double ks_critical(double alpha);

// Total variation distance between two pmfs given as aligned vectors.
double total_variation(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace levybridge
