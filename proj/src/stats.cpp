#include "levybridge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levybridge {

void RunningStat::add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
}

void RunningStat::merge(const RunningStat& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double d = other.mean_ - mean_;
    const double nt = na + nb;
    mean_ += d * nb / nt;
    m2_ += other.m2_ + d * d * na * nb / nt;
    n_ += other.n_;
}

double RunningStat::variance() const {
    if (n_ < 2) return 0.0;
    return m2_ / static_cast<double>(n_ - 1);
}

double RunningStat::standard_error() const {
    if (n_ < 2) return 0.0;
    return std::sqrt(variance() / static_cast<double>(n_));
}

double z_score(double lhs, double lhs_se, double rhs, double rhs_se) {
    const double denom = std::sqrt(lhs_se * lhs_se + rhs_se * rhs_se);
    if (denom == 0.0) return lhs == rhs ? 0.0 : std::copysign(HUGE_VAL, lhs - rhs);
    return (lhs - rhs) / denom;
}

KsResult two_sample_ks(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("two_sample_ks: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double scaled = d * std::sqrt(na * nb / (na + nb));
    // Kolmogorov tail: Q(t) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 t^2}
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * std::exp(-2.0 * k * k * scaled * scaled);
        p += (k % 2 == 1) ? term : -term;
        if (term < 1e-12) break;
    }
    p = std::clamp(p, 0.0, 1.0);
    return {d, scaled, p};
}

double ks_critical(double alpha) {
    return std::sqrt(-std::log(alpha / 2.0) / 2.0);
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("total_variation: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

}  // namespace levybridge
