#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "levybridge/jump_models.hpp"
#include "levybridge/samplers.hpp"

namespace levybridge {

// Empirical law of a positive jump count.
class CountDistribution {
public:
    static CountDistribution from_counts(const std::vector<long>& counts);

    long n_samples() const { return n_; }
    long max_count() const { return static_cast<long>(pmf_.size()) - 1; }
    double pmf(long k) const;
    double tail(long j) const;  // P(N >= j)
    double mean() const;
    double mean_se() const;

private:
    std::vector<double> pmf_;  // index k = count k; pmf_[0] == 0 for bridge data
    long n_ = 0;
    double mean_ = 0.0, se_ = 0.0;
};

// Poisson(lambda) conditioned to be >= 1.
double poisson_plus_pmf(double lambda, long n);
double poisson_plus_tail(double lambda, long j);
double poisson_plus_mean(double lambda);

struct DominanceVerdict {
    bool dominates = false;        // candidate tails >= reference tails everywhere checked
    double max_violation = 0.0;    // largest tail short-fall beyond the tolerance band
    long violation_at = 0;         // tail index of the largest violation (0 if none)
};

// Exact-vs-exact tail comparison on N*: does p dominate q?
DominanceVerdict dominance_check(const std::vector<double>& p_pmf, const std::vector<double>& q_pmf);

// Exact reference vs empirical counts, with a per-tail binomial 3-sigma
// tolerance band; j runs to the largest observed count + 2.
DominanceVerdict dominated_by(const CountDistribution& counts, double poi_plus_lambda);
DominanceVerdict dominates(const CountDistribution& counts, double poi_plus_lambda);

// Secondary diagnostic, the likelihood-ratio criterion:
// q(j+1) p(j) <= q(j) p(j+1) for all j implies p dominates q.
bool ratio_criterion(const std::vector<double>& p_pmf, const std::vector<double>& q_pmf);

struct TailComparison {
    bool dominated_by_upper = false;
    bool dominates_lower = false;
    double max_tail_violation = 0.0;
    double mean_count = 0.0;
    double mean_count_se = 0.0;

    double upper_param = 0.0;       // 2K (infinite when the ratio is unbounded)
    double lower_param = 0.0;       // 2k
    bool upper_unbounded = false;
    double mean_upper_bound = 0.0;  // 2K / (1 - e^{-2K})
    double mean_lower_bound = 0.0;  // 2k / (1 - e^{-2k})
    double mean_lower_bound_alt = 0.0;  // 2k (1 - e^{-2k}); reported alongside, see note
    bool mean_in_interval = false;  // with a 3-sigma Monte Carlo margin

    std::string sampler;
    std::string grid;               // grid that produced K, k
    std::string note;
    std::vector<long> counts;       // raw per-sample jump counts (for CSV emission)
};

enum class BridgeSamplerChoice { Mcmc, Rejection };

// Empirical bridge jump-count law versus the conditioned-Poisson comparison
// laws derived from the convolution bounds (K and k are rho-level, i.e.
// lambda-scaled). The comparison parameters are 2K and 2k; both mean-bound
// expressions 2k/(1-e^{-2k}) and 2k(1-e^{-2k}) are reported.
TailComparison bridge_count_report(const JumpDensity& model, double c, BridgeSamplerChoice sampler,
                                   const ConvolutionBounds& bounds, std::size_t n,
                                   std::uint64_t seed, double rejection_epsilon = 0.0,
                                   const ChainConfig* chain_config = nullptr);

std::string to_json(const TailComparison& t);

// (j, empirical_tail, poi_plus_upper_tail, poi_plus_lower_tail) rows.
std::string tails_csv(const TailComparison& t);

}  // namespace levybridge
