#include "levybridge/domination.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "levybridge/rng.hpp"

namespace levybridge {

CountDistribution CountDistribution::from_counts(const std::vector<long>& counts) {
    if (counts.empty()) throw std::invalid_argument("CountDistribution: no samples");
    CountDistribution d;
    d.n_ = static_cast<long>(counts.size());
    long maxc = 0;
    for (long c : counts) {
        if (c < 0) throw std::invalid_argument("CountDistribution: negative count");
        maxc = std::max(maxc, c);
    }
    d.pmf_.assign(static_cast<std::size_t>(maxc) + 1, 0.0);
    double sum = 0.0, sum2 = 0.0;
    for (long c : counts) {
        d.pmf_[static_cast<std::size_t>(c)] += 1.0;
        sum += static_cast<double>(c);
        sum2 += static_cast<double>(c) * static_cast<double>(c);
    }
    for (auto& p : d.pmf_) p /= static_cast<double>(d.n_);
    d.mean_ = sum / static_cast<double>(d.n_);
    const double var = (sum2 - sum * sum / static_cast<double>(d.n_)) /
                       std::max(1.0, static_cast<double>(d.n_ - 1));
    d.se_ = std::sqrt(std::max(0.0, var) / static_cast<double>(d.n_));
    return d;
}

double CountDistribution::pmf(long k) const {
    if (k < 0 || k > max_count()) return 0.0;
    return pmf_[static_cast<std::size_t>(k)];
}

double CountDistribution::tail(long j) const {
    double t = 0.0;
    for (long k = std::max(j, 0L); k <= max_count(); ++k) t += pmf(k);
    return t;
}

double CountDistribution::mean() const { return mean_; }
double CountDistribution::mean_se() const { return se_; }

double poisson_plus_pmf(double lambda, long n) {
    if (!(lambda > 0.0)) throw std::invalid_argument("poisson_plus_pmf: lambda must be > 0");
    if (n < 1) throw std::invalid_argument("poisson_plus_pmf: support is {1, 2, ...}");
    const double log_p = -lambda + static_cast<double>(n) * std::log(lambda) -
                         std::lgamma(static_cast<double>(n) + 1.0);
    return std::exp(log_p) / (1.0 - std::exp(-lambda));
}

double poisson_plus_tail(double lambda, long j) {
    if (j <= 1) return 1.0;
    // complement of the head; the head has few terms for the lambdas used here
    double head = 0.0;
    for (long k = 1; k < j; ++k) head += poisson_plus_pmf(lambda, k);
    return std::max(0.0, 1.0 - head);
}

double poisson_plus_mean(double lambda) { return lambda / (1.0 - std::exp(-lambda)); }

DominanceVerdict dominance_check(const std::vector<double>& p_pmf, const std::vector<double>& q_pmf) {
    DominanceVerdict v{true, 0.0, 0};
    const long jmax = static_cast<long>(std::max(p_pmf.size(), q_pmf.size()));
    auto tail = [](const std::vector<double>& pmf, long j) {
        double t = 0.0;
        for (std::size_t k = static_cast<std::size_t>(std::max(j, 1L)); k < pmf.size(); ++k)
            t += pmf[k];
        return t;
    };
    for (long j = 1; j <= jmax; ++j) {
        const double gap = tail(q_pmf, j) - tail(p_pmf, j);
        if (gap > 1e-12 && gap > v.max_violation) {
            v.dominates = false;
            v.max_violation = gap;
            v.violation_at = j;
        }
    }
    return v;
}

namespace {

DominanceVerdict empirical_tail_compare(const CountDistribution& counts, double lambda,
                                        bool reference_is_upper) {
    DominanceVerdict v{true, 0.0, 0};
    const double n = static_cast<double>(counts.n_samples());
    for (long j = 1; j <= counts.max_count() + 2; ++j) {
        const double emp = counts.tail(j);
        const double ref = poisson_plus_tail(lambda, j);
        const double band = 3.0 * std::sqrt(std::max(emp * (1.0 - emp), 1.0 / n) / n);
        const double gap = reference_is_upper ? emp - ref - band : ref - emp - band;
        if (gap > 0.0 && gap > v.max_violation) {
            v.dominates = false;
            v.max_violation = gap;
            v.violation_at = j;
        }
    }
    return v;
}

}  // namespace

DominanceVerdict dominated_by(const CountDistribution& counts, double poi_plus_lambda) {
    return empirical_tail_compare(counts, poi_plus_lambda, /*reference_is_upper=*/true);
}

DominanceVerdict dominates(const CountDistribution& counts, double poi_plus_lambda) {
    return empirical_tail_compare(counts, poi_plus_lambda, /*reference_is_upper=*/false);
}

bool ratio_criterion(const std::vector<double>& p_pmf, const std::vector<double>& q_pmf) {
    const std::size_t jmax = std::max(p_pmf.size(), q_pmf.size());
    auto at = [](const std::vector<double>& pmf, std::size_t j) {
        return j < pmf.size() ? pmf[j] : 0.0;
    };
    for (std::size_t j = 1; j + 1 < jmax; ++j) {
        if (at(q_pmf, j + 1) * at(p_pmf, j) > at(q_pmf, j) * at(p_pmf, j + 1) + 1e-15) return false;
    }
    return true;
}

TailComparison bridge_count_report(const JumpDensity& model, double c, BridgeSamplerChoice sampler,
                                   const ConvolutionBounds& bounds, std::size_t n,
                                   std::uint64_t seed, double rejection_epsilon,
                                   const ChainConfig* chain_config) {
    if (c == 0.0) throw std::invalid_argument("bridge_count_report: c must be nonzero");
    if (n == 0) throw std::invalid_argument("bridge_count_report: need samples");

    std::vector<long> counts;
    counts.reserve(n);
    if (sampler == BridgeSamplerChoice::Mcmc) {
        ChainConfig cfg = chain_config ? *chain_config : ChainConfig{};
        cfg.seed = seed;
        const auto res = sample_bridge_mcmc(model, 0.0, c, nullptr, n, cfg);
        if (res.truncated) throw std::runtime_error("bridge_count_report: chain event cap exceeded");
        for (const auto& p : res.paths) counts.push_back(static_cast<long>(p.jump_count()));
    } else {
        Rng rng(seed);
        const double eps = rejection_epsilon > 0.0 ? rejection_epsilon : default_bridge_epsilon(model);
        for (std::size_t i = 0; i < n; ++i)
            counts.push_back(
                static_cast<long>(sample_bridge_rejection(model, 0.0, c, eps, rng).path.jump_count()));
    }

    const CountDistribution dist = CountDistribution::from_counts(counts);

    TailComparison t;
    t.counts = std::move(counts);
    t.mean_count = dist.mean();
    t.mean_count_se = dist.mean_se();
    t.upper_unbounded = bounds.upper_unbounded;
    t.upper_param = 2.0 * bounds.K_hat;
    t.lower_param = 2.0 * bounds.k_hat;
    t.grid = bounds.grid;
    t.sampler = sampler == BridgeSamplerChoice::Mcmc ? "mcmc" : "rejection";

    const DominanceVerdict lower = dominates(dist, t.lower_param);
    t.dominates_lower = lower.dominates;
    double max_viol = lower.max_violation;
    if (!t.upper_unbounded) {
        const DominanceVerdict upper = dominated_by(dist, t.upper_param);
        t.dominated_by_upper = upper.dominates;
        max_viol = std::max(max_viol, upper.max_violation);
        t.mean_upper_bound = poisson_plus_mean(t.upper_param);
    } else {
        t.dominated_by_upper = true;  // vacuous: no finite upper comparison law
        t.mean_upper_bound = HUGE_VAL;
    }
    t.max_tail_violation = max_viol;
    t.mean_lower_bound = poisson_plus_mean(t.lower_param);
    t.mean_lower_bound_alt = t.lower_param * (1.0 - std::exp(-t.lower_param));

    const double margin = 3.0 * t.mean_count_se;
    t.mean_in_interval = t.mean_count >= t.mean_lower_bound - margin &&
                         (t.upper_unbounded || t.mean_count <= t.mean_upper_bound + margin);

    std::ostringstream note;
    note << "comparison parameters are twice the rho-level convolution bounds from grid " << t.grid
         << "; mean_lower_bound uses 2k/(1-e^{-2k}), mean_lower_bound_alt the product form "
            "2k(1-e^{-2k})";
    t.note = note.str();
    return t;
}

std::string to_json(const TailComparison& t) {
    nlohmann::json j;
    j["sampler"] = t.sampler;
    j["n"] = t.counts.size();
    j["mean_count"] = t.mean_count;
    j["mean_count_se"] = t.mean_count_se;
    j["upper_param"] = t.upper_unbounded ? "unbounded" : nlohmann::json(t.upper_param);
    j["lower_param"] = t.lower_param;
    j["dominated_by_upper"] = t.dominated_by_upper;
    j["dominates_lower"] = t.dominates_lower;
    j["max_tail_violation"] = t.max_tail_violation;
    j["mean_upper_bound"] = t.upper_unbounded ? "unbounded" : nlohmann::json(t.mean_upper_bound);
    j["mean_lower_bound"] = t.mean_lower_bound;
    j["mean_lower_bound_alt"] = t.mean_lower_bound_alt;
    j["mean_in_interval"] = t.mean_in_interval;
    j["grid"] = t.grid;
    j["note"] = t.note;
    return j.dump();
}

std::string tails_csv(const TailComparison& t) {
    const CountDistribution dist = CountDistribution::from_counts(t.counts);
    std::ostringstream os;
    os << "j,empirical_tail,poi_plus_upper_tail,poi_plus_lower_tail\n";
    char buf[160];
    for (long j = 1; j <= dist.max_count() + 2; ++j) {
        const double up = t.upper_unbounded ? 1.0 : poisson_plus_tail(t.upper_param, j);
        std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g\n", j, dist.tail(j), up,
                      poisson_plus_tail(t.lower_param, j));
        os << buf;
    }
    return os.str();
}

}  // namespace levybridge
