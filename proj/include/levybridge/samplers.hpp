#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "levybridge/jump_models.hpp"
#include "levybridge/path.hpp"

namespace levybridge {

class Rng;

// Forward compound-Poisson path on [0,1]: jump count ~ Poisson(lambda),
// times iid uniform, sizes iid from the model's density.
JumpPath sample_compound_poisson(const JumpDensity& model, double initial_value, Rng& rng);

struct RejectionSample {
    JumpPath path;
    std::uint64_t trials = 0;  // forward draws consumed for this sample
};

// Brute-force bridge oracle: accept a forward draw started at x iff
// |Z_1 - y| <= epsilon. Throws std::runtime_error carrying the acceptance
// rate estimate when the trial budget is exhausted.
RejectionSample sample_bridge_rejection(const JumpDensity& model, double x, double y,
                                        double epsilon, Rng& rng,
                                        std::uint64_t max_trials = 10'000'000);

// Dimensionally consistent default acceptance window: 0.05 * IQR(f).
double default_bridge_epsilon(const JumpDensity& model);

enum class ChainEventKind { Split, Coalesce };

struct ChainEvent {
    ChainEventKind kind;
    double waiting_time;
};

struct ChainConfig {
    double burn_in = 50.0;          // chain-time units
    double sample_interval = 2.0;   // chain-time units
    std::uint64_t max_events = 100'000'000;
    std::uint64_t seed = 0;

    void validate() const;
};

// Continuous-time split/coalesce chain on bridge paths pinned Z_0 = x,
// Z_1 = y. Each jump splits at rate 1 into two jumps at uniform times, the
// first new size drawn from phi; each ordered jump pair (i, j) coalesces at
// rate phi(size_i) chi(size_i, size_j) into one jump at a uniform time.
// Both moves preserve the size sum, so every state satisfies
// sum(sizes) = c = y - x (with periodic renormalization of rounding drift).
class BridgeChain {
public:
    // phi defaults to the model's own jump density when null.
    BridgeChain(JumpDensity model, double x, double y,
                std::shared_ptr<const DensityModel> phi, Rng& rng);

    ChainEvent step(Rng& rng);

    double clock() const { return clock_; }
    double height() const { return c_; }
    std::size_t jump_count() const { return sizes_.size(); }
    double size_sum_drift() const;  // |sum(sizes) - c|
    JumpPath state() const;

private:
    double pair_weight(std::size_t i, std::size_t j) const;
    void rebuild_rates();
    void remove_jump(std::size_t k);
    void add_jump(double time, double size);
    void renormalize_if_needed();
    double draw_free_time(Rng& rng) const;

    JumpDensity model_;
    std::shared_ptr<const DensityModel> phi_;
    double x_, c_;
    std::vector<double> times_, sizes_;
    std::vector<double> chi_row_;  // u_i = sum_{j != i} chi(size_i, size_j)
    double clock_ = 0.0;
    std::uint64_t events_ = 0;
};

ChainEvent step_bridge_chain(BridgeChain& chain, Rng& rng);

struct McmcBridgeResult {
    std::vector<JumpPath> paths;
    bool truncated = false;      // event cap hit before all samples were drawn
    std::uint64_t events = 0;
};

// Samples collected every sample_interval of chain time after burn_in; each
// path satisfies Z_0 = x, Z_1 = y. The chain state is read at the scheduled
// times of the continuous-time process.
McmcBridgeResult sample_bridge_mcmc(const JumpDensity& model, double x, double y,
                                    std::shared_ptr<const DensityModel> phi,
                                    std::size_t n_samples, const ChainConfig& config);

// Periodic damped path driven by a fresh forward draw started at 0.
OUPath sample_perou(const JumpDensity& model, double damping, Rng& rng);

}  // namespace levybridge
