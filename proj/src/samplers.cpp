#include "levybridge/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "levybridge/rng.hpp"

namespace levybridge {

namespace {
constexpr std::uint64_t kRebuildEvery = 1000;

double draw_nonzero_size(const JumpDensity& model, Rng& rng) {
    for (;;) {
        const double s = model.sample_size(rng);
        if (s != 0.0) return s;
    }
}
}  // namespace

JumpPath sample_compound_poisson(const JumpDensity& model, double initial_value, Rng& rng) {
    const long n = rng.poisson(model.total_mass());
    std::vector<Jump> jumps;
    jumps.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        double t;
        bool fresh;
        do {  // duplicate times are null events; redraw on collision
            t = rng.uniform_open01();
            fresh = std::none_of(jumps.begin(), jumps.end(), [&](const Jump& j) { return j.time == t; });
        } while (!fresh);
        jumps.push_back({t, draw_nonzero_size(model, rng)});
    }
    return JumpPath(initial_value, std::move(jumps));
}

RejectionSample sample_bridge_rejection(const JumpDensity& model, double x, double y, double epsilon,
                                        Rng& rng, std::uint64_t max_trials) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("sample_bridge_rejection: epsilon must be > 0");
    for (std::uint64_t trial = 1; trial <= max_trials; ++trial) {
        JumpPath z = sample_compound_poisson(model, x, rng);
        if (std::abs(z.terminal_value() - y) <= epsilon) return {std::move(z), trial};
    }
    std::ostringstream msg;
    msg << "sample_bridge_rejection: trial budget exhausted (" << max_trials
        << " draws, acceptance rate < " << 1.0 / static_cast<double>(max_trials) << ")";
    throw std::runtime_error(msg.str());
}

double default_bridge_epsilon(const JumpDensity& model) { return 0.05 * model.scale_iqr(); }

void ChainConfig::validate() const {
    if (!(burn_in > 0.0) || !(sample_interval > 0.0) || max_events == 0)
        throw std::invalid_argument("ChainConfig: burn_in, sample_interval and max_events must be positive");
}

// ---------------------------------------------------------------------------
// BridgeChain

BridgeChain::BridgeChain(JumpDensity model, double x, double y,
                         std::shared_ptr<const DensityModel> phi, Rng& rng)
    : model_(std::move(model)), phi_(phi ? std::move(phi) : model_.model_ptr()), x_(x), c_(y - x) {
    if (c_ != 0.0) {
        times_ = {rng.uniform_open01()};
        sizes_ = {c_};
    } else {
        // loops live on the n >= 2 sector; start from (u, -u)
        double u;
        do {
            u = phi_->sample(rng);
        } while (u == 0.0);
        times_ = {rng.uniform_open01(), rng.uniform_open01()};
        while (times_[1] == times_[0]) times_[1] = rng.uniform_open01();
        sizes_ = {u, -u};
    }
    rebuild_rates();
}

double BridgeChain::pair_weight(std::size_t i, std::size_t j) const {
    // a pair summing to zero would merge into a forbidden zero jump; its
    // rate is zero. For c = 0 the only two jumps always sum to zero (up to
    // rounding residue), so that merge is excluded structurally and loops
    // stay on the n >= 2 sector.
    if (sizes_[i] + sizes_[j] == 0.0) return 0.0;
    if (c_ == 0.0 && sizes_.size() == 2) return 0.0;
    return chi(model_, sizes_[i], sizes_[j]);
}

void BridgeChain::rebuild_rates() {
    const std::size_t n = sizes_.size();
    chi_row_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) chi_row_[i] += pair_weight(i, j);
}

void BridgeChain::remove_jump(std::size_t k) {
    const std::size_t n = sizes_.size();
    for (std::size_t i = 0; i < n; ++i)
        if (i != k) chi_row_[i] -= pair_weight(i, k);
    times_[k] = times_.back();
    sizes_[k] = sizes_.back();
    chi_row_[k] = chi_row_.back();
    times_.pop_back();
    sizes_.pop_back();
    chi_row_.pop_back();
}

void BridgeChain::add_jump(double time, double size) {
    times_.push_back(time);
    sizes_.push_back(size);
    chi_row_.push_back(0.0);
    const std::size_t a = sizes_.size() - 1;
    for (std::size_t i = 0; i < a; ++i) {
        const double w = pair_weight(i, a);
        chi_row_[i] += w;
        chi_row_[a] += w;  // chi is symmetric in its arguments
    }
}

void BridgeChain::renormalize_if_needed() {
    double sum = 0.0;
    for (double s : sizes_) sum += s;
    const double drift = sum - c_;
    if (drift != 0.0) {
        // fold the rounding residue into the largest jump; in particular a
        // single-jump state carries exactly size c afterwards
        std::size_t k = 0;
        for (std::size_t i = 1; i < sizes_.size(); ++i)
            if (std::abs(sizes_[i]) > std::abs(sizes_[k])) k = i;
        const double adjusted = sizes_[k] - drift;
        if (adjusted == 0.0) return;  // never force a zero jump; retry next event
        const double time = times_[k];
        remove_jump(k);
        add_jump(time, adjusted);
    }
}

double BridgeChain::size_sum_drift() const {
    double sum = 0.0;
    for (double s : sizes_) sum += s;
    return std::abs(sum - c_);
}

double BridgeChain::draw_free_time(Rng& rng) const {
    for (;;) {
        const double t = rng.uniform_open01();
        if (std::none_of(times_.begin(), times_.end(), [&](double u) { return u == t; })) return t;
    }
}

ChainEvent BridgeChain::step(Rng& rng) {
    const std::size_t n = sizes_.size();
    double pair_rate = 0.0;
    for (std::size_t i = 0; i < n; ++i) pair_rate += phi_->pdf(sizes_[i]) * chi_row_[i];
    const double total_rate = static_cast<double>(n) + pair_rate;
    if (!std::isfinite(total_rate) || total_rate <= 0.0)
        throw std::runtime_error("BridgeChain: rate overflow in the coalescence table");

    const double wait = rng.exponential(total_rate);
    clock_ += wait;
    ++events_;

    ChainEventKind kind;
    if (rng.uniform01() * total_rate < static_cast<double>(n)) {
        kind = ChainEventKind::Split;
        const std::size_t k = rng.uniform_index(n);
        const double delta = sizes_[k];
        double x1;
        do {
            x1 = phi_->sample(rng);
        } while (x1 == 0.0 || x1 == delta);
        remove_jump(k);
        add_jump(draw_free_time(rng), x1);
        add_jump(draw_free_time(rng), delta - x1);
    } else {
        kind = ChainEventKind::Coalesce;
        // pick row i proportional to phi(size_i) * u_i, then j within the row
        double u = rng.uniform01() * pair_rate;
        std::size_t i = 0;
        for (; i + 1 < n; ++i) {
            const double r = phi_->pdf(sizes_[i]) * chi_row_[i];
            if (u < r) break;
            u -= r;
        }
        double v = rng.uniform01() * chi_row_[i];
        std::size_t j = (i == 0) ? 1 : 0;
        for (std::size_t cand = 0; cand < n; ++cand) {
            if (cand == i) continue;
            const double w = pair_weight(i, cand);
            j = cand;
            if (v < w) break;
            v -= w;
        }
        const double merged = sizes_[i] + sizes_[j];
        remove_jump(std::max(i, j));
        remove_jump(std::min(i, j));
        add_jump(draw_free_time(rng), merged);
    }

    if (events_ % kRebuildEvery == 0) rebuild_rates();
    renormalize_if_needed();
    return {kind, wait};
}

JumpPath BridgeChain::state() const {
    std::vector<Jump> jumps;
    jumps.reserve(sizes_.size());
    for (std::size_t i = 0; i < sizes_.size(); ++i) jumps.push_back({times_[i], sizes_[i]});
    return JumpPath(x_, std::move(jumps));
}

ChainEvent step_bridge_chain(BridgeChain& chain, Rng& rng) { return chain.step(rng); }

McmcBridgeResult sample_bridge_mcmc(const JumpDensity& model, double x, double y,
                                    std::shared_ptr<const DensityModel> phi,
                                    std::size_t n_samples, const ChainConfig& config) {
    config.validate();
    Rng rng(config.seed);
    BridgeChain chain(model, x, y, std::move(phi), rng);

    McmcBridgeResult out;
    out.paths.reserve(n_samples);
    double next_sample = config.burn_in;
    while (out.paths.size() < n_samples) {
        if (out.events >= config.max_events) {
            out.truncated = true;
            break;
        }
        // the state is constant on the holding interval [clock, clock + wait)
        const double before = chain.clock();
        const JumpPath held = chain.state();
        chain.step(rng);
        ++out.events;
        while (next_sample > before && next_sample <= chain.clock() && out.paths.size() < n_samples) {
            out.paths.push_back(held);
            next_sample += config.sample_interval;
        }
    }
    return out;
}

OUPath sample_perou(const JumpDensity& model, double damping, Rng& rng) {
    return ou_map(damping, sample_compound_poisson(model, 0.0, rng));
}

}  // namespace levybridge
