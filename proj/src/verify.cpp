#include "levybridge/verify.hpp"

#include <atomic>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "levybridge/rng.hpp"
#include "levybridge/samplers.hpp"
#include "levybridge/stats.hpp"

namespace levybridge {

namespace {

constexpr long kBlockSize = 8192;

// Streaming bivariate moments; needed for the self-normalized estimator's
// delta-method standard error.
struct BivariateStat {
    long n = 0;
    double mean_a = 0.0, mean_b = 0.0;
    double m2_a = 0.0, m2_b = 0.0, cab = 0.0;

    void add(double a, double b) {
        ++n;
        const double da = a - mean_a;
        const double db = b - mean_b;
        mean_a += da / n;
        mean_b += db / n;
        m2_a += da * (a - mean_a);
        m2_b += db * (b - mean_b);
        cab += da * (b - mean_b);
    }
    void merge(const BivariateStat& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = n, nb = o.n, nt = na + nb;
        const double da = o.mean_a - mean_a;
        const double db = o.mean_b - mean_b;
        m2_a += o.m2_a + da * da * na * nb / nt;
        m2_b += o.m2_b + db * db * na * nb / nt;
        cab += o.cab + da * db * na * nb / nt;
        mean_a += da * nb / nt;
        mean_b += db * nb / nt;
        n += o.n;
    }
};

struct BlockResult {
    RunningStat lhs, rhs;
    BivariateStat ratio;  // used by the reweighted estimator only
};

void guard(const RunningStat& s, bool guarded, const std::string& id) {
    if (!guarded || s.count() < 1000) return;
    const double m2 = s.mean() * s.mean();
    if (s.variance() > 1e6 * m2) {
        throw std::runtime_error("variance guard tripped for functional '" + id +
                                 "' (variance " + std::to_string(s.variance()) + ", mean " +
                                 std::to_string(s.mean()) + ")");
    }
}

// Runs `body(block_rng, out, count)` over fixed-size blocks with per-block
// seeds derived from the root seed, merging results in block order. The
// block layout depends only on n, so results are identical for any worker
// count.
template <class Body>
BlockResult run_blocks(long n, std::uint64_t seed, int workers, const Body& body) {
    if (n <= 0) throw std::invalid_argument("identity check: n must be positive");
    const Rng root(seed);
    const long blocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<BlockResult> partial(static_cast<std::size_t>(blocks));

    auto run_one = [&](long b) {
        Rng rng = root.split(static_cast<std::uint64_t>(b));
        const long count = std::min<long>(kBlockSize, n - b * kBlockSize);
        body(rng, partial[static_cast<std::size_t>(b)], count);
    };

    if (workers <= 1 || blocks == 1) {
        for (long b = 0; b < blocks; ++b) run_one(b);
    } else {
        std::atomic<long> next{0};
        std::vector<std::future<void>> pool;
        const int nw = static_cast<int>(std::min<long>(workers, blocks));
        pool.reserve(static_cast<std::size_t>(nw));
        for (int w = 0; w < nw; ++w) {
            pool.push_back(std::async(std::launch::async, [&] {
                for (long b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) run_one(b);
            }));
        }
        for (auto& f : pool) f.get();
    }

    BlockResult total;
    for (const auto& p : partial) {
        total.lhs.merge(p.lhs);
        total.rhs.merge(p.rhs);
        total.ratio.merge(p.ratio);
    }
    return total;
}

IdentityReport make_report(const std::string& id, const BlockResult& r, long n, std::uint64_t seed) {
    IdentityReport rep;
    rep.functional_id = id;
    rep.lhs = r.lhs.mean();
    rep.rhs = r.rhs.mean();
    rep.lhs_se = r.lhs.standard_error();
    rep.rhs_se = r.rhs.standard_error();
    rep.z = z_score(rep.lhs, rep.lhs_se, rep.rhs, rep.rhs_se);
    rep.n = n;
    rep.seed = seed;
    return rep;
}

SizeConfiguration sample_configuration(const JumpDensity& model, Rng& rng) {
    const long n = rng.poisson(model.total_mass());
    std::vector<double> atoms(static_cast<std::size_t>(n));
    for (auto& a : atoms) a = model.sample_size(rng);
    return SizeConfiguration(std::move(atoms));
}

SizeConfiguration erase_atoms(const SizeConfiguration& c, std::size_t i, std::size_t j_or_npos) {
    std::vector<double> atoms;
    atoms.reserve(c.size());
    for (std::size_t k = 0; k < c.size(); ++k)
        if (k != i && k != j_or_npos) atoms.push_back(c.atom(k));
    return SizeConfiguration(std::move(atoms));
}

struct SplitDraw {
    double s1, x1, s2;
    JumpPath path;
};

SplitDraw split_random_jump(const JumpPath& z, std::size_t k, const JumpDensity& psi, Rng& rng) {
    for (;;) {
        const double x1 = psi.sample_size(rng);
        const double s1 = rng.uniform_open01();
        const double s2 = rng.uniform_open01();
        try {
            return {s1, x1, s2, split_jump(z, k, s1, x1, s2)};
        } catch (const ResampleNeeded&) {
            // null event; redraw
        }
    }
}

}  // namespace

std::string to_json(const IdentityReport& r) {
    nlohmann::json j;
    j["functional"] = r.functional_id;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["lhs_se"] = r.lhs_se;
    j["rhs_se"] = r.rhs_se;
    j["z"] = r.z;
    j["n"] = r.n;
    j["seed"] = r.seed;
    return j.dump();
}

std::string to_table_row(const IdentityReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-24s lhs=%12.6g (se %.3g)  rhs=%12.6g (se %.3g)  z=%+.3f  n=%ld",
                  r.functional_id.c_str(), r.lhs, r.lhs_se, r.rhs, r.rhs_se, r.z, r.n);
    return buf;
}

// ---------------------------------------------------------------------------
// functional libraries

std::vector<MeckeFunctional> mecke_functional_library() {
    return {
        {"one", [](double, const SizeConfiguration&) { return 1.0; }, false},
        mecke_count_indicator(1),
        {"abs_min1", [](double g, const SizeConfiguration&) { return std::min(std::abs(g), 1.0); },
         false},
    };
}

MeckeFunctional mecke_count_indicator(long k) {
    return {"count_eq_" + std::to_string(k),
            [k](double, const SizeConfiguration& rest) {
                return rest.size() == static_cast<std::size_t>(k) ? 1.0 : 0.0;
            },
            false};
}

std::vector<BivariateMeckeFunctional> bivariate_functional_library() {
    return {
        {"one", [](double, double, const SizeConfiguration&) { return 1.0; }, false},
        {"same_sign",
         [](double g1, double g2, const SizeConfiguration&) { return g1 * g2 > 0.0 ? 1.0 : 0.0; },
         false},
    };
}

std::vector<SplitFunctional> split_functional_library(const JumpDensity& model) {
    auto phi = model.model_ptr();
    return {
        {"phi_x1",
         [phi](const SpaceTimeAtom&, const SpaceTimeAtom& g1, const SpaceTimeAtom&, const JumpPath&) {
             return phi->pdf(g1.size);
         },
         false},
        {"density_reduction",
         [phi](const SpaceTimeAtom&, const SpaceTimeAtom& g1, const SpaceTimeAtom&,
               const JumpPath& z) {
             const std::size_t n = z.jump_count();
             if (n <= 1) return 0.0;
             return phi->pdf(g1.size) / static_cast<double>(n - 1);
         },
         false},
        {"phi_x1_exp_sup",
         [phi](const SpaceTimeAtom&, const SpaceTimeAtom& g1, const SpaceTimeAtom&,
               const JumpPath& z) { return phi->pdf(g1.size) * std::exp(-z.sup_abs()); },
         false},
    };
}

std::vector<ConfigFunctional> reweight_functional_library() {
    return {
        {"one", [](const SizeConfiguration&) { return 1.0; }, false},
        {"count_eq_2",
         [](const SizeConfiguration& c) { return c.size() == 2 ? 1.0 : 0.0; }, false},
        {"exp_neg_count",
         [](const SizeConfiguration& c) { return std::exp(-static_cast<double>(c.size())); }, false},
    };
}

std::vector<ConfigFunctional> diminished_functional_library() {
    return {
        {"one", [](const SizeConfiguration&) { return 1.0; }, false},
        {"count_eq_0", [](const SizeConfiguration& c) { return c.empty() ? 1.0 : 0.0; }, false},
        {"count", [](const SizeConfiguration& c) { return static_cast<double>(c.size()); }, false},
        {"exp_neg_count",
         [](const SizeConfiguration& c) { return std::exp(-static_cast<double>(c.size())); }, false},
    };
}

std::vector<OUFunctional> perou_functional_library(const JumpDensity& model) {
    auto phi = model.model_ptr();
    return {
        {"phi_x1",
         [phi](const SpaceTimeAtom&, const SpaceTimeAtom& g1, const SpaceTimeAtom&, const OUPath&) {
             return phi->pdf(g1.size);
         },
         false},
        {"phi_x1_sup1",
         [phi](const SpaceTimeAtom&, const SpaceTimeAtom& g1, const SpaceTimeAtom&, const OUPath& x) {
             return phi->pdf(g1.size) * std::min(x.sup_abs(), 1.0);
         },
         false},
    };
}

// ---------------------------------------------------------------------------
// checks

IdentityReport check_mecke(const JumpDensity& model, const MeckeFunctional& F, long n,
                           std::uint64_t seed, int workers) {
    const double lambda = model.total_mass();
    auto result = run_blocks(n, seed, workers, [&](Rng& rng, BlockResult& out, long count) {
        for (long s = 0; s < count; ++s) {
            const SizeConfiguration mu = sample_configuration(model, rng);
            double lhs = 0.0;
            for (std::size_t i = 0; i < mu.size(); ++i)
                lhs += F.eval(mu.atom(i), erase_atoms(mu, i, SIZE_MAX));
            const double gamma = model.sample_size(rng);
            out.lhs.add(lhs);
            out.rhs.add(lambda * F.eval(gamma, mu));
            guard(out.lhs, F.guarded, F.id);
            guard(out.rhs, F.guarded, F.id);
        }
    });
    return make_report(F.id, result, n, seed);
}

IdentityReport check_bivariate_mecke(const JumpDensity& model, const BivariateMeckeFunctional& F,
                                     long n, std::uint64_t seed, int workers) {
    const double lambda = model.total_mass();
    auto result = run_blocks(n, seed, workers, [&](Rng& rng, BlockResult& out, long count) {
        for (long s = 0; s < count; ++s) {
            const SizeConfiguration mu = sample_configuration(model, rng);
            double lhs = 0.0;
            for (std::size_t i = 0; i < mu.size(); ++i)
                for (std::size_t j = 0; j < mu.size(); ++j)
                    if (i != j) lhs += F.eval(mu.atom(i), mu.atom(j), erase_atoms(mu, i, j));
            const double g1 = model.sample_size(rng);
            const double g2 = model.sample_size(rng);
            out.lhs.add(lhs);
            out.rhs.add(lambda * lambda * F.eval(g1, g2, mu));
            guard(out.lhs, F.guarded, F.id);
            guard(out.rhs, F.guarded, F.id);
        }
    });
    return make_report(F.id, result, n, seed);
}

IdentityReport check_split_identity(const JumpDensity& model, const SplitFunctional& F, long n,
                                    std::uint64_t seed, const PathBatchSampler* conditioned,
                                    int workers) {
    auto result = run_blocks(n, seed, workers, [&](Rng& rng, BlockResult& out, long count) {
        std::vector<JumpPath> batch;
        if (conditioned) batch = (*conditioned)(static_cast<std::size_t>(count), rng.next_u64());
        for (long s = 0; s < count; ++s) {
            const JumpPath z = conditioned ? std::move(batch[static_cast<std::size_t>(s)])
                                           : sample_compound_poisson(model, 0.0, rng);
            const auto& jumps = z.jumps();
            const std::size_t m = jumps.size();

            // transformed side: one (x1, s1, s2) draw per jump, x1 ~ psi = f
            double lhs = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const SplitDraw d = split_random_jump(z, k, model, rng);
                lhs += F.eval({jumps[k].time, jumps[k].size}, {d.s1, d.x1},
                              {d.s2, jumps[k].size - d.x1}, d.path) /
                       model.density(d.x1);
            }

            // pair side: one uniform t per ordered pair
            double rhs = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    if (i == j) continue;
                    const double t = rng.uniform_open01();
                    const double merged = jumps[i].size + jumps[j].size;
                    rhs += chi(model, jumps[i].size, jumps[j].size) *
                           F.eval({t, merged}, {jumps[i].time, jumps[i].size},
                                  {jumps[j].time, jumps[j].size}, z);
                }
            }
            out.lhs.add(lhs);
            out.rhs.add(rhs);
            guard(out.lhs, F.guarded, F.id);
            guard(out.rhs, F.guarded, F.id);
        }
    });
    return make_report(F.id, result, n, seed);
}

IdentityReport check_density_reweighting(const JumpDensity& model, const ConfigFunctional& F,
                                         std::shared_ptr<const DensityModel> phi, long n,
                                         std::uint64_t seed, int workers) {
    if (!phi) phi = model.model_ptr();
    auto result = run_blocks(n, seed, workers, [&](Rng& rng, BlockResult& out, long count) {
        for (long s = 0; s < count; ++s) {
            const SizeConfiguration mu = sample_configuration(model, rng);
            // transformed side: split one uniformly chosen atom, gamma' ~ phi
            double lhs = 0.0;
            if (!mu.empty()) {
                const std::size_t k = rng.uniform_index(mu.size());
                const double gp = phi->sample(rng);
                lhs = F.eval(split_atom(mu, k, gp));
            }
            // density side: F(mu) * D(mu)
            double density = 0.0;
            const std::size_t m = mu.size();
            if (m > 1) {
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < m; ++j)
                        if (i != j)
                            density += chi(model, mu.atom(i), mu.atom(j)) * phi->pdf(mu.atom(j));
                density /= static_cast<double>(m - 1);
            }
            out.lhs.add(lhs);
            out.rhs.add(F.eval(mu) * density);
            guard(out.lhs, F.guarded, F.id);
            guard(out.rhs, F.guarded, F.id);
        }
    });
    return make_report(F.id, result, n, seed);
}

IdentityReport check_diminished_density(const JumpDensity& model, double c, double epsilon,
                                        const ConfigFunctional& G, long n, std::uint64_t seed,
                                        int workers) {
    if (c == 0.0) throw std::invalid_argument("check_diminished_density: c must be nonzero");
    if (!(epsilon > 0.0) || !(epsilon < std::abs(c)))
        throw std::invalid_argument("check_diminished_density: need 0 < epsilon < |c|");
    const double lambda = model.total_mass();

    auto result = run_blocks(n, seed, workers, [&](Rng& rng, BlockResult& out, long count) {
        for (long s = 0; s < count; ++s) {
            // (a) remove one uniform atom from an epsilon-conditioned sample
            for (;;) {
                const SizeConfiguration mu = sample_configuration(model, rng);
                if (std::abs(first_moment(mu) - c) > epsilon) continue;
                auto [atom, rest] = remove_random_atom(mu, rng);
                (void)atom;
                out.lhs.add(G.eval(rest));
                break;
            }
            // (b) forward sample reweighted by rho(c - B(mu)) / (N + 1)
            const SizeConfiguration mu = sample_configuration(model, rng);
            const double w =
                lambda * model.density(c - first_moment(mu)) / static_cast<double>(mu.size() + 1);
            out.ratio.add(G.eval(mu) * w, w);
            guard(out.lhs, G.guarded, G.id);
        }
    });

    if (!(result.ratio.mean_b > 0.0)) {
        throw std::runtime_error(
            "check_diminished_density: degenerate weights (all about zero); "
            "increase n or choose a height closer to the bulk of the jump law");
    }

    IdentityReport rep;
    rep.functional_id = G.id;
    rep.lhs = result.lhs.mean();
    rep.lhs_se = result.lhs.standard_error();
    const auto& r = result.ratio;
    rep.rhs = r.mean_a / r.mean_b;
    // delta-method variance of the ratio estimator
    const double nn = static_cast<double>(r.n);
    const double var_res = (r.m2_a - 2.0 * rep.rhs * r.cab + rep.rhs * rep.rhs * r.m2_b) /
                           std::max(1.0, nn - 1.0);
    rep.rhs_se = std::sqrt(std::max(0.0, var_res) / nn) / r.mean_b;
    rep.z = z_score(rep.lhs, rep.lhs_se, rep.rhs, rep.rhs_se);
    rep.n = n;
    rep.seed = seed;
    return rep;
}

IdentityReport check_perou_identity(const JumpDensity& model, double damping, const OUFunctional& F,
                                    long n, std::uint64_t seed, int workers) {
    if (damping == 0.0) throw std::invalid_argument("check_perou_identity: damping must be nonzero");
    auto result = run_blocks(n, seed, workers, [&](Rng& rng, BlockResult& out, long count) {
        for (long s = 0; s < count; ++s) {
            const JumpPath z = sample_compound_poisson(model, 0.0, rng);
            const OUPath x = ou_map(damping, z);
            const auto& jumps = z.jumps();
            const std::size_t m = jumps.size();

            double lhs = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const SplitDraw d = split_random_jump(z, k, model, rng);
                const OUPath xs = ou_map(damping, d.path);
                lhs += F.eval({jumps[k].time, jumps[k].size}, {d.s1, d.x1},
                              {d.s2, jumps[k].size - d.x1}, xs) /
                       model.density(d.x1);
            }

            double rhs = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    if (i == j) continue;
                    const double t = rng.uniform_open01();
                    rhs += chi(model, jumps[i].size, jumps[j].size) *
                           F.eval({t, jumps[i].size + jumps[j].size},
                                  {jumps[i].time, jumps[i].size}, {jumps[j].time, jumps[j].size}, x);
                }
            }
            out.lhs.add(lhs);
            out.rhs.add(rhs);
            guard(out.lhs, F.guarded, F.id);
            guard(out.rhs, F.guarded, F.id);
        }
    });
    return make_report(F.id, result, n, seed);
}

}  // namespace levybridge
