#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "levybridge/jump_models.hpp"
#include "levybridge/path.hpp"
#include "levybridge/point_measure.hpp"

namespace levybridge {

struct IdentityReport {
    std::string functional_id;
    double lhs = 0.0;
    double rhs = 0.0;
    double lhs_se = 0.0;
    double rhs_se = 0.0;
    double z = 0.0;
    long n = 0;
    std::uint64_t seed = 0;
};

std::string to_json(const IdentityReport& report);
std::string to_table_row(const IdentityReport& report);

// Test functionals. Library entries are integrable by construction; user
// functionals are accepted with `guarded = true`, which aborts the check if
// the running variance of the summands explodes relative to the mean.
struct MeckeFunctional {
    std::string id;
    std::function<double(double gamma, const SizeConfiguration& rest)> eval;
    bool guarded = false;
};

struct BivariateMeckeFunctional {
    std::string id;
    std::function<double(double g1, double g2, const SizeConfiguration& rest)> eval;
    bool guarded = false;
};

// F(removed jump, new jump 1, new jump 2, path). The transformed side
// receives the split path, the pair side the untouched path.
struct SplitFunctional {
    std::string id;
    std::function<double(const SpaceTimeAtom&, const SpaceTimeAtom&, const SpaceTimeAtom&,
                         const JumpPath&)> eval;
    bool guarded = false;
};

struct ConfigFunctional {
    std::string id;
    std::function<double(const SizeConfiguration&)> eval;
    bool guarded = false;
};

struct OUFunctional {
    std::string id;
    std::function<double(const SpaceTimeAtom&, const SpaceTimeAtom&, const SpaceTimeAtom&,
                         const OUPath&)> eval;
    bool guarded = false;
};

// Built-in functionals. The split/perou ones carry an explicit phi(x1)
// factor (phi = the model's jump density) so the x1-integral has bounded
// variance under the 1/psi importance weight.
std::vector<MeckeFunctional> mecke_functional_library();
MeckeFunctional mecke_count_indicator(long k);
std::vector<BivariateMeckeFunctional> bivariate_functional_library();
std::vector<SplitFunctional> split_functional_library(const JumpDensity& model);
std::vector<ConfigFunctional> reweight_functional_library();
std::vector<ConfigFunctional> diminished_functional_library();
std::vector<OUFunctional> perou_functional_library(const JumpDensity& model);

// Batch path source for the conditioned form of the split identity; the
// block seed keeps reports deterministic for any worker count.
using PathBatchSampler =
    std::function<std::vector<JumpPath>(std::size_t count, std::uint64_t block_seed)>;

IdentityReport check_mecke(const JumpDensity& model, const MeckeFunctional& functional, long n,
                           std::uint64_t seed, int workers = 1);

IdentityReport check_bivariate_mecke(const JumpDensity& model,
                                     const BivariateMeckeFunctional& functional, long n,
                                     std::uint64_t seed, int workers = 1);

IdentityReport check_split_identity(const JumpDensity& model, const SplitFunctional& functional,
                                    long n, std::uint64_t seed,
                                    const PathBatchSampler* conditioned = nullptr, int workers = 1);

IdentityReport check_density_reweighting(const JumpDensity& model, const ConfigFunctional& functional,
                                         std::shared_ptr<const DensityModel> phi, long n,
                                         std::uint64_t seed, int workers = 1);

IdentityReport check_diminished_density(const JumpDensity& model, double c, double epsilon,
                                        const ConfigFunctional& functional, long n,
                                        std::uint64_t seed, int workers = 1);

IdentityReport check_perou_identity(const JumpDensity& model, double damping,
                                    const OUFunctional& functional, long n, std::uint64_t seed,
                                    int workers = 1);

}  // namespace levybridge
