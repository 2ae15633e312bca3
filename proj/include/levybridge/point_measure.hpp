#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace levybridge {

class Rng;

// Atom of a space-time configuration: (jump time, jump size).
struct SpaceTimeAtom {
    double time = 0.0;
    double size = 0.0;
};

// Finite point configuration on the real line (atoms are sizes).
// Immutable after construction; transforms return new values. Atom identity
// is the index: the continuous laws used here make value collisions null
// events, and factorial pairs skip identical indices, not identical values.
class SizeConfiguration {
public:
    SizeConfiguration() = default;
    explicit SizeConfiguration(std::vector<double> atoms) : atoms_(std::move(atoms)) {}

    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }
    double atom(std::size_t i) const;
    const std::vector<double>& atoms() const { return atoms_; }

private:
    std::vector<double> atoms_;
};

// Finite point configuration on [0,1] x R\{0}.
class SpaceTimeConfiguration {
public:
    SpaceTimeConfiguration() = default;
    explicit SpaceTimeConfiguration(std::vector<SpaceTimeAtom> atoms);

    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }
    const SpaceTimeAtom& atom(std::size_t i) const;
    const std::vector<SpaceTimeAtom>& atoms() const { return atoms_; }

private:
    std::vector<SpaceTimeAtom> atoms_;
};

// First moment B: sum of atom values (sizes in space-time mode); B(empty) = 0.
double first_moment(const SizeConfiguration& config);
double first_moment(const SpaceTimeConfiguration& config);

// All ordered off-diagonal atom pairs; n(n-1) entries for n atoms.
std::vector<std::pair<double, double>> factorial_pairs(const SizeConfiguration& config);
std::vector<std::pair<SpaceTimeAtom, SpaceTimeAtom>> factorial_pairs(const SpaceTimeConfiguration& config);

// Replace the atom at `index` by gamma_prime and gamma - gamma_prime.
// Preserves the first moment; cardinality grows by one. An invalid index is
// a programming bug, signalled by std::out_of_range.
SizeConfiguration split_atom(const SizeConfiguration& config, std::size_t index, double gamma_prime);

// Remove one uniformly chosen atom. Empty input is a domain error.
std::pair<double, SizeConfiguration> remove_random_atom(const SizeConfiguration& config, Rng& rng);
std::pair<SpaceTimeAtom, SpaceTimeConfiguration> remove_random_atom(const SpaceTimeConfiguration& config, Rng& rng);

// JSON array-of-atoms serialization: [v, ...] resp. [[t, size], ...].
std::string to_json(const SizeConfiguration& config);
std::string to_json(const SpaceTimeConfiguration& config);

}  // namespace levybridge
