#include "levybridge/point_measure.hpp"

#include <stdexcept>

#include <json.hpp>

#include "levybridge/rng.hpp"

namespace levybridge {

double SizeConfiguration::atom(std::size_t i) const {
    if (i >= atoms_.size()) throw std::out_of_range("SizeConfiguration::atom: index out of range");
    return atoms_[i];
}

SpaceTimeConfiguration::SpaceTimeConfiguration(std::vector<SpaceTimeAtom> atoms)
    : atoms_(std::move(atoms)) {
    for (const auto& a : atoms_) {
        if (a.size == 0.0) throw std::invalid_argument("SpaceTimeConfiguration: zero jump size");
        if (a.time < 0.0 || a.time > 1.0)
            throw std::invalid_argument("SpaceTimeConfiguration: time outside [0,1]");
    }
}

const SpaceTimeAtom& SpaceTimeConfiguration::atom(std::size_t i) const {
    if (i >= atoms_.size()) throw std::out_of_range("SpaceTimeConfiguration::atom: index out of range");
    return atoms_[i];
}

double first_moment(const SizeConfiguration& config) {
    double s = 0.0;
    for (double v : config.atoms()) s += v;
    return s;
}

double first_moment(const SpaceTimeConfiguration& config) {
    double s = 0.0;
    for (const auto& a : config.atoms()) s += a.size;
    return s;
}

namespace {
template <class Config, class Atom>
std::vector<std::pair<Atom, Atom>> ordered_pairs(const Config& config) {
    const std::size_t n = config.size();
    std::vector<std::pair<Atom, Atom>> out;
    out.reserve(n > 1 ? n * (n - 1) : 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) out.emplace_back(config.atom(i), config.atom(j));
    return out;
}
}  // namespace

std::vector<std::pair<double, double>> factorial_pairs(const SizeConfiguration& config) {
    return ordered_pairs<SizeConfiguration, double>(config);
}

std::vector<std::pair<SpaceTimeAtom, SpaceTimeAtom>> factorial_pairs(const SpaceTimeConfiguration& config) {
    return ordered_pairs<SpaceTimeConfiguration, SpaceTimeAtom>(config);
}

SizeConfiguration split_atom(const SizeConfiguration& config, std::size_t index, double gamma_prime) {
    if (index >= config.size()) throw std::out_of_range("split_atom: index out of range");
    std::vector<double> atoms = config.atoms();
    const double gamma = atoms[index];
    atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(index));
    atoms.push_back(gamma_prime);
    atoms.push_back(gamma - gamma_prime);
    return SizeConfiguration(std::move(atoms));
}

std::pair<double, SizeConfiguration> remove_random_atom(const SizeConfiguration& config, Rng& rng) {
    if (config.empty()) throw std::invalid_argument("remove_random_atom: empty configuration");
    const std::size_t k = rng.uniform_index(config.size());
    std::vector<double> atoms = config.atoms();
    const double removed = atoms[k];
    atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(k));
    return {removed, SizeConfiguration(std::move(atoms))};
}

std::pair<SpaceTimeAtom, SpaceTimeConfiguration> remove_random_atom(const SpaceTimeConfiguration& config,
                                                                    Rng& rng) {
    if (config.empty()) throw std::invalid_argument("remove_random_atom: empty configuration");
    const std::size_t k = rng.uniform_index(config.size());
    std::vector<SpaceTimeAtom> atoms = config.atoms();
    const SpaceTimeAtom removed = atoms[k];
    atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(k));
    return {removed, SpaceTimeConfiguration(std::move(atoms))};
}

std::string to_json(const SizeConfiguration& config) {
    nlohmann::json j = nlohmann::json::array();
    for (double v : config.atoms()) j.push_back(v);
    return j.dump();
}

std::string to_json(const SpaceTimeConfiguration& config) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& a : config.atoms()) j.push_back({a.time, a.size});
    return j.dump();
}

}  // namespace levybridge
