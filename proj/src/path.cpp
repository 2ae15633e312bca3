#include "levybridge/path.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

namespace levybridge {

namespace {
void check_damping(double c) {
    if (c == 0.0) throw std::invalid_argument("OUPath: damping must be nonzero");
    if (!(std::abs(c) < 700.0)) throw std::invalid_argument("OUPath: |damping| too large, e^c overflows");
}
}  // namespace

JumpPath::JumpPath(double initial_value, std::vector<Jump> jumps)
    : initial_(initial_value), jumps_(std::move(jumps)) {
    std::sort(jumps_.begin(), jumps_.end(), [](const Jump& a, const Jump& b) { return a.time < b.time; });
    for (std::size_t i = 0; i < jumps_.size(); ++i) {
        if (jumps_[i].size == 0.0) throw std::invalid_argument("JumpPath: zero jump size");
        if (!(jumps_[i].time > 0.0 && jumps_[i].time <= 1.0))
            throw std::invalid_argument("JumpPath: jump time outside (0,1]");
        if (i > 0 && jumps_[i].time == jumps_[i - 1].time)
            throw std::invalid_argument("JumpPath: duplicate jump times");
    }
}

double JumpPath::terminal_value() const {
    double v = initial_;
    for (const auto& j : jumps_) v += j.size;
    return v;
}

double JumpPath::value_at(double t) const {
    double v = initial_;
    for (const auto& j : jumps_) {
        if (j.time > t) break;
        v += j.size;
    }
    return v;
}

double JumpPath::sup_abs() const {
    double v = initial_;
    double m = std::abs(v);
    for (const auto& j : jumps_) {
        v += j.size;
        m = std::max(m, std::abs(v));
    }
    return m;
}

void JumpPath::write_csv(std::ostream& os, int grid_points) const {
    os << "t,value\n";
    char buf[80];
    auto row = [&](double t, double v) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, v);
        os << buf;
    };
    std::size_t next_jump = 0;
    double level = initial_;
    for (int i = 0; i < grid_points; ++i) {
        const double t = static_cast<double>(i) / (grid_points - 1);
        while (next_jump < jumps_.size() && jumps_[next_jump].time <= t) {
            row(jumps_[next_jump].time, level);  // left limit
            level += jumps_[next_jump].size;
            row(jumps_[next_jump].time, level);  // cadlag value
            ++next_jump;
        }
        row(t, level);
    }
}

JumpPath path_from_configuration(double initial_value, const SpaceTimeConfiguration& config) {
    std::vector<Jump> jumps;
    jumps.reserve(config.size());
    for (const auto& a : config.atoms()) jumps.push_back({a.time, a.size});
    try {
        return JumpPath(initial_value, std::move(jumps));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("path_from_configuration: ") + e.what());
    }
}

SpaceTimeConfiguration configuration_of(const JumpPath& path) {
    std::vector<SpaceTimeAtom> atoms;
    atoms.reserve(path.jump_count());
    for (const auto& j : path.jumps()) atoms.push_back({j.time, j.size});
    return SpaceTimeConfiguration(std::move(atoms));
}

JumpPath split_jump(const JumpPath& path, std::size_t jump_index, double s1, double x1, double s2) {
    if (jump_index >= path.jump_count()) throw std::out_of_range("split_jump: bad jump index");
    const double delta = path.jumps()[jump_index].size;
    if (x1 == 0.0 || x1 == delta) throw ResampleNeeded("split_jump: forbidden x1");
    if (s1 == s2) throw ResampleNeeded("split_jump: coinciding new jump times");
    std::vector<Jump> jumps;
    jumps.reserve(path.jump_count() + 1);
    for (std::size_t k = 0; k < path.jump_count(); ++k) {
        if (k == jump_index) continue;
        const double t = path.jumps()[k].time;
        if (t == s1 || t == s2) throw ResampleNeeded("split_jump: new time collides with a jump");
        jumps.push_back(path.jumps()[k]);
    }
    jumps.push_back({s1, x1});
    jumps.push_back({s2, delta - x1});
    return JumpPath(path.initial_value(), std::move(jumps));
}

JumpPath merge_jumps(const JumpPath& path, std::size_t i, std::size_t j, double t) {
    if (i == j || i >= path.jump_count() || j >= path.jump_count())
        throw std::out_of_range("merge_jumps: bad jump indices");
    const double merged = path.jumps()[i].size + path.jumps()[j].size;
    if (merged == 0.0) throw ResampleNeeded("merge_jumps: merged size vanishes");
    std::vector<Jump> jumps;
    jumps.reserve(path.jump_count() - 1);
    for (std::size_t k = 0; k < path.jump_count(); ++k) {
        if (k == i || k == j) continue;
        if (path.jumps()[k].time == t) throw ResampleNeeded("merge_jumps: time collides with a jump");
        jumps.push_back(path.jumps()[k]);
    }
    jumps.push_back({t, merged});
    return JumpPath(path.initial_value(), std::move(jumps));
}

// ---------------------------------------------------------------------------
// OUPath

OUPath::OUPath(double damping, JumpPath source) : c_(damping), source_(std::move(source)) {
    check_damping(c_);
    x0_ = weighted_prefix(1.0) / (std::exp(c_) - 1.0);
    if (!std::isfinite(x0_)) throw std::invalid_argument("OUPath: overflow forming the periodic value");
}

double OUPath::weighted_prefix(double t) const {
    double s = 0.0;
    for (const auto& j : source_.jumps()) {
        if (j.time > t) break;
        s += std::exp(c_ * j.time) * j.size;
    }
    return s;
}

double OUPath::terminal_value() const { return value_at(1.0); }

double OUPath::value_at(double t) const {
    return std::exp(-c_ * t) * (x0_ + weighted_prefix(t));
}

double OUPath::sup_abs() const {
    // between jumps X_t = e^{-c(t - t_k)} X_{t_k} is monotone, so the sup is
    // attained at interval endpoints (one-sided limits at jumps included)
    double m = std::abs(x0_);
    double acc = x0_;
    for (const auto& j : source_.jumps()) {
        const double decay = std::exp(-c_ * j.time);
        m = std::max(m, std::abs(acc * decay));  // left limit at j.time
        acc += std::exp(c_ * j.time) * j.size;
        m = std::max(m, std::abs(acc * decay));  // value at j.time
    }
    m = std::max(m, std::abs(acc * std::exp(-c_)));  // X_1
    return m;
}

void OUPath::write_csv(std::ostream& os, int grid_points) const {
    os << "t,value\n";
    char buf[80];
    auto row = [&](double t, double v) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, v);
        os << buf;
    };
    const auto& jumps = source_.jumps();
    std::size_t next_jump = 0;
    for (int i = 0; i < grid_points; ++i) {
        const double t = static_cast<double>(i) / (grid_points - 1);
        while (next_jump < jumps.size() && jumps[next_jump].time <= t) {
            const double tj = jumps[next_jump].time;
            row(tj, value_at(tj) - jumps[next_jump].size);  // left limit
            row(tj, value_at(tj));
            ++next_jump;
        }
        row(t, value_at(t));
    }
}

OUPath ou_map(double damping, const JumpPath& source) { return OUPath(damping, source); }

std::string to_jsonl(const JumpPath& path) {
    nlohmann::json j;
    j["z0"] = path.initial_value();
    auto arr = nlohmann::json::array();
    for (const auto& jp : path.jumps()) arr.push_back({jp.time, jp.size});
    j["jumps"] = std::move(arr);
    return j.dump();
}

JumpPath jump_path_from_jsonl(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    std::vector<Jump> jumps;
    for (const auto& e : j.at("jumps")) jumps.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    return JumpPath(j.at("z0").get<double>(), std::move(jumps));
}

}  // namespace levybridge
