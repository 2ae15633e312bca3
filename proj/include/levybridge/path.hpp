#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "levybridge/point_measure.hpp"

namespace levybridge {

// Raised when a transform draws a null-event datum (time collision, zero or
// degenerate size) and the caller should redraw.
struct ResampleNeeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Jump {
    double time = 0.0;  // in (0, 1]
    double size = 0.0;  // nonzero
};

// Cadlag pure-jump path on [0,1]: initial value plus time-sorted jumps with
// strictly increasing times. Value semantics; transforms return new paths.
class JumpPath {
public:
    JumpPath() = default;
    JumpPath(double initial_value, std::vector<Jump> jumps);

    double initial_value() const { return initial_; }
    double terminal_value() const;
    double value_at(double t) const;  // cadlag: includes a jump exactly at t
    double sup_abs() const;           // sup over [0,1] of |Z_t|

    std::size_t jump_count() const { return jumps_.size(); }
    const std::vector<Jump>& jumps() const { return jumps_; }

    // t,value CSV on a uniform grid, with both one-sided limits at jump times.
    void write_csv(std::ostream& os, int grid_points = 1024) const;

private:
    double initial_ = 0.0;
    std::vector<Jump> jumps_;
};

JumpPath path_from_configuration(double initial_value, const SpaceTimeConfiguration& config);
SpaceTimeConfiguration configuration_of(const JumpPath& path);

// Replace jump k by (s1, x1) and (s2, size_k - x1). Preserves the terminal
// value and the initial value; jump count grows by one. Collisions and
// forbidden x1 raise ResampleNeeded.
JumpPath split_jump(const JumpPath& path, std::size_t jump_index, double s1, double x1, double s2);

// Replace jumps i and j by one jump at t with the summed size; the summed
// size vanishing is a null event and raises ResampleNeeded.
JumpPath merge_jumps(const JumpPath& path, std::size_t i, std::size_t j, double t);

// Periodized damped path X solving dX = -c X dt + dZ with X_0 = X_1,
// evaluated lazily from the closed form
//   X_0 = (e^c - 1)^{-1} sum_i e^{c s_i} x_i,
//   X_t = e^{-ct} (X_0 + sum_{s_i <= t} e^{c s_i} x_i).
// Jump times/sizes of X coincide with the source path's.
class OUPath {
public:
    OUPath(double damping, JumpPath source);

    double damping() const { return c_; }
    double initial_value() const { return x0_; }
    double terminal_value() const;
    double value_at(double t) const;
    double sup_abs() const;  // exact: X is monotone between jumps

    const JumpPath& source() const { return source_; }
    const std::vector<Jump>& jumps() const { return source_.jumps(); }

    void write_csv(std::ostream& os, int grid_points = 1024) const;

private:
    double weighted_prefix(double t) const;  // sum_{s_i <= t} e^{c s_i} x_i

    double c_ = 0.0;
    JumpPath source_;
    double x0_ = 0.0;
};

OUPath ou_map(double damping, const JumpPath& source);

std::string to_jsonl(const JumpPath& path);
JumpPath jump_path_from_jsonl(const std::string& line);

}  // namespace levybridge
