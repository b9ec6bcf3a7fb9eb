#pragma once

#include "antnav/geometry.hpp"
#include "antnav/mb.hpp"

#include <cstdint>
#include <optional>

namespace antnav {

struct CxParams {
    int tau_c = 20;  // escape duration, frames
};

enum class CxMode { goal, escape };

struct EscapeState {
    long t_c = 0;
    double gamma_c = 0.0;       // away from the obstacle
    Side collision_side = Side::right;
    double perpendicular = 0.0; // +pi/2 or -pi/2, fixed at t_c
};

struct SteeringCommand {
    double delta_sigma = 0.0;   // (-pi, pi], positive = turn left
};

double goal_bearing(const Pose &pose, Vec2 goal);
// pi * (z_left - z_right)
double modulation(const MbonOutput &z);
// Side of the obstacle relative to the heading, given gamma pointing away from it.
Side collision_side(double gamma, double heading);

class CentralComplex {
public:
    explicit CentralComplex(CxParams params = {}) : params_(params) {}

    const CxParams &params() const { return params_; }
    CxMode mode() const { return escape_ ? CxMode::escape : CxMode::goal; }
    const std::optional<EscapeState> &escape() const { return escape_; }

    // Linear sweep from gamma(t_c) to the chosen perpendicular at t_c + tau_c.
    // Throws std::logic_error outside an escape window.
    double escape_target(long t) const;

    // delta_sigma = theta - sigma + phi. phi is only evaluated (and z only
    // read) in goal mode; pass nullopt when the MB pathway is ablated.
    SteeringCommand desired_rotation(const Pose &pose, Vec2 goal, const std::optional<MbonOutput> &z, long t);

    // Enter (or restart) an escape. Returns the side to punish.
    Side on_collision(double gamma, const Pose &pose, Vec2 goal, long t);

    // Call at the start of frame t; when the escape window has elapsed, returns
    // to goal mode and yields the side to reward (opposite the collision).
    std::optional<Side> poll_escape_complete(long t);

    void reset() { escape_.reset(); }

    // Instrumentation: how often MB modulation was evaluated.
    std::uint64_t modulation_reads() const { return modulation_reads_; }

private:
    CxParams params_;
    std::optional<EscapeState> escape_;
    std::uint64_t modulation_reads_ = 0;
};

}  // namespace antnav
