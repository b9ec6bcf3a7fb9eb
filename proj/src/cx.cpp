#include "antnav/cx.hpp"

#include <stdexcept>

namespace antnav {

double goal_bearing(const Pose &pose, Vec2 goal)
{
    const Vec2 d = goal - pose.position();
    if (d.x == 0.0 && d.y == 0.0)
        return pose.heading;
    return d.angle();
}

double modulation(const MbonOutput &z)
{
    return kPi * (z.left - z.right);
}

Side collision_side(double gamma, double heading)
{
    const double relative = wrap_angle(gamma + kPi - heading);
    return (relative > 0.0 && relative < kPi) ? Side::left : Side::right;
}

double CentralComplex::escape_target(long t) const
{
    if (!escape_)
        throw std::logic_error("escape_target called outside an escape");
    const long elapsed = t - escape_->t_c;
    if (elapsed < 0 || elapsed > params_.tau_c)
        throw std::logic_error("escape_target called outside the escape window");
    const double progress = params_.tau_c > 0 ? static_cast<double>(elapsed) / params_.tau_c : 1.0;
    return wrap_angle(escape_->gamma_c + escape_->perpendicular * progress);
}

SteeringCommand CentralComplex::desired_rotation(const Pose &pose, Vec2 goal, const std::optional<MbonOutput> &z,
                                                 long t)
{
    double theta = 0.0;
    double phi = 0.0;
    if (escape_) {
        theta = escape_target(t);
    } else {
        theta = goal_bearing(pose, goal);
        if (z) {
            ++modulation_reads_;
            phi = modulation(*z);
        }
    }
    return {wrap_angle(theta - pose.heading + phi)};
}

Side CentralComplex::on_collision(double gamma, const Pose &pose, Vec2 goal, long t)
{
    const Side side = collision_side(gamma, pose.heading);
    const double bearing = goal_bearing(pose, goal);
    const double to_plus = std::abs(wrap_angle(gamma + kPi / 2.0 - bearing));
    const double to_minus = std::abs(wrap_angle(gamma - kPi / 2.0 - bearing));
    double perpendicular;
    if (std::abs(to_plus - to_minus) > 1e-12) {
        perpendicular = to_plus < to_minus ? kPi / 2.0 : -kPi / 2.0;
    } else {
        // Tie: the perpendicular on the robot's left.
        const double left = pose.heading + kPi / 2.0;
        perpendicular = std::abs(wrap_angle(gamma + kPi / 2.0 - left)) <= std::abs(wrap_angle(gamma - kPi / 2.0 - left))
                            ? kPi / 2.0
                            : -kPi / 2.0;
    }
    escape_ = EscapeState{t, wrap_angle(gamma), side, perpendicular};
    return side;
}

std::optional<Side> CentralComplex::poll_escape_complete(long t)
{
    if (!escape_ || t - escape_->t_c < params_.tau_c)
        return std::nullopt;
    const Side reward_side = opposite(escape_->collision_side);
    escape_.reset();
    return reward_side;
}

}  // namespace antnav
