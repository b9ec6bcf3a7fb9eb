#include "antnav/sim.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

namespace antnav {

const char *to_string(Regime regime)
{
    return regime == Regime::discrete ? "discrete" : "continuous";
}

Regime regime_from_string(std::string_view name)
{
    if (name == "discrete")
        return Regime::discrete;
    if (name == "continuous")
        return Regime::continuous;
    throw std::invalid_argument("unknown regime: " + std::string(name));
}

const char *to_string(Action action)
{
    switch (action) {
    case Action::forward: return "forward";
    case Action::turn_left: return "turn_left";
    case Action::turn_right: return "turn_right";
    }
    return "?";
}

RobotSpec RobotSpec::discrete_default()
{
    return RobotSpec{};
}

RobotSpec RobotSpec::continuous_default()
{
    RobotSpec spec;
    spec.regime = Regime::continuous;
    spec.footprint_diameter = 0.1677;
    spec.v_max = 2.133;
    spec.omega_max = 11.469;
    return spec;
}

RobotSpec RobotSpec::for_regime(Regime regime)
{
    return regime == Regime::discrete ? discrete_default() : continuous_default();
}

// ---------------------------------------------------------------------------
// Contact resolution
// ---------------------------------------------------------------------------

namespace {

// Push the disc out of every overlapping wall cell; returns the summed push.
Vec2 resolve(const Scene &scene, Vec2 &p, double radius)
{
    const double s = scene.cell_size();
    Vec2 total;
    for (int pass = 0; pass < 4; ++pass) {
        bool moved = false;
        const int x0 = scene.cell_x(p.x - radius);
        const int x1 = scene.cell_x(p.x + radius);
        const int y0 = scene.cell_y(p.y - radius);
        const int y1 = scene.cell_y(p.y + radius);
        // Deepest overlap first keeps corner handling order-independent.
        double best_depth = 0.0;
        Vec2 best_push;
        for (int cy = y0; cy <= y1; ++cy) {
            for (int cx = x0; cx <= x1; ++cx) {
                if (!scene.is_wall(cx, cy))
                    continue;
                const double bx0 = cx * s;
                const double by0 = cy * s;
                const Vec2 closest{std::clamp(p.x, bx0, bx0 + s), std::clamp(p.y, by0, by0 + s)};
                const Vec2 d = p - closest;
                const double dist = d.norm();
                Vec2 push;
                double depth = 0.0;
                if (dist > 0.0) {
                    if (dist >= radius)
                        continue;
                    depth = radius - dist;
                    push = d * (depth / dist);
                } else {
                    // Centre inside the cell: leave through the nearest face.
                    const double left = p.x - bx0, right = bx0 + s - p.x;
                    const double down = p.y - by0, up = by0 + s - p.y;
                    const double m = std::min({left, right, down, up});
                    depth = m + radius;
                    if (m == left) push = {-depth, 0.0};
                    else if (m == right) push = {depth, 0.0};
                    else if (m == down) push = {0.0, -depth};
                    else push = {0.0, depth};
                }
                if (depth > best_depth) {
                    best_depth = depth;
                    best_push = push;
                }
            }
        }
        if (best_depth > 0.0) {
            p += best_push;
            total += best_push;
            moved = true;
        }
        if (!moved)
            break;
    }
    return total;
}

}  // namespace

double wall_penetration(const Scene &scene, Vec2 position, double radius)
{
    const double s = scene.cell_size();
    double worst = 0.0;
    for (int cy = scene.cell_y(position.y - radius); cy <= scene.cell_y(position.y + radius); ++cy)
        for (int cx = scene.cell_x(position.x - radius); cx <= scene.cell_x(position.x + radius); ++cx) {
            if (!scene.is_wall(cx, cy))
                continue;
            const Vec2 closest{std::clamp(position.x, cx * s, (cx + 1) * s), std::clamp(position.y, cy * s, (cy + 1) * s)};
            const double dist = distance(position, closest);
            worst = std::max(worst, dist > 0.0 ? radius - dist : radius);
        }
    return worst;
}

DiscMove move_disc(const Scene &scene, Vec2 position, Vec2 delta, double radius)
{
    DiscMove out{position, {}, 0.0};
    const double length = delta.norm();
    if (length == 0.0)
        return out;
    // Substeps well under the radius so thin walls cannot be tunnelled.
    const double max_step = std::min(0.02, radius * 0.25);
    const int steps = std::max(1, static_cast<int>(std::ceil(length / max_step)));
    const Vec2 step = delta * (1.0 / steps);
    Vec2 p = position;
    for (int i = 0; i < steps; ++i) {
        const Vec2 before = p;
        p += step;
        out.penetration += resolve(scene, p, radius);
        out.travelled += distance(before, p);
    }
    out.position = p;
    return out;
}

// ---------------------------------------------------------------------------
// Kinematics
// ---------------------------------------------------------------------------

StepResult step_discrete(const Scene &scene, const RobotSpec &spec, const Pose &pose, Action action)
{
    StepResult result;
    result.state.pose = pose;
    switch (action) {
    case Action::turn_left:
        result.state.pose.heading = wrap_angle(pose.heading + spec.omega_max);
        return result;
    case Action::turn_right:
        result.state.pose.heading = wrap_angle(pose.heading - spec.omega_max);
        return result;
    case Action::forward: break;
    }
    const Vec2 start = pose.position();
    const Vec2 anticipated = start + unit(pose.heading) * spec.v_max;
    const DiscMove move = move_disc(scene, start, anticipated - start, spec.radius());
    result.state.pose.x = move.position.x;
    result.state.pose.y = move.position.y;
    result.displacement = distance(start, move.position);
    const Vec2 residual = move.position - anticipated;
    if (residual.norm() > 1e-9)
        result.gamma = residual.angle();
    return result;
}

double lognormal_draw(Rng &rng, double sigma)
{
    if (sigma < 0.0)
        throw std::invalid_argument("sigma must be non-negative");
    if (sigma == 0.0)
        return 1.0;
    std::lognormal_distribution<double> dist(0.0, sigma);
    return dist(rng.engine());
}

double perturb_omega(double omega, const Perturbation &perturbation, double noise)
{
    return std::clamp((omega + perturbation.bias) * noise, -1.0, 1.0);
}

StepResult step_continuous(const Scene &scene, const RobotSpec &spec, const RobotState &state, Control control,
                           const Perturbation &perturbation, Rng &rng)
{
    if (std::abs(control.v) > 1.0 + 1e-12 || std::abs(control.omega) > 1.0 + 1e-12)
        throw std::invalid_argument("control must lie in [-1, 1]^2");

    StepResult result;
    result.omega_motor = perturb_omega(control.omega, perturbation, lognormal_draw(rng, perturbation.sigma));
    const double target_speed = control.v * spec.v_max;
    const double target_yaw_rate = -result.omega_motor * spec.omega_max;

    const int substeps = spec.substeps();
    const double dt = 1.0 / spec.physics_hz;
    const double blend = spec.actuator_tau > 0.0 ? 1.0 - std::exp(-dt / spec.actuator_tau) : 1.0;

    RobotState s = state;
    Vec2 contact;
    for (int i = 0; i < substeps; ++i) {
        s.speed += (target_speed - s.speed) * blend;
        s.yaw_rate += (target_yaw_rate - s.yaw_rate) * blend;
        s.pose.heading = wrap_angle(s.pose.heading + s.yaw_rate * dt);
        const DiscMove move = move_disc(scene, s.pose.position(), unit(s.pose.heading) * (s.speed * dt), spec.radius());
        s.pose.x = move.position.x;
        s.pose.y = move.position.y;
        contact += move.penetration;
    }
    result.state = s;
    result.displacement = distance(state.pose.position(), s.pose.position());
    if (contact.norm() >= spec.contact_threshold)
        result.gamma = contact.angle();
    return result;
}

Action controller_map_discrete(double delta_sigma, const RobotSpec &spec)
{
    // Slack so a request of exactly one turn step still turns.
    if (std::abs(delta_sigma) >= spec.omega_max - 1e-12)
        return delta_sigma > 0.0 ? Action::turn_left : Action::turn_right;
    return Action::forward;
}

Control controller_map_continuous(double delta_sigma)
{
    return {std::cos(delta_sigma), -std::sin(delta_sigma)};
}

Command controller_map(double delta_sigma, const RobotSpec &spec)
{
    if (spec.regime == Regime::discrete)
        return controller_map_discrete(delta_sigma, spec);
    return controller_map_continuous(delta_sigma);
}

}  // namespace antnav
