#pragma once

#include "antnav/geometry.hpp"
#include "antnav/rng.hpp"
#include "antnav/scene.hpp"

#include <optional>
#include <string_view>
#include <variant>

namespace antnav {

enum class Regime { discrete, continuous };
const char *to_string(Regime regime);
Regime regime_from_string(std::string_view name);

// Discrete: v_max in metres per frame, omega_max in radians per frame.
// Continuous: SI units, with first-order actuator lag.
struct RobotSpec {
    Regime regime = Regime::discrete;
    double footprint_diameter = 0.2;
    double v_max = 0.25;
    double omega_max = deg_to_rad(10.0);
    double control_hz = 30.0;
    double physics_hz = 120.0;
    double actuator_tau = 0.1;        // s
    double contact_threshold = 1e-4;  // summed penetration per control tick, m

    double radius() const { return footprint_diameter / 2.0; }
    int substeps() const { return static_cast<int>(std::lround(physics_hz / control_hz)); }

    static RobotSpec discrete_default();
    static RobotSpec continuous_default();
    static RobotSpec for_regime(Regime regime);
};

enum class Action { forward, turn_left, turn_right };
const char *to_string(Action action);

// Normalised command, both in [-1, 1]. Positive omega turns clockwise.
struct Control {
    double v = 0.0;
    double omega = 0.0;
};

using Command = std::variant<Action, Control>;

struct RobotState {
    Pose pose;
    double speed = 0.0;     // m/s along the heading (continuous only)
    double yaw_rate = 0.0;  // rad/s, counter-clockwise (continuous only)
};

// Steering perturbation on the angular command:
// omega_motor = clip((omega + bias) * n, -1, 1), n ~ Lognormal(0, sigma^2).
struct Perturbation {
    double bias = 0.0;
    double sigma = 0.0;
};

struct StepResult {
    RobotState state;
    std::optional<double> gamma;   // collision direction, away from the obstacle
    double displacement = 0.0;     // |end - start| for this frame
    double omega_motor = 0.0;      // continuous only
};

// Disc motion against the grid with tangential sliding. `penetration` sums
// the resolved overlap vectors (outward normals scaled by depth).
struct DiscMove {
    Vec2 position;
    Vec2 penetration;
    double travelled = 0.0;
};
DiscMove move_disc(const Scene &scene, Vec2 position, Vec2 delta, double radius);

// Largest overlap of a disc at `position` with any wall cell.
double wall_penetration(const Scene &scene, Vec2 position, double radius);

StepResult step_discrete(const Scene &scene, const RobotSpec &spec, const Pose &pose, Action action);

StepResult step_continuous(const Scene &scene, const RobotSpec &spec, const RobotState &state, Control control,
                           const Perturbation &perturbation, Rng &rng);

// Steering noise multiplier; exactly 1 when sigma == 0.
double lognormal_draw(Rng &rng, double sigma);
double perturb_omega(double omega, const Perturbation &perturbation, double noise);

Action controller_map_discrete(double delta_sigma, const RobotSpec &spec);
Control controller_map_continuous(double delta_sigma);
Command controller_map(double delta_sigma, const RobotSpec &spec);

}  // namespace antnav
