#pragma once

#include "antnav/cx.hpp"
#include "antnav/mb.hpp"
#include "antnav/render.hpp"
#include "antnav/scene.hpp"
#include "antnav/sim.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace antnav {

enum class Variant { full, odometry_collision, odometry_only };
const char *to_string(Variant variant);
// Accepts "full", "odom-collision", "odom-only" (and the underscore spellings).
Variant variant_from_string(std::string_view name);

struct AgentConfig {
    Variant variant = Variant::full;
    Consolidation consolidation = Consolidation::selective;
    MbParams mb;
    CxParams cx;
    Regime regime = Regime::discrete;
    CameraConfig camera;
    // Present for perturbation studies (continuous regime): every episode then
    // runs max_trials trials regardless of consolidation.
    std::optional<Perturbation> perturbation;
    int max_frames = 500;
    int max_trials = 20;

    RobotSpec robot() const { return RobotSpec::for_regime(regime); }
    nlohmann::json to_json() const;
};

struct FrameRecord {
    long frame = 0;
    Pose pose;
    Action action = Action::forward;  // discrete
    Control control;                   // continuous (omega after perturbation)
    bool collision = false;
    double gamma = 0.0;
    double z_left = 1.0;
    double z_right = 1.0;
    CxMode mode = CxMode::goal;
};

struct TrialResult {
    int trial = 0;  // 1-based
    bool success = false;
    double path_length = 0.0;
    double geodesic = 0.0;
    double spl = 0.0;
    int collisions = 0;
    int frames_used = 0;
    bool consolidated = false;
    std::vector<FrameRecord> trace;
};

enum class Termination { ltm_stale, max_trials, single_trial };
const char *to_string(Termination reason);

struct EpisodeResult {
    std::vector<TrialResult> trials;
    Termination terminated = Termination::max_trials;
    double best_spl = 0.0;
    std::vector<bool> consolidation_log;
    // Checkpoint mode: SPL of the restored (best) checkpoint.
    std::optional<double> restored_spl;
    std::optional<int> restored_trial;

    const TrialResult &first() const { return trials.front(); }
    // Highest-SPL trial, earliest on ties.
    const TrialResult &learnt() const;
    const TrialResult &last() const { return trials.back(); }
};

double compute_spl(bool success, double geodesic, double path_length);

// Owns the per-episode model state: MB (full variant only), CX and the
// perturbation stream.
class Agent {
public:
    Agent(const AgentConfig &config, std::uint64_t episode_seed);

    const AgentConfig &config() const { return config_; }
    MushroomBody *mb() { return mb_ ? &*mb_ : nullptr; }
    const MushroomBody *mb() const { return mb_ ? &*mb_ : nullptr; }
    const CentralComplex &cx() const { return cx_; }

    TrialResult run_trial(const EpisodeSpec &spec, bool record_trace = false);

private:
    AgentConfig config_;
    RobotSpec robot_;
    std::optional<MushroomBody> mb_;
    CentralComplex cx_;
    Rng noise_rng_;
};

struct EpisodeOptions {
    bool record_traces = false;
};

EpisodeResult run_episode(const EpisodeSpec &spec, const AgentConfig &config, std::uint64_t episode_seed,
                          const EpisodeOptions &options = {});

struct Difficulty {
    double complexity_ratio = 1.0;
    double odometry_only_spl = 0.0;
};
Difficulty difficulty(const EpisodeSpec &spec, Regime regime = Regime::discrete);

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

struct SuiteEpisode {
    std::string label;
    EpisodeSpec spec;
};

struct Suite {
    std::string name = "suite";
    std::vector<SuiteEpisode> episodes;
};

// JSON suite file:
// {"name": "...", "episodes": [{"kind": "concave_obstacle", "seed": 1, "size": 32},
//                              {"scene": "room.txt", "start": [x, y, heading], "goal": [x, y]}],
//  "generate": {"kinds": ["convex_obstacle", ...], "count": 50, "size": 32, "seed": 7}}
// Generated entries and the generate block also accept "clutter_blocks".
// Relative scene paths resolve against the suite file's directory.
Suite load_suite(const std::filesystem::path &path);
Suite parse_suite(const nlohmann::json &json, const std::filesystem::path &base_dir = {});
// `count` episodes cycling through `kinds`, seeds derived from `seed`.
Suite generate_suite(const std::vector<SceneKind> &kinds, int count, int size, std::uint64_t seed,
                     std::string name = "generated", const GenerationOptions &options = {});

struct SuiteConfig {
    AgentConfig agent;
    std::vector<Variant> variants{Variant::full};
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0 = hardware concurrency
    bool record_traces = false;
};

struct VariantSummary {
    Variant variant = Variant::full;
    int episodes = 0;
    double first_sr = 0.0;
    double first_spl = 0.0;
    double learnt_sr = 0.0;
    double learnt_spl = 0.0;
    long first_collisions = 0;
    long learnt_collisions = 0;
    long total_collisions = 0;
    double mean_trials = 0.0;
    // Restricted to episodes the odometry-collision variant fails (when run).
    int hard_episodes = 0;
    double hard_first_sr = 0.0;
    double hard_learnt_sr = 0.0;
    double hard_learnt_spl = 0.0;
};

struct SuiteResult {
    std::vector<Variant> variants;
    std::vector<std::string> labels;
    // results[v][e]
    std::vector<std::vector<EpisodeResult>> results;
    std::vector<bool> hard;  // per episode; empty when odometry-collision was not run

    std::vector<VariantSummary> summarize() const;
    const std::vector<EpisodeResult> &of(Variant variant) const;
};

std::uint64_t episode_seed(std::uint64_t suite_seed, std::size_t episode_index);

SuiteResult run_suite(const Suite &suite, const SuiteConfig &config);

// summary.csv: episode,trial,variant,sr,spl,collisions,frames
std::string summary_csv(const SuiteResult &result);
std::string summary_table_csv(const SuiteResult &result);
void write_trace_csv(const TrialResult &trial, const std::filesystem::path &path);
// Writes summary.csv, summary_table.csv, manifest.json and (when recorded) traces/.
void write_suite_outputs(const Suite &suite, const SuiteConfig &config, const SuiteResult &result,
                         const std::filesystem::path &out_dir);

}  // namespace antnav
