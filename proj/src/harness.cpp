#include "antnav/harness.hpp"

#include "antnav/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace antnav {

const char *to_string(Variant variant)
{
    switch (variant) {
    case Variant::full: return "full";
    case Variant::odometry_collision: return "odom-collision";
    case Variant::odometry_only: return "odom-only";
    }
    return "?";
}

Variant variant_from_string(std::string_view name)
{
    if (name == "full")
        return Variant::full;
    if (name == "odom-collision" || name == "odometry_collision" || name == "odometry-collision")
        return Variant::odometry_collision;
    if (name == "odom-only" || name == "odometry_only" || name == "odometry-only")
        return Variant::odometry_only;
    throw std::invalid_argument("unknown variant: " + std::string(name));
}

const char *to_string(Termination reason)
{
    switch (reason) {
    case Termination::ltm_stale: return "ltm_stale";
    case Termination::max_trials: return "max_trials";
    case Termination::single_trial: return "single_trial";
    }
    return "?";
}

nlohmann::json AgentConfig::to_json() const
{
    nlohmann::json j;
    j["variant"] = to_string(variant);
    j["consolidation"] = to_string(consolidation);
    j["regime"] = to_string(regime);
    j["max_frames"] = max_frames;
    j["max_trials"] = max_trials;
    j["mb"] = {{"n_pn", mb.n_pn}, {"n_kc", mb.n_kc}, {"k", mb.k},           {"alpha", mb.alpha},
               {"tau_e", mb.tau_e}, {"fan_in", mb.fan_in}, {"seed", mb.seed}};
    j["cx"] = {{"tau_c", cx.tau_c}};
    j["camera"] = {{"fov", camera.fov},           {"columns", camera.columns},
                   {"rows", camera.rows},         {"max_range", camera.max_range},
                   {"wall_height", camera.wall_height}, {"eye_height", camera.eye_height},
                   {"textures", camera.textures}};
    const RobotSpec r = robot();
    j["robot"] = {{"footprint_diameter", r.footprint_diameter}, {"v_max", r.v_max},
                  {"omega_max", r.omega_max},                   {"control_hz", r.control_hz},
                  {"physics_hz", r.physics_hz},                 {"actuator_tau", r.actuator_tau},
                  {"contact_threshold", r.contact_threshold}};
    if (perturbation)
        j["perturbation"] = {{"bias", perturbation->bias}, {"sigma", perturbation->sigma}};
    else
        j["perturbation"] = nullptr;
    return j;
}

double compute_spl(bool success, double geodesic, double path_length)
{
    if (!success)
        return 0.0;
    const double denom = std::max(geodesic, path_length);
    if (denom <= 0.0)
        return 1.0;
    return geodesic / denom;
}

const TrialResult &EpisodeResult::learnt() const
{
    if (trials.empty())
        throw std::logic_error("episode has no trials");
    const TrialResult *best = &trials.front();
    for (const auto &t : trials)
        if (t.spl > best->spl)
            best = &t;
    return *best;
}

// ---------------------------------------------------------------------------
// Agent
// ---------------------------------------------------------------------------

Agent::Agent(const AgentConfig &config, std::uint64_t episode_seed)
    : config_(config), robot_(config.robot()), cx_(config.cx), noise_rng_(derive_seed(episode_seed, 2))
{
    if (config_.variant == Variant::full) {
        MbParams params = config_.mb;
        params.n_pn = config_.camera.pixel_count();
        params.seed = derive_seed(config_.mb.seed ^ episode_seed, 1);
        mb_.emplace(params);
    }
}

TrialResult Agent::run_trial(const EpisodeSpec &spec, bool record_trace)
{
    const Scene &scene = *spec.scene;
    const bool vision = mb_.has_value();
    const bool escapes = config_.variant != Variant::odometry_only;
    const Perturbation perturbation = config_.perturbation.value_or(Perturbation{});

    TrialResult result;
    result.geodesic = geodesic_distance(scene, spec.start.position(), spec.goal).value_or(0.0);
    cx_.reset();
    RobotState state{spec.start, 0.0, 0.0};
    state.pose.heading = wrap_angle(state.pose.heading);
    if (record_trace)
        result.trace.reserve(static_cast<std::size_t>(config_.max_frames));

    for (long t = 0; t < config_.max_frames; ++t) {
        FrameRecord record;
        record.frame = t;

        KcActivity kc;
        std::optional<MbonOutput> z;
        if (vision)
            kc = mb_->encode(preprocess(render_view(scene, state.pose, config_.camera)).values);
        if (auto reward_side = cx_.poll_escape_complete(t); reward_side && vision)
            mb_->reward(*reward_side, kc);
        if (vision) {
            mb_->observe(kc);
            z = mb_->read_out(kc);
        }
        record.mode = cx_.mode();
        const SteeringCommand steer = cx_.desired_rotation(state.pose, spec.goal, z, t);

        const Vec2 before = state.pose.position();
        StepResult step;
        if (robot_.regime == Regime::discrete) {
            record.action = controller_map_discrete(steer.delta_sigma, robot_);
            step = step_discrete(scene, robot_, state.pose, record.action);
        } else {
            record.control = controller_map_continuous(steer.delta_sigma);
            step = step_continuous(scene, robot_, state, record.control, perturbation, noise_rng_);
            record.control.omega = step.omega_motor;
        }
        state = step.state;
        result.path_length += distance(before, state.pose.position());

        if (step.gamma) {
            ++result.collisions;
            record.collision = true;
            record.gamma = *step.gamma;
            if (escapes) {
                const Side side = cx_.on_collision(*step.gamma, state.pose, spec.goal, t);
                if (vision)
                    mb_->punish(side);
            }
        }

        record.pose = state.pose;
        if (z) {
            record.z_left = z->left;
            record.z_right = z->right;
        }
        if (record_trace)
            result.trace.push_back(record);

        result.frames_used = static_cast<int>(t + 1);
        if (distance(state.pose.position(), spec.goal) <= spec.catchment_radius) {
            result.success = true;
            break;
        }
    }
    result.spl = compute_spl(result.success, result.geodesic, result.path_length);
    return result;
}

EpisodeResult run_episode(const EpisodeSpec &spec, const AgentConfig &config, std::uint64_t episode_seed,
                          const EpisodeOptions &options)
{
    Agent agent(config, episode_seed);
    EpisodeResult out;
    const bool ablated = config.variant != Variant::full;
    const bool fixed_length = config.perturbation.has_value();
    const int max_trials = (ablated && !fixed_length) ? 1 : std::max(1, config.max_trials);
    const bool checkpointing = !ablated && config.consolidation == Consolidation::checkpoint;
    CheckpointLog log;

    double best = 0.0;
    for (int trial = 1; trial <= max_trials; ++trial) {
        std::optional<PlasticState> before;
        if (checkpointing)
            before = agent.mb()->state();

        TrialResult result = agent.run_trial(spec, options.record_traces);
        result.trial = trial;
        bool consolidated = false;
        if (MushroomBody *mb = agent.mb()) {
            // Checkpoint mode consolidates selectively while logging every trial.
            consolidated = mb->end_trial(result.spl, best, config.consolidation);
            if (checkpointing)
                log.record(trial, result.spl, *before);
        }
        result.consolidated = consolidated;
        out.consolidation_log.push_back(consolidated);
        best = std::max(best, result.spl);
        out.trials.push_back(std::move(result));

        if (ablated && !fixed_length) {
            out.terminated = Termination::single_trial;
            break;
        }
        // Trial 1 has no predecessor to judge, so staleness is checked from trial 2.
        if (!fixed_length && config.consolidation == Consolidation::selective && trial > 1 && !consolidated) {
            out.terminated = Termination::ltm_stale;
            break;
        }
    }
    out.best_spl = best;
    if (checkpointing) {
        if (const auto *entry = log.best()) {
            out.restored_spl = entry->spl;
            out.restored_trial = entry->trial;
            log.restore_best(*agent.mb());
        }
    }
    return out;
}

Difficulty difficulty(const EpisodeSpec &spec, Regime regime)
{
    AgentConfig config;
    config.variant = Variant::odometry_only;
    config.regime = regime;
    Agent agent(config, 0);
    const TrialResult trial = agent.run_trial(spec);
    return {complexity_ratio(spec), trial.spl};
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

Suite generate_suite(const std::vector<SceneKind> &kinds, int count, int size, std::uint64_t seed, std::string name,
                     const GenerationOptions &options)
{
    if (kinds.empty())
        throw std::invalid_argument("generate_suite needs at least one scene kind");
    Suite suite;
    suite.name = std::move(name);
    for (int i = 0; i < count; ++i) {
        const SceneKind kind = kinds[static_cast<std::size_t>(i) % kinds.size()];
        const std::uint64_t scene_seed = derive_seed(seed, static_cast<std::uint64_t>(i)) % 1000000;
        suite.episodes.push_back({std::string(to_string(kind)) + "-" + std::to_string(scene_seed),
                                  make_episode(kind, scene_seed, size, options)});
    }
    return suite;
}

Suite parse_suite(const nlohmann::json &json, const std::filesystem::path &base_dir)
{
    Suite suite;
    suite.name = json.value("name", std::string("suite"));
    if (json.contains("episodes")) {
        for (const auto &entry : json.at("episodes")) {
            if (entry.contains("kind")) {
                const SceneKind kind = scene_kind_from_string(entry.at("kind").get<std::string>());
                const auto seed = entry.value("seed", std::uint64_t{0});
                const int size = entry.value("size", 32);
                const GenerationOptions options{entry.value("clutter_blocks", 0)};
                suite.episodes.push_back({entry.value("label", std::string(to_string(kind)) + "-" + std::to_string(seed)),
                                          make_episode(kind, seed, size, options)});
                continue;
            }
            std::filesystem::path scene_path = entry.at("scene").get<std::string>();
            if (scene_path.is_relative())
                scene_path = base_dir / scene_path;
            auto scene = std::make_shared<const Scene>(load_scene(scene_path));
            const auto start = entry.at("start").get<std::vector<double>>();
            const auto goal = entry.at("goal").get<std::vector<double>>();
            if (start.size() < 2 || goal.size() != 2)
                throw std::invalid_argument("episode start must be [x, y(, heading)] and goal [x, y]");
            EpisodeSpec spec{scene, Pose{start[0], start[1], wrap_angle(start.size() > 2 ? start[2] : 0.0)},
                             Vec2{goal[0], goal[1]}, entry.value("catchment_radius", kDefaultCatchmentRadius)};
            validate_episode(spec);
            suite.episodes.push_back({entry.value("label", scene->name()), std::move(spec)});
        }
    }
    if (json.contains("generate")) {
        const auto &gen = json.at("generate");
        std::vector<SceneKind> kinds;
        for (const auto &k : gen.at("kinds"))
            kinds.push_back(scene_kind_from_string(k.get<std::string>()));
        Suite generated = generate_suite(kinds, gen.at("count").get<int>(), gen.value("size", 32),
                                         gen.value("seed", std::uint64_t{0}), "generated",
                                         GenerationOptions{gen.value("clutter_blocks", 0)});
        for (auto &e : generated.episodes)
            suite.episodes.push_back(std::move(e));
    }
    if (suite.episodes.empty())
        throw std::invalid_argument("suite has no episodes");
    return suite;
}

Suite load_suite(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read suite " + path.string());
    return parse_suite(nlohmann::json::parse(in), path.parent_path());
}

std::uint64_t episode_seed(std::uint64_t suite_seed, std::size_t episode_index)
{
    return derive_seed(suite_seed, static_cast<std::uint64_t>(episode_index));
}

const std::vector<EpisodeResult> &SuiteResult::of(Variant variant) const
{
    for (std::size_t v = 0; v < variants.size(); ++v)
        if (variants[v] == variant)
            return results[v];
    throw std::out_of_range(std::string("variant not in suite result: ") + to_string(variant));
}

SuiteResult run_suite(const Suite &suite, const SuiteConfig &config)
{
    SuiteResult out;
    out.variants = config.variants;
    for (const auto &e : suite.episodes)
        out.labels.push_back(e.label);
    const std::size_t n_episodes = suite.episodes.size();
    out.results.assign(config.variants.size(), std::vector<EpisodeResult>(n_episodes));

    // Each (variant, episode) task writes only its own slot; the fold below
    // is in index order so completion order never matters.
    const std::size_t n_tasks = config.variants.size() * n_episodes;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t task = next++; task < n_tasks; task = next++) {
            const std::size_t v = task / n_episodes;
            const std::size_t e = task % n_episodes;
            AgentConfig agent = config.agent;
            agent.variant = config.variants[v];
            out.results[v][e] = run_episode(suite.episodes[e].spec, agent, episode_seed(config.seed, e),
                                            EpisodeOptions{config.record_traces});
        }
    };
    unsigned threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n_tasks, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i)
            pool.emplace_back(worker);
    }

    if (std::find(out.variants.begin(), out.variants.end(), Variant::odometry_collision) != out.variants.end()) {
        const auto &ablated = out.of(Variant::odometry_collision);
        for (const auto &r : ablated)
            out.hard.push_back(!r.first().success);
    }
    return out;
}

std::vector<VariantSummary> SuiteResult::summarize() const
{
    std::vector<VariantSummary> summaries;
    for (std::size_t v = 0; v < variants.size(); ++v) {
        VariantSummary s;
        s.variant = variants[v];
        const auto &episodes = results[v];
        s.episodes = static_cast<int>(episodes.size());
        int hard_n = 0;
        for (std::size_t e = 0; e < episodes.size(); ++e) {
            const auto &r = episodes[e];
            const auto &first = r.first();
            const auto &learnt = r.learnt();
            s.first_sr += first.success ? 1.0 : 0.0;
            s.first_spl += first.spl;
            s.learnt_sr += learnt.success ? 1.0 : 0.0;
            s.learnt_spl += learnt.spl;
            s.first_collisions += first.collisions;
            s.learnt_collisions += learnt.collisions;
            for (const auto &t : r.trials)
                s.total_collisions += t.collisions;
            s.mean_trials += static_cast<double>(r.trials.size());
            if (!hard.empty() && hard[e]) {
                ++hard_n;
                s.hard_first_sr += first.success ? 1.0 : 0.0;
                s.hard_learnt_sr += learnt.success ? 1.0 : 0.0;
                s.hard_learnt_spl += learnt.spl;
            }
        }
        if (s.episodes > 0) {
            const double n = s.episodes;
            s.first_sr /= n;
            s.first_spl /= n;
            s.learnt_sr /= n;
            s.learnt_spl /= n;
            s.mean_trials /= n;
        }
        s.hard_episodes = hard_n;
        if (hard_n > 0) {
            s.hard_first_sr /= hard_n;
            s.hard_learnt_sr /= hard_n;
            s.hard_learnt_spl /= hard_n;
        }
        summaries.push_back(s);
    }
    return summaries;
}

namespace {

std::string fixed(double value, int digits = 9)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

}  // namespace

std::string summary_csv(const SuiteResult &result)
{
    std::ostringstream out;
    out << "episode,trial,variant,sr,spl,collisions,frames\n";
    for (std::size_t e = 0; e < result.labels.size(); ++e)
        for (std::size_t v = 0; v < result.variants.size(); ++v)
            for (const auto &t : result.results[v][e].trials)
                out << e << ',' << t.trial << ',' << to_string(result.variants[v]) << ',' << (t.success ? 1 : 0)
                    << ',' << fixed(t.spl) << ',' << t.collisions << ',' << t.frames_used << '\n';
    return out.str();
}

std::string summary_table_csv(const SuiteResult &result)
{
    std::ostringstream out;
    out << "variant,episodes,first_sr,first_spl,learnt_sr,learnt_spl,first_collisions,learnt_collisions,"
           "total_collisions,mean_trials,hard_episodes,hard_first_sr,hard_learnt_sr,hard_learnt_spl\n";
    for (const auto &s : result.summarize())
        out << to_string(s.variant) << ',' << s.episodes << ',' << fixed(s.first_sr, 4) << ','
            << fixed(s.first_spl, 4) << ',' << fixed(s.learnt_sr, 4) << ',' << fixed(s.learnt_spl, 4) << ','
            << s.first_collisions << ',' << s.learnt_collisions << ',' << s.total_collisions << ','
            << fixed(s.mean_trials, 2) << ',' << s.hard_episodes << ',' << fixed(s.hard_first_sr, 4) << ','
            << fixed(s.hard_learnt_sr, 4) << ',' << fixed(s.hard_learnt_spl, 4) << '\n';
    return out.str();
}

void write_trace_csv(const TrialResult &trial, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "frame,x,y,sigma,action,v,omega,collision,gamma,z_left,z_right,mode\n";
    for (const auto &f : trial.trace) {
        out << f.frame << ',' << fixed(f.pose.x, 6) << ',' << fixed(f.pose.y, 6) << ',' << fixed(f.pose.heading, 6)
            << ',' << to_string(f.action) << ',' << fixed(f.control.v, 6) << ',' << fixed(f.control.omega, 6) << ','
            << (f.collision ? 1 : 0) << ',' << fixed(f.gamma, 6) << ',' << fixed(f.z_left, 6) << ','
            << fixed(f.z_right, 6) << ',' << (f.mode == CxMode::goal ? "goal" : "escape") << '\n';
    }
}

void write_suite_outputs(const Suite &suite, const SuiteConfig &config, const SuiteResult &result,
                         const std::filesystem::path &out_dir)
{
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(out_dir / "summary.csv");
        out << summary_csv(result);
    }
    {
        std::ofstream out(out_dir / "summary_table.csv");
        out << summary_table_csv(result);
    }
    nlohmann::json manifest;
    manifest["suite"] = suite.name;
    manifest["seed"] = config.seed;
    manifest["threads"] = config.threads;
    manifest["record_traces"] = config.record_traces;
    manifest["agent"] = config.agent.to_json();
    manifest["variants"] = nlohmann::json::array();
    for (auto v : config.variants)
        manifest["variants"].push_back(to_string(v));
    manifest["episodes"] = nlohmann::json::array();
    for (std::size_t e = 0; e < suite.episodes.size(); ++e) {
        const auto &spec = suite.episodes[e].spec;
        manifest["episodes"].push_back({{"index", e},
                                        {"label", suite.episodes[e].label},
                                        {"scene", spec.scene->name()},
                                        {"texture_seed", spec.scene->texture_seed()},
                                        {"start", {spec.start.x, spec.start.y, spec.start.heading}},
                                        {"goal", {spec.goal.x, spec.goal.y}},
                                        {"catchment_radius", spec.catchment_radius},
                                        {"episode_seed", episode_seed(config.seed, e)}});
    }
    std::ofstream(out_dir / "manifest.json") << manifest.dump(2) << '\n';

    if (config.record_traces) {
        for (std::size_t v = 0; v < result.variants.size(); ++v) {
            const auto dir = out_dir / "traces" / to_string(result.variants[v]);
            std::filesystem::create_directories(dir);
            for (std::size_t e = 0; e < result.labels.size(); ++e)
                for (const auto &t : result.results[v][e].trials)
                    write_trace_csv(t, dir / ("episode" + std::to_string(e) + "_trial" + std::to_string(t.trial) + ".csv"));
        }
    }
}

}  // namespace antnav
