#include "antnav/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace antnav;

namespace {

EpisodeSpec open_episode(Pose start, Vec2 goal, double catchment = kDefaultCatchmentRadius)
{
    auto scene = std::make_shared<const Scene>(SceneBuilder(24, 24, 0.25).build());
    return {scene, start, goal, catchment};
}

// Goal sealed inside a walled pocket.
EpisodeSpec sealed_episode()
{
    SceneBuilder b(16, 16, 0.25);
    b.fill(10, 5, 14, 5).fill(10, 9, 14, 9).fill(10, 5, 10, 9);
    auto scene = std::make_shared<const Scene>(b.build());
    return {scene, Pose{1.0, 1.8, 0.0}, Vec2{3.1, 1.8}, kDefaultCatchmentRadius};
}

std::string slurp(const std::filesystem::path &path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("SPL closed forms")
{
    CHECK(compute_spl(true, 5.0, 10.0) == 0.5);
    CHECK(compute_spl(true, 5.0, 4.0) == 1.0);
    CHECK(compute_spl(true, 5.0, 5.0) == 1.0);
    CHECK(compute_spl(false, 5.0, 5.0) == 0.0);
    CHECK(compute_spl(true, 0.0, 0.0) == 1.0);
    CHECK(compute_spl(true, 3.0, 12.0) == 0.25);
}

TEST_CASE("variant names")
{
    CHECK(variant_from_string("full") == Variant::full);
    CHECK(variant_from_string("odom-collision") == Variant::odometry_collision);
    CHECK(variant_from_string("odometry_only") == Variant::odometry_only);
    CHECK_THROWS_AS(variant_from_string("vision-only"), std::invalid_argument);
    CHECK(std::string(to_string(Variant::odometry_only)) == "odom-only");
}

TEST_CASE("straight shot in an open room is nearly optimal")
{
    for (auto regime : {Regime::discrete, Regime::continuous}) {
        for (auto variant : {Variant::full, Variant::odometry_collision, Variant::odometry_only}) {
            AgentConfig config;
            config.regime = regime;
            config.variant = variant;
            Agent agent(config, 3);
            const TrialResult r = agent.run_trial(open_episode(Pose{1.0, 1.0, 0.0}, Vec2{5.0, 4.5}));
            CHECK(r.success);
            CHECK(r.collisions == 0);
            CHECK(r.spl >= 0.95);
            CHECK(r.spl <= 1.0);
        }
    }
}

TEST_CASE("an unreachable goal fails every variant")
{
    const EpisodeSpec spec = sealed_episode();
    AgentConfig config;
    config.max_frames = 120;
    for (auto variant : {Variant::full, Variant::odometry_collision, Variant::odometry_only}) {
        config.variant = variant;
        Agent agent(config, 1);
        const TrialResult r = agent.run_trial(spec);
        CHECK_FALSE(r.success);
        CHECK(r.spl == 0.0);
        CHECK(r.frames_used == 120);
    }
}

TEST_CASE("catchment is inclusive and checked after the move")
{
    AgentConfig config;
    config.variant = Variant::odometry_only;
    const Pose start{1.0, 1.0, 0.0};
    const Vec2 goal{1.5, 1.0};
    // Radius set to exactly where the first step lands.
    const auto probe = open_episode(start, goal);
    const Pose landed = step_discrete(*probe.scene, config.robot(), start, Action::forward).state.pose;
    const double reach = distance(landed.position(), goal);
    Agent on(config, 0);
    const TrialResult hit = on.run_trial(open_episode(start, goal, reach));
    CHECK(hit.success);
    CHECK(hit.frames_used == 1);
    Agent off(config, 0);
    const TrialResult miss = off.run_trial(open_episode(start, goal, std::nextafter(reach, 0.0)));
    CHECK(miss.success);
    CHECK(miss.frames_used == 2);
    CHECK(miss.path_length == doctest::Approx(0.5));
}

TEST_CASE("episode length rules")
{
    const EpisodeSpec sealed = sealed_episode();
    AgentConfig config;
    config.max_frames = 60;

    SUBCASE("ablated variants run one trial")
    {
        config.variant = Variant::odometry_collision;
        const EpisodeResult r = run_episode(sealed, config, 1);
        CHECK(r.trials.size() == 1);
        CHECK(r.terminated == Termination::single_trial);
    }
    SUBCASE("full with zero SPL stops after the second trial")
    {
        const EpisodeResult r = run_episode(sealed, config, 1);
        CHECK(r.trials.size() == 2);
        CHECK(r.terminated == Termination::ltm_stale);
        CHECK(r.best_spl == 0.0);
    }
    SUBCASE("a perturbation forces every trial")
    {
        config.regime = Regime::continuous;
        config.perturbation = Perturbation{0.0, 0.05};
        config.max_frames = 20;
        for (auto variant : {Variant::full, Variant::odometry_collision}) {
            config.variant = variant;
            const EpisodeResult r = run_episode(sealed, config, 1);
            CHECK(r.trials.size() == 20);
            CHECK(r.terminated == Termination::max_trials);
        }
    }
    SUBCASE("excessive runs to the cap")
    {
        config.consolidation = Consolidation::excessive;
        config.max_trials = 4;
        CHECK(run_episode(sealed, config, 1).trials.size() == 4);
    }
}

TEST_CASE("learnt trial is the earliest best")
{
    EpisodeResult r;
    for (double spl : {0.2, 0.7, 0.5, 0.7}) {
        TrialResult t;
        t.trial = static_cast<int>(r.trials.size()) + 1;
        t.spl = spl;
        r.trials.push_back(t);
    }
    CHECK(r.learnt().trial == 2);
    CHECK(r.first().trial == 1);
    CHECK(r.last().trial == 4);
    CHECK_THROWS_AS(EpisodeResult{}.learnt(), std::logic_error);
}

TEST_CASE("odometry-collision repeats itself exactly without noise")
{
    const EpisodeSpec spec = make_episode(SceneKind::concave_obstacle, 2, 24);
    AgentConfig config;
    config.variant = Variant::odometry_collision;
    config.regime = Regime::continuous;
    config.perturbation = Perturbation{0.0, 0.0};
    const EpisodeResult r = run_episode(spec, config, 9, EpisodeOptions{true});
    REQUIRE(r.trials.size() == 20);
    CHECK(r.first().collisions > 0);
    for (const auto &t : r.trials) {
        REQUIRE(t.trace.size() == r.first().trace.size());
        CHECK(t.path_length == r.first().path_length);
        CHECK(t.collisions == r.first().collisions);
        for (std::size_t i = 0; i < t.trace.size(); ++i) {
            CHECK(t.trace[i].pose.x == r.first().trace[i].pose.x);
            CHECK(t.trace[i].pose.y == r.first().trace[i].pose.y);
            CHECK(t.trace[i].pose.heading == r.first().trace[i].pose.heading);
        }
    }
}

TEST_CASE("checkpoint mode restores the best trial")
{
    const EpisodeSpec spec = make_episode(SceneKind::convex_obstacle, 4, 24);
    AgentConfig config;
    config.regime = Regime::continuous;
    config.consolidation = Consolidation::checkpoint;
    config.max_trials = 5;
    config.perturbation = Perturbation{0.0, 0.2};
    const EpisodeResult r = run_episode(spec, config, 2);
    REQUIRE(r.restored_spl.has_value());
    double best = 0.0;
    for (const auto &t : r.trials)
        best = std::max(best, t.spl);
    CHECK(*r.restored_spl == best);
    CHECK(r.trials[static_cast<std::size_t>(*r.restored_trial - 1)].spl == best);
}

TEST_CASE("difficulty separates open, convex and concave layouts")
{
    const Difficulty open = difficulty(make_episode(SceneKind::open, 1, 32));
    CHECK(open.complexity_ratio == doctest::Approx(1.0).epsilon(0.05));
    CHECK(open.odometry_only_spl >= 0.9);
    const Difficulty convex = difficulty(make_episode(SceneKind::convex_obstacle, 1, 32));
    CHECK(convex.complexity_ratio > 1.0);
    const Difficulty concave = difficulty(make_episode(SceneKind::concave_obstacle, 1, 32));
    CHECK(concave.complexity_ratio > 1.0);
    CHECK(concave.odometry_only_spl == 0.0);
}

TEST_CASE("suite parsing")
{
    const auto dir = std::filesystem::temp_directory_path() / "antnav_suite_test";
    std::filesystem::create_directories(dir);
    const GeneratedEpisode ep = generate_episode(SceneKind::corridor, 5, 20);
    save_scene(ep.scene, dir / "corridor.txt");
    const nlohmann::json json = {
        {"name", "mixed"},
        {"episodes",
         {{{"kind", "convex_obstacle"}, {"seed", 3}, {"size", 24}},
          {{"kind", "cluttered"}, {"seed", 3}, {"size", 24}, {"clutter_blocks", 20}},
          {{"scene", "corridor.txt"}, {"start", {ep.start.x, ep.start.y, ep.start.heading}}, {"goal", {ep.goal.x, ep.goal.y}}}}},
        {"generate", {{"kinds", {"open", "concave_obstacle"}}, {"count", 3}, {"size", 16}, {"seed", 7}}}};
    const Suite suite = parse_suite(json, dir);
    CHECK(suite.name == "mixed");
    REQUIRE(suite.episodes.size() == 6);
    CHECK(*suite.episodes[0].spec.scene == generate_scene(SceneKind::convex_obstacle, 3, 24));
    CHECK(*suite.episodes[1].spec.scene == generate_scene(SceneKind::cluttered, 3, 24, GenerationOptions{20}));
    CHECK(*suite.episodes[1].spec.scene != generate_scene(SceneKind::cluttered, 3, 24));
    CHECK(suite.episodes[2].spec.scene->cells() == ep.scene.cells());
    CHECK(suite.episodes[2].spec.goal.x == ep.goal.x);
    CHECK(suite.episodes[3].label.rfind("open-", 0) == 0);
    CHECK(suite.episodes[4].label.rfind("concave_obstacle-", 0) == 0);

    {
        std::ofstream out(dir / "suite.json");
        out << json.dump();
    }
    CHECK(load_suite(dir / "suite.json").episodes.size() == 6);
    CHECK_THROWS(parse_suite(nlohmann::json{{"name", "empty"}}));
    CHECK_THROWS(load_suite(dir / "missing.json"));
}

TEST_CASE("odometry-only solves an open suite")
{
    const Suite suite = generate_suite({SceneKind::open}, 6, 24, 11);
    SuiteConfig config;
    config.variants = {Variant::odometry_only};
    const SuiteResult result = run_suite(suite, config);
    const auto summary = result.summarize();
    REQUIRE(summary.size() == 1);
    CHECK(summary[0].first_sr == 1.0);
    CHECK(summary[0].total_collisions == 0);
}

TEST_CASE("replay is byte-identical and independent of thread count")
{
    const Suite suite = generate_suite({SceneKind::convex_obstacle, SceneKind::cluttered}, 4, 20, 5);
    SuiteConfig config;
    config.agent.regime = Regime::continuous;
    config.agent.max_frames = 200;
    config.agent.max_trials = 3;
    config.variants = {Variant::full, Variant::odometry_collision, Variant::odometry_only};
    config.seed = 42;
    config.threads = 1;
    const SuiteResult a = run_suite(suite, config);
    config.threads = 3;
    const SuiteResult b = run_suite(suite, config);
    const std::string csv = summary_csv(a);
    CHECK(csv == summary_csv(b));
    CHECK(csv.rfind("episode,trial,variant,sr,spl,collisions,frames\n", 0) == 0);
    CHECK(summary_table_csv(a) == summary_table_csv(b));
    CHECK(a.hard.size() == 4);

    const auto out = std::filesystem::temp_directory_path() / "antnav_replay";
    std::filesystem::remove_all(out);
    config.record_traces = true;
    const SuiteResult traced = run_suite(suite, config);
    write_suite_outputs(suite, config, traced, out);
    CHECK(slurp(out / "summary.csv") == csv);
    CHECK(std::filesystem::exists(out / "summary_table.csv"));
    CHECK(std::filesystem::exists(out / "traces" / "full" / "episode0_trial1.csv"));
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest.at("agent").at("regime") == "continuous");
    const std::string trace = slurp(out / "traces" / "odom-only" / "episode1_trial1.csv");
    CHECK(trace.rfind("frame,x,y,sigma,action,v,omega,collision,gamma,z_left,z_right,mode\n", 0) == 0);
}

TEST_CASE("path length never undercuts straight-line progress")
{
    const Suite suite = generate_suite({SceneKind::cluttered, SceneKind::corridor}, 4, 24, 3);
    SuiteConfig config;
    config.variants = {Variant::odometry_collision};
    config.agent.regime = Regime::continuous;
    const SuiteResult result = run_suite(suite, config);
    for (std::size_t e = 0; e < suite.episodes.size(); ++e) {
        const auto &spec = suite.episodes[e].spec;
        for (const auto &t : result.results[0][e].trials) {
            CHECK(t.spl <= (t.success ? 1.0 : 0.0));
            CHECK(t.path_length >= 0.0);
            if (t.success)
                CHECK(t.path_length >= distance(spec.start.position(), spec.goal) - spec.catchment_radius - 1e-9);
        }
    }
}
