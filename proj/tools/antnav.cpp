#include "antnav/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace antnav;

namespace {

GeneratedEpisode named_episode(const std::string &kind, std::uint64_t seed, int size, const GenerationOptions &options)
{
    if (kind == "trap_side_corridor")
        return trap_side_corridor();
    return generate_episode(scene_kind_from_string(kind), seed, size, options);
}

std::string ascii_map(const Scene &scene, const Pose *start, const Vec2 *goal)
{
    std::string out;
    for (int cy = 0; cy < scene.height(); ++cy) {
        for (int cx = 0; cx < scene.width(); ++cx) {
            char c = scene.is_wall(cx, cy) ? '#' : '.';
            if (start && scene.cell_x(start->x) == cx && scene.cell_y(start->y) == cy)
                c = 'S';
            if (goal && scene.cell_x(goal->x) == cx && scene.cell_y(goal->y) == cy)
                c = 'G';
            out += c;
        }
        out += '\n';
    }
    return out;
}

nlohmann::json episode_entry(const std::string &scene_file, const Pose &start, Vec2 goal)
{
    return {{"scene", scene_file}, {"start", {start.x, start.y, start.heading}}, {"goal", {goal.x, goal.y}}};
}

}  // namespace

int main(int argc, char **argv)
{
    CLI::App app{"antnav: insect-inspired point-goal navigation"};
    app.require_subcommand(1);

    // run -------------------------------------------------------------------
    auto *run = app.add_subcommand("run", "Run a suite and write summary.csv, traces and a manifest");
    std::string suite_path, out_dir = "out", regime = "discrete", consolidation = "selective";
    std::vector<std::string> variants{"full"};
    std::optional<double> sigma, bias;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool traces = false;
    AgentConfig agent;
    run->add_option("--suite", suite_path, "Suite JSON file")->required()->check(CLI::ExistingFile);
    run->add_option("--variant", variants, "full | odom-collision | odom-only (repeatable)");
    run->add_option("--regime", regime, "discrete | continuous");
    run->add_option("--consolidation", consolidation, "selective | excessive | checkpoint");
    run->add_option("--sigma", sigma, "Lognormal steering noise (enables 20-trial perturbed episodes)");
    run->add_option("--bias", bias, "Steering bias b_omega (enables 20-trial perturbed episodes)");
    run->add_option("--seed", seed, "Suite seed");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--threads", threads, "Worker threads (0 = all cores)");
    run->add_flag("--traces", traces, "Write per-trial trace CSVs");
    run->add_option("--alpha", agent.mb.alpha, "MB learning rate");
    run->add_option("--tau-e", agent.mb.tau_e, "Eligibility delay in frames");
    run->add_option("--tau-c", agent.cx.tau_c, "Escape duration in frames");
    run->add_option("--max-trials", agent.max_trials, "Trial cap per episode");
    run->add_option("--max-frames", agent.max_frames, "Frame cap per trial");

    // scene -----------------------------------------------------------------
    auto *scene_cmd = app.add_subcommand("scene", "Generate or inspect scenes");
    scene_cmd->require_subcommand(1);
    auto *gen = scene_cmd->add_subcommand("gen", "Generate a procedural scene and print its suite entry");
    std::string kind_name = "concave_obstacle", scene_out;
    int size = 32;
    std::uint64_t scene_seed = 0;
    GenerationOptions gen_options;
    gen->add_option("--kind", kind_name, "open | convex_obstacle | concave_obstacle | corridor | cluttered | trap_side_corridor (fixed layout)");
    gen->add_option("--seed", scene_seed);
    gen->add_option("--size", size, "Grid side in cells");
    gen->add_option("--clutter-blocks", gen_options.clutter_blocks, "Block placements for cluttered scenes");
    gen->add_option("--out", scene_out, "Scene file to write")->required();

    auto *show = scene_cmd->add_subcommand("show", "Print a scene; optionally dump the start view as PGM");
    std::string show_path, pgm_path;
    std::vector<double> show_start;
    show->add_option("--file", show_path, "Scene file (otherwise --kind/--seed/--size)");
    show->add_option("--kind", kind_name);
    show->add_option("--seed", scene_seed);
    show->add_option("--size", size);
    show->add_option("--clutter-blocks", gen_options.clutter_blocks);
    show->add_option("--start", show_start, "x y heading")->expected(3);
    show->add_option("--pgm", pgm_path, "Write raw and filtered start views (<path>, <path>.dog.pgm)");

    // difficulty ------------------------------------------------------------
    auto *diff = app.add_subcommand("difficulty", "Complexity ratio and odometry-only SPL per episode");
    std::string diff_suite, diff_regime = "discrete";
    diff->add_option("--suite", diff_suite)->required()->check(CLI::ExistingFile);
    diff->add_option("--regime", diff_regime);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            agent.regime = regime_from_string(regime);
            agent.consolidation = consolidation_from_string(consolidation);
            if (sigma || bias)
                agent.perturbation = Perturbation{bias.value_or(0.0), sigma.value_or(0.0)};
            SuiteConfig config;
            config.agent = agent;
            config.variants.clear();
            for (const auto &v : variants)
                config.variants.push_back(variant_from_string(v));
            config.seed = seed;
            config.threads = threads;
            config.record_traces = traces;
            const Suite suite = load_suite(suite_path);
            const SuiteResult result = run_suite(suite, config);
            write_suite_outputs(suite, config, result, out_dir);
            std::cout << summary_table_csv(result);
        } else if (*gen) {
            const GeneratedEpisode ep = named_episode(kind_name, scene_seed, size, gen_options);
            save_scene(ep.scene, scene_out);
            std::cout << episode_entry(std::filesystem::path(scene_out).filename().string(), ep.start, ep.goal).dump()
                      << '\n';
        } else if (*show) {
            std::optional<Scene> scene;
            std::optional<Pose> start;
            std::optional<Vec2> goal;
            if (!show_path.empty()) {
                scene = load_scene(show_path);
            } else {
                GeneratedEpisode ep = named_episode(kind_name, scene_seed, size, gen_options);
                scene = std::move(ep.scene);
                start = ep.start;
                goal = ep.goal;
            }
            if (show_start.size() == 3)
                start = Pose{show_start[0], show_start[1], show_start[2]};
            std::cout << ascii_map(*scene, start ? &*start : nullptr, goal ? &*goal : nullptr);
            if (!pgm_path.empty()) {
                if (!start)
                    throw std::invalid_argument("--pgm needs a start pose");
                const Image raw = render_view(*scene, *start);
                write_pgm(raw, pgm_path);
                const PnVector pn = preprocess(raw);
                Image filtered(raw.rows(), raw.columns());
                for (std::size_t i = 0; i < pn.values.size(); ++i)
                    filtered.pixels()[i] = pn.values[i];
                write_pgm(filtered, pgm_path + ".dog.pgm");
            }
        } else if (*diff) {
            const Regime r = regime_from_string(diff_regime);
            const Suite suite = load_suite(diff_suite);
            std::cout << "episode,label,complexity_ratio,odometry_only_spl\n";
            for (std::size_t e = 0; e < suite.episodes.size(); ++e) {
                const Difficulty d = difficulty(suite.episodes[e].spec, r);
                std::printf("%zu,%s,%.6f,%.6f\n", e, suite.episodes[e].label.c_str(), d.complexity_ratio,
                            d.odometry_only_spl);
            }
        }
    } catch (const std::exception &err) {
        std::cerr << "antnav: " << err.what() << '\n';
        return 1;
    }
    return 0;
}
