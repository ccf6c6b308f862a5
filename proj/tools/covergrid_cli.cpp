#include "covergrid/experiments.hpp"
#include "covergrid/map_gen.hpp"
#include "covergrid/stats.hpp"
#include "covergrid/trace.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace covergrid;

namespace {

struct MctsFlags
{
    double cp = 1.0;
    int horizon = 30;
    double c_hit = 2.0;
    double c_turn = 0.0;
    std::string turn_mode = "none";
    std::size_t iters = 2000;
    double wallclock_ms = 0.0;
};

void add_mcts_flags(CLI::App* app, MctsFlags& f)
{
    app->add_option("--cp", f.cp, "UCT exploration coefficient")->check(CLI::PositiveNumber);
    app->add_option("--horizon", f.horizon, "Rollout length T")->check(CLI::Range(1, 1000));
    app->add_option("--c_hit", f.c_hit, "Hit penalty weight")->check(CLI::NonNegativeNumber);
    app->add_option("--c_turn", f.c_turn, "Turn penalty weight")->check(CLI::NonNegativeNumber);
    app->add_option("--turn_mode", f.turn_mode, "none|left|right|both")->check(CLI::IsMember({"none", "left", "right", "both"}));
    app->add_option("--iters", f.iters, "Iterations per decision")->check(CLI::PositiveNumber);
    app->add_option("--wallclock_ms", f.wallclock_ms, "Per-decision time budget (replaces --iters)")->check(CLI::PositiveNumber);
}

MctsConfig to_mcts(const MctsFlags& f)
{
    MctsConfig m;
    m.c_p = f.cp;
    m.horizon = f.horizon;
    m.c_hit = f.c_hit;
    m.c_turn = f.c_turn;
    m.turn_mode = *turn_mode_from_string(f.turn_mode);
    m.iterations = f.iters;
    if (f.wallclock_ms > 0.0)
        m.wallclock_ms = f.wallclock_ms;
    return m;
}

std::vector<GridMap> load_map_dir(const std::string& dir)
{
    if (!fs::is_directory(dir))
        throw std::runtime_error("not a directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".map")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw std::runtime_error("no .map files in " + dir);
    std::vector<GridMap> maps;
    for (const auto& p : files)
        maps.push_back(load_map(p.string()));
    return maps;
}

std::ofstream open_out(const fs::path& path)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::vector<std::string> split_keys(const std::string& s)
{
    std::vector<std::string> keys;
    std::stringstream ss(s);
    std::string k;
    while (std::getline(ss, k, ','))
        if (!k.empty())
        {
            if (!is_group_key(k))
                throw std::runtime_error("unknown group key '" + k + "'");
            keys.push_back(k);
        }
    return keys;
}

int cmd_genmaps(const std::string& out_dir, std::size_t count, double density, std::uint64_t seed, int width, int height)
{
    fs::create_directories(out_dir);
    nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
    ExperimentPlan plan;
    plan.width = width;
    plan.height = height;
    plan.base_seed = seed;
    for (std::size_t m = 0; m < count; ++m)
    {
        const GeneratedMap g = plan_map(plan, density, m);
        char name[32];
        std::snprintf(name, sizeof name, "map_%03zu.map", m);
        save_map(g.map, (fs::path(out_dir) / name).string());
        manifest.push_back({{"file", name},
                            {"seed", map_seed(seed, density, m)},
                            {"density", density},
                            {"width", width},
                            {"height", height},
                            {"sampled_obstacles", g.sampled_obstacles},
                            {"filled_cells", g.filled_cells},
                            {"obstacles", g.map.obstacle_count()}});
    }
    open_out(fs::path(out_dir) / "manifest.json") << manifest.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-robot on-line coverage planning workbench"};
    app.require_subcommand(1);

    // genmaps
    auto* gen = app.add_subcommand("genmaps", "Generate random maps and a manifest");
    std::string gen_out = "maps";
    std::size_t gen_count = 5;
    double gen_density = 0.10;
    std::uint64_t gen_seed = 0;
    int gen_w = 20;
    int gen_h = 20;
    gen->add_option("--out", gen_out, "Output directory");
    gen->add_option("--count", gen_count, "Number of maps")->check(CLI::PositiveNumber);
    gen->add_option("--density", gen_density, "Obstacle density in [0, 1)")->check(CLI::Range(0.0, 0.999999));
    gen->add_option("--seed", gen_seed, "Base seed");
    gen->add_option("--width", gen_w, "Columns")->check(CLI::Range(3, 100000));
    gen->add_option("--height", gen_h, "Rows")->check(CLI::Range(3, 100000));

    // run
    auto* run = app.add_subcommand("run", "Run trials of one configuration");
    std::string run_planner = "mcts";
    std::string run_placement = "wall";
    std::size_t run_robots = 3;
    double run_density = 0.10;
    std::string run_maps;
    std::string run_map;
    std::size_t run_trials = 1;
    std::uint64_t run_seed = 0;
    std::string run_out;
    std::string run_trace;
    std::size_t run_max_steps = 0;
    double run_sensor = 2.0;
    bool run_parallel = false;
    MctsFlags run_mcts;
    run->add_option("--planner", run_planner, "mcts|boustro")->check(CLI::IsMember({"mcts", "boustro"}));
    run->add_option("--placement", run_placement, "wall|random")->check(CLI::IsMember({"wall", "random"}));
    run->add_option("--robots", run_robots, "Team size")->check(CLI::PositiveNumber);
    run->add_option("--density", run_density, "Obstacle density of generated maps")->check(CLI::Range(0.0, 0.999999));
    run->add_option("--maps", run_maps, "Directory of .map files to use instead of generated maps")->check(CLI::ExistingDirectory);
    run->add_option("--map", run_map, "Single map file")->check(CLI::ExistingFile);
    run->add_option("--trials", run_trials, "Trials per map")->check(CLI::PositiveNumber);
    run->add_option("--seed", run_seed, "Base seed");
    run->add_option("--out", run_out, "JSON-lines output (default stdout)");
    run->add_option("--trace", run_trace, "Write a per-epoch trace of the first trial");
    run->add_option("--max_steps", run_max_steps, "Epoch cap (0 = 25 x free cells)");
    run->add_option("--sensor_range", run_sensor, "Sensor range in meters")->check(CLI::NonNegativeNumber);
    run->add_flag("--parallel", run_parallel, "Run trials concurrently (COVERGRID_THREADS caps workers)");
    add_mcts_flags(run, run_mcts);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run a figure preset");
    std::string sw_preset;
    std::string sw_scale = "desk";
    std::uint64_t sw_seed = 0;
    std::string sw_out = "results";
    std::size_t sw_trials = 0;
    bool sw_parallel = false;
    MctsFlags sw_mcts;
    sweep->add_option("--preset", sw_preset, "fig3|fig4|fig5")->required()->check(CLI::IsMember({"fig3", "fig4", "fig5"}));
    sweep->add_option("--scale", sw_scale, "full|desk")->check(CLI::IsMember({"full", "desk"}));
    sweep->add_option("--seed", sw_seed, "Base seed");
    sweep->add_option("--out", sw_out, "Output directory");
    sweep->add_option("--trials", sw_trials, "Override trials per map")->check(CLI::PositiveNumber);
    sweep->add_flag("--parallel", sw_parallel, "Run trials concurrently (COVERGRID_THREADS caps workers)");
    add_mcts_flags(sweep, sw_mcts);

    // stats
    auto* stats = app.add_subcommand("stats", "Box-plot statistics of a records file as CSV");
    std::string st_in;
    std::string st_group = "planner,robots";
    std::string st_metric = "completion_time";
    std::string st_out;
    stats->add_option("records", st_in, "JSON-lines records")->required()->check(CLI::ExistingFile);
    stats->add_option("--group", st_group, "Comma-separated group keys");
    stats->add_option("--metric", st_metric, "completion_time|left_turns|right_turns")
        ->check(CLI::IsMember({"completion_time", "left_turns", "right_turns"}));
    stats->add_option("--out", st_out, "CSV output (default stdout)");

    // replay
    auto* rep = app.add_subcommand("replay", "Re-execute a trace and check it");
    std::string rep_in;
    rep->add_option("trace", rep_in, "Trace file")->required()->check(CLI::ExistingFile);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        std::fprintf(stderr, "covergrid: %s\n", e.what());
        return 2;
    }

    try
    {
        if (*gen)
            return cmd_genmaps(gen_out, gen_count, gen_density, gen_seed, gen_w, gen_h);

        if (*run)
        {
            ExperimentPlan plan;
            plan.name = "run";
            plan.base_seed = run_seed;
            plan.trials = run_trials;
            plan.maps = 1;
            plan.sim.mcts = to_mcts(run_mcts);
            plan.sim.max_steps = run_max_steps;
            plan.sim.sensor_range = run_sensor;
            if (!run_map.empty())
                plan.fixed_maps.push_back(load_map(run_map));
            else if (!run_maps.empty())
                plan.fixed_maps = load_map_dir(run_maps);
            if (!plan.fixed_maps.empty())
                plan.maps = plan.fixed_maps.size();
            ConfigPoint p;
            p.planner = *planner_from_string(run_planner);
            p.placement = *placement_from_string(run_placement);
            p.robots = run_robots;
            p.density = run_density;
            p.c_turn = plan.sim.mcts.c_turn;
            p.turn_mode = plan.sim.mcts.turn_mode;
            plan.points.push_back(p);

            std::vector<TrialRecord> records = run_plan(plan, run_parallel ? Exec::Parallel : Exec::Serial);
            if (!run_trace.empty())
            {
                std::ofstream tout = open_out(run_trace);
                TraceWriter tw(tout);
                const GridMap map = plan.fixed_maps.empty() ? plan_map(plan, p.density, 0).map : plan.fixed_maps[0];
                Simulation sim(trial_config(plan, 0, 0, 0), map);
                sim.run(&tw);
            }
            if (run_out.empty())
                write_records(std::cout, records);
            else
            {
                std::ofstream out = open_out(run_out);
                write_records(out, records);
            }
            return 0;
        }

        if (*sweep)
        {
            auto plan = preset(sw_preset, sw_scale == "full" ? Scale::Full : Scale::Desk, sw_seed);
            const MctsConfig m = to_mcts(sw_mcts);
            // Per-point turn costs come from the preset.
            plan->sim.mcts.c_p = m.c_p;
            plan->sim.mcts.horizon = m.horizon;
            plan->sim.mcts.c_hit = m.c_hit;
            plan->sim.mcts.iterations = m.iterations;
            plan->sim.mcts.wallclock_ms = m.wallclock_ms;
            if (sw_trials != 0)
                plan->trials = sw_trials;
            const std::vector<TrialRecord> records = run_plan(*plan, sw_parallel ? Exec::Parallel : Exec::Serial);
            const fs::path dir(sw_out);
            {
                std::ofstream out = open_out(dir / "records.jsonl");
                write_records(out, records);
            }
            std::vector<std::string> keys{"planner", "placement", "robots", "density", "turn_mode", "c_turn"};
            for (Metric metric : {Metric::CompletionTime, Metric::LeftTurns, Metric::RightTurns})
            {
                std::ofstream out = open_out(dir / ("summary_" + std::string(to_string(metric)) + ".csv"));
                write_summary_csv(out, keys, summarize(records, keys, metric));
            }
            std::size_t timeouts = 0;
            for (const TrialRecord& r : records)
                timeouts += r.timeout ? 1 : 0;
            std::fprintf(stderr, "%zu records, %zu timeouts -> %s\n", records.size(), timeouts, dir.string().c_str());
            return 0;
        }

        if (*stats)
        {
            std::ifstream in(st_in, std::ios::binary);
            const std::vector<TrialRecord> records = read_records(in);
            if (records.empty())
                throw std::runtime_error("no records in " + st_in);
            const std::vector<std::string> keys = split_keys(st_group);
            const auto groups = summarize(records, keys, *metric_from_string(st_metric));
            if (st_out.empty())
                write_summary_csv(std::cout, keys, groups);
            else
            {
                std::ofstream out = open_out(st_out);
                write_summary_csv(out, keys, groups);
            }
            return 0;
        }

        if (*rep)
        {
            std::ifstream in(rep_in, std::ios::binary);
            const ReplayReport report = replay(read_trace(in));
            if (!report.consistent)
            {
                std::fprintf(stderr, "covergrid: replay diverged at %s\n", report.first_mismatch.c_str());
                return 1;
            }
            std::printf("replay ok: %zu epochs\n", report.epochs);
            return 0;
        }
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "covergrid: %s\n", e.what());
        return 1;
    }
    return 0;
}
