#include "covergrid/experiments.hpp"

#include "covergrid/rng.hpp"

#include <cmath>
#include <exception>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace covergrid {

namespace {

constexpr std::uint64_t kMapStream = 0x6d6170; // "map"
constexpr std::uint64_t kTrialStream = 0x7472; // "tr"

std::uint64_t density_key(double density) noexcept { return static_cast<std::uint64_t>(std::llround(density * 1e6)); }

} // namespace

void ExperimentPlan::validate() const
{
    if (points.empty())
        throw std::invalid_argument("plan: no configuration points");
    if (maps == 0 || trials == 0)
        throw std::invalid_argument("plan: maps and trials must be >= 1");
    for (const ConfigPoint& p : points)
    {
        if (p.robots == 0)
            throw std::invalid_argument("plan: robots must be >= 1");
        if (!(p.density >= 0.0 && p.density < 1.0))
            throw std::invalid_argument("plan: density must be in [0, 1)");
        if (p.c_turn < 0.0)
            throw std::invalid_argument("plan: c_turn must be >= 0");
    }
    if (!fixed_maps.empty() && fixed_maps.size() != maps)
        throw std::invalid_argument("plan: map count differs from the supplied maps");
    sim.validate();
}

std::uint64_t map_seed(std::uint64_t base_seed, double density, std::size_t map_index) noexcept
{
    return derive_seed(base_seed, {kMapStream, density_key(density), map_index});
}

std::uint64_t trial_seed(std::uint64_t base_seed, PlannerKind planner, std::size_t config_index, std::size_t map_index,
                         std::size_t trial_index) noexcept
{
    return derive_seed(base_seed, {kTrialStream, static_cast<std::uint64_t>(planner), config_index, map_index, trial_index});
}

GeneratedMap plan_map(const ExperimentPlan& plan, double density, std::size_t map_index)
{
    return generate_map({plan.width, plan.height, density, map_seed(plan.base_seed, density, map_index)});
}

SimConfig trial_config(const ExperimentPlan& plan, std::size_t config_index, std::size_t map_index, std::size_t trial_index)
{
    const ConfigPoint& p = plan.points.at(config_index);
    SimConfig cfg = plan.sim;
    cfg.planner = p.planner;
    cfg.placement = p.placement;
    cfg.robots = p.robots;
    cfg.mcts.c_turn = p.c_turn;
    cfg.mcts.turn_mode = p.turn_mode;
    cfg.seed = trial_seed(plan.base_seed, p.planner, config_index, map_index, trial_index);
    cfg.exec = Exec::Serial;
    return cfg;
}

std::optional<ExperimentPlan> preset(std::string_view name, Scale scale, std::uint64_t base_seed)
{
    ExperimentPlan plan;
    plan.name = std::string(name);
    plan.base_seed = base_seed;
    plan.maps = 5;
    plan.trials = scale == Scale::Full ? 10 : 5;

    std::vector<std::size_t> counts;
    if (scale == Scale::Full)
        for (std::size_t n = 1; n <= 10; ++n)
            counts.push_back(n);
    else
        counts = {1, 2, 4, 8};

    if (name == "fig3")
    {
        for (PlannerKind k : {PlannerKind::Mcts, PlannerKind::Boustrophedon})
            for (std::size_t n : counts)
                plan.points.push_back({k, Placement::WallUniform, n, 0.10, 0.0, TurnPenaltyMode::None});
        for (std::size_t n : counts)
            plan.points.push_back({PlannerKind::Mcts, Placement::RandomUniform, n, 0.10, 0.0, TurnPenaltyMode::None});
    }
    else if (name == "fig4")
    {
        for (PlannerKind k : {PlannerKind::Mcts, PlannerKind::Boustrophedon})
            for (double d : {0.05, 0.10, 0.15, 0.20})
                plan.points.push_back({k, Placement::WallUniform, 3, d, 0.0, TurnPenaltyMode::None});
    }
    else if (name == "fig5")
    {
        plan.points.push_back({PlannerKind::Mcts, Placement::WallUniform, 5, 0.10, 0.0, TurnPenaltyMode::None});
        plan.points.push_back({PlannerKind::Mcts, Placement::WallUniform, 5, 0.10, 0.5, TurnPenaltyMode::LeftOnly});
        plan.points.push_back({PlannerKind::Mcts, Placement::WallUniform, 5, 0.10, 0.5, TurnPenaltyMode::RightOnly});
        plan.points.push_back({PlannerKind::Mcts, Placement::WallUniform, 5, 0.10, 0.1, TurnPenaltyMode::Both});
    }
    else
        return std::nullopt;
    return plan;
}

std::vector<TrialRecord> run_plan(const ExperimentPlan& plan, Exec exec, const std::function<void(const TrialRecord&)>& progress)
{
    plan.validate();

    // Maps are generated once per (density, map) and shared by every point.
    std::map<std::uint64_t, std::vector<GridMap>> maps;
    for (const ConfigPoint& p : plan.points)
    {
        auto& slot = maps[density_key(p.density)];
        if (!plan.fixed_maps.empty())
            slot = plan.fixed_maps;
        else if (slot.empty())
            for (std::size_t m = 0; m < plan.maps; ++m)
                slot.push_back(plan_map(plan, p.density, m).map);
    }

    const std::size_t per_point = plan.maps * plan.trials;
    const std::size_t total = plan.record_count();
    std::vector<TrialRecord> records(total);

    const auto run_one = [&](std::size_t job) {
        const std::size_t c = job / per_point;
        const std::size_t m = (job % per_point) / plan.trials;
        const std::size_t t = job % plan.trials;
        const ConfigPoint& p = plan.points[c];
        TrialRecord r = run_trial(trial_config(plan, c, m, t), maps.at(density_key(p.density))[m]);
        r.density = p.density;
        r.config_index = c;
        r.map_index = m;
        r.trial_index = t;
        records[job] = std::move(r);
    };

    if (exec == Exec::Parallel)
    {
        std::vector<std::exception_ptr> errors(total);
        const long n = static_cast<long>(total);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_cap())
        for (long job = 0; job < n; ++job)
        {
            try
            {
                run_one(static_cast<std::size_t>(job));
            }
            catch (...)
            {
                errors[static_cast<std::size_t>(job)] = std::current_exception();
            }
        }
        for (const auto& e : errors)
            if (e)
                std::rethrow_exception(e);
        if (progress)
            for (const TrialRecord& r : records)
                progress(r);
    }
    else
    {
        for (std::size_t job = 0; job < total; ++job)
        {
            run_one(job);
            if (progress)
                progress(records[job]);
        }
    }
    return records;
}

void write_records(std::ostream& out, std::span<const TrialRecord> records)
{
    for (const TrialRecord& r : records)
        out << r.to_json() << '\n';
}

std::vector<TrialRecord> read_records(std::istream& in)
{
    std::vector<TrialRecord> out;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line))
    {
        ++no;
        if (line.empty())
            continue;
        try
        {
            out.push_back(TrialRecord::from_json(line));
        }
        catch (const std::exception& e)
        {
            throw std::runtime_error("records line " + std::to_string(no) + ": " + e.what());
        }
    }
    return out;
}

} // namespace covergrid
