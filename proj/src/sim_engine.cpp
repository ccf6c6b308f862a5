#include "covergrid/sim_engine.hpp"

#include "covergrid/rng.hpp"
#include "covergrid/trace.hpp"

#include <json.hpp>
#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <stdexcept>

namespace covergrid {

using json = nlohmann::ordered_json;

namespace {

// Child streams of SimConfig::seed.
constexpr std::uint64_t kPlacementStream = 1;
constexpr std::uint64_t kPlannerStream = 2;

} // namespace

std::string_view to_string(PlannerKind k) noexcept { return k == PlannerKind::Mcts ? "mcts" : "boustro"; }
std::string_view to_string(Placement p) noexcept { return p == Placement::WallUniform ? "wall" : "random"; }

std::optional<PlannerKind> planner_from_string(std::string_view s) noexcept
{
    if (s == "mcts")
        return PlannerKind::Mcts;
    if (s == "boustro")
        return PlannerKind::Boustrophedon;
    return std::nullopt;
}

std::optional<Placement> placement_from_string(std::string_view s) noexcept
{
    if (s == "wall")
        return Placement::WallUniform;
    if (s == "random")
        return Placement::RandomUniform;
    return std::nullopt;
}

int thread_cap()
{
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("COVERGRID_THREADS"))
    {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            n = static_cast<int>(v);
    }
    return n;
}

void SimConfig::validate(double cell_size) const
{
    if (!(step_seconds > 0.0) || !(robot_speed > 0.0))
        throw std::invalid_argument("sim: step and speed must be positive");
    if (std::abs(step_seconds * robot_speed - cell_size) > 1e-9)
        throw std::invalid_argument("sim: one step must move exactly one cell");
    if (!(sensor_range >= 0.0))
        throw std::invalid_argument("sim: sensor range must be >= 0");
    if (robots == 0)
        throw std::invalid_argument("sim: need at least one robot");
    if (planner == PlannerKind::Mcts)
        mcts.validate();
}

std::size_t SimConfig::step_cap(const GridMap& map) const { return max_steps != 0 ? max_steps : 25 * map.free_count(); }

namespace {

json config_object(const SimConfig& cfg, bool with_seed)
{
    json j;
    j["planner"] = to_string(cfg.planner);
    j["placement"] = to_string(cfg.placement);
    j["robots"] = cfg.robots;
    j["step_seconds"] = cfg.step_seconds;
    j["robot_speed"] = cfg.robot_speed;
    j["sensor_range"] = cfg.sensor_range;
    j["max_steps"] = cfg.max_steps;
    if (with_seed)
        j["seed"] = cfg.seed;
    if (cfg.planner == PlannerKind::Mcts)
    {
        const MctsConfig& m = cfg.mcts;
        json mj;
        mj["cp"] = m.c_p;
        mj["horizon"] = m.horizon;
        mj["c_hit"] = m.c_hit;
        mj["c_turn"] = m.c_turn;
        mj["turn_mode"] = to_string(m.turn_mode);
        mj["iters"] = m.iterations;
        if (m.wallclock_ms)
            mj["wallclock_ms"] = *m.wallclock_ms;
        mj["backup"] = m.backup == BackupRule::ChildMean ? "child_mean" : "visit_mean";
        mj["reward_scale"] = m.reward_scale;
        mj["anchor"] = m.anchor == TimeAnchor::Rollout ? "rollout" : "episode";
        j["mcts"] = mj;
    }
    else
    {
        json bj;
        bj["wall_follow"] = cfg.boustro.wall_follow;
        bj["stuck_epochs"] = cfg.boustro.stuck_epochs;
        j["boustro"] = bj;
    }
    return j;
}

} // namespace

std::string to_json(const SimConfig& cfg) { return config_object(cfg, true).dump(); }

SimConfig sim_config_from_json(std::string_view text)
{
    const json j = json::parse(text);
    SimConfig cfg;
    const auto planner = planner_from_string(j.at("planner").get<std::string>());
    const auto placement = placement_from_string(j.at("placement").get<std::string>());
    if (!planner || !placement)
        throw std::runtime_error("config: unknown planner or placement");
    cfg.planner = *planner;
    cfg.placement = *placement;
    cfg.robots = j.at("robots").get<std::size_t>();
    cfg.step_seconds = j.at("step_seconds").get<double>();
    cfg.robot_speed = j.at("robot_speed").get<double>();
    cfg.sensor_range = j.at("sensor_range").get<double>();
    cfg.max_steps = j.at("max_steps").get<std::size_t>();
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("mcts"))
    {
        const json& m = j["mcts"];
        cfg.mcts.c_p = m.at("cp").get<double>();
        cfg.mcts.horizon = m.at("horizon").get<int>();
        cfg.mcts.c_hit = m.at("c_hit").get<double>();
        cfg.mcts.c_turn = m.at("c_turn").get<double>();
        const auto mode = turn_mode_from_string(m.at("turn_mode").get<std::string>());
        if (!mode)
            throw std::runtime_error("config: unknown turn mode");
        cfg.mcts.turn_mode = *mode;
        cfg.mcts.iterations = m.at("iters").get<std::size_t>();
        if (m.contains("wallclock_ms"))
            cfg.mcts.wallclock_ms = m["wallclock_ms"].get<double>();
        cfg.mcts.backup = m.at("backup").get<std::string>() == "visit_mean" ? BackupRule::VisitMean : BackupRule::ChildMean;
        cfg.mcts.reward_scale = m.at("reward_scale").get<double>();
        cfg.mcts.anchor = m.value("anchor", std::string("rollout")) == "episode" ? TimeAnchor::Episode : TimeAnchor::Rollout;
        cfg.mcts.step_seconds = cfg.step_seconds;
    }
    if (j.contains("boustro"))
    {
        cfg.boustro.wall_follow = j["boustro"].at("wall_follow").get<bool>();
        cfg.boustro.stuck_epochs = j["boustro"].at("stuck_epochs").get<std::size_t>();
        cfg.boustro.step_seconds = cfg.step_seconds;
    }
    return cfg;
}

std::string config_digest(const SimConfig& cfg)
{
    const std::string text = config_object(cfg, false).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text)
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<RobotState> place_robots(const GridMap& map, std::size_t n, Placement mode, std::uint64_t seed)
{
    if (n == 0)
        throw std::invalid_argument("placement: need at least one robot");
    const GridExtent ext = map.extent();
    std::vector<RobotState> out;
    out.reserve(n);

    if (mode == Placement::WallUniform)
    {
        const int w = map.width();
        std::vector<char> used(static_cast<std::size_t>(w), 0);
        std::size_t open = 0;
        for (int col = 0; col < w; ++col)
            open += map.is_obstacle({col, 0}) ? 0 : 1;
        if (n > open)
            throw std::invalid_argument("placement: more robots than free squares along the wall");
        for (std::size_t i = 0; i < n; ++i)
        {
            const int ideal = static_cast<int>((2 * i + 1) * static_cast<std::size_t>(w) / (2 * n));
            int chosen = -1;
            for (int off = 0; off < w && chosen < 0; ++off)
                for (int col : {ideal - off, ideal + off})
                    if (chosen < 0 && col >= 0 && col < w && !used[static_cast<std::size_t>(col)] && !map.is_obstacle({col, 0}))
                        chosen = col;
            used[static_cast<std::size_t>(chosen)] = 1;
            out.push_back({{chosen, 0}, Heading::South});
        }
        return out;
    }

    std::vector<Cell> free;
    for (std::size_t i = 0; i < ext.size(); ++i)
        if (!map.is_obstacle(ext.cell(i)))
            free.push_back(ext.cell(i));
    if (n > free.size())
        throw std::invalid_argument("placement: more robots than free squares");
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i)
    {
        const std::size_t j = i + uniform_below(rng, free.size() - i);
        std::swap(free[i], free[j]);
        const auto h = static_cast<Heading>(uniform_below(rng, 4));
        out.push_back({free[i], h});
    }
    return out;
}

std::vector<MoveResult> resolve_moves(const GridMap& map, std::span<const RobotState> robots, std::span<const Action> actions)
{
    if (robots.size() != actions.size())
        throw std::invalid_argument("resolve: one action per robot required");
    std::vector<MoveResult> out;
    out.reserve(robots.size());
    std::vector<Cell> claimed;
    for (std::size_t i = 0; i < robots.size(); ++i)
    {
        const MoveResult r = apply_action(robots[i], actions[i], map.extent(), [&](Cell c) {
            if (map.is_obstacle(c))
                return true;
            for (const RobotState& other : robots)
                if (other.pos == c)
                    return true;
            for (Cell taken : claimed)
                if (taken == c)
                    return true;
            return false;
        });
        if (r.moved)
            claimed.push_back(r.state.pos);
        out.push_back(r);
    }
    return out;
}

std::string TrialRecord::to_json() const
{
    json j;
    j["planner"] = planner;
    j["placement"] = placement;
    j["robots"] = robots;
    j["density"] = density;
    j["config"] = config_index;
    j["map"] = map_index;
    j["trial"] = trial_index;
    j["seed"] = seed;
    j["config_digest"] = config_digest;
    j["c_turn"] = c_turn;
    j["turn_mode"] = turn_mode;
    j["timeout"] = timeout;
    j["epochs"] = epochs;
    j["completion_time"] = completion_time;
    j["covered"] = covered;
    j["reachable"] = reachable;
    j["left_turns"] = left_turns;
    j["right_turns"] = right_turns;
    json per = json::array();
    for (const TurnCount& t : turns)
        per.push_back(json::array({t.left, t.right}));
    j["turns"] = per;
    return j.dump();
}

TrialRecord TrialRecord::from_json(std::string_view line)
{
    const json j = json::parse(line);
    TrialRecord r;
    r.planner = j.at("planner").get<std::string>();
    r.placement = j.at("placement").get<std::string>();
    r.robots = j.at("robots").get<std::size_t>();
    r.density = j.at("density").get<double>();
    r.config_index = j.at("config").get<std::size_t>();
    r.map_index = j.at("map").get<std::size_t>();
    r.trial_index = j.at("trial").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config_digest = j.at("config_digest").get<std::string>();
    r.c_turn = j.at("c_turn").get<double>();
    r.turn_mode = j.at("turn_mode").get<std::string>();
    r.timeout = j.at("timeout").get<bool>();
    r.epochs = j.at("epochs").get<std::size_t>();
    r.completion_time = j.at("completion_time").get<double>();
    r.covered = j.at("covered").get<std::size_t>();
    r.reachable = j.at("reachable").get<std::size_t>();
    r.left_turns = j.at("left_turns").get<std::size_t>();
    r.right_turns = j.at("right_turns").get<std::size_t>();
    for (const json& t : j.at("turns"))
        r.turns.push_back({t.at(0).get<std::size_t>(), t.at(1).get<std::size_t>()});
    return r;
}

std::unique_ptr<TeamPlanner> make_planner(const SimConfig& cfg, GridExtent extent)
{
    const std::uint64_t seed = derive_seed(cfg.seed, {kPlannerStream});
    if (cfg.planner == PlannerKind::Mcts)
    {
        MctsConfig m = cfg.mcts;
        m.step_seconds = cfg.step_seconds;
        return std::make_unique<MctsTeam>(cfg.robots, m, seed);
    }
    BoustroConfig b = cfg.boustro;
    b.step_seconds = cfg.step_seconds;
    return std::make_unique<BoustrophedonTeam>(extent, cfg.robots, b, seed);
}

Simulation::Simulation(SimConfig cfg, GridMap map) : cfg_(std::move(cfg))
{
    cfg_.validate(map.cell_size());
    world_.robots = place_robots(map, cfg_.robots, cfg_.placement, derive_seed(cfg_.seed, {kPlacementStream}));
    world_.map = std::move(map);
    planner_ = make_planner(cfg_, world_.map.extent());
    init();
}

Simulation::Simulation(SimConfig cfg, GridMap map, std::vector<RobotState> starts, std::unique_ptr<TeamPlanner> planner)
    : cfg_(std::move(cfg)), planner_(std::move(planner))
{
    cfg_.robots = starts.size();
    cfg_.validate(map.cell_size());
    if (!planner_)
        throw std::invalid_argument("sim: planner required");
    world_.map = std::move(map);
    world_.robots = std::move(starts);
    init();
}

void Simulation::init()
{
    GridMap& map = world_.map;
    std::vector<Cell> seeds;
    for (std::size_t i = 0; i < world_.robots.size(); ++i)
    {
        const Cell c = world_.robots[i].pos;
        if (!map.in_bounds(c) || map.is_obstacle(c))
            throw std::invalid_argument("sim: robot starts on an obstacle or off the map");
        for (std::size_t j = 0; j < i; ++j)
            if (world_.robots[j].pos == c)
                throw std::invalid_argument("sim: two robots share a start square");
        seeds.push_back(c);
    }
    reachable_ = reachable_free_cells(map, seeds);
    cap_ = cfg_.step_cap(map);
    world_.turns.assign(world_.robots.size(), {});
    world_.published.assign(world_.robots.size(), {});
    for (const RobotState& r : world_.robots)
        map.mark_covered(r.pos);
    for (const RobotState& r : world_.robots)
        sense(map, r.pos, cfg_.sensor_range);
}

bool Simulation::is_complete() const
{
    if (world_.map.covered_count() < reachable_.size())
        return false;
    for (Cell c : reachable_)
        if (!world_.map.covered(c))
            return false;
    return true;
}

StepLog Simulation::step()
{
    if (is_complete())
        throw std::logic_error("sim: step after completion");
    if (world_.epoch >= cap_)
        throw std::logic_error("sim: step past the step cap");

    const std::size_t n = world_.robots.size();
    const Snapshot snap{BeliefView(world_.map), world_.robots, world_.published, world_.epoch};
    planner_->begin_epoch(snap);

    std::vector<Decision> decisions(n);
    if (cfg_.exec == Exec::Parallel && n > 1)
    {
        std::vector<std::exception_ptr> errors(n);
        const int threads = std::min(thread_cap(), static_cast<int>(n));
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (std::size_t i = 0; i < n; ++i)
        {
            try
            {
                decisions[i] = planner_->decide(snap, i);
            }
            catch (...)
            {
                errors[i] = std::current_exception();
            }
        }
        for (const auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }
    else
    {
        for (std::size_t i = 0; i < n; ++i)
            decisions[i] = planner_->decide(snap, i);
    }

    StepLog log;
    for (const Decision& d : decisions)
        log.actions.push_back(d.action);
    const std::vector<MoveResult> moves = resolve_moves(world_.map, world_.robots, log.actions);

    for (std::size_t i = 0; i < n; ++i)
    {
        world_.robots[i] = moves[i].state;
        log.moved.push_back(moves[i].moved);
        if (log.actions[i] == Action::Left)
            ++world_.turns[i].left;
        else if (log.actions[i] == Action::Right)
            ++world_.turns[i].right;
        auto& path = world_.published[i];
        path.assign(decisions[i].best_path.begin() + (decisions[i].best_path.empty() ? 0 : 1), decisions[i].best_path.end());
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        if (!moves[i].moved)
            continue;
        world_.map.mark_covered(moves[i].state.pos);
        sense(world_.map, moves[i].state.pos, cfg_.sensor_range);
    }
    ++world_.epoch;
    return log;
}

TrialRecord Simulation::run(TraceWriter* trace)
{
    if (trace)
        trace->header(cfg_, world_.map, world_.robots);
    while (!is_complete() && world_.epoch < cap_)
    {
        const StepLog log = step();
        if (trace)
            trace->epoch(world_.epoch, world_.map.covered_count(), world_.robots, log);
    }

    TrialRecord r;
    r.planner = std::string(to_string(cfg_.planner));
    r.placement = std::string(to_string(cfg_.placement));
    r.robots = world_.robots.size();
    r.seed = cfg_.seed;
    r.config_digest = config_digest(cfg_);
    if (cfg_.planner == PlannerKind::Mcts)
    {
        r.c_turn = cfg_.mcts.c_turn;
        r.turn_mode = std::string(to_string(cfg_.mcts.turn_mode));
    }
    r.timeout = !is_complete();
    r.epochs = world_.epoch;
    r.completion_time = static_cast<double>(world_.epoch) * cfg_.step_seconds;
    r.covered = world_.map.covered_count();
    r.reachable = reachable_.size();
    r.turns = world_.turns;
    for (const TurnCount& t : world_.turns)
    {
        r.left_turns += t.left;
        r.right_turns += t.right;
    }
    return r;
}

TrialRecord run_trial(const SimConfig& cfg, const GridMap& map)
{
    Simulation sim(cfg, map);
    return sim.run();
}

} // namespace covergrid
