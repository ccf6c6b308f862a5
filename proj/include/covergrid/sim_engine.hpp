#pragma once

#include "covergrid/boustrophedon.hpp"
#include "covergrid/grid_world.hpp"
#include "covergrid/mcts.hpp"
#include "covergrid/planner.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace covergrid {

enum class PlannerKind : std::uint8_t { Mcts, Boustrophedon };
enum class Placement : std::uint8_t { WallUniform, RandomUniform };

/// How the per-epoch planner queries are executed. Both give identical results.
enum class Exec : std::uint8_t { Serial, Parallel };

std::string_view to_string(PlannerKind k) noexcept;
std::string_view to_string(Placement p) noexcept;
std::optional<PlannerKind> planner_from_string(std::string_view s) noexcept;
std::optional<Placement> placement_from_string(std::string_view s) noexcept;

/// Worker count for OpenMP regions: COVERGRID_THREADS if set and positive,
/// else the OpenMP default.
int thread_cap();

struct SimConfig
{
    double step_seconds = 0.5;
    double robot_speed = 1.0; // m/s
    double sensor_range = 2.0; // m
    /// 0 selects 25 x (number of free cells).
    std::size_t max_steps = 0;
    PlannerKind planner = PlannerKind::Mcts;
    Placement placement = Placement::WallUniform;
    std::size_t robots = 1;
    std::uint64_t seed = 0;
    MctsConfig mcts;
    BoustroConfig boustro;
    Exec exec = Exec::Serial;

    /// Throws std::invalid_argument unless one step moves exactly one cell.
    void validate(double cell_size = GridMap::kDefaultCellSize) const;
    std::size_t step_cap(const GridMap& map) const;
};

/// Compact JSON with a fixed key order; exec is not serialized.
std::string to_json(const SimConfig& cfg);
SimConfig sim_config_from_json(std::string_view text);

/// FNV-1a 64 of the canonical config text (seed and exec excluded), as hex.
std::string config_digest(const SimConfig& cfg);

/// WallUniform: along row 0, column floor((2i + 1) W / (2n)), heading South;
/// an obstacle there moves the robot to the nearest free unused column of the
/// row. RandomUniform: distinct free cells and headings drawn from `seed`.
/// Throws std::invalid_argument if there are not enough cells.
std::vector<RobotState> place_robots(const GridMap& map, std::size_t n, Placement mode, std::uint64_t seed);

/// Simultaneous motion in id order. A move is blocked by an obstacle, the map
/// edge, any robot's current square, or a square already claimed this epoch by
/// a lower id. Blocked robots keep their square but take the new heading.
std::vector<MoveResult> resolve_moves(const GridMap& map, std::span<const RobotState> robots, std::span<const Action> actions);

struct TurnCount
{
    std::size_t left = 0;
    std::size_t right = 0;

    friend constexpr bool operator==(const TurnCount&, const TurnCount&) = default;
};

struct WorldState
{
    GridMap map;
    std::vector<RobotState> robots;
    std::size_t epoch = 0;
    std::vector<TurnCount> turns;
    std::vector<std::vector<Action>> published;
};

struct TrialRecord
{
    std::string planner;
    std::string placement;
    std::size_t robots = 0;
    double density = 0.0;
    std::size_t config_index = 0;
    std::size_t map_index = 0;
    std::size_t trial_index = 0;
    std::uint64_t seed = 0;
    std::string config_digest;
    double c_turn = 0.0;
    std::string turn_mode = "none";
    bool timeout = false;
    std::size_t epochs = 0;
    double completion_time = 0.0;
    std::size_t covered = 0;
    std::size_t reachable = 0;
    std::size_t left_turns = 0;
    std::size_t right_turns = 0;
    std::vector<TurnCount> turns;

    /// One JSON object, fixed key order, no whitespace.
    std::string to_json() const;
    static TrialRecord from_json(std::string_view line);

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

std::unique_ptr<TeamPlanner> make_planner(const SimConfig& cfg, GridExtent extent);

struct StepLog
{
    std::vector<Action> actions;
    std::vector<bool> moved;
};

class TraceWriter;

class Simulation
{
  public:
    /// Places robots per cfg and builds the configured planner.
    Simulation(SimConfig cfg, GridMap map);
    /// Explicit start states and planner (tests, replay).
    Simulation(SimConfig cfg, GridMap map, std::vector<RobotState> starts, std::unique_ptr<TeamPlanner> planner);

    const WorldState& world() const noexcept { return world_; }
    const SimConfig& config() const noexcept { return cfg_; }
    TeamPlanner& planner() noexcept { return *planner_; }
    std::size_t reachable_count() const noexcept { return reachable_.size(); }
    std::size_t step_cap() const noexcept { return cap_; }

    /// Every free square reachable from the starts is covered.
    bool is_complete() const;

    /// One decision epoch. Throws std::logic_error when already complete or
    /// at the step cap.
    StepLog step();

    /// Steps until complete or the cap; a cap hit is reported as a timeout.
    TrialRecord run(TraceWriter* trace = nullptr);

  private:
    void init();

    SimConfig cfg_;
    WorldState world_;
    std::unique_ptr<TeamPlanner> planner_;
    std::vector<Cell> reachable_;
    std::size_t cap_ = 0;
};

/// Places robots, runs `cfg` on a copy of `map` and returns the record.
TrialRecord run_trial(const SimConfig& cfg, const GridMap& map);

} // namespace covergrid
