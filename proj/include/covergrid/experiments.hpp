#pragma once

#include "covergrid/map_gen.hpp"
#include "covergrid/sim_engine.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace covergrid {

/// One configuration point of a sweep.
struct ConfigPoint
{
    PlannerKind planner = PlannerKind::Mcts;
    Placement placement = Placement::WallUniform;
    std::size_t robots = 1;
    double density = 0.10;
    double c_turn = 0.0;
    TurnPenaltyMode turn_mode = TurnPenaltyMode::None;
};

struct ExperimentPlan
{
    std::string name = "custom";
    std::vector<ConfigPoint> points;
    std::size_t maps = 5;   // per density
    std::size_t trials = 10; // per map
    int width = 20;
    int height = 20;
    std::uint64_t base_seed = 0;
    /// Base settings; each point overrides robots, placement and turn cost.
    SimConfig sim;
    /// When non-empty, these maps replace generated ones at every density
    /// and `maps` must equal their number.
    std::vector<GridMap> fixed_maps;

    /// Throws std::invalid_argument on an empty or inconsistent plan.
    void validate() const;
    std::size_t record_count() const noexcept { return points.size() * maps * trials; }
};

enum class Scale : std::uint8_t { Full, Desk };

/// fig3: robot count sweep (MCTS and Boustrophedon from the wall, MCTS from
/// random starts); fig4: density sweep with 3 robots; fig5: turn costs with
/// 5 robots. Full scale uses 1..10 robots and 10 trials per map; desk scale
/// uses robots {1, 2, 4, 8} and 5 trials per map.
std::optional<ExperimentPlan> preset(std::string_view name, Scale scale, std::uint64_t base_seed);

/// Maps depend only on (base seed, density, map index), so every planner and
/// configuration at one density sees the same maps.
std::uint64_t map_seed(std::uint64_t base_seed, double density, std::size_t map_index) noexcept;

/// mix of (base seed, planner index, config index, map index, trial index).
std::uint64_t trial_seed(std::uint64_t base_seed, PlannerKind planner, std::size_t config_index, std::size_t map_index,
                         std::size_t trial_index) noexcept;

GeneratedMap plan_map(const ExperimentPlan& plan, double density, std::size_t map_index);

SimConfig trial_config(const ExperimentPlan& plan, std::size_t config_index, std::size_t map_index, std::size_t trial_index);

/// All records in plan order: point, then map, then trial. Parallel runs
/// trials concurrently (up to thread_cap() workers) with identical output.
/// `progress`, if given, sees every record in plan order on the calling
/// thread: as each trial ends when serial, after the batch when parallel.
std::vector<TrialRecord> run_plan(const ExperimentPlan& plan, Exec exec = Exec::Serial,
                                  const std::function<void(const TrialRecord&)>& progress = {});

void write_records(std::ostream& out, std::span<const TrialRecord> records);

/// Throws std::runtime_error naming the line number on a malformed line.
std::vector<TrialRecord> read_records(std::istream& in);

} // namespace covergrid
