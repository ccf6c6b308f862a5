#pragma once

#include "covergrid/grid_world.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace covergrid {

/// Read-only view of what the team knows: the belief map and the covered set.
/// Planners never see ground truth.
class BeliefView
{
  public:
    explicit BeliefView(const GridMap& map) noexcept : map_(&map) {}

    GridExtent extent() const noexcept { return map_->extent(); }
    int width() const noexcept { return map_->width(); }
    int height() const noexcept { return map_->height(); }
    bool in_bounds(Cell c) const noexcept { return map_->in_bounds(c); }
    Occupancy known(Cell c) const { return map_->known(c); }
    bool known_obstacle(Cell c) const { return map_->known_obstacle(c); }
    bool covered(Cell c) const { return map_->covered(c); }

  private:
    const GridMap* map_;
};

/// Everything a planner may read during one decision epoch. Immutable for the
/// duration of the epoch; shared by all concurrently running planners.
struct Snapshot
{
    BeliefView belief;
    std::span<const RobotState> robots;
    /// Per robot: the best path it published last epoch, starting from the
    /// robot's current state (the already-executed first action is dropped).
    std::span<const std::vector<Action>> published_paths;
    std::size_t epoch = 0;
};

struct Decision
{
    Action action = Action::Straight;
    /// Intended action sequence starting with `action`; published to peers.
    std::vector<Action> best_path;
    std::string diagnostics;
};

/// A planner for the whole team. begin_epoch runs on the engine thread;
/// decide() may run concurrently for distinct robots and must only touch that
/// robot's private state.
class TeamPlanner
{
  public:
    virtual ~TeamPlanner() = default;
    virtual std::string_view name() const noexcept = 0;
    virtual void begin_epoch(const Snapshot& /*snapshot*/) {}
    virtual Decision decide(const Snapshot& snapshot, std::size_t robot) = 0;
};

} // namespace covergrid
