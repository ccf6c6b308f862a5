#pragma once

#include "covergrid/sim_engine.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace covergrid {

// Trace text format:
//   covergrid-trace 1
//   config <SimConfig JSON>
//   map W H          followed by H rows of '.' / '#'
//   start r0=col,row,H r1=...
//   epoch=E covered=C r0=col,row,H,A,M r1=...     one line per epoch
// Poses are after the epoch's moves; A is the action, M is 1 if it advanced.

class TraceWriter
{
  public:
    explicit TraceWriter(std::ostream& out) : out_(&out) {}

    void header(const SimConfig& cfg, const GridMap& map, std::span<const RobotState> starts);
    void epoch(std::size_t epoch, std::size_t covered, std::span<const RobotState> robots, const StepLog& log);

  private:
    std::ostream* out_;
};

struct TraceEpoch
{
    std::size_t epoch = 0;
    std::size_t covered = 0;
    std::vector<RobotState> robots;
    std::vector<Action> actions;
    std::vector<bool> moved;
};

struct TraceData
{
    SimConfig config;
    GridMap map;
    std::vector<RobotState> starts;
    std::vector<TraceEpoch> epochs;
};

/// Throws std::runtime_error with a line number on malformed input.
TraceData read_trace(std::istream& in);

/// Plays back recorded actions, one per robot per epoch.
class ScriptedTeam final : public TeamPlanner
{
  public:
    explicit ScriptedTeam(std::vector<std::vector<Action>> per_epoch) : script_(std::move(per_epoch)) {}

    std::string_view name() const noexcept override { return "scripted"; }
    Decision decide(const Snapshot& snapshot, std::size_t robot) override;

  private:
    std::vector<std::vector<Action>> script_;
};

struct ReplayReport
{
    std::size_t epochs = 0;
    bool consistent = true;
    std::string first_mismatch;
};

/// Re-executes the trace's actions through the engine and checks every
/// recorded pose, move flag and covered count.
ReplayReport replay(const TraceData& trace);

} // namespace covergrid
