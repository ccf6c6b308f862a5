#pragma once

#include "covergrid/grid_world.hpp"
#include "covergrid/planner.hpp"
#include "covergrid/rng.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace covergrid {

// ---------------------------------------------------------------------------
// Decomposition

/// Inclusive range of rows within one column.
struct RowSpan
{
    int begin = 0;
    int end = 0;

    friend constexpr bool operator==(const RowSpan&, const RowSpan&) = default;
};

/// Cell shape: one row span per column, for consecutive columns starting at
/// first_col. Adjacent spans overlap, so the shape is 4-connected.
struct CellGeometry
{
    int first_col = 0;
    std::vector<RowSpan> spans;

    int last_col() const noexcept { return first_col + static_cast<int>(spans.size()) - 1; }
    bool contains(Cell c) const noexcept;
    std::size_t area() const noexcept;
    std::vector<Cell> squares() const;

    friend bool operator==(const CellGeometry&, const CellGeometry&) = default;
};

/// Vertical strip of columns [first_col, last_col].
struct Stripe
{
    int first_col = 0;
    int last_col = 0;

    int width() const noexcept { return last_col - first_col + 1; }
};

/// Splits `columns` into `parts` stripes whose widths differ by at most one;
/// the leftmost stripes take the extra columns. Throws if parts > columns.
std::vector<Stripe> balanced_stripes(int columns, std::size_t parts);

/// Slice decomposition of one stripe with a vertical sweep line moving left
/// to right. In every column the free squares form maximal row spans; a span
/// continues the cell of the previous column only when the two spans overlap
/// each other and nothing else. Anywhere else (the interval structure changes)
/// cells end and new ones begin. Output is ordered by (first_col, first row).
template <class ObstacleFn>
std::vector<CellGeometry> decompose_stripe(Stripe stripe, int height, ObstacleFn&& obstacle);

enum class CellStatus : std::uint8_t { Unassigned, Assigned, InProgress, Complete };
std::string_view to_string(CellStatus s) noexcept;

struct DecompCell
{
    int id = 0;
    int stripe = 0;
    CellGeometry geometry;
    CellStatus status = CellStatus::Unassigned;
    std::optional<std::size_t> robot;
    /// Superseded by a re-decomposition; kept as history.
    bool retired = false;

    bool active() const noexcept { return !retired; }
};

enum class DecompEventKind : std::uint8_t { Created, Split, Completed };

struct DecompEvent
{
    DecompEventKind kind = DecompEventKind::Created;
    int cell = 0;
    /// For Split: the new cells that now cover the retired cell's squares.
    std::vector<int> parts;
};

/// The on-line decomposition: cells (active and retired) and the adjacency
/// between active cells. Shapes are computed against the belief map with
/// unknown squares treated as free, so every known-free square belongs to
/// exactly one active cell.
class ReebGraph
{
  public:
    ReebGraph() = default;

    /// One cell per stripe, cell i assigned to robot i.
    static ReebGraph init_stripes(GridExtent extent, std::size_t robots);

    GridExtent extent() const noexcept { return extent_; }
    const std::vector<Stripe>& stripes() const noexcept { return stripes_; }
    const std::vector<DecompCell>& cells() const noexcept { return cells_; }
    const DecompCell& cell(int id) const { return cells_.at(static_cast<std::size_t>(id)); }
    DecompCell& cell(int id) { return cells_.at(static_cast<std::size_t>(id)); }
    std::vector<int> active_cells() const;

    /// Active cell whose shape contains the square, if any.
    std::optional<int> owner(Cell c) const;

    /// Sorted (a < b) pairs of active cells that share a 4-connected boundary.
    const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }

    /// Re-decomposes every stripe that contains a newly known obstacle.
    /// Cells whose shape is unchanged keep their id and status; the others
    /// are retired and replaced by new Unassigned cells (Created + Split
    /// events). Newly known free squares never change shapes.
    std::vector<DecompEvent> update(const BeliefView& belief, std::span<const Cell> newly_known_obstacles);

    /// Marks active cells Complete once every square is covered.
    std::vector<DecompEvent> refresh_completion(const BeliefView& belief);

    /// Columns (ascending, unique) where an active cell begins, excluding the
    /// first column of each stripe.
    std::vector<int> split_columns() const;

    /// Deterministic text dump: cells with status, owner and spans, then edges.
    std::string dump() const;

  private:
    void rebuild_index();

    GridExtent extent_;
    std::vector<Stripe> stripes_;
    std::vector<DecompCell> cells_;
    std::vector<std::int32_t> owner_;
    std::vector<std::pair<int, int>> edges_;
};

// ---------------------------------------------------------------------------
// Wavefront

using PassableFn = std::function<bool(Cell)>;

/// Breadth-first wave from `goal` over passable squares: moves to the goal,
/// or -1 where unreachable. The goal itself gets 0 even if not passable.
std::vector<int> wavefront_distances(GridExtent extent, Cell goal, const PassableFn& passable);

struct WavefrontPath
{
    bool found = false;
    /// Squares visited after `from`, ending at `to`.
    std::vector<Cell> squares;
    /// Action script from the given heading that ends on `to`. A reversal
    /// rotates in place against a wall when there is one; in the open it
    /// side-steps, so the walk can be up to two moves longer than `squares`.
    std::vector<Action> actions;

    std::size_t length() const noexcept { return squares.size(); }
};

/// Shortest 4-connected path over known-free squares. Descends the wave from
/// `from`, taking the first improving neighbour in N, E, S, W order.
WavefrontPath wavefront_path(const BeliefView& belief, Cell from, Cell to, Heading heading = Heading::North);
WavefrontPath wavefront_path(GridExtent extent, Cell from, Cell to, Heading heading, const PassableFn& passable);

/// The action that sends a robot one square toward the adjacent square `next`.
/// A reversal turns toward a side that is blocked when there is one (a pure
/// rotation); otherwise it turns left, which side-steps.
Action action_to_neighbor(const RobotState& state, Cell next, const PassableFn& passable, GridExtent extent);

// ---------------------------------------------------------------------------
// Per-cell coverage behaviours

/// Next square of the sweep: the first column in sweep order (direction
/// +1 = left to right) that still has uncovered squares; within it, the
/// uncovered square nearest the robot, preferring its current vertical
/// travel direction. nullopt once every square is covered.
std::optional<Cell> lawnmower_target(const CellGeometry& cell, const RobotState& robot, const BeliefView& belief, int sweep_direction);

/// One lawnmower step inside `cell`. nullopt means the cell is complete.
/// Throws std::logic_error if the robot is not inside the cell.
std::optional<Action> lawnmower_next(const CellGeometry& cell, const RobotState& robot, const BeliefView& belief, int sweep_direction,
                                     const PassableFn& passable);

enum class Hand : std::uint8_t { Right, Left };

struct WallFollowState
{
    std::optional<Cell> anchor;
    Hand hand = Hand::Right;
    std::optional<Cell> last_pos;
    std::size_t moves = 0;
};

/// Boundary following inside a region (inside(c) false for walls, obstacles
/// and squares of other cells). Latches onto the first wall found at the
/// robot's side (or behind it) and keeps it at hand; nullopt (Done) once the
/// robot is back on its anchor square after moving, or if it has nowhere to go.
std::optional<Action> wall_follow_next(const RobotState& robot, const std::function<bool(Cell)>& inside, WallFollowState& state);

// ---------------------------------------------------------------------------
// Market allocation

struct Bid
{
    std::size_t robot = 0;
    int cell = 0;
    double cost = std::numeric_limits<double>::infinity(); // seconds
};

/// remaining_squares * step + transit_moves * step; infinite if unreachable.
Bid make_bid(std::size_t robot, int cell, std::size_t remaining_squares, std::optional<std::size_t> transit_moves, double step_seconds = 0.5);

/// Bid for `cell` from a robot whose current work ends at `handoff`: transit
/// is the wave distance from `handoff` to the cell's nearest square over
/// passable squares.
Bid compute_bid(std::size_t robot, const DecompCell& cell, Cell handoff, std::size_t remaining_squares, const PassableFn& passable,
                GridExtent extent, double step_seconds = 0.5);

struct Assignment
{
    std::size_t robot = 0;
    int cell = 0;

    friend constexpr bool operator==(const Assignment&, const Assignment&) = default;
};

/// Greedy auction: repeatedly commits the lowest finite bid, ties broken by
/// (robot, cell), removing that robot and cell from further consideration.
std::vector<Assignment> allocate(std::span<const Bid> bids);

// ---------------------------------------------------------------------------
// Team planner

struct BoustroConfig
{
    double step_seconds = 0.5;
    bool wall_follow = true;
    /// Epochs without moving before a blocked robot takes a random action.
    std::size_t stuck_epochs = 3;
};

class BoustrophedonTeam final : public TeamPlanner
{
  public:
    BoustrophedonTeam(GridExtent extent, std::size_t robots, BoustroConfig cfg, std::uint64_t seed);

    std::string_view name() const noexcept override { return "boustro"; }
    void begin_epoch(const Snapshot& snapshot) override;
    Decision decide(const Snapshot& snapshot, std::size_t robot) override;

    const ReebGraph& graph() const noexcept { return graph_; }
    std::optional<int> current_cell(std::size_t robot) const { return robots_.at(robot).current; }
    std::optional<int> pending_cell(std::size_t robot) const { return robots_.at(robot).pending; }

  private:
    enum class Mode : std::uint8_t { Idle, Transit, WallFollow, Sweep };

    struct RobotTask
    {
        std::optional<int> current;
        std::optional<int> pending;
        Mode mode = Mode::Idle;
        bool wall_followed = false;
        WallFollowState wall;
        std::size_t wall_steps = 0;
        int sweep_direction = 1;
        std::optional<Cell> last_pos;
        std::size_t stuck = 0;
        Rng rng;
    };

    void handle_events(const Snapshot& snapshot, const std::vector<DecompEvent>& events);
    void assign(std::size_t robot, int cell, const Snapshot& snapshot);
    void promote_pending(std::size_t robot);
    void run_auction(const Snapshot& snapshot);
    std::size_t remaining_squares(int cell, const BeliefView& belief) const;
    Cell handoff_square(std::size_t robot, const Snapshot& snapshot) const;
    bool boundary_known(const CellGeometry& cell, const BeliefView& belief) const;

    BoustroConfig cfg_;
    ReebGraph graph_;
    std::vector<RobotTask> robots_;
    std::vector<std::uint8_t> incorporated_;
};

// ---------------------------------------------------------------------------

template <class ObstacleFn>
std::vector<CellGeometry> decompose_stripe(Stripe stripe, int height, ObstacleFn&& obstacle)
{
    struct Open
    {
        std::size_t cell;
        RowSpan span;
    };
    std::vector<CellGeometry> out;
    std::vector<Open> prev;
    std::vector<RowSpan> spans;

    for (int col = stripe.first_col; col <= stripe.last_col; ++col)
    {
        spans.clear();
        for (int row = 0; row < height;)
        {
            if (obstacle(Cell{col, row}))
            {
                ++row;
                continue;
            }
            const int begin = row;
            while (row < height && !obstacle(Cell{col, row}))
                ++row;
            spans.push_back({begin, row - 1});
        }

        const auto overlaps = [](RowSpan a, RowSpan b) { return a.begin <= b.end && b.begin <= a.end; };
        std::vector<Open> next;
        for (const RowSpan& s : spans)
        {
            std::size_t hits = 0;
            const Open* match = nullptr;
            for (const Open& p : prev)
                if (overlaps(p.span, s))
                {
                    ++hits;
                    match = &p;
                }
            bool continues = false;
            if (hits == 1)
            {
                std::size_t back = 0;
                for (const RowSpan& t : spans)
                    if (overlaps(match->span, t))
                        ++back;
                continues = back == 1;
            }
            if (continues)
            {
                out[match->cell].spans.push_back(s);
                next.push_back({match->cell, s});
            }
            else
            {
                out.push_back(CellGeometry{col, {s}});
                next.push_back({out.size() - 1, s});
            }
        }
        prev = std::move(next);
    }
    return out;
}

} // namespace covergrid
