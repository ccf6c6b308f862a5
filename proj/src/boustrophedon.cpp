#include "covergrid/boustrophedon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace covergrid {

namespace {

int manhattan(Cell a, Cell b) { return std::abs(a.col - b.col) + std::abs(a.row - b.row); }

} // namespace

// ---------------------------------------------------------------------------
// Lawnmower

std::optional<Cell> lawnmower_target(const CellGeometry& cell, const RobotState& robot, const BeliefView& belief, int sweep_direction)
{
    const int n = static_cast<int>(cell.spans.size());
    for (int i = 0; i < n; ++i)
    {
        const int idx = sweep_direction >= 0 ? i : n - 1 - i;
        const int col = cell.first_col + idx;
        const RowSpan span = cell.spans[static_cast<std::size_t>(idx)];
        const auto open = [&](int row) {
            const Cell c{col, row};
            return !belief.covered(c) && !belief.known_obstacle(c);
        };

        std::optional<int> best;
        if (col == robot.pos.col && (robot.heading == Heading::North || robot.heading == Heading::South))
        {
            // Keep travelling along the column while there is work that way.
            const int step = robot.heading == Heading::North ? -1 : 1;
            for (int row = robot.pos.row + step; row >= span.begin && row <= span.end; row += step)
                if (open(row))
                {
                    best = row;
                    break;
                }
        }
        if (!best)
        {
            for (int row = span.begin; row <= span.end; ++row)
                if (open(row) && (!best || std::abs(row - robot.pos.row) < std::abs(*best - robot.pos.row)))
                    best = row;
        }
        if (best)
            return Cell{col, *best};
    }
    return std::nullopt;
}

std::optional<Action> lawnmower_next(const CellGeometry& cell, const RobotState& robot, const BeliefView& belief, int sweep_direction,
                                     const PassableFn& passable)
{
    if (!cell.contains(robot.pos))
        throw std::logic_error("lawnmower: robot is outside its cell");
    const auto target = lawnmower_target(cell, robot, belief, sweep_direction);
    if (!target)
        return std::nullopt;
    const GridExtent ext = belief.extent();
    if (manhattan(*target, robot.pos) == 1)
        return action_to_neighbor(robot, *target, passable, ext);
    const WavefrontPath path = wavefront_path(ext, robot.pos, *target, robot.heading, passable);
    if (!path.found || path.squares.empty())
        return Action::Straight;
    return action_to_neighbor(robot, path.squares.front(), passable, ext);
}

// ---------------------------------------------------------------------------
// Wall following

std::optional<Action> wall_follow_next(const RobotState& robot, const std::function<bool(Cell)>& inside, WallFollowState& state)
{
    const auto blocked = [&](Cell c) { return !inside(c); };
    const Heading h = robot.heading;

    if (state.last_pos && *state.last_pos != robot.pos)
        ++state.moves;
    state.last_pos = robot.pos;

    const bool ahead = blocked(neighbor(robot.pos, h));
    const bool left = blocked(neighbor(robot.pos, turn_left(h)));
    const bool right = blocked(neighbor(robot.pos, turn_right(h)));
    const bool back = blocked(neighbor(robot.pos, reverse(h)));
    if (ahead && left && right && back)
        return std::nullopt;

    if (!state.anchor)
    {
        const auto latch = [&](Hand hand) {
            state.anchor = robot.pos;
            state.hand = hand;
            state.moves = 0;
        };
        if (right)
            latch(Hand::Right);
        else if (left || back)
            latch(Hand::Left);
        else if (ahead)
        {
            // Side-step right so the wall ahead ends up on the left.
            latch(Hand::Left);
            return Action::Right;
        }
        else
            return Action::Straight;
    }

    if (state.moves > 0 && robot.pos == *state.anchor)
        return std::nullopt;

    const std::array<Action, 3> order = state.hand == Hand::Right ? std::array{Action::Right, Action::Straight, Action::Left}
                                                                  : std::array{Action::Left, Action::Straight, Action::Right};
    for (Action a : order)
        if (!blocked(neighbor(robot.pos, rotate(h, a))))
            return a;
    // Dead end: rotate in place against the hand-side wall.
    return state.hand == Hand::Right ? Action::Left : Action::Right;
}

// ---------------------------------------------------------------------------
// Market allocation

Bid make_bid(std::size_t robot, int cell, std::size_t remaining_squares, std::optional<std::size_t> transit_moves, double step_seconds)
{
    Bid b{robot, cell, std::numeric_limits<double>::infinity()};
    if (transit_moves)
        b.cost = static_cast<double>(remaining_squares + *transit_moves) * step_seconds;
    return b;
}

namespace {

std::optional<std::size_t> nearest_distance(const CellGeometry& g, const std::vector<int>& dist, GridExtent extent)
{
    std::optional<std::size_t> best;
    for (Cell sq : g.squares())
    {
        const int d = dist[extent.index(sq)];
        if (d >= 0 && (!best || static_cast<std::size_t>(d) < *best))
            best = static_cast<std::size_t>(d);
    }
    return best;
}

} // namespace

Bid compute_bid(std::size_t robot, const DecompCell& cell, Cell handoff, std::size_t remaining_squares, const PassableFn& passable,
                GridExtent extent, double step_seconds)
{
    const std::vector<int> dist = wavefront_distances(extent, handoff, passable);
    return make_bid(robot, cell.id, remaining_squares, nearest_distance(cell.geometry, dist, extent), step_seconds);
}

std::vector<Assignment> allocate(std::span<const Bid> bids)
{
    std::vector<Bid> sorted(bids.begin(), bids.end());
    std::sort(sorted.begin(), sorted.end(), [](const Bid& a, const Bid& b) {
        if (a.cost != b.cost)
            return a.cost < b.cost;
        if (a.robot != b.robot)
            return a.robot < b.robot;
        return a.cell < b.cell;
    });
    std::vector<Assignment> out;
    std::vector<std::size_t> robots_taken;
    std::vector<int> cells_taken;
    for (const Bid& b : sorted)
    {
        if (!std::isfinite(b.cost))
            break;
        if (std::find(robots_taken.begin(), robots_taken.end(), b.robot) != robots_taken.end())
            continue;
        if (std::find(cells_taken.begin(), cells_taken.end(), b.cell) != cells_taken.end())
            continue;
        robots_taken.push_back(b.robot);
        cells_taken.push_back(b.cell);
        out.push_back({b.robot, b.cell});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Team planner

BoustrophedonTeam::BoustrophedonTeam(GridExtent extent, std::size_t robots, BoustroConfig cfg, std::uint64_t seed)
    : cfg_(cfg), graph_(ReebGraph::init_stripes(extent, robots)), incorporated_(extent.size(), 0)
{
    robots_.resize(robots);
    for (std::size_t r = 0; r < robots; ++r)
    {
        robots_[r].current = static_cast<int>(r);
        robots_[r].mode = Mode::Transit;
        robots_[r].rng.seed(derive_seed(seed, {r}));
    }
}

std::size_t BoustrophedonTeam::remaining_squares(int cell, const BeliefView& belief) const
{
    std::size_t n = 0;
    for (Cell sq : graph_.cell(cell).geometry.squares())
        if (!belief.covered(sq))
            ++n;
    return n;
}

Cell BoustrophedonTeam::handoff_square(std::size_t robot, const Snapshot& snapshot) const
{
    const RobotTask& t = robots_[robot];
    const Cell pos = snapshot.robots[robot].pos;
    if (!t.current)
        return pos;
    const CellGeometry& g = graph_.cell(*t.current).geometry;
    const int n = static_cast<int>(g.spans.size());
    for (int i = n - 1; i >= 0; --i)
    {
        const int idx = t.sweep_direction >= 0 ? i : n - 1 - i;
        const RowSpan s = g.spans[static_cast<std::size_t>(idx)];
        for (int row = s.begin; row <= s.end; ++row)
        {
            const Cell c{g.first_col + idx, row};
            if (!snapshot.belief.covered(c) && !snapshot.belief.known_obstacle(c))
                return c;
        }
    }
    return pos;
}

bool BoustrophedonTeam::boundary_known(const CellGeometry& cell, const BeliefView& belief) const
{
    for (Cell sq : cell.squares())
    {
        bool on_boundary = false;
        for (Cell d : kHeadingDelta)
            on_boundary = on_boundary || !cell.contains({sq.col + d.col, sq.row + d.row});
        if (on_boundary && belief.known(sq) == Occupancy::Unknown)
            return false;
    }
    return true;
}

void BoustrophedonTeam::assign(std::size_t robot, int cell, const Snapshot& snapshot)
{
    DecompCell& c = graph_.cell(cell);
    c.robot = robot;
    c.status = c.geometry.contains(snapshot.robots[robot].pos) ? CellStatus::InProgress : CellStatus::Assigned;
}

void BoustrophedonTeam::promote_pending(std::size_t robot)
{
    RobotTask& t = robots_[robot];
    t.current = t.pending;
    t.pending.reset();
    t.mode = t.current ? Mode::Transit : Mode::Idle;
    t.wall_followed = false;
}

void BoustrophedonTeam::handle_events(const Snapshot& snapshot, const std::vector<DecompEvent>& events)
{
    for (const DecompEvent& ev : events)
    {
        if (ev.kind != DecompEventKind::Split)
            continue;
        const DecompCell& old = graph_.cell(ev.cell);
        if (!old.robot)
            continue;
        const std::size_t r = *old.robot;
        RobotTask& t = robots_[r];
        if (t.pending == ev.cell)
        {
            t.pending.reset();
            continue;
        }
        if (t.current != ev.cell)
            continue;

        // The robot keeps the piece it stands in, else the nearest open piece.
        const Cell pos = snapshot.robots[r].pos;
        std::optional<int> heir;
        int heir_dist = 0;
        for (int part : ev.parts)
        {
            const DecompCell& p = graph_.cell(part);
            if (p.status != CellStatus::Unassigned)
                continue;
            if (p.geometry.contains(pos))
            {
                heir = part;
                break;
            }
            int d = -1;
            for (Cell sq : p.geometry.squares())
                if (!snapshot.belief.covered(sq) && (d < 0 || manhattan(sq, pos) < d))
                    d = manhattan(sq, pos);
            if (d >= 0 && (!heir || d < heir_dist))
            {
                heir = part;
                heir_dist = d;
            }
        }
        if (heir)
        {
            t.current = heir;
            assign(r, *heir, snapshot);
        }
        else
            promote_pending(r);
    }
}

void BoustrophedonTeam::run_auction(const Snapshot& snapshot)
{
    std::vector<int> open;
    for (int id : graph_.active_cells())
        if (graph_.cell(id).status == CellStatus::Unassigned)
            open.push_back(id);
    if (open.empty())
        return;

    const BeliefView& belief = snapshot.belief;
    const GridExtent ext = belief.extent();
    const PassableFn passable = [&](Cell c) { return !belief.known_obstacle(c); };

    std::vector<Bid> bids;
    for (std::size_t r = 0; r < robots_.size(); ++r)
    {
        if (robots_[r].pending)
            continue;
        const Cell handoff = handoff_square(r, snapshot);
        const std::size_t remaining = robots_[r].current ? remaining_squares(*robots_[r].current, belief) : 0;
        const std::vector<int> dist = wavefront_distances(ext, handoff, passable);
        for (int id : open)
        {
            std::optional<std::size_t> transit;
            for (Cell sq : graph_.cell(id).geometry.squares())
            {
                const int d = dist[ext.index(sq)];
                if (d >= 0 && (!transit || static_cast<std::size_t>(d) < *transit))
                    transit = static_cast<std::size_t>(d);
            }
            bids.push_back(make_bid(r, id, remaining, transit, cfg_.step_seconds));
        }
    }

    for (const Assignment& a : allocate(bids))
    {
        RobotTask& t = robots_[a.robot];
        if (!t.current)
        {
            t.current = a.cell;
            t.mode = Mode::Transit;
            t.wall_followed = false;
        }
        else
            t.pending = a.cell;
        assign(a.robot, a.cell, snapshot);
        if (t.pending == a.cell)
            graph_.cell(a.cell).status = CellStatus::Assigned;
    }
}

void BoustrophedonTeam::begin_epoch(const Snapshot& snapshot)
{
    const BeliefView& belief = snapshot.belief;
    const GridExtent ext = belief.extent();

    std::vector<Cell> fresh;
    for (std::size_t i = 0; i < ext.size(); ++i)
    {
        const Cell c = ext.cell(i);
        if (!incorporated_[i] && belief.known_obstacle(c))
        {
            incorporated_[i] = 1;
            fresh.push_back(c);
        }
    }
    handle_events(snapshot, graph_.update(belief, fresh));

    graph_.refresh_completion(belief);
    for (std::size_t r = 0; r < robots_.size(); ++r)
    {
        RobotTask& t = robots_[r];
        if (t.pending && graph_.cell(*t.pending).status == CellStatus::Complete)
            t.pending.reset();
        while (t.current && graph_.cell(*t.current).status == CellStatus::Complete)
            promote_pending(r);
        if (t.current)
        {
            DecompCell& c = graph_.cell(*t.current);
            if (c.geometry.contains(snapshot.robots[r].pos))
                c.status = CellStatus::InProgress;
        }
    }

    run_auction(snapshot);
}

Decision BoustrophedonTeam::decide(const Snapshot& snapshot, std::size_t robot)
{
    RobotTask& t = robots_.at(robot);
    const RobotState state = snapshot.robots[robot];
    const BeliefView& belief = snapshot.belief;
    const GridExtent ext = belief.extent();

    const auto finish = [](Action a) { return Decision{a, {a}, {}}; };

    if (t.last_pos && *t.last_pos == state.pos)
        ++t.stuck;
    else
        t.stuck = 0;
    t.last_pos = state.pos;
    if (t.stuck >= cfg_.stuck_epochs)
    {
        t.stuck = 0;
        return finish(kActions[uniform_below(t.rng, kActions.size())]);
    }

    const PassableFn passable_any = [&](Cell c) { return !belief.known_obstacle(c); };
    const PassableFn passable_avoid = [&](Cell c) {
        if (belief.known_obstacle(c))
            return false;
        for (std::size_t j = 0; j < snapshot.robots.size(); ++j)
            if (j != robot && snapshot.robots[j].pos == c)
                return false;
        return true;
    };
    const auto toward = [&](Cell target) {
        if (manhattan(target, state.pos) == 1)
            return action_to_neighbor(state, target, passable_any, ext);
        WavefrontPath path = wavefront_path(ext, state.pos, target, state.heading, passable_avoid);
        if (!path.found)
            path = wavefront_path(ext, state.pos, target, state.heading, passable_any);
        if (!path.found || path.squares.empty())
            return Action::Straight;
        return action_to_neighbor(state, path.squares.front(), passable_any, ext);
    };
    // Nearest uncovered square (by wave distance) among those accepted by `want`.
    const auto nearest_open = [&](auto&& want) -> std::optional<Cell> {
        const std::vector<int> dist = wavefront_distances(ext, state.pos, passable_any);
        std::optional<Cell> best;
        int best_d = 0;
        for (std::size_t i = 0; i < ext.size(); ++i)
        {
            const Cell c = ext.cell(i);
            if (dist[i] <= 0 || belief.covered(c) || belief.known_obstacle(c) || !want(c))
                continue;
            if (!best || dist[i] < best_d)
            {
                best = c;
                best_d = dist[i];
            }
        }
        return best;
    };

    if (t.current)
    {
        const DecompCell& cell = graph_.cell(*t.current);
        const CellGeometry& g = cell.geometry;
        if (g.contains(state.pos))
        {
            if (t.mode == Mode::Transit || t.mode == Mode::Idle)
            {
                t.sweep_direction = (state.pos.col - g.first_col) <= (g.last_col() - state.pos.col) ? 1 : -1;
                if (cfg_.wall_follow && !t.wall_followed && !boundary_known(g, belief))
                {
                    t.mode = Mode::WallFollow;
                    t.wall = {};
                    t.wall_steps = 0;
                }
                else
                    t.mode = Mode::Sweep;
                t.wall_followed = true;
            }
            if (t.mode == Mode::WallFollow)
            {
                const auto inside = [&](Cell c) { return g.contains(c) && !belief.known_obstacle(c); };
                const auto a = wall_follow_next(state, inside, t.wall);
                if (a && ++t.wall_steps <= 4 * g.area())
                    return finish(*a);
                t.mode = Mode::Sweep;
            }
            if (const auto target = lawnmower_target(g, state, belief, t.sweep_direction))
                return finish(toward(*target));
        }
        else
        {
            if (t.mode != Mode::WallFollow)
                t.mode = Mode::Transit;
            if (const auto target = nearest_open([&](Cell c) { return g.contains(c); }))
                return finish(toward(*target));
        }
    }

    // Idle: help with whatever is left nearby, else hold position.
    if (const auto target = nearest_open([](Cell) { return true; }))
        return finish(toward(*target));
    const auto blocked = [&](Cell c) { return !ext.contains(c) || !passable_avoid(c); };
    if (blocked(neighbor(state.pos, state.heading)))
        return finish(Action::Straight);
    if (blocked(neighbor(state.pos, turn_left(state.heading))))
        return finish(Action::Left);
    if (blocked(neighbor(state.pos, turn_right(state.heading))))
        return finish(Action::Right);
    return finish(Action::Straight);
}

} // namespace covergrid
