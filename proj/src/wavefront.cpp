#include "covergrid/boustrophedon.hpp"

#include <stdexcept>

namespace covergrid {

std::vector<int> wavefront_distances(GridExtent extent, Cell goal, const PassableFn& passable)
{
    std::vector<int> dist(extent.size(), -1);
    if (!extent.contains(goal))
        return dist;
    std::vector<std::size_t> queue{extent.index(goal)};
    dist[queue.front()] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head)
    {
        const Cell c = extent.cell(queue[head]);
        const int d = dist[queue[head]];
        for (Cell delta : kHeadingDelta)
        {
            const Cell n{c.col + delta.col, c.row + delta.row};
            if (!extent.contains(n))
                continue;
            const std::size_t j = extent.index(n);
            if (dist[j] >= 0 || !passable(n))
                continue;
            dist[j] = d + 1;
            queue.push_back(j);
        }
    }
    return dist;
}

Action action_to_neighbor(const RobotState& state, Cell next, const PassableFn& passable, GridExtent extent)
{
    const Cell d{next.col - state.pos.col, next.row - state.pos.row};
    Heading want = state.heading;
    bool adjacent = false;
    for (int h = 0; h < 4; ++h)
    {
        if (kHeadingDelta[static_cast<std::size_t>(h)] == d)
        {
            want = static_cast<Heading>(h);
            adjacent = true;
        }
    }
    if (!adjacent)
        throw std::invalid_argument("action_to_neighbor: squares are not 4-adjacent");
    if (auto a = action_towards(state.heading, want))
        return *a;

    const auto blocked = [&](Cell c) { return !extent.contains(c) || !passable(c); };
    if (blocked(neighbor(state.pos, turn_left(state.heading))))
        return Action::Left;
    if (blocked(neighbor(state.pos, turn_right(state.heading))))
        return Action::Right;
    return Action::Left;
}

WavefrontPath wavefront_path(GridExtent extent, Cell from, Cell to, Heading heading, const PassableFn& passable)
{
    WavefrontPath out;
    if (!extent.contains(from) || !extent.contains(to))
        return out;
    if (from == to)
    {
        out.found = true;
        return out;
    }
    const std::vector<int> dist = wavefront_distances(extent, to, passable);
    if (dist[extent.index(from)] < 0)
        return out;

    out.found = true;
    const auto descend = [&](Cell cur) {
        const int d = dist[extent.index(cur)];
        for (Cell delta : kHeadingDelta) // N, E, S, W
        {
            const Cell n{cur.col + delta.col, cur.row + delta.row};
            if (extent.contains(n) && dist[extent.index(n)] >= 0 && dist[extent.index(n)] < d)
                return n;
        }
        return cur;
    };
    for (Cell cur = from; cur != to;)
    {
        cur = descend(cur);
        out.squares.push_back(cur);
    }

    // The action script is the walk itself, re-descending from wherever the
    // robot actually is, since a reversal in the open side-steps.
    const auto blocked = [&](Cell c) { return !passable(c); };
    RobotState state{from, heading};
    const std::size_t limit = 4 * extent.size();
    while (state.pos != to && out.actions.size() < limit)
    {
        const Action a = action_to_neighbor(state, descend(state.pos), passable, extent);
        out.actions.push_back(a);
        state = apply_action(state, a, extent, blocked).state;
    }
    return out;
}

WavefrontPath wavefront_path(const BeliefView& belief, Cell from, Cell to, Heading heading)
{
    return wavefront_path(belief.extent(), from, to, heading, [&](Cell c) { return belief.known(c) == Occupancy::Free; });
}

} // namespace covergrid
