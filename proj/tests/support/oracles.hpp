#pragma once

#include "covergrid/grid_world.hpp"
#include "covergrid/boustrophedon.hpp"

#include <queue>
#include <set>
#include <utility>
#include <vector>

// Independent reference computations shared by the unit and acceptance tests.
namespace covergrid::oracle {

inline int bfs_distance(const GridMap& m, Cell from, Cell to)
{
    std::vector<int> d(m.extent().size(), -1);
    std::queue<Cell> q;
    d[m.extent().index(from)] = 0;
    q.push(from);
    while (!q.empty())
    {
        const Cell c = q.front();
        q.pop();
        if (c == to)
            return d[m.extent().index(c)];
        for (Heading h : {Heading::North, Heading::East, Heading::South, Heading::West})
        {
            const Cell n = neighbor(c, h);
            if (m.in_bounds(n) && !m.is_obstacle(n) && d[m.extent().index(n)] < 0)
            {
                d[m.extent().index(n)] = d[m.extent().index(c)] + 1;
                q.push(n);
            }
        }
    }
    return -1;
}

// Off-line decomposition written from scratch: in each column the free rows
// form intervals; a cell starts at a column wherever an interval is not the
// sole continuation of exactly one interval of the previous column.
inline std::vector<int> offline_split_columns(const GridMap& m, const std::vector<Stripe>& stripes)
{
    const auto intervals = [&](int col) {
        std::vector<std::pair<int, int>> out;
        int start = -1;
        for (int r = 0; r <= m.height(); ++r)
        {
            const bool free = r < m.height() && !m.is_obstacle({col, r});
            if (free && start < 0)
                start = r;
            if (!free && start >= 0)
            {
                out.emplace_back(start, r - 1);
                start = -1;
            }
        }
        return out;
    };
    const auto touch = [](std::pair<int, int> a, std::pair<int, int> b) { return a.first <= b.second && b.first <= a.second; };

    std::set<int> cols;
    for (const Stripe& s : stripes)
        for (int c = s.first_col + 1; c <= s.last_col; ++c)
        {
            const auto prev = intervals(c - 1);
            const auto cur = intervals(c);
            for (const auto& x : cur)
            {
                int up = 0;
                std::pair<int, int> p{};
                for (const auto& y : prev)
                    if (touch(x, y))
                    {
                        ++up;
                        p = y;
                    }
                int down = 0;
                if (up == 1)
                    for (const auto& y : cur)
                        down += touch(p, y) ? 1 : 0;
                if (up != 1 || down != 1)
                    cols.insert(c);
            }
        }
    return {cols.begin(), cols.end()};
}

inline std::vector<Cell> obstacles_of(const GridMap& m)
{
    std::vector<Cell> out;
    for (int r = 0; r < m.height(); ++r)
        for (int c = 0; c < m.width(); ++c)
            if (m.is_obstacle({c, r}))
                out.push_back({c, r});
    return out;
}

} // namespace covergrid::oracle
