#include "covergrid/boustrophedon.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace covergrid {

bool CellGeometry::contains(Cell c) const noexcept
{
    if (c.col < first_col || c.col > last_col())
        return false;
    const RowSpan& s = spans[static_cast<std::size_t>(c.col - first_col)];
    return c.row >= s.begin && c.row <= s.end;
}

std::size_t CellGeometry::area() const noexcept
{
    std::size_t n = 0;
    for (const RowSpan& s : spans)
        n += static_cast<std::size_t>(s.end - s.begin + 1);
    return n;
}

std::vector<Cell> CellGeometry::squares() const
{
    std::vector<Cell> out;
    out.reserve(area());
    for (std::size_t i = 0; i < spans.size(); ++i)
        for (int row = spans[i].begin; row <= spans[i].end; ++row)
            out.push_back({first_col + static_cast<int>(i), row});
    return out;
}

std::vector<Stripe> balanced_stripes(int columns, std::size_t parts)
{
    if (parts == 0)
        throw std::invalid_argument("stripes: need at least one robot");
    if (columns <= 0 || parts > static_cast<std::size_t>(columns))
        throw std::invalid_argument("stripes: more robots than columns");
    const int n = static_cast<int>(parts);
    const int base = columns / n;
    const int extra = columns % n;
    std::vector<Stripe> out;
    int col = 0;
    for (int i = 0; i < n; ++i)
    {
        const int w = base + (i < extra ? 1 : 0);
        out.push_back({col, col + w - 1});
        col += w;
    }
    return out;
}

std::string_view to_string(CellStatus s) noexcept
{
    switch (s)
    {
    case CellStatus::Unassigned: return "unassigned";
    case CellStatus::Assigned: return "assigned";
    case CellStatus::InProgress: return "in_progress";
    case CellStatus::Complete: return "complete";
    }
    return "unassigned";
}

ReebGraph ReebGraph::init_stripes(GridExtent extent, std::size_t robots)
{
    ReebGraph g;
    g.extent_ = extent;
    g.stripes_ = balanced_stripes(extent.width, robots);
    for (std::size_t i = 0; i < g.stripes_.size(); ++i)
    {
        const Stripe& s = g.stripes_[i];
        DecompCell c;
        c.id = static_cast<int>(i);
        c.stripe = static_cast<int>(i);
        c.geometry.first_col = s.first_col;
        c.geometry.spans.assign(static_cast<std::size_t>(s.width()), RowSpan{0, extent.height - 1});
        c.status = CellStatus::Assigned;
        c.robot = i;
        g.cells_.push_back(std::move(c));
    }
    g.rebuild_index();
    return g;
}

std::vector<int> ReebGraph::active_cells() const
{
    std::vector<int> out;
    for (const DecompCell& c : cells_)
        if (c.active())
            out.push_back(c.id);
    return out;
}

std::optional<int> ReebGraph::owner(Cell c) const
{
    if (!extent_.contains(c))
        return std::nullopt;
    const std::int32_t o = owner_[extent_.index(c)];
    if (o < 0)
        return std::nullopt;
    return o;
}

std::vector<DecompEvent> ReebGraph::update(const BeliefView& belief, std::span<const Cell> newly_known_obstacles)
{
    std::set<std::size_t> affected;
    for (Cell c : newly_known_obstacles)
    {
        for (std::size_t i = 0; i < stripes_.size(); ++i)
            if (c.col >= stripes_[i].first_col && c.col <= stripes_[i].last_col)
                affected.insert(i);
    }

    std::vector<DecompEvent> events;
    for (std::size_t si : affected)
    {
        const auto shapes = decompose_stripe(stripes_[si], extent_.height, [&](Cell c) { return belief.known_obstacle(c); });

        std::vector<int> old_ids;
        for (const DecompCell& c : cells_)
            if (c.active() && c.stripe == static_cast<int>(si))
                old_ids.push_back(c.id);

        std::vector<char> kept(old_ids.size(), 0);
        std::vector<int> created;
        for (const CellGeometry& g : shapes)
        {
            bool matched = false;
            for (std::size_t k = 0; k < old_ids.size(); ++k)
            {
                if (!kept[k] && cells_[static_cast<std::size_t>(old_ids[k])].geometry == g)
                {
                    kept[k] = 1;
                    matched = true;
                    break;
                }
            }
            if (matched)
                continue;
            DecompCell c;
            c.id = static_cast<int>(cells_.size());
            c.stripe = static_cast<int>(si);
            c.geometry = g;
            cells_.push_back(std::move(c));
            created.push_back(cells_.back().id);
            events.push_back({DecompEventKind::Created, created.back(), {}});
        }

        for (std::size_t k = 0; k < old_ids.size(); ++k)
        {
            if (kept[k])
                continue;
            DecompCell& old = cells_[static_cast<std::size_t>(old_ids[k])];
            old.retired = true;
            DecompEvent ev{DecompEventKind::Split, old.id, {}};
            for (int id : created)
            {
                const CellGeometry& g = cells_[static_cast<std::size_t>(id)].geometry;
                const int lo = std::max(g.first_col, old.geometry.first_col);
                const int hi = std::min(g.last_col(), old.geometry.last_col());
                bool shares = false;
                for (int col = lo; col <= hi && !shares; ++col)
                {
                    const RowSpan a = g.spans[static_cast<std::size_t>(col - g.first_col)];
                    const RowSpan b = old.geometry.spans[static_cast<std::size_t>(col - old.geometry.first_col)];
                    shares = a.begin <= b.end && b.begin <= a.end;
                }
                if (shares)
                    ev.parts.push_back(id);
            }
            events.push_back(std::move(ev));
        }
    }
    if (!affected.empty())
        rebuild_index();
    return events;
}

std::vector<DecompEvent> ReebGraph::refresh_completion(const BeliefView& belief)
{
    std::vector<DecompEvent> events;
    for (DecompCell& c : cells_)
    {
        if (!c.active() || c.status == CellStatus::Complete)
            continue;
        bool done = true;
        for (std::size_t i = 0; i < c.geometry.spans.size() && done; ++i)
            for (int row = c.geometry.spans[i].begin; row <= c.geometry.spans[i].end && done; ++row)
                done = belief.covered({c.geometry.first_col + static_cast<int>(i), row});
        if (done)
        {
            c.status = CellStatus::Complete;
            events.push_back({DecompEventKind::Completed, c.id, {}});
        }
    }
    return events;
}

std::vector<int> ReebGraph::split_columns() const
{
    std::set<int> cols;
    for (const DecompCell& c : cells_)
        if (c.active() && c.geometry.first_col != stripes_[static_cast<std::size_t>(c.stripe)].first_col)
            cols.insert(c.geometry.first_col);
    return {cols.begin(), cols.end()};
}

void ReebGraph::rebuild_index()
{
    owner_.assign(extent_.size(), -1);
    for (const DecompCell& c : cells_)
    {
        if (!c.active())
            continue;
        for (Cell sq : c.geometry.squares())
        {
            std::int32_t& o = owner_[extent_.index(sq)];
            if (o >= 0)
                throw std::logic_error("decomposition: overlapping cells");
            o = c.id;
        }
    }

    std::set<std::pair<int, int>> edges;
    for (int row = 0; row < extent_.height; ++row)
    {
        for (int col = 0; col < extent_.width; ++col)
        {
            const std::int32_t a = owner_[extent_.index({col, row})];
            if (a < 0)
                continue;
            for (Cell n : {Cell{col + 1, row}, Cell{col, row + 1}})
            {
                if (!extent_.contains(n))
                    continue;
                const std::int32_t b = owner_[extent_.index(n)];
                if (b >= 0 && b != a)
                    edges.insert({std::min(a, b), std::max(a, b)});
            }
        }
    }
    edges_.assign(edges.begin(), edges.end());
}

std::string ReebGraph::dump() const
{
    std::ostringstream out;
    out << "stripes " << stripes_.size() << '\n';
    for (std::size_t i = 0; i < stripes_.size(); ++i)
        out << "stripe " << i << ' ' << stripes_[i].first_col << '-' << stripes_[i].last_col << '\n';
    out << "cells " << cells_.size() << '\n';
    for (const DecompCell& c : cells_)
    {
        out << "cell " << c.id << " stripe " << c.stripe << ' ' << (c.retired ? "retired" : "active") << ' ' << to_string(c.status) << " robot ";
        if (c.robot)
            out << *c.robot;
        else
            out << '-';
        out << " cols " << c.geometry.first_col << '-' << c.geometry.last_col() << " spans";
        for (const RowSpan& s : c.geometry.spans)
            out << ' ' << s.begin << '-' << s.end;
        out << '\n';
    }
    out << "edges " << edges_.size() << '\n';
    for (const auto& [a, b] : edges_)
        out << a << ' ' << b << '\n';
    return out.str();
}

} // namespace covergrid
