#include "covergrid/grid_world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace covergrid {

char to_char(Heading h) noexcept
{
    static constexpr std::array<char, 4> kNames{'N', 'E', 'S', 'W'};
    return kNames[static_cast<int>(h)];
}

char to_char(Action a) noexcept
{
    static constexpr std::array<char, 3> kNames{'S', 'L', 'R'};
    return kNames[static_cast<int>(a)];
}

std::optional<Heading> heading_from_char(char c) noexcept
{
    switch (c)
    {
    case 'N': return Heading::North;
    case 'E': return Heading::East;
    case 'S': return Heading::South;
    case 'W': return Heading::West;
    default: return std::nullopt;
    }
}

std::optional<Action> action_from_char(char c) noexcept
{
    switch (c)
    {
    case 'S': return Action::Straight;
    case 'L': return Action::Left;
    case 'R': return Action::Right;
    default: return std::nullopt;
    }
}

GridMap::GridMap(int width, int height, double cell_size)
    : GridMap(width, height, std::vector<Terrain>(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)), Terrain::Free), cell_size)
{
}

GridMap::GridMap(int width, int height, std::vector<Terrain> truth, double cell_size)
    : extent_{width, height}, cell_size_(cell_size), truth_(std::move(truth))
{
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("grid dimensions must be positive");
    if (truth_.size() != extent_.size())
        throw std::invalid_argument("truth size does not match grid dimensions");
    if (!(cell_size > 0.0))
        throw std::invalid_argument("cell size must be positive");
    known_.assign(truth_.size(), Occupancy::Unknown);
    covered_.assign(truth_.size(), 0);
}

void GridMap::set_truth(Cell c, Terrain t)
{
    const std::size_t i = extent_.index(c);
    if (known_[i] != Occupancy::Unknown || covered_[i] != 0)
        throw std::logic_error("cannot edit truth of an observed cell");
    truth_[i] = t;
}

bool GridMap::reveal(Cell c, Terrain observed)
{
    const std::size_t i = extent_.index(c);
    if (truth_[i] != observed)
        throw std::logic_error("observation contradicts ground truth");
    if (known_[i] != Occupancy::Unknown)
        return false;
    known_[i] = observed == Terrain::Free ? Occupancy::Free : Occupancy::Obstacle;
    ++known_count_;
    return true;
}

void GridMap::reveal_all()
{
    for (std::size_t i = 0; i < truth_.size(); ++i)
        if (known_[i] == Occupancy::Unknown)
            reveal(extent_.cell(i), truth_[i]);
}

void GridMap::clear_knowledge()
{
    std::fill(known_.begin(), known_.end(), Occupancy::Unknown);
    std::fill(covered_.begin(), covered_.end(), std::uint8_t{0});
    known_count_ = 0;
    covered_count_ = 0;
}

void GridMap::mark_covered(Cell c)
{
    const std::size_t i = extent_.index(c);
    if (truth_[i] == Terrain::Obstacle)
        throw std::logic_error("attempt to cover an obstacle cell");
    if (covered_[i] == 0)
    {
        covered_[i] = 1;
        ++covered_count_;
    }
}

std::size_t GridMap::free_count() const noexcept
{
    return static_cast<std::size_t>(std::count(truth_.begin(), truth_.end(), Terrain::Free));
}

std::size_t GridMap::obstacle_count() const noexcept { return truth_.size() - free_count(); }

bool line_of_sight(const GridMap& map, Cell a, Cell b)
{
    const long nx = std::labs(static_cast<long>(b.col) - a.col);
    const long ny = std::labs(static_cast<long>(b.row) - a.row);
    const int sx = b.col > a.col ? 1 : -1;
    const int sy = b.row > a.row ? 1 : -1;

    Cell p = a;
    long ix = 0;
    long iy = 0;
    while (ix < nx || iy < ny)
    {
        // Compare the parametric positions (0.5 + ix) / nx and (0.5 + iy) / ny
        // of the next vertical and horizontal boundary crossings.
        const long decision = (1 + 2 * ix) * ny - (1 + 2 * iy) * nx;
        if (decision == 0)
        {
            p.col += sx;
            p.row += sy;
            ++ix;
            ++iy;
        }
        else if (decision < 0)
        {
            p.col += sx;
            ++ix;
        }
        else
        {
            p.row += sy;
            ++iy;
        }
        if (p == b)
            break;
        if (map.is_obstacle(p))
            return false;
    }
    return true;
}

std::vector<Observation> visible_cells(const GridMap& map, Cell observer, double range_m)
{
    if (!map.in_bounds(observer) || map.is_obstacle(observer))
        throw std::invalid_argument("observer must stand on a free in-bounds cell");

    const double radius = std::max(range_m, 0.0) / map.cell_size();
    const double radius_sq = radius * radius + 1e-9;
    const int reach = static_cast<int>(std::floor(radius + 1e-9));

    std::vector<Observation> out;
    for (int row = std::max(0, observer.row - reach); row <= std::min(map.height() - 1, observer.row + reach); ++row)
    {
        for (int col = std::max(0, observer.col - reach); col <= std::min(map.width() - 1, observer.col + reach); ++col)
        {
            const double dc = col - observer.col;
            const double dr = row - observer.row;
            if (dc * dc + dr * dr > radius_sq)
                continue;
            const Cell c{col, row};
            if (line_of_sight(map, observer, c))
                out.push_back({c, map.truth(c)});
        }
    }
    return out;
}

std::vector<Observation> sense(GridMap& map, Cell observer, double range_m)
{
    auto obs = visible_cells(map, observer, range_m);
    for (const auto& o : obs)
        map.reveal(o.cell, o.terrain);
    return obs;
}

std::vector<Cell> reachable_free_cells(const GridMap& map, std::span<const Cell> seeds)
{
    const GridExtent ext = map.extent();
    std::vector<std::uint8_t> seen(ext.size(), 0);
    std::vector<std::size_t> queue;
    for (Cell s : seeds)
    {
        if (!map.in_bounds(s) || map.is_obstacle(s))
            throw std::invalid_argument("flood-fill seed must be a free cell");
        const std::size_t i = ext.index(s);
        if (!seen[i])
        {
            seen[i] = 1;
            queue.push_back(i);
        }
    }
    for (std::size_t head = 0; head < queue.size(); ++head)
    {
        const Cell c = ext.cell(queue[head]);
        for (Cell d : kHeadingDelta)
        {
            const Cell n{c.col + d.col, c.row + d.row};
            if (!ext.contains(n) || map.is_obstacle(n))
                continue;
            const std::size_t j = ext.index(n);
            if (!seen[j])
            {
                seen[j] = 1;
                queue.push_back(j);
            }
        }
    }
    std::sort(queue.begin(), queue.end());
    std::vector<Cell> out;
    out.reserve(queue.size());
    for (std::size_t i : queue)
        out.push_back(ext.cell(i));
    return out;
}

} // namespace covergrid
