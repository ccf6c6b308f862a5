#include "covergrid/map_gen.hpp"

#include "covergrid/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace covergrid {

std::size_t sampled_obstacle_count(const MapGenConfig& cfg)
{
    const double interior = static_cast<double>(cfg.width - 2) * static_cast<double>(cfg.height - 2);
    return static_cast<std::size_t>(std::llround(cfg.density * interior));
}

GeneratedMap generate_map(const MapGenConfig& cfg)
{
    if (cfg.width < 3 || cfg.height < 3)
        throw std::invalid_argument("map sides must be at least 3 cells");
    if (!(cfg.density >= 0.0 && cfg.density < 1.0))
        throw std::invalid_argument("density must lie in [0, 1)");

    GridMap map(cfg.width, cfg.height);
    const GridExtent ext = map.extent();

    std::vector<Cell> interior;
    interior.reserve(static_cast<std::size_t>(cfg.width - 2) * static_cast<std::size_t>(cfg.height - 2));
    for (int row = 1; row < cfg.height - 1; ++row)
        for (int col = 1; col < cfg.width - 1; ++col)
            interior.push_back({col, row});

    const std::size_t target = sampled_obstacle_count(cfg);
    Rng rng(cfg.seed);
    for (std::size_t i = 0; i < target; ++i)
    {
        const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, interior.size() - i));
        std::swap(interior[i], interior[j]);
        map.set_truth(interior[i], Terrain::Obstacle);
    }

    // The border ring is always free and connected, so it anchors the main
    // component; everything else that is free is an enclosed pocket.
    std::vector<Cell> border;
    for (int col = 0; col < cfg.width; ++col)
    {
        border.push_back({col, 0});
        border.push_back({col, cfg.height - 1});
    }
    for (int row = 1; row < cfg.height - 1; ++row)
    {
        border.push_back({0, row});
        border.push_back({cfg.width - 1, row});
    }
    const auto main_component = reachable_free_cells(map, border);
    std::vector<std::uint8_t> keep(ext.size(), 0);
    for (Cell c : main_component)
        keep[ext.index(c)] = 1;

    std::size_t filled = 0;
    for (std::size_t i = 0; i < ext.size(); ++i)
    {
        const Cell c = ext.cell(i);
        if (!keep[i] && !map.is_obstacle(c))
        {
            map.set_truth(c, Terrain::Obstacle);
            ++filled;
        }
    }
    return {std::move(map), target, filled};
}

} // namespace covergrid
