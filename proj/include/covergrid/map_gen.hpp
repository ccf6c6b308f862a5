#pragma once

#include "covergrid/grid_world.hpp"

#include <cstdint>

namespace covergrid {

/// Density is the fraction of *interior* cells (the border ring excluded) that
/// are sampled as obstacles before enclosed pockets are filled.
struct MapGenConfig
{
    int width = 20;
    int height = 20;
    double density = 0.10;
    std::uint64_t seed = 0;
};

struct GeneratedMap
{
    GridMap map;
    std::size_t sampled_obstacles = 0;
    std::size_t filled_cells = 0;
};

/// round(density * (width - 2) * (height - 2)).
std::size_t sampled_obstacle_count(const MapGenConfig& cfg);

/// Samples obstacles without replacement from an mt19937_64 seeded with
/// cfg.seed (partial Fisher-Yates over interior cells in row-major order),
/// then fills every free region not 4-connected to the border ring.
/// Throws std::invalid_argument on density outside [0, 1) or sides < 3.
GeneratedMap generate_map(const MapGenConfig& cfg);

} // namespace covergrid
