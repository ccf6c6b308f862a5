#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace covergrid {

/// Grid coordinate. Row 0 is the top row; North is decreasing row.
struct Cell
{
    int col = 0;
    int row = 0;

    friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

enum class Heading : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

/// Left and Right rotate the heading by 90 degrees and then try to advance one
/// square; Straight only advances.
enum class Action : std::uint8_t { Straight = 0, Left = 1, Right = 2 };

/// Fixed iteration and tie-break order used everywhere.
inline constexpr std::array<Action, 3> kActions{Action::Straight, Action::Left, Action::Right};

/// Published heading table, indexed by Heading: (dcol, drow).
inline constexpr std::array<Cell, 4> kHeadingDelta{{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};

constexpr Heading turn_left(Heading h) noexcept { return static_cast<Heading>((static_cast<int>(h) + 3) % 4); }
constexpr Heading turn_right(Heading h) noexcept { return static_cast<Heading>((static_cast<int>(h) + 1) % 4); }
constexpr Heading reverse(Heading h) noexcept { return static_cast<Heading>((static_cast<int>(h) + 2) % 4); }

constexpr Heading rotate(Heading h, Action a) noexcept
{
    switch (a)
    {
    case Action::Left: return turn_left(h);
    case Action::Right: return turn_right(h);
    case Action::Straight: break;
    }
    return h;
}

constexpr Cell neighbor(Cell c, Heading h) noexcept
{
    const Cell d = kHeadingDelta[static_cast<int>(h)];
    return {c.col + d.col, c.row + d.row};
}

/// The action whose post-rotation heading is `to`, if one exists (not for reversal).
constexpr std::optional<Action> action_towards(Heading from, Heading to) noexcept
{
    if (to == from)
        return Action::Straight;
    if (to == turn_left(from))
        return Action::Left;
    if (to == turn_right(from))
        return Action::Right;
    return std::nullopt;
}

char to_char(Heading h) noexcept;
char to_char(Action a) noexcept;
std::optional<Heading> heading_from_char(char c) noexcept;
std::optional<Action> action_from_char(char c) noexcept;

struct RobotState
{
    Cell pos;
    Heading heading = Heading::North;

    friend constexpr bool operator==(const RobotState&, const RobotState&) = default;
};

struct GridExtent
{
    int width = 0;
    int height = 0;

    constexpr bool contains(Cell c) const noexcept { return c.col >= 0 && c.row >= 0 && c.col < width && c.row < height; }
    constexpr std::size_t index(Cell c) const noexcept
    {
        return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c.col);
    }
    constexpr Cell cell(std::size_t i) const noexcept
    {
        return {static_cast<int>(i % static_cast<std::size_t>(width)), static_cast<int>(i / static_cast<std::size_t>(width))};
    }
    constexpr std::size_t size() const noexcept { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
};

struct MoveResult
{
    RobotState state;
    bool moved = false;
};

/// Motion model shared by the executor and every planner's internal model.
/// The rotation always commits; the advance happens only if the target is in
/// bounds and `blocked(target)` is false.
template <class BlockedFn>
constexpr MoveResult apply_action(RobotState s, Action a, GridExtent extent, BlockedFn&& blocked)
{
    s.heading = rotate(s.heading, a);
    const Cell target = neighbor(s.pos, s.heading);
    if (!extent.contains(target) || blocked(target))
        return {s, false};
    s.pos = target;
    return {s, true};
}

enum class Terrain : std::uint8_t { Free = 0, Obstacle = 1 };
enum class Occupancy : std::uint8_t { Unknown = 0, Free = 1, Obstacle = 2 };

struct Observation
{
    Cell cell;
    Terrain terrain = Terrain::Free;

    friend constexpr bool operator==(const Observation&, const Observation&) = default;
};

/// The shared world: ground truth, the team's belief, and the covered set.
class GridMap
{
  public:
    static constexpr double kDefaultCellSize = 0.5;

    GridMap() = default;
    GridMap(int width, int height, double cell_size = kDefaultCellSize);
    GridMap(int width, int height, std::vector<Terrain> truth, double cell_size = kDefaultCellSize);

    int width() const noexcept { return extent_.width; }
    int height() const noexcept { return extent_.height; }
    GridExtent extent() const noexcept { return extent_; }
    double cell_size() const noexcept { return cell_size_; }
    bool in_bounds(Cell c) const noexcept { return extent_.contains(c); }
    bool is_border(Cell c) const noexcept
    {
        return c.col == 0 || c.row == 0 || c.col == extent_.width - 1 || c.row == extent_.height - 1;
    }

    Terrain truth(Cell c) const { return truth_[extent_.index(c)]; }
    bool is_obstacle(Cell c) const { return truth(c) == Terrain::Obstacle; }
    void set_truth(Cell c, Terrain t);

    Occupancy known(Cell c) const { return known_[extent_.index(c)]; }
    bool known_obstacle(Cell c) const { return known(c) == Occupancy::Obstacle; }
    bool covered(Cell c) const { return covered_[extent_.index(c)] != 0; }

    /// Records an observation; returns true if the cell was Unknown before.
    /// Throws std::logic_error if it contradicts the truth.
    bool reveal(Cell c, Terrain observed);
    void reveal_all();
    void clear_knowledge();

    /// Throws std::logic_error on an obstacle (motion-model bug).
    void mark_covered(Cell c);

    std::size_t free_count() const noexcept;
    std::size_t obstacle_count() const noexcept;
    std::size_t known_count() const noexcept { return known_count_; }
    std::size_t covered_count() const noexcept { return covered_count_; }

    std::span<const Terrain> truth_cells() const noexcept { return truth_; }
    std::span<const Occupancy> known_cells() const noexcept { return known_; }
    std::span<const std::uint8_t> covered_cells() const noexcept { return covered_; }

    friend bool operator==(const GridMap&, const GridMap&) = default;

  private:
    GridExtent extent_;
    double cell_size_ = kDefaultCellSize;
    std::vector<Terrain> truth_;
    std::vector<Occupancy> known_;
    std::vector<std::uint8_t> covered_;
    std::size_t known_count_ = 0;
    std::size_t covered_count_ = 0;
};

/// True if no Obstacle cell interior lies strictly between the centers of a
/// and b. Supercover traversal; a segment passing exactly through a lattice
/// corner does not touch the two side cells. Symmetric in (a, b).
bool line_of_sight(const GridMap& map, Cell a, Cell b);

/// Every cell within range (center-to-center, inclusive) that is visible from
/// the observer, with its true terrain. Pure; does not update the belief.
std::vector<Observation> visible_cells(const GridMap& map, Cell observer, double range_m);

/// visible_cells merged into the map's belief. Returns the observations.
std::vector<Observation> sense(GridMap& map, Cell observer, double range_m);

/// 4-connected flood fill over truth-Free cells. Result sorted by index.
std::vector<Cell> reachable_free_cells(const GridMap& map, std::span<const Cell> seeds);

// Map text format: header "W H", then H lines of '.' (free) and '#' (obstacle).
std::string to_text(const GridMap& map);
GridMap map_from_text(std::string_view text);
void save_map(const GridMap& map, const std::string& path);
GridMap load_map(const std::string& path);

} // namespace covergrid
