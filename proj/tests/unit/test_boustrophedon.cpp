#include "covergrid/boustrophedon.hpp"
#include "covergrid/map_gen.hpp"
#include "covergrid/sim_engine.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>

using namespace covergrid;
using namespace covergrid::oracle;

namespace {

std::vector<int> widths(const std::vector<Stripe>& s)
{
    std::vector<int> w;
    for (const Stripe& x : s)
        w.push_back(x.width());
    return w;
}

} // namespace

TEST(Stripes, BalancedWidths)
{
    EXPECT_EQ(widths(balanced_stripes(20, 4)), (std::vector<int>{5, 5, 5, 5}));
    EXPECT_EQ(widths(balanced_stripes(20, 3)), (std::vector<int>{7, 7, 6}));
    const auto one = balanced_stripes(20, 1);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].first_col, 0);
    EXPECT_EQ(one[0].last_col, 19);
    EXPECT_THROW(balanced_stripes(5, 6), std::invalid_argument);
}

TEST(Stripes, InitialGraphAssignsOneStripePerRobot)
{
    const ReebGraph g = ReebGraph::init_stripes({20, 20}, 3);
    ASSERT_EQ(g.active_cells().size(), 3u);
    for (int id : g.active_cells())
    {
        ASSERT_TRUE(g.cell(id).robot.has_value());
        EXPECT_EQ(*g.cell(id).robot, static_cast<std::size_t>(id));
    }
    EXPECT_EQ(g.edges().size(), 2u);
}

TEST(Decomposition, LoneObstacleSplitsStripe)
{
    const auto cells = decompose_stripe({0, 6}, 10, [](Cell c) { return c == Cell{3, 5}; });
    ASSERT_EQ(cells.size(), 4u);
    EXPECT_EQ(cells[0].first_col, 0);
    EXPECT_EQ(cells[0].last_col(), 2);
    EXPECT_EQ(cells[1].spans, (std::vector<RowSpan>{{0, 4}}));
    EXPECT_EQ(cells[2].spans, (std::vector<RowSpan>{{6, 9}}));
    EXPECT_EQ(cells[3].first_col, 4);
}

TEST(Decomposition, ObstacleOnTopEdgeOnlyShrinksCell)
{
    const auto cells = decompose_stripe({0, 6}, 10, [](Cell c) { return c == Cell{3, 0}; });
    ASSERT_EQ(cells.size(), 1u);
    EXPECT_EQ(cells[0].spans[3], (RowSpan{1, 9}));
    EXPECT_EQ(cells[0].area(), 69u);
}

TEST(Decomposition, UpdateWithoutObstaclesHasNoEvents)
{
    GridMap m(12, 12);
    ReebGraph g = ReebGraph::init_stripes(m.extent(), 2);
    sense(m, {5, 5}, 2.0);
    EXPECT_TRUE(g.update(BeliefView(m), {}).empty());
    EXPECT_EQ(g.active_cells().size(), 2u);
}

TEST(Decomposition, SplitEventsKeepHistory)
{
    GridMap m(12, 12);
    m.set_truth({3, 5}, Terrain::Obstacle);
    m.reveal_all();
    ReebGraph g = ReebGraph::init_stripes(m.extent(), 2);
    const Cell obstacle{3, 5};
    const auto events = g.update(BeliefView(m), std::span(&obstacle, 1));
    ASSERT_FALSE(events.empty());
    EXPECT_TRUE(std::any_of(events.begin(), events.end(), [](const DecompEvent& e) { return e.kind == DecompEventKind::Split; }));
    EXPECT_FALSE(g.cell(0).active());
    EXPECT_TRUE(g.cell(1).active());
    EXPECT_EQ(g.split_columns(), (std::vector<int>{3, 4}));
}

TEST(Decomposition, ConvergesToOfflineDecomposition)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        GridMap m = generate_map({20, 20, 0.10 + 0.05 * static_cast<double>(seed % 3), seed + 500}).map;
        const std::size_t robots = 1 + seed % 4;
        ReebGraph g = ReebGraph::init_stripes(m.extent(), robots);

        // Reveal obstacles in a few batches, as sensing would.
        std::vector<Cell> obs = obstacles_of(m);
        Rng rng(seed);
        for (std::size_t i = obs.size(); i > 1; --i)
            std::swap(obs[i - 1], obs[uniform_below(rng, i)]);
        for (std::size_t b = 0; b < obs.size(); b += 7)
        {
            std::vector<Cell> batch(obs.begin() + static_cast<long>(b), obs.begin() + static_cast<long>(std::min(obs.size(), b + 7)));
            for (Cell c : batch)
                m.reveal(c, Terrain::Obstacle);
            g.update(BeliefView(m), batch);
        }
        EXPECT_EQ(g.split_columns(), offline_split_columns(m, g.stripes())) << "seed " << seed;
    }
}

TEST(Decomposition, PartitionsKnownFreeSquaresDuringRun)
{
    for (std::uint64_t seed = 0; seed < 4; ++seed)
    {
        const GridMap map = generate_map({20, 20, 0.15, seed + 40}).map;
        SimConfig cfg;
        cfg.planner = PlannerKind::Boustrophedon;
        cfg.robots = 3;
        cfg.seed = seed;
        Simulation sim(cfg, map);
        auto& team = dynamic_cast<BoustrophedonTeam&>(sim.planner());
        while (!sim.is_complete())
        {
            sim.step();
            const ReebGraph& g = team.graph();
            std::vector<int> owners(map.extent().size(), 0);
            for (int id : g.active_cells())
                for (Cell c : g.cell(id).geometry.squares())
                    ++owners[map.extent().index(c)];
            const GridMap& w = sim.world().map;
            for (std::size_t i = 0; i < owners.size(); ++i)
            {
                const Cell c = map.extent().cell(i);
                ASSERT_LE(owners[i], 1);
                if (w.known(c) == Occupancy::Free)
                {
                    ASSERT_EQ(owners[i], 1) << c.col << ',' << c.row;
                }
            }

            // No cell with two robots working it.
            std::set<int> held;
            for (std::size_t r = 0; r < cfg.robots; ++r)
                if (const auto c = team.current_cell(r))
                {
                    ASSERT_TRUE(held.insert(*c).second);
                }
        }
    }
}

TEST(Decomposition, DumpIsDeterministic)
{
    const ReebGraph a = ReebGraph::init_stripes({9, 6}, 2);
    const ReebGraph b = ReebGraph::init_stripes({9, 6}, 2);
    EXPECT_EQ(a.dump(), b.dump());
    EXPECT_NE(a.dump().find("cell 1 stripe 1 active assigned robot 1 cols 5-8"), std::string::npos);
}

TEST(Wavefront, Examples)
{
    GridMap m(3, 3);
    m.reveal_all();
    const BeliefView b(m);
    EXPECT_EQ(wavefront_path(b, {0, 0}, {2, 2}).length(), 4u);
    const WavefrontPath same = wavefront_path(b, {1, 1}, {1, 1});
    EXPECT_TRUE(same.found);
    EXPECT_EQ(same.length(), 0u);
}

TEST(Wavefront, WallWithSingleGap)
{
    GridMap m(7, 5);
    for (int r = 0; r < 5; ++r)
        if (r != 3)
            m.set_truth({3, r}, Terrain::Obstacle);
    m.reveal_all();
    const WavefrontPath p = wavefront_path(BeliefView(m), {0, 0}, {6, 0});
    ASSERT_TRUE(p.found);
    EXPECT_EQ(static_cast<int>(p.length()), bfs_distance(m, {0, 0}, {6, 0}));
    EXPECT_NE(std::find(p.squares.begin(), p.squares.end(), Cell{3, 3}), p.squares.end());
}

TEST(Wavefront, MatchesBfsAndActionsReplay)
{
    for (std::uint64_t seed = 0; seed < 25; ++seed)
    {
        GridMap m = generate_map({20, 20, 0.2, seed + 900}).map;
        m.reveal_all();
        Rng rng(seed);
        std::vector<Cell> free;
        for (int r = 0; r < 20; ++r)
            for (int c = 0; c < 20; ++c)
                if (!m.is_obstacle({c, r}))
                    free.push_back({c, r});
        for (int q = 0; q < 10; ++q)
        {
            const Cell a = free[uniform_below(rng, free.size())];
            const Cell b = free[uniform_below(rng, free.size())];
            const Heading h = static_cast<Heading>(uniform_below(rng, 4));
            const WavefrontPath p = wavefront_path(BeliefView(m), a, b, h);
            ASSERT_TRUE(p.found);
            ASSERT_EQ(static_cast<int>(p.length()), bfs_distance(m, a, b));

            // Executing the script reaches the goal; unless the first move is a
            // reversal in the open, it walks exactly the listed squares.
            const bool reversal = !p.squares.empty() && neighbor(a, reverse(h)) == p.squares.front();
            RobotState s{a, h};
            std::size_t moves = 0;
            for (Action act : p.actions)
            {
                const MoveResult r = apply_action(s, act, m.extent(), [&](Cell c) { return m.is_obstacle(c); });
                s = r.state;
                if (r.moved)
                {
                    if (!reversal)
                    {
                        ASSERT_EQ(s.pos, p.squares[moves]);
                    }
                    ++moves;
                }
            }
            ASSERT_LE(moves, p.length() + (reversal ? 2 : 0));
            ASSERT_EQ(s.pos, b);
        }
    }
}

TEST(Wavefront, ReportsNoPath)
{
    GridMap m(5, 3);
    for (int r = 0; r < 3; ++r)
        m.set_truth({2, r}, Terrain::Obstacle);
    m.reveal_all();
    EXPECT_FALSE(wavefront_path(BeliefView(m), {0, 0}, {4, 0}).found);
}

TEST(Lawnmower, StraightMidColumn)
{
    GridMap m(6, 6);
    m.reveal_all();
    for (int r = 0; r < 6; ++r)
    {
        m.mark_covered({0, r});
        m.mark_covered({1, r});
    }
    m.mark_covered({2, 0});
    m.mark_covered({2, 1});
    const CellGeometry cell{0, std::vector<RowSpan>(6, RowSpan{0, 5})};
    const auto passable = [&](Cell c) { return !m.is_obstacle(c); };
    const auto a = lawnmower_next(cell, RobotState{{2, 1}, Heading::South}, BeliefView(m), 1, passable);
    ASSERT_TRUE(a);
    EXPECT_EQ(*a, Action::Straight);
}

TEST(Lawnmower, CoversWholeCellThenReportsComplete)
{
    GridMap m(7, 6);
    m.set_truth({3, 2}, Terrain::Obstacle);
    m.reveal_all();
    const auto geo = decompose_stripe({0, 2}, 6, [&](Cell c) { return m.is_obstacle(c); });
    ASSERT_EQ(geo.size(), 1u);
    const CellGeometry& cell = geo[0];
    const auto passable = [&](Cell c) { return !m.is_obstacle(c); };

    RobotState s{{0, 0}, Heading::South};
    m.mark_covered(s.pos);
    std::size_t steps = 0;
    while (const auto a = lawnmower_next(cell, s, BeliefView(m), 1, passable))
    {
        const MoveResult r = apply_action(s, *a, m.extent(), [&](Cell c) { return m.is_obstacle(c); });
        s = r.state;
        if (r.moved)
            m.mark_covered(s.pos);
        ASSERT_LT(++steps, 200u);
    }
    for (Cell c : cell.squares())
        EXPECT_TRUE(m.covered(c));
    // A clean sweep of an 18-square rectangle never revisits a square.
    EXPECT_EQ(m.covered_count(), 18u);
    EXPECT_THROW(lawnmower_next(cell, RobotState{{5, 5}, Heading::North}, BeliefView(m), 1, passable), std::logic_error);
}

TEST(WallFollow, EmptyRectangleCircuit)
{
    const int w = 5, h = 4;
    const auto inside = [&](Cell c) { return c.col >= 0 && c.row >= 0 && c.col < w && c.row < h; };
    WallFollowState st;
    RobotState s{{0, 0}, Heading::South};
    std::set<std::pair<int, int>> seen{{0, 0}};
    std::size_t moves = 0;
    int done = 0;
    for (int i = 0; i < 100; ++i)
    {
        const auto a = wall_follow_next(s, inside, st);
        if (!a)
        {
            ++done;
            break;
        }
        const MoveResult r = apply_action(s, *a, {w, h}, [&](Cell c) { return !inside(c); });
        s = r.state;
        if (r.moved)
        {
            ++moves;
            seen.insert({s.pos.col, s.pos.row});
        }
    }
    EXPECT_EQ(done, 1);
    EXPECT_EQ(moves, static_cast<std::size_t>(2 * (w + h) - 4));
    EXPECT_EQ(seen.size(), static_cast<std::size_t>(2 * (w + h) - 4));
    EXPECT_EQ(s.pos, (Cell{0, 0}));
}

TEST(WallFollow, DetoursAroundObstacleOnWall)
{
    // 8x8 region with a 2x2 block against the south wall.
    const auto blocked = [](Cell c) { return (c.col == 3 || c.col == 4) && (c.row == 6 || c.row == 7); };
    const auto inside = [&](Cell c) { return c.col >= 0 && c.row >= 0 && c.col < 8 && c.row < 8 && !blocked(c); };
    WallFollowState st;
    RobotState s{{0, 0}, Heading::South};
    std::vector<Cell> path{s.pos};
    for (int i = 0; i < 200; ++i)
    {
        const auto a = wall_follow_next(s, inside, st);
        if (!a)
            break;
        const MoveResult r = apply_action(s, *a, {8, 8}, [&](Cell c) { return !inside(c); });
        s = r.state;
        if (r.moved)
            path.push_back(s.pos);
    }
    EXPECT_EQ(s.pos, (Cell{0, 0}));
    // Hand-traced circuit: 28 border squares, minus the 2 under the block,
    // plus the 6 that wrap around it.
    EXPECT_EQ(path.size() - 1, 32u);
    for (Cell c : {Cell{2, 6}, Cell{2, 5}, Cell{3, 5}, Cell{4, 5}, Cell{5, 5}, Cell{5, 6}})
        EXPECT_NE(std::find(path.begin(), path.end(), c), path.end()) << c.col << ',' << c.row;
}

TEST(WallFollow, SingleSquareIsImmediatelyDone)
{
    WallFollowState st;
    const auto inside = [](Cell c) { return c == Cell{0, 0}; };
    EXPECT_FALSE(wall_follow_next(RobotState{{0, 0}, Heading::North}, inside, st));
}

TEST(Market, BidExamples)
{
    EXPECT_DOUBLE_EQ(make_bid(0, 1, 0, 1).cost, 0.5);
    EXPECT_DOUBLE_EQ(make_bid(0, 1, 10, 6).cost, 8.0);
    EXPECT_TRUE(std::isinf(make_bid(0, 1, 3, std::nullopt).cost));

    const DecompCell cell{3, 0, CellGeometry{2, {{0, 4}}}, CellStatus::Unassigned, std::nullopt, false};
    const auto open = [](Cell) { return true; };
    EXPECT_DOUBLE_EQ(compute_bid(0, cell, {1, 2}, 0, open, {5, 5}).cost, 0.5);
    const auto wall = [](Cell c) { return c.col != 1; };
    EXPECT_TRUE(std::isinf(compute_bid(0, cell, {0, 2}, 0, wall, {5, 5}).cost));
}

TEST(Market, GreedyAllocation)
{
    const std::vector<Bid> one{{0, 4, 1.0}};
    EXPECT_EQ(allocate(one), (std::vector<Assignment>{{0, 4}}));

    const std::vector<Bid> two{{0, 0, 1.0}, {0, 1, 3.0}, {1, 0, 1.0}, {1, 1, 2.0}};
    EXPECT_EQ(allocate(two), (std::vector<Assignment>{{0, 0}, {1, 1}}));

    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<Bid> none{{0, 0, inf}, {1, 0, inf}};
    EXPECT_TRUE(allocate(none).empty());
}

TEST(Team, CompletesGeneratedMaps)
{
    for (std::uint64_t seed = 0; seed < 12; ++seed)
    {
        const GridMap map = generate_map({20, 20, 0.05 * static_cast<double>(1 + seed % 4), seed + 70}).map;
        SimConfig cfg;
        cfg.planner = PlannerKind::Boustrophedon;
        cfg.robots = 1 + seed % 5;
        cfg.placement = seed % 2 ? Placement::RandomUniform : Placement::WallUniform;
        cfg.seed = seed;
        const TrialRecord r = run_trial(cfg, map);
        EXPECT_FALSE(r.timeout) << "seed " << seed;
        EXPECT_EQ(r.covered, r.reachable);
    }
}
