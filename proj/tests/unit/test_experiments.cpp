#include "covergrid/experiments.hpp"
#include "covergrid/rng.hpp"
#include "covergrid/stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

using namespace covergrid;

namespace {

double median_of(const std::vector<double>& v, std::size_t lo, std::size_t hi) // [lo, hi)
{
    const std::size_t n = hi - lo;
    return n % 2 ? v[lo + n / 2] : (v[lo + n / 2 - 1] + v[lo + n / 2]) / 2.0;
}

BoxStats naive_box(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    const std::size_t half = (n + 1) / 2;
    BoxStats b;
    b.n = n;
    b.median = median_of(v, 0, n);
    b.q1 = median_of(v, 0, half);
    b.q3 = median_of(v, n - half, n);
    const double iqr = b.q3 - b.q1;
    const double lo = b.q1 - 1.5 * iqr, hi = b.q3 + 1.5 * iqr;
    b.whisker_low = b.q3;
    b.whisker_high = b.q1;
    for (double x : v)
    {
        if (x < lo || x > hi)
            b.outliers.push_back(x);
        else
        {
            b.whisker_low = std::min(b.whisker_low, x);
            b.whisker_high = std::max(b.whisker_high, x);
        }
    }
    return b;
}

ExperimentPlan small_plan()
{
    ExperimentPlan plan;
    plan.points = {{PlannerKind::Boustrophedon, Placement::WallUniform, 2, 0.10, 0.0, TurnPenaltyMode::None},
                   {PlannerKind::Mcts, Placement::RandomUniform, 2, 0.05, 0.1, TurnPenaltyMode::Both}};
    plan.maps = 2;
    plan.trials = 2;
    plan.width = 10;
    plan.height = 10;
    plan.base_seed = 21;
    plan.sim.mcts.iterations = 40;
    plan.sim.mcts.horizon = 8;
    plan.sim.max_steps = 60;
    return plan;
}

} // namespace

TEST(BoxStats, OddSampleHinges)
{
    const std::vector<double> v{5, 1, 4, 2, 3};
    const BoxStats b = box_stats(v);
    EXPECT_EQ(b.n, 5u);
    EXPECT_DOUBLE_EQ(b.median, 3.0);
    EXPECT_DOUBLE_EQ(b.q1, 2.0);
    EXPECT_DOUBLE_EQ(b.q3, 4.0);
    EXPECT_DOUBLE_EQ(b.whisker_low, 1.0);
    EXPECT_DOUBLE_EQ(b.whisker_high, 5.0);
    EXPECT_TRUE(b.outliers.empty());
}

TEST(BoxStats, EqualSamplesCollapse)
{
    const std::vector<double> v(7, 2.5);
    const BoxStats b = box_stats(v);
    EXPECT_DOUBLE_EQ(b.q1, 2.5);
    EXPECT_DOUBLE_EQ(b.q3, 2.5);
    EXPECT_DOUBLE_EQ(b.whisker_low, 2.5);
    EXPECT_DOUBLE_EQ(b.whisker_high, 2.5);
    EXPECT_TRUE(b.outliers.empty());
}

TEST(BoxStats, FarSampleIsAnOutlier)
{
    const std::vector<double> v{1, 2, 3, 4, 100};
    const BoxStats b = box_stats(v);
    EXPECT_DOUBLE_EQ(b.whisker_high, 4.0);
    ASSERT_EQ(b.outliers.size(), 1u);
    EXPECT_DOUBLE_EQ(b.outliers[0], 100.0);
    EXPECT_THROW(box_stats(std::vector<double>{}), std::invalid_argument);
}

TEST(BoxStats, MatchesSortBasedOracle)
{
    Rng rng(8);
    for (std::size_t n : {1u, 2u, 3u, 4u, 10u, 37u, 1000u})
    {
        std::vector<double> v(n);
        for (double& x : v)
        {
            x = static_cast<double>(uniform_below(rng, 10000)) / 100.0;
            if (uniform_below(rng, 50) == 0)
                x *= 10.0;
        }
        const BoxStats got = box_stats(v);
        const BoxStats want = naive_box(v);
        EXPECT_DOUBLE_EQ(got.median, want.median) << n;
        EXPECT_DOUBLE_EQ(got.q1, want.q1) << n;
        EXPECT_DOUBLE_EQ(got.q3, want.q3) << n;
        EXPECT_DOUBLE_EQ(got.whisker_low, want.whisker_low) << n;
        EXPECT_DOUBLE_EQ(got.whisker_high, want.whisker_high) << n;
        EXPECT_EQ(got.outliers, want.outliers) << n;
    }
}

TEST(Presets, FullRobotSweepArithmetic)
{
    const auto plan = preset("fig3", Scale::Full, 7);
    ASSERT_TRUE(plan);
    std::size_t wall = 0, random = 0;
    for (const ConfigPoint& p : plan->points)
        (p.placement == Placement::WallUniform ? wall : random) += plan->maps * plan->trials;
    EXPECT_EQ(wall, 1000u);
    EXPECT_EQ(random, 500u);
    EXPECT_EQ(plan->record_count(), 1500u);
}

TEST(Presets, OtherFigures)
{
    const auto fig4 = preset("fig4", Scale::Full, 0);
    ASSERT_TRUE(fig4);
    EXPECT_EQ(fig4->points.size(), 8u);
    for (const ConfigPoint& p : fig4->points)
        EXPECT_EQ(p.robots, 3u);

    const auto fig5 = preset("fig5", Scale::Full, 0);
    ASSERT_TRUE(fig5);
    EXPECT_EQ(fig5->points.size(), 4u);
    for (const ConfigPoint& p : fig5->points)
        EXPECT_EQ(p.robots, 5u);

    EXPECT_EQ(preset("fig3", Scale::Desk, 0)->record_count(), 3u * 4u * 5u * 5u);
    EXPECT_FALSE(preset("fig9", Scale::Full, 0));
}

TEST(Seeds, MapsSharedAcrossPlannersTrialsDistinct)
{
    EXPECT_EQ(map_seed(1, 0.1, 2), map_seed(1, 0.1, 2));
    EXPECT_NE(map_seed(1, 0.1, 2), map_seed(1, 0.15, 2));
    EXPECT_NE(map_seed(1, 0.1, 2), map_seed(1, 0.1, 3));
    EXPECT_NE(map_seed(1, 0.1, 2), map_seed(2, 0.1, 2));

    std::set<std::uint64_t> seen;
    for (PlannerKind k : {PlannerKind::Mcts, PlannerKind::Boustrophedon})
        for (std::size_t c = 0; c < 4; ++c)
            for (std::size_t m = 0; m < 5; ++m)
                for (std::size_t t = 0; t < 10; ++t)
                    seen.insert(trial_seed(3, k, c, m, t));
    EXPECT_EQ(seen.size(), 2u * 4u * 5u * 10u);
}

TEST(Plan, ValidationRejectsBadPlans)
{
    ExperimentPlan p = small_plan();
    p.points.clear();
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = small_plan();
    p.trials = 0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = small_plan();
    p.fixed_maps = {GridMap(10, 10)};
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Plan, RecordsComeInPlanOrderWithCorrectCounts)
{
    const ExperimentPlan plan = small_plan();
    std::size_t seen = 0;
    const auto recs = run_plan(plan, Exec::Serial, [&](const TrialRecord&) { ++seen; });
    ASSERT_EQ(recs.size(), plan.record_count());
    EXPECT_EQ(seen, recs.size());
    std::size_t i = 0;
    for (std::size_t c = 0; c < plan.points.size(); ++c)
        for (std::size_t m = 0; m < plan.maps; ++m)
            for (std::size_t t = 0; t < plan.trials; ++t, ++i)
            {
                EXPECT_EQ(recs[i].config_index, c);
                EXPECT_EQ(recs[i].map_index, m);
                EXPECT_EQ(recs[i].trial_index, t);
                EXPECT_DOUBLE_EQ(recs[i].density, plan.points[c].density);
                EXPECT_EQ(recs[i].seed, trial_seed(plan.base_seed, plan.points[c].planner, c, m, t));
            }
}

TEST(Plan, ParallelMatchesSerial)
{
    const ExperimentPlan plan = small_plan();
    EXPECT_EQ(run_plan(plan, Exec::Parallel), run_plan(plan, Exec::Serial));
}

TEST(Plan, TrialsOnOneMapShareIt)
{
    ExperimentPlan plan = small_plan();
    plan.points.resize(1);
    const auto recs = run_plan(plan);
    const GridMap m0 = plan_map(plan, 0.10, 0).map;
    EXPECT_EQ(recs[0].reachable, m0.free_count());
    EXPECT_EQ(recs[1].reachable, m0.free_count());
}

TEST(Records, JsonLinesRoundTrip)
{
    const auto recs = run_plan(small_plan());
    std::stringstream io;
    write_records(io, recs);
    EXPECT_EQ(read_records(io), recs);

    std::istringstream bad(recs[0].to_json() + "\n\n{oops\n");
    try
    {
        read_records(bad);
        FAIL() << "expected an error";
    }
    catch (const std::runtime_error& e)
    {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Summary, GroupsCountTimeoutsAndFormatCsv)
{
    std::vector<TrialRecord> recs(6);
    for (std::size_t i = 0; i < recs.size(); ++i)
    {
        recs[i].planner = i < 4 ? "mcts" : "boustro";
        recs[i].robots = 2;
        recs[i].completion_time = static_cast<double>(i + 1);
        recs[i].timeout = i == 1;
    }
    const std::vector<std::string> keys{"planner", "robots"};
    const auto groups = summarize(recs, keys, Metric::CompletionTime);
    ASSERT_EQ(groups.size(), 2u);
    EXPECT_EQ(groups[0].key, (std::vector<std::string>{"mcts", "2"}));
    EXPECT_EQ(groups[0].stats.n, 4u);
    EXPECT_EQ(groups[0].timeouts, 1u);
    EXPECT_DOUBLE_EQ(groups[0].stats.median, 2.5);
    EXPECT_EQ(groups[1].stats.n, 2u);

    std::ostringstream csv;
    write_summary_csv(csv, keys, groups);
    std::istringstream lines(csv.str());
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    EXPECT_EQ(header, "planner,robots,n,median,q1,q3,whisker_low,whisker_high,outlier_count,timeout_count");
    EXPECT_EQ(first, "mcts,2,4,2.5,1.5,3.5,1,4,0,1");
    EXPECT_FALSE(is_group_key("colour"));
}

TEST(Summary, NumberFormatIsShortAndExact)
{
    EXPECT_EQ(format_number(2.0), "2");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}
