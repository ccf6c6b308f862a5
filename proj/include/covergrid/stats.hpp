#pragma once

#include "covergrid/sim_engine.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace covergrid {

/// Box-plot summary. Quartiles are Tukey hinges: the medians of the lower and
/// upper halves, each half including the overall median when n is odd.
/// Whiskers are the most extreme samples inside [q1 - 1.5 IQR, q3 + 1.5 IQR].
struct BoxStats
{
    std::size_t n = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double whisker_low = 0.0;
    double whisker_high = 0.0;
    std::vector<double> outliers; // ascending
};

/// Throws std::invalid_argument on an empty sample.
BoxStats box_stats(std::span<const double> samples);

enum class Metric : std::uint8_t { CompletionTime, LeftTurns, RightTurns };

std::optional<Metric> metric_from_string(std::string_view s) noexcept;
std::string_view to_string(Metric m) noexcept;
double metric_value(const TrialRecord& r, Metric m);

/// Accepted group keys: planner, placement, robots, density, c_turn,
/// turn_mode, config, map, digest.
bool is_group_key(std::string_view key) noexcept;
std::string group_value(const TrialRecord& r, std::string_view key);

struct GroupSummary
{
    std::vector<std::string> key; // values, parallel to the requested keys
    BoxStats stats;
    std::size_t timeouts = 0;
};

/// Groups in order of first appearance. Timeouts stay in the sample at their
/// capped time and are counted separately.
std::vector<GroupSummary> summarize(std::span<const TrialRecord> records, std::span<const std::string> keys, Metric metric);

/// Header: the keys, then n,median,q1,q3,whisker_low,whisker_high,outlier_count,timeout_count.
void write_summary_csv(std::ostream& out, std::span<const std::string> keys, std::span<const GroupSummary> groups);

/// Shortest text that reads back to the same double.
std::string format_number(double v);

} // namespace covergrid
