#include "covergrid/stats.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <stdexcept>

namespace covergrid {

namespace {

double median_sorted(std::span<const double> x)
{
    const std::size_t n = x.size();
    return n % 2 == 1 ? x[n / 2] : (x[n / 2 - 1] + x[n / 2]) / 2.0;
}

} // namespace

BoxStats box_stats(std::span<const double> samples)
{
    if (samples.empty())
        throw std::invalid_argument("stats: empty sample");
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    const std::size_t half = (n + 1) / 2;

    BoxStats s;
    s.n = n;
    s.median = median_sorted(x);
    s.q1 = median_sorted(std::span<const double>(x).first(half));
    s.q3 = median_sorted(std::span<const double>(x).last(half));
    const double iqr = s.q3 - s.q1;
    const double lo = s.q1 - 1.5 * iqr;
    const double hi = s.q3 + 1.5 * iqr;
    s.whisker_low = s.q1;
    s.whisker_high = s.q3;
    bool any = false;
    for (double v : x)
    {
        if (v < lo || v > hi)
        {
            s.outliers.push_back(v);
            continue;
        }
        if (!any)
            s.whisker_low = v;
        s.whisker_high = v;
        any = true;
    }
    return s;
}

std::optional<Metric> metric_from_string(std::string_view s) noexcept
{
    if (s == "completion_time")
        return Metric::CompletionTime;
    if (s == "left_turns")
        return Metric::LeftTurns;
    if (s == "right_turns")
        return Metric::RightTurns;
    return std::nullopt;
}

std::string_view to_string(Metric m) noexcept
{
    switch (m)
    {
    case Metric::CompletionTime: return "completion_time";
    case Metric::LeftTurns: return "left_turns";
    case Metric::RightTurns: return "right_turns";
    }
    return "completion_time";
}

double metric_value(const TrialRecord& r, Metric m)
{
    switch (m)
    {
    case Metric::CompletionTime: return r.completion_time;
    case Metric::LeftTurns: return static_cast<double>(r.left_turns);
    case Metric::RightTurns: return static_cast<double>(r.right_turns);
    }
    return r.completion_time;
}

std::string format_number(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

bool is_group_key(std::string_view key) noexcept
{
    for (std::string_view k : {"planner", "placement", "robots", "density", "c_turn", "turn_mode", "config", "map", "digest"})
        if (k == key)
            return true;
    return false;
}

std::string group_value(const TrialRecord& r, std::string_view key)
{
    if (key == "planner")
        return r.planner;
    if (key == "placement")
        return r.placement;
    if (key == "robots")
        return std::to_string(r.robots);
    if (key == "density")
        return format_number(r.density);
    if (key == "c_turn")
        return format_number(r.c_turn);
    if (key == "turn_mode")
        return r.turn_mode;
    if (key == "config")
        return std::to_string(r.config_index);
    if (key == "map")
        return std::to_string(r.map_index);
    if (key == "digest")
        return r.config_digest;
    throw std::invalid_argument("stats: unknown group key '" + std::string(key) + "'");
}

std::vector<GroupSummary> summarize(std::span<const TrialRecord> records, std::span<const std::string> keys, Metric metric)
{
    std::vector<std::vector<std::string>> order;
    std::vector<std::vector<double>> samples;
    std::vector<std::size_t> timeouts;
    for (const TrialRecord& r : records)
    {
        std::vector<std::string> key;
        for (const std::string& k : keys)
            key.push_back(group_value(r, k));
        auto it = std::find(order.begin(), order.end(), key);
        std::size_t g = static_cast<std::size_t>(it - order.begin());
        if (it == order.end())
        {
            order.push_back(std::move(key));
            samples.emplace_back();
            timeouts.push_back(0);
        }
        samples[g].push_back(metric_value(r, metric));
        timeouts[g] += r.timeout ? 1 : 0;
    }

    std::vector<GroupSummary> out;
    for (std::size_t g = 0; g < order.size(); ++g)
        out.push_back({order[g], box_stats(samples[g]), timeouts[g]});
    return out;
}

void write_summary_csv(std::ostream& out, std::span<const std::string> keys, std::span<const GroupSummary> groups)
{
    for (const std::string& k : keys)
        out << k << ',';
    out << "n,median,q1,q3,whisker_low,whisker_high,outlier_count,timeout_count\n";
    for (const GroupSummary& g : groups)
    {
        for (const std::string& v : g.key)
            out << v << ',';
        const BoxStats& s = g.stats;
        out << s.n << ',' << format_number(s.median) << ',' << format_number(s.q1) << ',' << format_number(s.q3) << ','
            << format_number(s.whisker_low) << ',' << format_number(s.whisker_high) << ',' << s.outliers.size() << ',' << g.timeouts << '\n';
    }
}

} // namespace covergrid
