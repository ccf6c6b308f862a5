#include "covergrid/trace.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace covergrid {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what)
{
    throw std::runtime_error("trace line " + std::to_string(line) + ": " + what);
}

// Splits "key=a,b,c" into its comma fields after the '='.
std::vector<std::string> fields_of(const std::string& token, std::string_view key)
{
    if (token.size() <= key.size() || token.compare(0, key.size(), key) != 0 || token[key.size()] != '=')
        return {};
    std::vector<std::string> out;
    std::stringstream ss(token.substr(key.size() + 1));
    std::string f;
    while (std::getline(ss, f, ','))
        out.push_back(f);
    return out;
}

std::optional<RobotState> parse_pose(const std::vector<std::string>& f)
{
    if (f.size() < 3 || f[2].size() != 1)
        return std::nullopt;
    const auto h = heading_from_char(f[2][0]);
    if (!h)
        return std::nullopt;
    try
    {
        return RobotState{{std::stoi(f[0]), std::stoi(f[1])}, *h};
    }
    catch (const std::exception&)
    {
        return std::nullopt;
    }
}

} // namespace

void TraceWriter::header(const SimConfig& cfg, const GridMap& map, std::span<const RobotState> starts)
{
    std::ostream& out = *out_;
    out << "covergrid-trace 1\n";
    out << "config " << to_json(cfg) << '\n';
    out << "map " << to_text(map);
    out << "start";
    for (std::size_t i = 0; i < starts.size(); ++i)
        out << " r" << i << '=' << starts[i].pos.col << ',' << starts[i].pos.row << ',' << to_char(starts[i].heading);
    out << '\n';
}

void TraceWriter::epoch(std::size_t epoch, std::size_t covered, std::span<const RobotState> robots, const StepLog& log)
{
    std::ostream& out = *out_;
    out << "epoch=" << epoch << " covered=" << covered;
    for (std::size_t i = 0; i < robots.size(); ++i)
        out << " r" << i << '=' << robots[i].pos.col << ',' << robots[i].pos.row << ',' << to_char(robots[i].heading) << ','
            << to_char(log.actions[i]) << ',' << (log.moved[i] ? 1 : 0);
    out << '\n';
}

TraceData read_trace(std::istream& in)
{
    TraceData t;
    std::string line;
    std::size_t no = 0;
    const auto next = [&]() {
        if (!std::getline(in, line))
            fail(no + 1, "unexpected end of trace");
        ++no;
    };

    next();
    if (line != "covergrid-trace 1")
        fail(no, "not a covergrid trace");

    next();
    if (line.rfind("config ", 0) != 0)
        fail(no, "expected config");
    try
    {
        t.config = sim_config_from_json(line.substr(7));
    }
    catch (const std::exception& e)
    {
        fail(no, e.what());
    }

    next();
    if (line.rfind("map ", 0) != 0)
        fail(no, "expected map");
    std::string text = line.substr(4) + '\n';
    int w = 0;
    int h = 0;
    std::istringstream(line.substr(4)) >> w >> h;
    if (h <= 0)
        fail(no, "bad map header");
    for (int r = 0; r < h; ++r)
    {
        next();
        text += line + '\n';
    }
    try
    {
        t.map = map_from_text(text);
    }
    catch (const std::exception& e)
    {
        fail(no, e.what());
    }

    next();
    {
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        if (tok != "start")
            fail(no, "expected start");
        while (ss >> tok)
        {
            const auto pose = parse_pose(fields_of(tok, "r" + std::to_string(t.starts.size())));
            if (!pose)
                fail(no, "bad start pose '" + tok + "'");
            t.starts.push_back(*pose);
        }
    }
    if (t.starts.empty())
        fail(no, "no robots");

    while (std::getline(in, line))
    {
        ++no;
        if (line.empty())
            continue;
        std::istringstream ss(line);
        std::string tok;
        TraceEpoch e;
        ss >> tok;
        auto f = fields_of(tok, "epoch");
        if (f.size() != 1)
            fail(no, "expected epoch=");
        e.epoch = std::stoul(f[0]);
        ss >> tok;
        f = fields_of(tok, "covered");
        if (f.size() != 1)
            fail(no, "expected covered=");
        e.covered = std::stoul(f[0]);
        while (ss >> tok)
        {
            f = fields_of(tok, "r" + std::to_string(e.robots.size()));
            const auto pose = parse_pose(f);
            if (!pose || f.size() != 5 || f[3].size() != 1 || !action_from_char(f[3][0]) || (f[4] != "0" && f[4] != "1"))
                fail(no, "bad robot entry '" + tok + "'");
            e.robots.push_back(*pose);
            e.actions.push_back(*action_from_char(f[3][0]));
            e.moved.push_back(f[4] == "1");
        }
        if (e.robots.size() != t.starts.size())
            fail(no, "robot count differs from start line");
        t.epochs.push_back(std::move(e));
    }
    return t;
}

Decision ScriptedTeam::decide(const Snapshot& snapshot, std::size_t robot)
{
    if (snapshot.epoch >= script_.size())
        throw std::runtime_error("scripted planner: script exhausted");
    const Action a = script_[snapshot.epoch].at(robot);
    return {a, {a}, {}};
}

ReplayReport replay(const TraceData& trace)
{
    std::vector<std::vector<Action>> script;
    for (const TraceEpoch& e : trace.epochs)
        script.push_back(e.actions);

    GridMap map = trace.map;
    map.clear_knowledge();
    SimConfig cfg = trace.config;
    cfg.exec = Exec::Serial;
    Simulation sim(cfg, std::move(map), trace.starts, std::make_unique<ScriptedTeam>(std::move(script)));

    ReplayReport report;
    for (const TraceEpoch& e : trace.epochs)
    {
        const StepLog log = sim.step();
        ++report.epochs;
        const WorldState& w = sim.world();
        std::ostringstream why;
        if (w.epoch != e.epoch)
            why << "epoch " << e.epoch << ": engine is at epoch " << w.epoch;
        else if (w.map.covered_count() != e.covered)
            why << "epoch " << e.epoch << ": covered " << w.map.covered_count() << ", trace says " << e.covered;
        else
        {
            for (std::size_t i = 0; i < e.robots.size(); ++i)
                if (w.robots[i] != e.robots[i] || log.moved[i] != e.moved[i])
                {
                    why << "epoch " << e.epoch << ": robot " << i << " pose differs";
                    break;
                }
        }
        if (!why.str().empty())
        {
            report.consistent = false;
            report.first_mismatch = why.str();
            break;
        }
    }
    return report;
}

} // namespace covergrid
