#include "covergrid/mcts.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace covergrid {

std::string_view to_string(TurnPenaltyMode mode) noexcept
{
    switch (mode)
    {
    case TurnPenaltyMode::None: return "none";
    case TurnPenaltyMode::LeftOnly: return "left";
    case TurnPenaltyMode::RightOnly: return "right";
    case TurnPenaltyMode::Both: return "both";
    }
    return "none";
}

std::optional<TurnPenaltyMode> turn_mode_from_string(std::string_view s) noexcept
{
    if (s == "none")
        return TurnPenaltyMode::None;
    if (s == "left")
        return TurnPenaltyMode::LeftOnly;
    if (s == "right")
        return TurnPenaltyMode::RightOnly;
    if (s == "both")
        return TurnPenaltyMode::Both;
    return std::nullopt;
}

void MctsConfig::validate() const
{
    if (!(c_p > 0.0))
        throw std::invalid_argument("mcts: cp must be > 0");
    if (horizon < 1)
        throw std::invalid_argument("mcts: horizon must be >= 1");
    if (wallclock_ms ? !(*wallclock_ms > 0.0) : iterations == 0)
        throw std::invalid_argument("mcts: search budget must be positive");
    if (!(reward_scale > 0.0))
        throw std::invalid_argument("mcts: reward scale must be > 0");
    if (!(step_seconds > 0.0))
        throw std::invalid_argument("mcts: step length must be > 0");
}

double uct_score(double value, std::size_t parent_visits, std::size_t visits, double c_p) noexcept
{
    if (visits == 0)
        return std::numeric_limits<double>::infinity();
    const double explore = std::sqrt(2.0 * std::log(static_cast<double>(parent_visits)) / static_cast<double>(visits));
    return value + 2.0 * c_p * explore;
}

double step_weight(std::size_t k, double step_seconds, double origin) noexcept
{
    const double t = origin + step_seconds * static_cast<double>(k);
    return 1.0 / ((t + 1.0) * (t + 1.0));
}

double evaluate(std::span<const StepFlags> steps, const MctsConfig& cfg) noexcept
{
    double x = 0.0;
    for (std::size_t i = 0; i < steps.size(); ++i)
    {
        const double p = steps[i].covered ? 1.0 : 0.0;
        const double q = steps[i].hit ? 1.0 : 0.0;
        const double r = steps[i].turned ? 1.0 : 0.0;
        x += step_weight(i + 1, cfg.step_seconds, cfg.time_origin) * ((p - cfg.c_hit * q) - cfg.c_turn * r);
    }
    return x;
}

double evaluate_coverage(std::span<const StepFlags> steps, double c_hit, double step_seconds) noexcept
{
    double x = 0.0;
    for (std::size_t i = 0; i < steps.size(); ++i)
    {
        const double p = steps[i].covered ? 1.0 : 0.0;
        const double q = steps[i].hit ? 1.0 : 0.0;
        x += step_weight(i + 1, step_seconds) * (p - c_hit * q);
    }
    return x;
}

// ---------------------------------------------------------------------------

RolloutSimulator::RolloutSimulator(std::size_t self, std::size_t team_size, std::uint64_t seed) : self_(self)
{
    if (self >= team_size)
        throw std::invalid_argument("rollout: robot index out of range");
    peer_rngs_.reserve(team_size);
    for (std::size_t j = 0; j < team_size; ++j)
        peer_rngs_.emplace_back(derive_seed(seed, {j}));
}

const RolloutOutcome& RolloutSimulator::run(const Snapshot& snapshot, std::span<const Action> prefix, const MctsConfig& cfg, Rng& rng)
{
    const BeliefView& belief = snapshot.belief;
    const GridExtent ext = belief.extent();
    if (snapshot.robots.size() != peer_rngs_.size())
        throw std::invalid_argument("rollout: snapshot team size mismatch");

    if (overlay_.size() != ext.size())
    {
        overlay_.assign(ext.size(), 0);
        stamp_ = 0;
    }
    if (++stamp_ == 0)
    {
        std::fill(overlay_.begin(), overlay_.end(), 0u);
        stamp_ = 1;
    }

    sim_.assign(snapshot.robots.begin(), snapshot.robots.end());
    const std::size_t team = sim_.size();

    const auto covered = [&](Cell c) { return belief.covered(c) || overlay_covered(ext.index(c)); };
    const auto occupied_for = [&](std::size_t who) {
        return [&, who](Cell c) {
            if (belief.known_obstacle(c))
                return true;
            for (std::size_t j = 0; j < team; ++j)
                if (j != who && sim_[j].pos == c)
                    return true;
            return false;
        };
    };

    const auto horizon = static_cast<std::size_t>(cfg.horizon);
    outcome_.steps.assign(horizon, StepFlags{});

    for (std::size_t k = 0; k < horizon; ++k)
    {
        for (std::size_t j = 0; j < team; ++j)
        {
            if (j == self_)
                continue;
            const auto occupied = occupied_for(j);
            Action a;
            if (j < snapshot.published_paths.size() && k < snapshot.published_paths[j].size())
                a = snapshot.published_paths[j][k];
            else
                a = default_policy(sim_[j], ext, occupied, covered, peer_rngs_[j]);
            const MoveResult res = apply_action(sim_[j], a, ext, occupied);
            sim_[j] = res.state;
            if (res.moved)
                overlay_[ext.index(res.state.pos)] = stamp_;
        }

        const auto occupied = occupied_for(self_);
        const Action a = k < prefix.size() ? prefix[k] : default_policy(sim_[self_], ext, occupied, covered, rng);
        const MoveResult res = apply_action(sim_[self_], a, ext, occupied);
        StepFlags& f = outcome_.steps[k];
        f.hit = !res.moved;
        f.covered = res.moved && !covered(res.state.pos);
        f.turned = is_penalized_turn(a, cfg.turn_mode);
        sim_[self_] = res.state;
        overlay_[ext.index(res.state.pos)] = stamp_;
    }

    outcome_.value = evaluate(outcome_.steps, cfg) * cfg.reward_scale;
    return outcome_;
}

// ---------------------------------------------------------------------------

SearchTree::SearchTree(RobotState root_state)
{
    Node root;
    root.state = root_state;
    nodes_.push_back(root);
}

SearchTree::Selection SearchTree::select(const MctsConfig& cfg) const
{
    Selection s;
    for (;;)
    {
        const Node& n = nodes_[static_cast<std::size_t>(s.node)];
        if (s.depth >= cfg.horizon || n.has_untried())
            return s;

        std::int32_t best = kNone;
        double best_score = 0.0;
        for (Action a : kActions)
        {
            const std::int32_t c = n.children[static_cast<std::size_t>(a)];
            if (c == kNone)
                continue;
            const Node& child = nodes_[static_cast<std::size_t>(c)];
            const double score = uct_score(child.value, n.visits, child.visits, cfg.c_p);
            if (best == kNone || score > best_score)
            {
                best = c;
                best_score = score;
            }
        }
        if (best == kNone)
            return s;
        s.node = best;
        ++s.depth;
    }
}

std::int32_t SearchTree::expand(std::int32_t parent, const BeliefView& belief, Rng& rng)
{
    const auto pi = static_cast<std::size_t>(parent);
    const std::uint8_t untried = nodes_.at(pi).untried;
    const int count = ((untried >> 0) & 1) + ((untried >> 1) & 1) + ((untried >> 2) & 1);
    if (count == 0)
        throw std::logic_error("expand: node has no untried actions");

    auto pick = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(count)));
    Action chosen = Action::Straight;
    for (Action a : kActions)
    {
        if (untried & (1u << static_cast<unsigned>(a)))
        {
            if (pick == 0)
            {
                chosen = a;
                break;
            }
            --pick;
        }
    }

    Node child;
    child.state = apply_action(nodes_[pi].state, chosen, belief.extent(), [&](Cell c) { return belief.known_obstacle(c); }).state;
    child.incoming = chosen;
    child.parent = parent;

    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(child);
    nodes_[pi].untried = static_cast<std::uint8_t>(untried & ~(1u << static_cast<unsigned>(chosen)));
    nodes_[pi].children[static_cast<std::size_t>(chosen)] = id;
    return id;
}

void SearchTree::backpropagate(std::int32_t leaf, double value, BackupRule rule)
{
    Node& l = nodes_.at(static_cast<std::size_t>(leaf));
    ++l.visits;
    l.return_sum += value;
    l.value = rule == BackupRule::ChildMean ? value : l.return_sum / static_cast<double>(l.visits);

    for (std::int32_t p = l.parent; p != kNone; p = nodes_[static_cast<std::size_t>(p)].parent)
    {
        Node& n = nodes_[static_cast<std::size_t>(p)];
        ++n.visits;
        n.return_sum += value;
        if (rule == BackupRule::VisitMean)
        {
            n.value = n.return_sum / static_cast<double>(n.visits);
            continue;
        }
        double sum = 0.0;
        int count = 0;
        for (std::int32_t c : n.children)
        {
            if (c == kNone)
                continue;
            sum += nodes_[static_cast<std::size_t>(c)].value;
            ++count;
        }
        n.value = sum / count;
    }
}

std::vector<Action> SearchTree::path_to(std::int32_t node) const
{
    std::vector<Action> path;
    for (std::int32_t i = node; i != 0; i = nodes_.at(static_cast<std::size_t>(i)).parent)
        path.push_back(nodes_[static_cast<std::size_t>(i)].incoming);
    std::reverse(path.begin(), path.end());
    return path;
}

std::int32_t SearchTree::iterate(const Snapshot& snapshot, RolloutSimulator& sim, const MctsConfig& cfg, Rng& rng)
{
    const Selection s = select(cfg);
    std::int32_t leaf = s.node;
    if (s.depth < cfg.horizon && nodes_[static_cast<std::size_t>(leaf)].has_untried())
        leaf = expand(leaf, snapshot.belief, rng);
    const std::vector<Action> prefix = path_to(leaf);
    const RolloutOutcome& out = sim.run(snapshot, prefix, cfg, rng);
    backpropagate(leaf, out.value, cfg.backup);
    return leaf;
}

std::int32_t SearchTree::best_child(const Node& n) const
{
    std::int32_t best = kNone;
    for (Action a : kActions)
    {
        const std::int32_t c = n.children[static_cast<std::size_t>(a)];
        if (c == kNone)
            continue;
        if (best == kNone || nodes_[static_cast<std::size_t>(c)].value > nodes_[static_cast<std::size_t>(best)].value)
            best = c;
    }
    return best;
}

std::optional<Action> SearchTree::best_action() const
{
    const std::int32_t c = best_child(root());
    if (c == kNone)
        return std::nullopt;
    return nodes_[static_cast<std::size_t>(c)].incoming;
}

std::vector<Action> SearchTree::best_path(std::size_t max_len) const
{
    std::vector<Action> path;
    const Node* n = &root();
    while (path.size() < max_len)
    {
        const std::int32_t c = best_child(*n);
        if (c == kNone)
            break;
        n = &nodes_[static_cast<std::size_t>(c)];
        path.push_back(n->incoming);
    }
    return path;
}

bool SearchTree::advance(Action a)
{
    const std::int32_t start = root().children[static_cast<std::size_t>(a)];
    if (start == kNone)
        return false;

    std::vector<Node> kept;
    std::vector<std::int32_t> remap(nodes_.size(), kNone);
    std::vector<std::int32_t> order{start};
    for (std::size_t head = 0; head < order.size(); ++head)
    {
        const std::int32_t old = order[head];
        remap[static_cast<std::size_t>(old)] = static_cast<std::int32_t>(head);
        for (std::int32_t c : nodes_[static_cast<std::size_t>(old)].children)
            if (c != kNone)
                order.push_back(c);
    }
    kept.reserve(order.size());
    for (std::int32_t old : order)
    {
        Node n = nodes_[static_cast<std::size_t>(old)];
        n.parent = old == start ? kNone : remap[static_cast<std::size_t>(n.parent)];
        for (std::int32_t& c : n.children)
            if (c != kNone)
                c = remap[static_cast<std::size_t>(c)];
        kept.push_back(n);
    }
    nodes_ = std::move(kept);
    return true;
}

// ---------------------------------------------------------------------------

MctsPlanner::MctsPlanner(std::size_t self, std::size_t team_size, MctsConfig cfg, std::uint64_t seed)
    : self_(self), cfg_(cfg), rng_(derive_seed(seed, {0})), sim_(self, team_size, derive_seed(seed, {1}))
{
    cfg_.validate();
}

Decision MctsPlanner::decide(const Snapshot& snapshot)
{
    const RobotState& current = snapshot.robots[self_];
    if (!tree_ || tree_->root().state != current)
        tree_.emplace(current);
    if (cfg_.anchor == TimeAnchor::Episode)
        cfg_.time_origin = static_cast<double>(snapshot.epoch) * cfg_.step_seconds;

    std::size_t iters = 0;
    if (cfg_.wallclock_ms)
    {
        using clock = std::chrono::steady_clock;
        const auto deadline = clock::now() + std::chrono::duration<double, std::milli>(*cfg_.wallclock_ms);
        do
        {
            tree_->iterate(snapshot, sim_, cfg_, rng_);
            ++iters;
        } while (clock::now() < deadline);
    }
    else
    {
        for (; iters < cfg_.iterations; ++iters)
            tree_->iterate(snapshot, sim_, cfg_, rng_);
    }
    last_iterations_ = iters;

    Decision d;
    d.action = tree_->best_action().value();
    d.best_path = tree_->best_path(static_cast<std::size_t>(cfg_.horizon));

    char buf[160];
    const auto& root = tree_->root();
    double values[3] = {0.0, 0.0, 0.0};
    for (Action a : kActions)
    {
        const std::int32_t c = root.children[static_cast<std::size_t>(a)];
        if (c != SearchTree::kNone)
            values[static_cast<std::size_t>(a)] = tree_->node(c).value;
    }
    std::snprintf(buf, sizeof buf, "iters=%zu S=%.6f L=%.6f R=%.6f chosen=%c", iters, values[0], values[1], values[2], to_char(d.action));
    d.diagnostics = buf;

    tree_->advance(d.action);
    return d;
}

MctsTeam::MctsTeam(std::size_t team_size, const MctsConfig& cfg, std::uint64_t seed)
{
    planners_.reserve(team_size);
    for (std::size_t r = 0; r < team_size; ++r)
        planners_.emplace_back(r, team_size, cfg, derive_seed(seed, {r}));
}

Decision MctsTeam::decide(const Snapshot& snapshot, std::size_t robot) { return planners_.at(robot).decide(snapshot); }

} // namespace covergrid
