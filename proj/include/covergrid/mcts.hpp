#pragma once

#include "covergrid/grid_world.hpp"
#include "covergrid/planner.hpp"
#include "covergrid/rng.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace covergrid {

enum class TurnPenaltyMode : std::uint8_t { None, LeftOnly, RightOnly, Both };

/// ChildMean: an internal node's value is the mean of its children's values.
/// VisitMean: classical running mean of rollout returns (comparison only).
enum class BackupRule : std::uint8_t { ChildMean, VisitMean };

/// Origin of t_k. Rollout: t_k = k * step. Episode: t_k adds the elapsed
/// mission time at the decision, which flattens the weights as time goes on.
enum class TimeAnchor : std::uint8_t { Rollout, Episode };

std::string_view to_string(TurnPenaltyMode mode) noexcept;
std::optional<TurnPenaltyMode> turn_mode_from_string(std::string_view s) noexcept;

struct MctsConfig
{
    double c_p = 1.0;
    int horizon = 30;
    double c_hit = 2.0;
    double c_turn = 0.0;
    TurnPenaltyMode turn_mode = TurnPenaltyMode::None;
    std::size_t iterations = 2000;
    /// When set, search runs until this much wall-clock time has elapsed
    /// instead of for a fixed number of iterations. Not reproducible.
    std::optional<double> wallclock_ms;
    BackupRule backup = BackupRule::ChildMean;
    /// Multiplies every rollout value; 1 leaves the objective unchanged.
    double reward_scale = 1.0;
    double step_seconds = 0.5;
    TimeAnchor anchor = TimeAnchor::Rollout;
    /// Elapsed mission time in seconds; set per decision under Episode.
    double time_origin = 0.0;

    /// Throws std::invalid_argument on c_p <= 0, horizon < 1 or a zero budget.
    void validate() const;
};

/// X + 2 c_p sqrt(2 ln n / n_j); +infinity for an unvisited node (n_j = 0).
double uct_score(double value, std::size_t parent_visits, std::size_t visits, double c_p) noexcept;

/// Per-step outcome flags of one rollout step k (k = 1..T).
struct StepFlags
{
    bool covered = false; // p_k: entered a square nobody has covered
    bool hit = false;     // q_k: advance blocked by a wall, obstacle or robot
    bool turned = false;  // r_k: turned in a penalized direction
};

struct RolloutOutcome
{
    std::vector<StepFlags> steps;
    double value = 0.0;
};

/// 1 / (t_k + 1)^2 with t_k = origin + k * step_seconds.
double step_weight(std::size_t k, double step_seconds, double origin = 0.0) noexcept;

/// Turn-penalized objective: sum_k w_k (p_k - c_hit q_k - c_turn r_k).
double evaluate(std::span<const StepFlags> steps, const MctsConfig& cfg) noexcept;

/// Coverage-only objective: sum_k w_k (p_k - c_hit q_k).
double evaluate_coverage(std::span<const StepFlags> steps, double c_hit, double step_seconds) noexcept;

constexpr bool is_penalized_turn(Action a, TurnPenaltyMode mode) noexcept
{
    switch (mode)
    {
    case TurnPenaltyMode::None: return false;
    case TurnPenaltyMode::LeftOnly: return a == Action::Left;
    case TurnPenaltyMode::RightOnly: return a == Action::Right;
    case TurnPenaltyMode::Both: return a != Action::Straight;
    }
    return false;
}

/// Rollout default policy: go straight while the square ahead is open
/// (unoccupied and uncovered); otherwise turn toward the single open side
/// square; with both sides open, or nothing open and the way ahead occupied,
/// turn left or right at random; with nothing open but the way ahead
/// unoccupied, continue straight.
template <class OccupiedFn, class CoveredFn>
Action default_policy(const RobotState& state, GridExtent extent, OccupiedFn&& occupied, CoveredFn&& covered, Rng& rng)
{
    const auto blocked = [&](Cell c) { return !extent.contains(c) || occupied(c); };
    const auto open = [&](Cell c) { return !blocked(c) && !covered(c); };

    const Cell ahead = neighbor(state.pos, state.heading);
    if (open(ahead))
        return Action::Straight;

    const bool left = open(neighbor(state.pos, turn_left(state.heading)));
    const bool right = open(neighbor(state.pos, turn_right(state.heading)));
    if (left && !right)
        return Action::Left;
    if (right && !left)
        return Action::Right;
    if (!left && !right && !blocked(ahead))
        return Action::Straight;
    return coin_flip(rng) ? Action::Left : Action::Right;
}

/// Forward simulator for one planner. Owns scratch buffers (covered overlay,
/// simulated robot poses) and one random stream per peer, so a single
/// instance must not be shared between threads.
class RolloutSimulator
{
  public:
    RolloutSimulator(std::size_t self, std::size_t team_size, std::uint64_t seed);

    /// Simulates steps 1..T from the robot's snapshot state. The first
    /// prefix.size() self actions are taken from `prefix` (the tree path),
    /// the rest from the default policy. Peers move first each step, along
    /// their published paths and then under the default policy.
    const RolloutOutcome& run(const Snapshot& snapshot, std::span<const Action> prefix, const MctsConfig& cfg, Rng& rng);

    std::size_t self() const noexcept { return self_; }

  private:
    bool overlay_covered(std::size_t index) const noexcept { return overlay_[index] == stamp_; }

    std::size_t self_;
    std::vector<Rng> peer_rngs_;
    std::vector<std::uint32_t> overlay_;
    std::uint32_t stamp_ = 0;
    std::vector<RobotState> sim_;
    RolloutOutcome outcome_;
};

/// One robot's search tree. Nodes live in a flat arena; links are indices.
class SearchTree
{
  public:
    static constexpr std::int32_t kNone = -1;

    struct Node
    {
        RobotState state;
        Action incoming = Action::Straight; // meaningless for the root
        std::int32_t parent = kNone;
        std::array<std::int32_t, 3> children{kNone, kNone, kNone}; // by Action
        std::uint8_t untried = 0b111;                              // bit per Action
        double value = 0.0;                                        // X
        double return_sum = 0.0;                                   // VisitMean only
        std::size_t visits = 0;                                    // n_j

        bool has_untried() const noexcept { return untried != 0; }
        bool has_children() const noexcept { return children[0] != kNone || children[1] != kNone || children[2] != kNone; }
    };

    struct Selection
    {
        std::int32_t node = 0;
        int depth = 0;
    };

    explicit SearchTree(RobotState root_state);

    const Node& root() const noexcept { return nodes_.front(); }
    const Node& node(std::int32_t i) const { return nodes_.at(static_cast<std::size_t>(i)); }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::span<const Node> nodes() const noexcept { return nodes_; }

    /// Descends by maximal UCT (ties Straight < Left < Right) and stops at the
    /// first node with untried actions or at depth `horizon`.
    Selection select(const MctsConfig& cfg) const;

    /// Removes one uniformly random untried action of `parent` and adds its
    /// child. The child's state follows the belief map (unknown = free).
    std::int32_t expand(std::int32_t parent, const BeliefView& belief, Rng& rng);

    /// leaf.X = X, then every ancestor is revisited and recomputed.
    void backpropagate(std::int32_t leaf, double value, BackupRule rule);

    /// Actions from the root to `node`.
    std::vector<Action> path_to(std::int32_t node) const;

    /// One select / expand / rollout / backpropagate pass. Returns the node
    /// that received the rollout value.
    std::int32_t iterate(const Snapshot& snapshot, RolloutSimulator& sim, const MctsConfig& cfg, Rng& rng);

    /// Root child with maximal value (ties Straight < Left < Right).
    std::optional<Action> best_action() const;

    /// Greedy max-value descent from the root, at most max_len actions.
    std::vector<Action> best_path(std::size_t max_len) const;

    /// Makes the child reached by `a` the new root; siblings are discarded.
    /// Returns false (tree unchanged) if that child does not exist.
    bool advance(Action a);

  private:
    std::int32_t best_child(const Node& n) const;

    std::vector<Node> nodes_;
};

/// One robot's planner: owns its tree, its random stream and its simulator.
class MctsPlanner
{
  public:
    MctsPlanner(std::size_t self, std::size_t team_size, MctsConfig cfg, std::uint64_t seed);

    Decision decide(const Snapshot& snapshot);

    const SearchTree* tree() const noexcept { return tree_ ? &*tree_ : nullptr; }
    const MctsConfig& config() const noexcept { return cfg_; }
    std::size_t last_iterations() const noexcept { return last_iterations_; }

  private:
    std::size_t self_;
    MctsConfig cfg_;
    Rng rng_;
    RolloutSimulator sim_;
    std::optional<SearchTree> tree_;
    std::size_t last_iterations_ = 0;
};

class MctsTeam final : public TeamPlanner
{
  public:
    MctsTeam(std::size_t team_size, const MctsConfig& cfg, std::uint64_t seed);

    std::string_view name() const noexcept override { return "mcts"; }
    Decision decide(const Snapshot& snapshot, std::size_t robot) override;

    const MctsPlanner& planner(std::size_t robot) const { return planners_.at(robot); }

  private:
    std::vector<MctsPlanner> planners_;
};

} // namespace covergrid
