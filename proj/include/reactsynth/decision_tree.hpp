#ifndef REACTSYNTH_DECISION_TREE_HPP_
#define REACTSYNTH_DECISION_TREE_HPP_

#include "reactsynth/arena.hpp"
#include "reactsynth/game_eval.hpp"
#include "reactsynth/game_string.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace reactsynth {

struct TreeNode;
using TreePtr = std::shared_ptr<const TreeNode>;

struct TreeSegment
{
  /// Range of the observed disturbance; empty for finite moves.
  Box box;
  int move = -1;
  TreePtr child;
};

/**
 * Reactive controller.
 * Assign: apply `value` as u_round, then continue with `next`.
 * Branch: observe w_round and follow the segment that contains it.
 * Leaf: every round has been assigned.
 */
struct TreeNode
{
  enum class Kind { Assign, Branch, Leaf };
  Kind kind = Kind::Leaf;
  int round = 0;
  Eigen::VectorXd value;
  int move = -1;
  TreePtr next;
  std::vector<TreeSegment> segments;
};

struct TreeConfig
{
  GameConfig game;
  /// Merge adjacent segments whose subtrees are identical.
  bool merge = true;
};

enum class TreeStatus { Success, NoStrategy, BudgetExhausted };

std::string to_string(TreeStatus s);

/// One evaluated game along a walk.
struct WalkRecord
{
  std::size_t walk = 0;
  std::size_t step = 0;
  /// Domains restricted by the branches taken so far, e.g. "w0 in [0, 0.125]".
  std::string branch;
  WalkStep step_info;
  int alpha = 0;
  GameStats stats;
};

struct TreeResult
{
  TreeStatus status = TreeStatus::NoStrategy;
  TreePtr root;
  /// Every walk to a terminal, one per branch of the tree.
  std::vector<Walk> walks;
  std::vector<WalkRecord> log;
  std::size_t leaves_before_merge = 0;
  std::string message;
};

/**
 * Walks the game transition system from the initial game, evaluating each
 * game over the domains fixed so far. A true non-causal game commits the
 * decision variable from its witness; universal splits ahead of it become
 * branches and the walk continues separately on each. A true causal game
 * turns the rest of its witness into the tree. Any walk reaching Bottom
 * makes the whole synthesis fail.
 */
TreeResult build_decision_tree(const Arena & arena, const TreeConfig & cfg);

/// Merges adjacent segments with identical subtrees and drops branches left with a single segment.
TreePtr merge_segments(const TreePtr & t);

bool same_tree(const TreeNode & a, const TreeNode & b, double tol = 1e-12);
std::size_t count_leaves(const TreeNode & t);
std::size_t count_nodes(const TreeNode & t);

struct VerifyResult
{
  bool ok = false;
  std::size_t paths = 0;
  std::size_t points = 0;
  double min_robustness = std::numeric_limits<double>::infinity();
  std::string message;
};

/**
 * Checks every root-to-leaf path: each u_k is assigned before any branch on
 * w_j with j >= k, segments cover their domain, and the robustness is positive
 * on a grid of pitch epsilon / (2 L_w) over the disturbances the path allows.
 * Finite games check every allowed move sequence instead.
 */
VerifyResult verify_tree(const TreeNode & t, const Arena & arena, double epsilon, std::size_t max_points = 2'000'000);

/// Plays the tree against a disturbance sequence and returns the control sequence.
InputSequence execute(const TreeNode & t, const Arena & arena, const InputSequence & w);

std::string tree_to_json(const TreeNode & t, const Arena & arena, int indent = 2);
std::string tree_to_dot(const TreeNode & t, const Arena & arena);

}  // namespace reactsynth

#endif  // REACTSYNTH_DECISION_TREE_HPP_
