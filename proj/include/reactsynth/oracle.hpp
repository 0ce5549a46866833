#ifndef REACTSYNTH_ORACLE_HPP_
#define REACTSYNTH_ORACLE_HPP_

#include "reactsynth/dynamics.hpp"
#include "reactsynth/formula.hpp"
#include "reactsynth/regions.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <vector>

namespace reactsynth {

using Objective = std::function<double(const Eigen::VectorXd &)>;

struct BnbOptions
{
  /// Lipschitz constant of the objective in the sup norm.
  double lipschitz = 1.0;
  /// Boxes whose widest edge is below this are not split further.
  double precision = 1e-3;
  std::size_t max_nodes = 20'000'000;
};

struct BnbStats
{
  std::size_t nodes = 0;
  std::size_t evaluations = 0;
};

struct Candidate
{
  Eigen::VectorXd point;
  double value = 0;
};

/**
 * Lipschitz branch-and-bound search for a point of `region` with g > 0.
 *
 * Boxes are explored best-first by the bound g(c) + L r inherited from their
 * parent, ties in insertion order. A center is accepted when it lies in the
 * region and g(c) > 0. A box is pruned when g(c) + L r <= 0 and is no longer
 * split once its widest edge drops below the precision. An empty answer rules
 * out region points with g >= L * precision, except inside slivers left between
 * removed squares.
 *
 * Throws BudgetExhausted when more than max_nodes boxes are visited.
 */
std::optional<Candidate> bnb_satisfy(const Objective & g, const RegionSet & region, const BnbOptions & opt,
                                     BnbStats * stats = nullptr);

struct MaximizeOptions : BnbOptions
{
  /// Stop as soon as a point reaches this value.
  std::optional<double> stop_at;
  /// Stop as soon as the global upper bound drops below this value.
  std::optional<double> certify_below;
};

struct MaximizeResult
{
  std::optional<Candidate> best;
  /// Upper bound on g over the region, valid whenever the search ends.
  double upper_bound = std::numeric_limits<double>::infinity();
};

/// Best-first Lipschitz maximization; the gap closes to within L * precision.
MaximizeResult bnb_maximize(const Objective & g, const RegionSet & region, const MaximizeOptions & opt,
                            BnbStats * stats = nullptr);

enum class Player { Control, Disturbance };
enum class OracleMode { Satisfy, Maximize };

/// One oracle call on a linear plant: search one player's sequence with the other fixed.
struct Query
{
  LinearSystem sys;
  Formula formula;
  Player free_player = Player::Control;
  InputSequence fixed_opponent;
  /// Flattened domain of the free player; the full box when unset.
  std::optional<RegionSet> domain;
  OracleMode mode = OracleMode::Satisfy;
  double precision = 1e-3;
  /// Overrides the computed sup-norm constant.
  std::optional<double> lipschitz;
  /// Search for violations of the formula instead.
  bool negate = false;

  RegionSet effective_domain() const;
  double effective_lipschitz() const;
  Objective objective() const;
};

struct FoundPoint
{
  InputSequence point;
  double robustness = 0;
};

/**
 * Satisfy: a domain point whose robustness (negated when asked) is positive.
 * Maximize: the best point found, within L * precision of the supremum.
 */
std::optional<FoundPoint> find_sat(const Query & q, BnbStats * stats = nullptr);

struct FiniteQuery
{
  FiniteGame game;
  Formula formula;
  Player free_player = Player::Control;
  std::vector<int> fixed_opponent;
  std::set<std::vector<int>> excluded;
  bool negate = false;
};

struct FoundMoves
{
  std::vector<int> moves;
  double margin = 0;
};

/// Lexicographically first admissible move sequence with positive margin.
std::optional<FoundMoves> find_sat_finite(const FiniteQuery & q, std::size_t * evaluations = nullptr);

/// Calls visit on every sequence of `rounds` indices below `alphabet`, in lexicographic order, until it returns false.
void for_each_sequence(int alphabet, int rounds, const std::function<bool(const std::vector<int> &)> & visit);

}  // namespace reactsynth

#endif  // REACTSYNTH_ORACLE_HPP_
