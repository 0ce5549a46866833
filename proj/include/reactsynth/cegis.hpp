#ifndef REACTSYNTH_CEGIS_HPP_
#define REACTSYNTH_CEGIS_HPP_

#include "reactsynth/dynamics.hpp"
#include "reactsynth/formula.hpp"
#include "reactsynth/oracle.hpp"
#include "reactsynth/regions.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace reactsynth {

struct CegisConfig
{
  double epsilon = 0.1;
  std::size_t max_iters = 100'000;
  /// Override the computed Lipschitz constants.
  std::optional<double> lipschitz_u;
  std::optional<double> lipschitz_w;
  LipschitzNorm norm = LipschitzNorm::Infinity;
  OracleMode oracle = OracleMode::Satisfy;
  /// Branch-and-bound precision of system-side queries; epsilon / (4 L) when unset.
  std::optional<double> precision;
  /// Draw the first counterexample uniformly instead of taking the box center.
  std::optional<std::uint64_t> seed;
  /// Skip region removal and only answer against the latest counterexample.
  bool memoryless = false;
  /// Grow each removed square by bisection while it stays below epsilon.
  bool enlarge_squares = false;
  std::size_t max_nodes = 20'000'000;
  /// Subdivision depth of the per-iteration measure bracket; negative picks a default.
  int measure_depth = -1;
};

enum class CegisStatus { Dominant, NoDominant, BudgetExhausted };

std::string to_string(CegisStatus s);

struct IterationRecord
{
  std::size_t iteration = 0;
  Eigen::VectorXd candidate;
  /// Robustness of the candidate against the counterexample it answered.
  double candidate_robustness = 0;
  std::optional<Eigen::VectorXd> counterexample;
  double counterexample_robustness = 0;
  /// The counterexample makes the robustness non-positive (not only small).
  bool refuting = false;
  std::size_t squares_removed = 0;
  std::pair<double, double> measure{0, 0};
};

struct RemovalRecord
{
  std::size_t iteration = 0;
  Eigen::VectorXd center;
  double radius = 0;
  Eigen::VectorXd counterexample;
  double robustness = 0;
  /// Removed after the candidate search ran dry, at the 2 epsilon level.
  bool closing = false;
};

struct CegisOutcome
{
  CegisStatus status = CegisStatus::NoDominant;
  /// Flattened winning sequence when dominant.
  Eigen::VectorXd witness;
  /// Certified lower bound on the worst-case robustness of the witness.
  double witness_robustness = 0;
  std::vector<int> witness_moves;
  std::size_t iterations = 0;
  std::size_t oracle_calls = 0;
  std::vector<Eigen::VectorXd> counterexamples;
  std::vector<std::vector<int>> counterexample_moves;
  std::vector<IterationRecord> log;
  std::vector<RemovalRecord> removals;
  RegionSet remaining;
  double lipschitz_sys = 0;
  double lipschitz_env = 0;
  std::string message;
};

/// A one-shot game: the system picks s in sys_box, then the environment picks e in env_box.
struct SplitGame
{
  std::function<double(const Eigen::VectorXd & s, const Eigen::VectorXd & e)> rho;
  Box sys_box;
  Box env_box;
  double lipschitz_sys = 1;
  double lipschitz_env = 1;
};

/**
 * Counterexample-guided search for s with rho(s, e) > 0 for every e.
 *
 * Candidates must beat the latest counterexample by more than epsilon. Each
 * counterexample e* removes every square of radius (epsilon + |rho|) / L_sys
 * centered at a point with rho(., e*) <= 0. Dominance is reported only when
 * branch-and-bound certifies min_e rho(s, e) > 0.
 */
CegisOutcome cegis(const SplitGame & game, const CegisConfig & cfg);

/**
 * Removes squares around every point of `region` refuted by the fixed
 * counterexample e*, until the oracle finds no more. Removed points all have
 * rho(., e*) < epsilon.
 */
std::vector<RemovalRecord> without_refuted(const SplitGame & game, const Eigen::VectorXd & e_star, RegionSet & region,
                                           const CegisConfig & cfg, std::size_t * oracle_calls = nullptr);

/// Control sequence dominant against all disturbance sequences.
CegisOutcome modified_cegis(const LinearSystem & sys, const Formula & f, const CegisConfig & cfg);

/// Disturbance sequence that violates the formula against all control sequences.
CegisOutcome dominant_env(const LinearSystem & sys, const Formula & f, const CegisConfig & cfg);

/// The split game behind modified_cegis; swapped players and negated robustness when env is set.
SplitGame make_split_game(const LinearSystem & sys, const Formula & f, const CegisConfig & cfg, bool env = false);

/**
 * Exhaustive loop on finite move sets: the lexicographically first remaining
 * control sequence that beats the counterexample is refuted by the first
 * disturbance sequence that beats it, and is then discarded.
 */
CegisOutcome naive_cegis(const FiniteGame & game, const Formula & f, const CegisConfig & cfg = {});

/// naive_cegis with the roles of the players swapped and the formula negated.
CegisOutcome naive_cegis_env(const FiniteGame & game, const Formula & f, const CegisConfig & cfg = {});

}  // namespace reactsynth

#endif  // REACTSYNTH_CEGIS_HPP_
