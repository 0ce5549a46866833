#ifndef REACTSYNTH_GAME_EVAL_HPP_
#define REACTSYNTH_GAME_EVAL_HPP_

#include "reactsynth/arena.hpp"
#include "reactsynth/cegis.hpp"
#include "reactsynth/game_string.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <memory>
#include <vector>

namespace reactsynth {

struct GameConfig
{
  /// Granularity: lattice pitch and cell width are epsilon / L for the variables involved.
  double epsilon = 0.125;
  /// Largest lattice of candidate values enumerated for one existential block.
  std::size_t max_lattice = 4096;
  /// Budget on recursive evaluation steps.
  std::size_t max_steps = 2'000'000;
  std::size_t max_nodes = 20'000'000;
  /// Worker threads for the cells of the outermost universal split.
  int jobs = 1;
  /// Settings of the dominant-strategy fallback; epsilon and max_nodes are taken from above.
  CegisConfig cegis;
};

struct Witness;
using WitnessPtr = std::shared_ptr<const Witness>;

struct WitnessCell
{
  /// The cell of a continuous variable; degenerate for finite moves.
  Box box;
  int move = -1;
  WitnessPtr child;
};

/**
 * Strategy certificate of a true game.
 * Commit: values for an existential block, then `next`.
 * Split: one child per cell of a universal variable, covering its domain.
 * Win: every remaining choice of the opponent loses.
 */
struct Witness
{
  enum class Kind { Commit, Split, Win };
  Kind kind = Kind::Win;
  std::vector<Var> vars;
  std::vector<Eigen::VectorXd> values;
  std::vector<int> moves;
  WitnessPtr next;
  Var split;
  std::vector<WitnessCell> cells;
};

struct GameStats
{
  std::size_t steps = 0;
  std::size_t oracle_calls = 0;
  std::size_t cells = 0;
};

struct GameResult
{
  bool value = false;
  /// Set when the game is true.
  WitnessPtr witness;
  GameStats stats;
};

/**
 * Decides the quantified game q over the domains of ctx: does the system have
 * a strategy, reacting to the variables quantified before its own, that keeps
 * the robustness above theta?
 *
 * Fixed variables are skipped. Existential blocks enumerate a lattice of pitch
 * epsilon / L in cooperative order; an existential block followed only by a
 * universal block first tries lattice candidates and then falls back to the
 * dominant-strategy loop. Universal blocks followed by more moves split each
 * variable into cells of width epsilon / L and recurse on the centers with
 * theta raised by L times the cell radius. True answers are certified; false
 * answers hold at granularity epsilon. Finite games are decided exhaustively,
 * trying moves in lexicographic order.
 *
 * Throws BudgetExhausted when the step or lattice budget runs out.
 */
GameResult evaluate_game(const GameString & q, const Arena & arena, const Context & ctx, const GameConfig & cfg,
                         double theta = 0);

}  // namespace reactsynth

#endif  // REACTSYNTH_GAME_EVAL_HPP_
