#ifndef REACTSYNTH_ARENA_HPP_
#define REACTSYNTH_ARENA_HPP_

#include "reactsynth/dynamics.hpp"
#include "reactsynth/formula.hpp"
#include "reactsynth/oracle.hpp"
#include "reactsynth/regions.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace reactsynth {

/// u_round or w_round, rounds counted from 0.
struct Var
{
  Player player = Player::Control;
  int round = 0;

  bool operator==(const Var & o) const { return player == o.player && round == o.round; }
};

std::string to_string(const Var & v);

/// Values a variable may still take: a box (continuous) or a list of move indices (finite).
struct VarDomain
{
  Box box;
  std::vector<int> moves;
  /// The decision tree already branched on this variable.
  bool branched = false;

  bool fixed() const;
};

/// Domains of every u_k and w_k during a decision-tree walk.
struct Context
{
  std::vector<VarDomain> u;
  std::vector<VarDomain> w;

  VarDomain & at(const Var & v) { return v.player == Player::Control ? u.at(v.round) : w.at(v.round); }
  const VarDomain & at(const Var & v) const { return v.player == Player::Control ? u.at(v.round) : w.at(v.round); }
};

/// The plant, the formula and the move sets a game is played over.
class Arena
{
public:
  Arena(LinearSystem sys, Formula f, LipschitzNorm norm = LipschitzNorm::Infinity);
  Arena(FiniteGame game, Formula f);

  bool finite() const { return game_.has_value(); }
  int horizon() const { return model_.system().horizon; }
  const LinearSystem & system() const { return model_.system(); }
  const FiniteGame & game() const;
  const Formula & formula() const { return formula_; }
  Eigen::Index dim(Player p) const;

  /// Robustness on the run driven by flattened u and w.
  double robustness(const Eigen::VectorXd & u, const Eigen::VectorXd & w) const;

  /// Sup-norm Lipschitz constant of the robustness in the coordinates of `vars`, floored at 1e-9.
  double lipschitz(const std::vector<Var> & vars) const;

  /// Value of move `index` for the player of v.
  const Eigen::VectorXd & move_value(const Var & v, int index) const;
  const std::string & move_name(const Var & v, int index) const;

  /// Full boxes or full move lists for every variable.
  Context initial_context() const;

private:
  RunModel model_;
  Formula formula_;
  std::optional<FiniteGame> game_;
  LipschitzNorm norm_;
};

}  // namespace reactsynth

#endif  // REACTSYNTH_ARENA_HPP_
