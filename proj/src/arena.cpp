#include "reactsynth/arena.hpp"

#include "reactsynth/error.hpp"

#include <algorithm>

namespace reactsynth {

std::string to_string(const Var & v)
{
  return (v.player == Player::Control ? "u" : "w") + std::to_string(v.round);
}

bool VarDomain::fixed() const
{
  if (!moves.empty()) { return moves.size() == 1; }
  return box.dim() == 0 || box.lo == box.hi;
}

namespace {

LinearSystem checked(LinearSystem sys, const Formula & f)
{
  sys.validate();
  if (horizon(f) > sys.horizon) { throw TraceTooShort("formula horizon exceeds the system horizon"); }
  if (signal_dimension(f) > sys.state_dim()) {
    throw DimensionError("formula references states beyond the system dimension");
  }
  return sys;
}

}  // namespace

Arena::Arena(LinearSystem sys, Formula f, LipschitzNorm norm)
  : model_(checked(std::move(sys), f)), formula_(std::move(f)), norm_(norm)
{
}

Arena::Arena(FiniteGame game, Formula f)
  : model_(checked(game.plant, f)), formula_(std::move(f)), norm_(LipschitzNorm::Infinity)
{
  game.validate();
  game_ = std::move(game);
}

const FiniteGame & Arena::game() const
{
  if (!game_) { throw DomainError("arena has no finite move sets"); }
  return *game_;
}

Eigen::Index Arena::dim(Player p) const
{
  return p == Player::Control ? system().control_dim() : system().disturbance_dim();
}

double Arena::robustness(const Eigen::VectorXd & u, const Eigen::VectorXd & w) const
{
  return model_.robustness(formula_, u, w);
}

double Arena::lipschitz(const std::vector<Var> & vars) const
{
  const auto & Mu = model_.control_sensitivity();
  const auto & Mw = model_.disturbance_sensitivity();
  std::vector<Eigen::Index> cols;
  for (const auto & v : vars) {
    const Eigen::Index n = dim(v.player);
    const Eigen::Index offset = v.player == Player::Control ? 0 : Mu.cols();
    for (Eigen::Index i = 0; i < n; ++i) { cols.push_back(offset + v.round * n + i); }
  }
  Eigen::MatrixXd M(Mu.rows(), Mu.cols() + Mw.cols());
  M << Mu, Mw;
  return std::max(lipschitz_bound(M, cols, formula_, norm_), 1e-9);
}

const Eigen::VectorXd & Arena::move_value(const Var & v, int index) const
{
  const auto & moves = v.player == Player::Control ? game().u_moves : game().w_moves;
  return moves.at(static_cast<std::size_t>(index)).value;
}

const std::string & Arena::move_name(const Var & v, int index) const
{
  const auto & moves = v.player == Player::Control ? game().u_moves : game().w_moves;
  return moves.at(static_cast<std::size_t>(index)).name;
}

Context Arena::initial_context() const
{
  Context ctx;
  for (int k = 0; k < horizon(); ++k) {
    VarDomain du, dw;
    if (finite()) {
      for (int i = 0; i < static_cast<int>(game_->u_moves.size()); ++i) { du.moves.push_back(i); }
      for (int i = 0; i < static_cast<int>(game_->w_moves.size()); ++i) { dw.moves.push_back(i); }
    } else {
      du.box = system().u_box;
      dw.box = system().w_box;
    }
    ctx.u.push_back(std::move(du));
    ctx.w.push_back(std::move(dw));
  }
  return ctx;
}

}  // namespace reactsynth
