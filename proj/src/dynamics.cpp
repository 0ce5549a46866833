#include "reactsynth/dynamics.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numeric>
#include <tuple>

namespace reactsynth {

void LinearSystem::validate() const
{
  const Eigen::Index n = A.rows();
  if (A.cols() != n) { throw DimensionError("A must be square"); }
  if (B.rows() != n) { throw DimensionError("B must have as many rows as A"); }
  if (C.rows() != n) { throw DimensionError("C must have as many rows as A"); }
  if (x0.size() != n) { throw DimensionError("x0 must match the state dimension"); }
  if (horizon < 1) { throw DomainError("horizon must be at least 1"); }
  if (u_box.dim() != B.cols()) { throw DimensionError("u_box must match the columns of B"); }
  if (w_box.dim() != C.cols()) { throw DimensionError("w_box must match the columns of C"); }
}

namespace {

Box repeat(const Box & b, int times)
{
  Box out;
  out.lo = b.lo.replicate(times, 1);
  out.hi = b.hi.replicate(times, 1);
  return out;
}

InputSequence lookup(const std::vector<Move> & alphabet, const std::vector<int> & moves)
{
  InputSequence out;
  out.reserve(moves.size());
  for (int m : moves) {
    if (m < 0 || static_cast<std::size_t>(m) >= alphabet.size()) { throw DomainError("move index out of range"); }
    out.push_back(alphabet[static_cast<std::size_t>(m)].value);
  }
  return out;
}

}  // namespace

Box LinearSystem::control_space() const
{
  return repeat(u_box, horizon);
}

Box LinearSystem::disturbance_space() const
{
  return repeat(w_box, horizon);
}

void FiniteGame::validate() const
{
  plant.validate();
  if (u_moves.empty() || w_moves.empty()) { throw DomainError("move lists must be non-empty"); }
  for (const auto * list : {&u_moves, &w_moves}) {
    const Eigen::Index n = list == &u_moves ? plant.control_dim() : plant.disturbance_dim();
    for (std::size_t i = 0; i < list->size(); ++i) {
      if ((*list)[i].value.size() != n) { throw DimensionError("move '" + (*list)[i].name + "' has the wrong size"); }
      for (std::size_t j = 0; j < i; ++j) {
        if ((*list)[j].value == (*list)[i].value) { throw DomainError("two moves share the same value"); }
      }
    }
  }
}

InputSequence FiniteGame::controls(const std::vector<int> & moves) const
{
  return lookup(u_moves, moves);
}

InputSequence FiniteGame::disturbances(const std::vector<int> & moves) const
{
  return lookup(w_moves, moves);
}

Eigen::VectorXd flatten(const InputSequence & seq)
{
  Eigen::Index n = 0;
  for (const auto & v : seq) { n += v.size(); }
  Eigen::VectorXd out(n);
  Eigen::Index at = 0;
  for (const auto & v : seq) {
    out.segment(at, v.size()) = v;
    at += v.size();
  }
  return out;
}

InputSequence unflatten(const Eigen::VectorXd & flat, int rounds)
{
  if (rounds <= 0 || flat.size() % rounds != 0) { throw DimensionError("cannot split input vector into rounds"); }
  const Eigen::Index n = flat.size() / rounds;
  InputSequence out;
  out.reserve(static_cast<std::size_t>(rounds));
  for (int k = 0; k < rounds; ++k) { out.push_back(flat.segment(k * n, n)); }
  return out;
}

namespace detail {

Eigen::VectorXd admit(const Box & box, const Eigen::VectorXd & v, const char * what, int round)
{
  if (box.dim() != v.size()) { return v; }
  constexpr double slack = 1e-9;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v(i) >= box.lo(i) - slack && v(i) <= box.hi(i) + slack)) {
      throw DomainError(std::string(what) + " at round " + std::to_string(round) + " lies outside its box");
    }
  }
  return box.clamp(v);
}

}  // namespace detail

double run_robustness(const LinearSystem & sys, const Formula & f, const Eigen::VectorXd & u,
                      const Eigen::VectorXd & w)
{
  return robustness(f, unroll(sys, unflatten(u, sys.horizon), unflatten(w, sys.horizon)));
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> sensitivity(const LinearSystem & sys)
{
  const Eigen::Index n = sys.state_dim(), H = sys.horizon;
  const Eigen::Index nu = sys.control_dim(), nw = sys.disturbance_dim();
  Eigen::MatrixXd Mu = Eigen::MatrixXd::Zero(H * n, H * nu);
  Eigen::MatrixXd Mw = Eigen::MatrixXd::Zero(H * n, H * nw);
  Eigen::MatrixXd AkB = sys.B, AkC = sys.C;
  for (Eigen::Index lag = 0; lag < H; ++lag) {
    for (Eigen::Index c = 0; c + lag < H; ++c) {
      const Eigen::Index r = c + lag;
      Mu.block(r * n, c * nu, n, nu) = AkB;
      Mw.block(r * n, c * nw, n, nw) = AkC;
    }
    AkB = sys.A * AkB;
    AkC = sys.A * AkC;
  }
  return {Mu, Mw};
}

RunModel::RunModel(const LinearSystem & sys) : sys_(sys)
{
  std::tie(Mu_, Mw_) = sensitivity(sys);
  const Eigen::Index n = sys.state_dim();
  free_.resize(sys.horizon * n);
  Eigen::VectorXd x = sys.x0;
  for (int k = 0; k < sys.horizon; ++k) {
    x = sys.A * x;
    free_.segment(k * n, n) = x;
  }
}

Trace RunModel::trace(const Eigen::VectorXd & u, const Eigen::VectorXd & w) const
{
  if (u.size() != Mu_.cols() || w.size() != Mw_.cols()) { throw DimensionError("flattened inputs have the wrong size"); }
  Eigen::VectorXd stacked = free_;
  if (u.size()) { stacked.noalias() += Mu_ * u; }
  if (w.size()) { stacked.noalias() += Mw_ * w; }
  const Eigen::Index n = sys_.state_dim();
  Trace xi;
  xi.reserve(static_cast<std::size_t>(sys_.horizon) + 1);
  xi.push_back(sys_.x0);
  for (int k = 0; k < sys_.horizon; ++k) { xi.push_back(stacked.segment(k * n, n)); }
  return xi;
}

double RunModel::robustness(const Formula & f, const Eigen::VectorXd & u, const Eigen::VectorXd & w) const
{
  return reactsynth::robustness(f, trace(u, w));
}

double lipschitz_bound(const Eigen::MatrixXd & M, const std::vector<Eigen::Index> & columns, const Formula & f,
                       LipschitzNorm norm)
{
  if (columns.empty() || M.rows() == 0) { return 0.0; }
  Eigen::MatrixXd sub(M.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) { sub.col(static_cast<Eigen::Index>(j)) = M.col(columns[j]); }
  if (norm == LipschitzNorm::Infinity) {
    return sub.cwiseAbs().rowwise().sum().maxCoeff() * max_predicate_gain(f);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
  const double sigma = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return sigma * std::sqrt(static_cast<double>(columns.size())) * max_predicate_gain_l2(f);
}

LipschitzBounds lipschitz_bounds(const LinearSystem & sys, const Formula & f, LipschitzNorm norm)
{
  auto [Mu, Mw] = sensitivity(sys);
  auto all = [](Eigen::Index n) {
    std::vector<Eigen::Index> cols(static_cast<std::size_t>(n));
    std::iota(cols.begin(), cols.end(), Eigen::Index{0});
    return cols;
  };
  return {lipschitz_bound(Mu, all(Mu.cols()), f, norm), lipschitz_bound(Mw, all(Mw.cols()), f, norm)};
}

}  // namespace reactsynth
