#ifndef REACTSYNTH_DYNAMICS_HPP_
#define REACTSYNTH_DYNAMICS_HPP_

#include "reactsynth/error.hpp"
#include "reactsynth/formula.hpp"
#include "reactsynth/regions.hpp"
#include "reactsynth/robustness.hpp"

#include <Eigen/Core>

#include <string>
#include <utility>
#include <vector>

namespace reactsynth {

/// One input value per round, u_0 .. u_{H-1}.
using InputSequence = std::vector<Eigen::VectorXd>;

/**
 * x_{k+1} = A x_k + B u_k + C w_k over H rounds, with u_k and w_k ranging over
 * per-round boxes.
 */
struct LinearSystem
{
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::VectorXd x0;
  int horizon = 1;
  Box u_box;
  Box w_box;

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index control_dim() const { return B.cols(); }
  Eigen::Index disturbance_dim() const { return C.cols(); }

  /// Throws DimensionError or DomainError when the fields are inconsistent.
  void validate() const;

  /// Box of the flattened sequence u_0 .. u_{H-1}.
  Box control_space() const;
  Box disturbance_space() const;
};

/// A named move and the input value it stands for.
struct Move
{
  std::string name;
  Eigen::VectorXd value;
};

/// A plant whose players choose each round from finite move lists.
struct FiniteGame
{
  LinearSystem plant;
  std::vector<Move> u_moves;
  std::vector<Move> w_moves;

  int horizon() const { return plant.horizon; }
  void validate() const;
  InputSequence controls(const std::vector<int> & moves) const;
  InputSequence disturbances(const std::vector<int> & moves) const;
};

Eigen::VectorXd flatten(const InputSequence & seq);
InputSequence unflatten(const Eigen::VectorXd & flat, int rounds);

namespace detail {

/// Checks box membership with a 1e-9 allowance and returns the clamped value.
Eigen::VectorXd admit(const Box & box, const Eigen::VectorXd & v, const char * what, int round);

}  // namespace detail

/// x_0 .. x_H. Inputs within 1e-9 of their box are clamped onto it.
template<typename Scalar>
Signal<Scalar> unroll(const LinearSystem & sys, const Signal<Scalar> & u, const Signal<Scalar> & w)
{
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const auto H = static_cast<std::size_t>(sys.horizon);
  if (u.size() != H || w.size() != H) {
    throw DimensionError("input sequences must have " + std::to_string(H) + " rounds");
  }
  const auto A = sys.A.cast<Scalar>();
  const auto B = sys.B.cast<Scalar>();
  const auto C = sys.C.cast<Scalar>();
  Signal<Scalar> xi;
  xi.reserve(H + 1);
  xi.push_back(sys.x0.cast<Scalar>());
  for (std::size_t k = 0; k < H; ++k) {
    if (u[k].size() != sys.control_dim() || w[k].size() != sys.disturbance_dim()) {
      throw DimensionError("input value at round " + std::to_string(k) + " has the wrong dimension");
    }
    Vec uk = u[k], wk = w[k];
    if constexpr (std::is_same_v<Scalar, double>) {
      uk = detail::admit(sys.u_box, uk, "control", static_cast<int>(k));
      wk = detail::admit(sys.w_box, wk, "disturbance", static_cast<int>(k));
    }
    Vec next = A * xi.back() + B * uk + C * wk;
    xi.push_back(std::move(next));
  }
  return xi;
}

/// Robustness of f at t = 0 on the run driven by flattened u and w.
double run_robustness(const LinearSystem & sys, const Formula & f, const Eigen::VectorXd & u,
                      const Eigen::VectorXd & w);

/**
 * Jacobians of the stacked run (x_1 .. x_H) with respect to the stacked inputs.
 * Block (r, c) of M_u is A^{r-c} B for r >= c and zero above the diagonal.
 */
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> sensitivity(const LinearSystem & sys);

/**
 * The run as an affine map of the flattened inputs, x_{1..H} = free + M_u u + M_w w.
 * Used on hot paths; inputs are not checked against their boxes.
 */
class RunModel
{
public:
  explicit RunModel(const LinearSystem & sys);

  const LinearSystem & system() const { return sys_; }
  const Eigen::MatrixXd & control_sensitivity() const { return Mu_; }
  const Eigen::MatrixXd & disturbance_sensitivity() const { return Mw_; }

  Trace trace(const Eigen::VectorXd & u, const Eigen::VectorXd & w) const;
  double robustness(const Formula & f, const Eigen::VectorXd & u, const Eigen::VectorXd & w) const;

private:
  LinearSystem sys_;
  Eigen::MatrixXd Mu_;
  Eigen::MatrixXd Mw_;
  Eigen::VectorXd free_;
};

enum class LipschitzNorm {
  Infinity,  ///< max absolute row sum times max ||d||_1
  Spectral,  ///< largest singular value times sqrt(#inputs) times max ||d||_2
};

struct LipschitzBounds
{
  double u = 0;
  double w = 0;
};

/// Sup-norm Lipschitz constants of the run robustness in the flattened u and w.
LipschitzBounds lipschitz_bounds(const LinearSystem & sys, const Formula & f,
                                 LipschitzNorm norm = LipschitzNorm::Infinity);

/**
 * Lipschitz constant with respect to the input coordinates `columns` of the
 * sensitivity matrix M, the others held fixed.
 */
double lipschitz_bound(const Eigen::MatrixXd & M, const std::vector<Eigen::Index> & columns, const Formula & f,
                       LipschitzNorm norm = LipschitzNorm::Infinity);

}  // namespace reactsynth

#endif  // REACTSYNTH_DYNAMICS_HPP_
