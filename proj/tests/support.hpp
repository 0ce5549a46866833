#ifndef REACTSYNTH_TESTS_SUPPORT_HPP_
#define REACTSYNTH_TESTS_SUPPORT_HPP_

#include "reactsynth/dynamics.hpp"
#include "reactsynth/formula.hpp"
#include "reactsynth/problem.hpp"
#include "reactsynth/regions.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace reactsynth::testing {

inline std::filesystem::path spec_path(const std::string & name)
{
  return std::filesystem::path(REACTSYNTH_DATA_DIR) / "specs" / (name + ".json");
}

inline ProblemSpec bundled(const std::string & name) { return load_problem(spec_path(name)); }

using PlainTrace = std::vector<std::vector<double>>;

inline PlainTrace plain(const Trace & xi)
{
  PlainTrace out;
  for (const auto & x : xi) { out.emplace_back(x.data(), x.data() + x.size()); }
  return out;
}

/**
 * Reference semantics written against the desugared core only: predicates,
 * negation, conjunction and F[a,b]. Or, G and X are rewritten through the
 * dualities before evaluation.
 */
inline double reference_robustness(const Formula & f, const PlainTrace & xi, int t)
{
  switch (f.kind()) {
  case Formula::Kind::Predicate: {
    double s = 0;
    for (Eigen::Index i = 0; i < f.gain().size(); ++i) {
      s += f.gain()(i) * xi.at(static_cast<std::size_t>(t)).at(static_cast<std::size_t>(i));
    }
    return s - f.offset();
  }
  case Formula::Kind::Not: return -reference_robustness(f.child(), xi, t);
  case Formula::Kind::And:
    return std::min(reference_robustness(f.child(0), xi, t), reference_robustness(f.child(1), xi, t));
  case Formula::Kind::Or:
    return reference_robustness(!(!f.child(0) && !f.child(1)), xi, t);
  case Formula::Kind::Next: return reference_robustness(Formula::eventually(f.lo(), f.lo(), f.child()), xi, t);
  case Formula::Kind::Globally:
    return reference_robustness(!Formula::eventually(f.lo(), f.hi(), !f.child()), xi, t);
  case Formula::Kind::Finally: {
    double best = -std::numeric_limits<double>::infinity();
    for (int s = t + f.lo(); s <= t + f.hi(); ++s) { best = std::max(best, reference_robustness(f.child(), xi, s)); }
    return best;
  }
  }
  return 0;
}

struct FormulaShape
{
  Eigen::Index dim = 1;
  int depth = 4;
  int max_offset = 2;
  int max_width = 2;
  /// Integer gains and offsets, so exact zeros show up.
  bool integral = false;
};

inline Formula random_predicate(std::mt19937_64 & rng, const FormulaShape & s)
{
  Eigen::VectorXd d(s.dim);
  double c = 0;
  if (s.integral) {
    std::uniform_int_distribution<int> g(-2, 2);
    for (Eigen::Index i = 0; i < s.dim; ++i) { d(i) = g(rng); }
    c = g(rng);
  } else {
    std::uniform_real_distribution<double> g(-2, 2);
    for (Eigen::Index i = 0; i < s.dim; ++i) { d(i) = g(rng); }
    c = g(rng);
  }
  return Formula::predicate(d, c);
}

inline Formula random_formula(std::mt19937_64 & rng, const FormulaShape & s, int depth)
{
  std::uniform_int_distribution<int> pick(0, 6);
  if (depth <= 0 || std::uniform_int_distribution<int>(0, 3)(rng) == 0) { return random_predicate(rng, s); }
  std::uniform_int_distribution<int> off(0, s.max_offset), width(0, s.max_width);
  switch (pick(rng)) {
  case 0: return !random_formula(rng, s, depth - 1);
  case 1: return random_formula(rng, s, depth - 1) && random_formula(rng, s, depth - 1);
  case 2: return random_formula(rng, s, depth - 1) || random_formula(rng, s, depth - 1);
  case 3: return Formula::next(std::max(1, off(rng)), random_formula(rng, s, depth - 1));
  case 4: {
    const int a = off(rng);
    return Formula::eventually(a, a + width(rng), random_formula(rng, s, depth - 1));
  }
  default: {
    const int a = off(rng);
    return Formula::always(a, a + width(rng), random_formula(rng, s, depth - 1));
  }
  }
}

/// Random formula of at most `max_horizon`, drawn again until it fits.
inline Formula random_formula_within(std::mt19937_64 & rng, const FormulaShape & s, int max_horizon)
{
  while (true) {
    auto f = random_formula(rng, s, s.depth);
    if (horizon(f) <= max_horizon) { return f; }
  }
}

inline Trace random_trace(std::mt19937_64 & rng, std::size_t length, Eigen::Index dim, bool integral)
{
  Trace xi;
  for (std::size_t t = 0; t < length; ++t) {
    Eigen::VectorXd x(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      x(i) = integral ? std::uniform_int_distribution<int>(-3, 3)(rng)
                      : std::uniform_real_distribution<double>(-3, 3)(rng);
    }
    xi.push_back(x);
  }
  return xi;
}

/// Calls visit on every point of a grid with `per_dim` points per axis, ends included.
inline void for_each_grid_point(const Box & box, int per_dim, const std::function<void(const Eigen::VectorXd &)> & visit)
{
  const Eigen::Index n = box.dim();
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd p(n);
  while (true) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double frac = per_dim == 1 ? 0.5 : double(idx[static_cast<std::size_t>(i)]) / (per_dim - 1);
      p(i) = box.lo(i) + frac * box.width(i);
    }
    visit(p);
    Eigen::Index i = 0;
    for (; i < n; ++i) {
      if (++idx[static_cast<std::size_t>(i)] < per_dim) { break; }
      idx[static_cast<std::size_t>(i)] = 0;
    }
    if (i == n) { return; }
  }
}

/// Points per axis for a grid of pitch at most `pitch` over an edge of `width`.
inline int points_for_pitch(double width, double pitch)
{
  if (width <= 0) { return 1; }
  return static_cast<int>(std::ceil(width / pitch)) + 1;
}

/// Minimum over a grid of pitch at most `pitch` covering `box`.
inline double grid_min(const Box & box, double pitch, const std::function<double(const Eigen::VectorXd &)> & f)
{
  double m = std::numeric_limits<double>::infinity();
  int per = 1;
  for (Eigen::Index i = 0; i < box.dim(); ++i) { per = std::max(per, points_for_pitch(box.width(i), pitch)); }
  for_each_grid_point(box, per, [&](const Eigen::VectorXd & p) { m = std::min(m, f(p)); });
  return m;
}

inline double grid_max(const Box & box, double pitch, const std::function<double(const Eigen::VectorXd &)> & f)
{
  return -grid_min(box, pitch, [&](const Eigen::VectorXd & p) { return -f(p); });
}

/// Two-state plant i, j driven by scalar u and w, with a random coupling.
inline LinearSystem random_plant(std::mt19937_64 & rng, int horizon, Eigen::Index n_u)
{
  std::uniform_real_distribution<double> g(-1, 1);
  LinearSystem s;
  s.A = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) { s.A(i, j) = 0.5 * g(rng); }
  }
  s.B = Eigen::MatrixXd(2, n_u);
  for (Eigen::Index c = 0; c < n_u; ++c) { s.B.col(c) << 1 + 0.5 * g(rng), 0.3 * g(rng); }
  s.C = Eigen::MatrixXd(2, 1);
  s.C << 0.3 * g(rng), 1 + 0.5 * g(rng);
  s.x0 = Eigen::Vector2d(0.5 * g(rng), 0.5 * g(rng));
  s.horizon = horizon;
  s.u_box = Box::cube(n_u, 0, 1);
  s.w_box = Box::cube(1, 0, 1);
  return s;
}

}  // namespace reactsynth::testing

#endif  // REACTSYNTH_TESTS_SUPPORT_HPP_
