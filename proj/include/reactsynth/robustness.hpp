#ifndef REACTSYNTH_ROBUSTNESS_HPP_
#define REACTSYNTH_ROBUSTNESS_HPP_

#include "reactsynth/error.hpp"
#include "reactsynth/formula.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <string>
#include <vector>

namespace reactsynth {

/// Discrete-time signal: one sample per step, all of equal dimension.
template<typename Scalar>
using Signal = std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>;

using Trace = Signal<double>;

namespace detail {

template<typename Scalar>
Scalar robustness_unchecked(const Formula & f, const Signal<Scalar> & xi, int t)
{
  using std::max;
  using std::min;
  switch (f.kind()) {
  case Formula::Kind::Predicate: {
    const auto & d = f.gain();
    const auto & x = xi[static_cast<std::size_t>(t)];
    if (d.size() > x.size()) {
      throw DimensionError("predicate references state " + std::to_string(d.size() - 1) +
                           " but samples have dimension " + std::to_string(x.size()));
    }
    return d.template cast<Scalar>().dot(x.head(d.size())) - Scalar(f.offset());
  }
  case Formula::Kind::Not: return -robustness_unchecked(f.child(), xi, t);
  case Formula::Kind::And:
    return min(robustness_unchecked(f.child(0), xi, t), robustness_unchecked(f.child(1), xi, t));
  case Formula::Kind::Or:
    return max(robustness_unchecked(f.child(0), xi, t), robustness_unchecked(f.child(1), xi, t));
  case Formula::Kind::Next: return robustness_unchecked(f.child(), xi, t + f.lo());
  case Formula::Kind::Finally: {
    Scalar best = robustness_unchecked(f.child(), xi, t + f.lo());
    for (int s = t + f.lo() + 1; s <= t + f.hi(); ++s) {
      best = max(best, robustness_unchecked(f.child(), xi, s));
    }
    return best;
  }
  case Formula::Kind::Globally: {
    Scalar worst = robustness_unchecked(f.child(), xi, t + f.lo());
    for (int s = t + f.lo() + 1; s <= t + f.hi(); ++s) {
      worst = min(worst, robustness_unchecked(f.child(), xi, s));
    }
    return worst;
  }
  }
  return Scalar(0);
}

}  // namespace detail

/**
 * Quantitative satisfaction margin of `f` on `xi` at step `t`.
 *
 * Predicates evaluate to d . x_t - c, negation flips the sign, conjunction
 * takes the min and F[a,b] the max over steps t+a..t+b. Or, G and X follow from
 * the usual dualities.
 *
 * Throws TraceTooShort when t + horizon(f) is past the end of the trace.
 */
template<typename Scalar>
Scalar robustness(const Formula & f, const Signal<Scalar> & xi, int t = 0)
{
  if (t < 0 || static_cast<std::size_t>(t + horizon(f)) >= xi.size()) {
    throw TraceTooShort("formula needs " + std::to_string(t + horizon(f) + 1) +
                        " samples, trace has " + std::to_string(xi.size()));
  }
  return detail::robustness_unchecked(f, xi, t);
}

/// (xi, t) |= f  iff  robustness > 0.
template<typename Scalar>
bool satisfies(const Formula & f, const Signal<Scalar> & xi, int t = 0)
{
  return robustness(f, xi, t) > Scalar(0);
}

}  // namespace reactsynth

#endif  // REACTSYNTH_ROBUSTNESS_HPP_
