#include "reactsynth/ltl.hpp"

#include "reactsynth/error.hpp"

namespace reactsynth {

Formula proposition(int p)
{
  Eigen::VectorXd d = Eigen::VectorXd::Zero(p + 1);
  d(p) = 1.0;
  return Formula::predicate(d, 0.5);
}

namespace {

bool eval(const Formula & f, const PropositionSequence & x, int t)
{
  switch (f.kind()) {
  case Formula::Kind::Predicate: {
    const auto & d = f.gain();
    double v = -f.offset();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (x[static_cast<std::size_t>(t)].count(static_cast<int>(i))) { v += d(i); }
    }
    return v > 0;
  }
  case Formula::Kind::Not: return !eval(f.child(), x, t);
  case Formula::Kind::And: return eval(f.child(0), x, t) && eval(f.child(1), x, t);
  case Formula::Kind::Or: return eval(f.child(0), x, t) || eval(f.child(1), x, t);
  case Formula::Kind::Next: return eval(f.child(), x, t + f.lo());
  case Formula::Kind::Finally:
    for (int s = t + f.lo(); s <= t + f.hi(); ++s) {
      if (eval(f.child(), x, s)) { return true; }
    }
    return false;
  case Formula::Kind::Globally:
    for (int s = t + f.lo(); s <= t + f.hi(); ++s) {
      if (!eval(f.child(), x, s)) { return false; }
    }
    return true;
  }
  return false;
}

}  // namespace

bool eval_ltl(const Formula & f, const PropositionSequence & x, int t)
{
  if (t < 0 || static_cast<std::size_t>(t + horizon(f)) >= x.size()) {
    throw TraceTooShort("proposition sequence too short for formula horizon");
  }
  return eval(f, x, t);
}

Trace embed(const PropositionSequence & x, int n_props)
{
  Trace out;
  out.reserve(x.size());
  for (const auto & props : x) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n_props);
    for (int p : props) {
      if (p < 0 || p >= n_props) { throw DimensionError("proposition index out of range"); }
      v(p) = 1.0;
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace reactsynth
