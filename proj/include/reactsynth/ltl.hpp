#ifndef REACTSYNTH_LTL_HPP_
#define REACTSYNTH_LTL_HPP_

#include "reactsynth/formula.hpp"
#include "reactsynth/robustness.hpp"

#include <set>
#include <vector>

namespace reactsynth {

/// x_t is the set of propositions (by index) true at step t.
using PropositionSequence = std::vector<std::set<int>>;

/// Atom for proposition p: indicator coordinate p exceeds 1/2.
Formula proposition(int p);

/**
 * Boolean LTL semantics over proposition sets. Each linear atom is decided on
 * the 0/1 indicator vector of x_t; connectives and temporal operators are
 * evaluated as booleans, never through robustness.
 */
bool eval_ltl(const Formula & f, const PropositionSequence & x, int t = 0);

/// Indicator embedding of a proposition sequence into a real signal.
Trace embed(const PropositionSequence & x, int n_props);

}  // namespace reactsynth

#endif  // REACTSYNTH_LTL_HPP_
