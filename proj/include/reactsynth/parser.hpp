#ifndef REACTSYNTH_PARSER_HPP_
#define REACTSYNTH_PARSER_HPP_

#include "reactsynth/formula.hpp"

#include <map>
#include <string>
#include <string_view>

namespace reactsynth {

/// Named subformulas that may be referenced by identifier inside formula text.
using Definitions = std::map<std::string, Formula, std::less<>>;

/**
 * Parse formula text.
 *
 * Atoms are linear comparisons `c0*x0 + c1*x1 - 2 >= 0.5` with op one of
 * `>`, `>=`, `<`, `<=`; `true`, `false` and identifiers bound in `defs` are
 * also atoms. Connectives are `!`, `&`, `|`, `->` and the temporal operators
 * `X`, `X[i]`, `F[a,b]`, `G[a,b]`. Precedence, tightest first: temporal and
 * `!`, then `&`, `|`, `->` (right associative).
 *
 * Non-strict comparisons produce the same predicate as their strict form.
 * `<` and `<=` flip the sign of the expression.
 */
Formula parse_formula(std::string_view text, const Definitions & defs = {});

}  // namespace reactsynth

#endif  // REACTSYNTH_PARSER_HPP_
