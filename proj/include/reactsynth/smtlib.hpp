#ifndef REACTSYNTH_SMTLIB_HPP_
#define REACTSYNTH_SMTLIB_HPP_

#include "reactsynth/oracle.hpp"

#include <string>

namespace reactsynth {

/**
 * QF_LRA script whose models are the satisfying points of a query.
 *
 * Variables are u_k_i, w_k_i and x_t_i. The free player is bounded by its box,
 * the opponent is pinned to its fixed values, the dynamics are equalities and
 * the formula is expanded into and/or structure over strict `>` and `<` atoms,
 * so a model has strictly positive robustness (strictly negative when the
 * query is negated). Each removed square becomes the negation of 2n bounds `u - c <= R`, `c - u <= R`.
 */
std::string export_smtlib(const Query & q);

}  // namespace reactsynth

#endif  // REACTSYNTH_SMTLIB_HPP_
