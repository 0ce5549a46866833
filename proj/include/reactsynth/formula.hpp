#ifndef REACTSYNTH_FORMULA_HPP_
#define REACTSYNTH_FORMULA_HPP_

#include <Eigen/Core>

#include <memory>
#include <string>
#include <vector>

namespace reactsynth {

/**
 * Bounded-horizon STL formula over linear predicates.
 *
 * A predicate holds the pair (d, c) and means `d . x - c > 0`, where x is the
 * sample of the signal at the evaluation time. A gain vector shorter than the
 * signal dimension is zero-padded. Time is discrete; interval bounds are step
 * offsets with 0 <= a <= b.
 *
 * Formulas are immutable values that share their subtrees.
 */
class Formula
{
public:
  enum class Kind { Predicate, Not, And, Or, Next, Finally, Globally };

  /// The constant `true`.
  Formula() : Formula(truth()) {}

  static Formula predicate(Eigen::VectorXd gain, double offset);
  static Formula truth();
  static Formula falsity();
  static Formula negation(Formula f);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula disjunction(Formula lhs, Formula rhs);
  /// `lhs -> rhs`, stored as `!lhs | rhs`.
  static Formula implication(Formula lhs, Formula rhs);
  static Formula next(int steps, Formula f);
  static Formula eventually(int a, int b, Formula f);
  static Formula always(int a, int b, Formula f);

  Kind kind() const { return node_->kind; }
  const Eigen::VectorXd & gain() const { return node_->gain; }
  double offset() const { return node_->offset; }
  /// Next offset or interval lower bound.
  int lo() const { return node_->lo; }
  /// Interval upper bound (equals lo() for Next).
  int hi() const { return node_->hi; }
  const Formula & child(std::size_t i = 0) const { return node_->children.at(i); }
  std::size_t arity() const { return node_->children.size(); }

  /// Structural equality.
  bool operator==(const Formula & other) const;

private:
  struct Node
  {
    Kind kind;
    Eigen::VectorXd gain;
    double offset = 0;
    int lo = 0;
    int hi = 0;
    std::vector<Formula> children;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

Formula operator!(const Formula & f);
Formula operator&&(const Formula & lhs, const Formula & rhs);
Formula operator||(const Formula & lhs, const Formula & rhs);

/// Largest time offset any subformula references.
int horizon(const Formula & f);

/// Smallest signal dimension the predicates need.
Eigen::Index signal_dimension(const Formula & f);

/// Max over predicates of ||d||_1, i.e. the induced gain of d . x under the sup norm on x.
double max_predicate_gain(const Formula & f);

/// Max over predicates of ||d||_2.
double max_predicate_gain_l2(const Formula & f);

/// Text that parses back to a structurally equal formula.
std::string to_string(const Formula & f);

/// Number of nodes.
std::size_t size(const Formula & f);

}  // namespace reactsynth

#endif  // REACTSYNTH_FORMULA_HPP_
