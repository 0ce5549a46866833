#include "reactsynth/formula.hpp"

#include "reactsynth/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace reactsynth {

Formula Formula::predicate(Eigen::VectorXd gain, double offset)
{
  Eigen::Index n = gain.size();
  while (n > 0 && gain(n - 1) == 0.0) { --n; }
  Node node{Kind::Predicate, gain.head(n), offset, 0, 0, {}};
  return Formula(std::make_shared<const Node>(std::move(node)));
}

Formula Formula::truth() { return predicate(Eigen::VectorXd(), -1.0); }

Formula Formula::falsity() { return predicate(Eigen::VectorXd(), 1.0); }

Formula Formula::negation(Formula f)
{
  return Formula(std::make_shared<const Node>(Node{Kind::Not, {}, 0, 0, 0, {std::move(f)}}));
}

Formula Formula::conjunction(Formula lhs, Formula rhs)
{
  return Formula(
    std::make_shared<const Node>(Node{Kind::And, {}, 0, 0, 0, {std::move(lhs), std::move(rhs)}}));
}

Formula Formula::disjunction(Formula lhs, Formula rhs)
{
  return Formula(
    std::make_shared<const Node>(Node{Kind::Or, {}, 0, 0, 0, {std::move(lhs), std::move(rhs)}}));
}

Formula Formula::implication(Formula lhs, Formula rhs)
{
  return disjunction(negation(std::move(lhs)), std::move(rhs));
}

Formula Formula::next(int steps, Formula f)
{
  if (steps < 0) { throw DomainError("next offset must be non-negative"); }
  return Formula(
    std::make_shared<const Node>(Node{Kind::Next, {}, 0, steps, steps, {std::move(f)}}));
}

Formula Formula::eventually(int a, int b, Formula f)
{
  if (a < 0 || a > b) { throw DomainError("interval must satisfy 0 <= a <= b"); }
  return Formula(std::make_shared<const Node>(Node{Kind::Finally, {}, 0, a, b, {std::move(f)}}));
}

Formula Formula::always(int a, int b, Formula f)
{
  if (a < 0 || a > b) { throw DomainError("interval must satisfy 0 <= a <= b"); }
  return Formula(std::make_shared<const Node>(Node{Kind::Globally, {}, 0, a, b, {std::move(f)}}));
}

bool Formula::operator==(const Formula & other) const
{
  if (node_ == other.node_) { return true; }
  const Node & a = *node_;
  const Node & b = *other.node_;
  if (a.kind != b.kind || a.lo != b.lo || a.hi != b.hi || a.children.size() != b.children.size()) {
    return false;
  }
  if (a.kind == Kind::Predicate) {
    return a.offset == b.offset && a.gain.size() == b.gain.size() && a.gain == b.gain;
  }
  return std::equal(a.children.begin(), a.children.end(), b.children.begin());
}

Formula operator!(const Formula & f) { return Formula::negation(f); }
Formula operator&&(const Formula & lhs, const Formula & rhs) { return Formula::conjunction(lhs, rhs); }
Formula operator||(const Formula & lhs, const Formula & rhs) { return Formula::disjunction(lhs, rhs); }

int horizon(const Formula & f)
{
  switch (f.kind()) {
  case Formula::Kind::Predicate: return 0;
  case Formula::Kind::Not: return horizon(f.child());
  case Formula::Kind::And:
  case Formula::Kind::Or: return std::max(horizon(f.child(0)), horizon(f.child(1)));
  case Formula::Kind::Next:
  case Formula::Kind::Finally:
  case Formula::Kind::Globally: return f.hi() + horizon(f.child());
  }
  return 0;
}

Eigen::Index signal_dimension(const Formula & f)
{
  if (f.kind() == Formula::Kind::Predicate) { return f.gain().size(); }
  Eigen::Index n = 0;
  for (std::size_t i = 0; i < f.arity(); ++i) { n = std::max(n, signal_dimension(f.child(i))); }
  return n;
}

double max_predicate_gain(const Formula & f)
{
  if (f.kind() == Formula::Kind::Predicate) { return f.gain().lpNorm<1>(); }
  double g = 0;
  for (std::size_t i = 0; i < f.arity(); ++i) { g = std::max(g, max_predicate_gain(f.child(i))); }
  return g;
}

double max_predicate_gain_l2(const Formula & f)
{
  if (f.kind() == Formula::Kind::Predicate) { return f.gain().norm(); }
  double g = 0;
  for (std::size_t i = 0; i < f.arity(); ++i) { g = std::max(g, max_predicate_gain_l2(f.child(i))); }
  return g;
}

std::size_t size(const Formula & f)
{
  std::size_t n = 1;
  for (std::size_t i = 0; i < f.arity(); ++i) { n += size(f.child(i)); }
  return n;
}

namespace {

// Binding strength used to decide where parentheses are needed.
int precedence(const Formula & f)
{
  switch (f.kind()) {
  case Formula::Kind::Predicate: return 4;
  case Formula::Kind::Not:
  case Formula::Kind::Next:
  case Formula::Kind::Finally:
  case Formula::Kind::Globally: return 3;
  case Formula::Kind::And: return 2;
  case Formula::Kind::Or: return 1;
  }
  return 0;
}

void print(std::ostream & os, const Formula & f);

void print_operand(std::ostream & os, const Formula & f, int min_prec)
{
  // Predicates are always parenthesized as operands so comparisons never chain.
  if (precedence(f) < min_prec || (f.kind() == Formula::Kind::Predicate && min_prec >= 3)) {
    os << '(';
    print(os, f);
    os << ')';
  } else {
    print(os, f);
  }
}

void print_predicate(std::ostream & os, const Formula & f)
{
  bool first = true;
  for (Eigen::Index i = 0; i < f.gain().size(); ++i) {
    const double a = f.gain()(i);
    if (a == 0.0) { continue; }
    if (first) {
      if (a == -1.0) {
        os << '-';
      } else if (a != 1.0) {
        os << detail::format_double(a) << '*';
      }
    } else {
      os << (a < 0 ? " - " : " + ");
      if (std::abs(a) != 1.0) { os << detail::format_double(std::abs(a)) << '*'; }
    }
    os << 'x' << i;
    first = false;
  }
  if (first) { os << '0'; }
  os << " > " << detail::format_double(f.offset());
}

void print(std::ostream & os, const Formula & f)
{
  switch (f.kind()) {
  case Formula::Kind::Predicate: print_predicate(os, f); break;
  case Formula::Kind::Not:
    os << '!';
    print_operand(os, f.child(), 3);
    break;
  case Formula::Kind::And:
    print_operand(os, f.child(0), 3);
    os << " & ";
    print_operand(os, f.child(1), 3);
    break;
  case Formula::Kind::Or:
    print_operand(os, f.child(0), 2);
    os << " | ";
    print_operand(os, f.child(1), 2);
    break;
  case Formula::Kind::Next:
    os << "X[" << f.lo() << "] ";
    print_operand(os, f.child(), 3);
    break;
  case Formula::Kind::Finally:
  case Formula::Kind::Globally:
    os << (f.kind() == Formula::Kind::Finally ? 'F' : 'G') << '[' << f.lo() << ',' << f.hi() << "] ";
    print_operand(os, f.child(), 3);
    break;
  }
}

}  // namespace

std::string to_string(const Formula & f)
{
  std::ostringstream os;
  print(os, f);
  return os.str();
}

}  // namespace reactsynth
