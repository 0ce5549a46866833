#include "reactsynth/smtlib.hpp"

#include "reactsynth/error.hpp"
#include "text_util.hpp"

#include <sstream>

namespace reactsynth {

namespace {

std::string num(double v)
{
  if (!std::isfinite(v)) { throw DomainError("non-finite constant cannot be exported"); }
  std::string s = detail::format_double_fixed(std::abs(v));
  if (s.find('.') == std::string::npos) { s += ".0"; }
  return v < 0 ? "(- " + s + ")" : s;
}

std::string var(char name, long k, long i)
{
  return std::string(1, name) + "_" + std::to_string(k) + "_" + std::to_string(i);
}

// sum_j coeff_j * name_k_j, dropping zero terms.
void linear_terms(std::vector<std::string> & terms, const Eigen::MatrixXd & M, Eigen::Index row, char name, long k)
{
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    if (M(row, j) != 0.0) { terms.push_back("(* " + num(M(row, j)) + " " + var(name, k, j) + ")"); }
  }
}

std::string sum(const std::vector<std::string> & terms)
{
  if (terms.empty()) { return "0.0"; }
  if (terms.size() == 1) { return terms.front(); }
  std::string s = "(+";
  for (const auto & t : terms) { s += " " + t; }
  return s + ")";
}

// Negations are pushed onto the predicates so that a model satisfies the
// encoding exactly when the robustness is strictly positive.
std::string encode(const Formula & f, int t, bool negative)
{
  switch (f.kind()) {
  case Formula::Kind::Predicate: {
    std::vector<std::string> terms;
    for (Eigen::Index i = 0; i < f.gain().size(); ++i) {
      if (f.gain()(i) != 0.0) { terms.push_back("(* " + num(f.gain()(i)) + " " + var('x', t, i) + ")"); }
    }
    return std::string(negative ? "(< " : "(> ") + sum(terms) + " " + num(f.offset()) + ")";
  }
  case Formula::Kind::Not: return encode(f.child(), t, !negative);
  case Formula::Kind::And:
  case Formula::Kind::Or: {
    const bool conj = (f.kind() == Formula::Kind::And) != negative;
    return std::string(conj ? "(and " : "(or ") + encode(f.child(0), t, negative) + " " +
           encode(f.child(1), t, negative) + ")";
  }
  case Formula::Kind::Next: return encode(f.child(), t + f.lo(), negative);
  case Formula::Kind::Finally:
  case Formula::Kind::Globally: {
    if (f.lo() == f.hi()) { return encode(f.child(), t + f.lo(), negative); }
    const bool conj = (f.kind() == Formula::Kind::Globally) != negative;
    std::string s = conj ? "(and" : "(or";
    for (int k = t + f.lo(); k <= t + f.hi(); ++k) { s += " " + encode(f.child(), k, negative); }
    return s + ")";
  }
  }
  return "true";
}

}  // namespace

std::string export_smtlib(const Query & q)
{
  const LinearSystem & sys = q.sys;
  sys.validate();
  const int H = sys.horizon;
  if (static_cast<int>(q.fixed_opponent.size()) != H) {
    throw DimensionError("fixed opponent sequence must have one value per round");
  }
  if (horizon(q.formula) > H) { throw TraceTooShort("formula horizon exceeds the system horizon"); }
  if (signal_dimension(q.formula) > sys.state_dim()) {
    throw DimensionError("formula references states beyond the system dimension");
  }
  const Eigen::Index n = sys.state_dim(), nu = sys.control_dim(), nw = sys.disturbance_dim();
  const bool control = q.free_player == Player::Control;
  const char free = control ? 'u' : 'w';
  const char fixed = control ? 'w' : 'u';
  const Eigen::Index nfree = control ? nu : nw;
  const Box & box = control ? sys.u_box : sys.w_box;

  std::ostringstream out;
  out << "(set-logic QF_LRA)\n";
  for (int k = 0; k < H; ++k) {
    for (Eigen::Index i = 0; i < nu; ++i) { out << "(declare-fun " << var('u', k, i) << " () Real)\n"; }
    for (Eigen::Index i = 0; i < nw; ++i) { out << "(declare-fun " << var('w', k, i) << " () Real)\n"; }
  }
  for (int t = 0; t <= H; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) { out << "(declare-fun " << var('x', t, i) << " () Real)\n"; }
  }

  for (int k = 0; k < H; ++k) {
    for (Eigen::Index i = 0; i < nfree; ++i) {
      out << "(assert (<= " << num(box.lo(i)) << " " << var(free, k, i) << "))\n";
      out << "(assert (<= " << var(free, k, i) << " " << num(box.hi(i)) << "))\n";
    }
    const auto & v = q.fixed_opponent[static_cast<std::size_t>(k)];
    if (v.size() != (control ? nw : nu)) { throw DimensionError("fixed opponent value has the wrong dimension"); }
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      out << "(assert (= " << var(fixed, k, i) << " " << num(v(i)) << "))\n";
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) { out << "(assert (= " << var('x', 0, i) << " " << num(sys.x0(i)) << "))\n"; }
  for (int t = 0; t < H; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) {
      std::vector<std::string> terms;
      linear_terms(terms, sys.A, i, 'x', t);
      linear_terms(terms, sys.B, i, 'u', t);
      linear_terms(terms, sys.C, i, 'w', t);
      out << "(assert (= " << var('x', t + 1, i) << " " << sum(terms) << "))\n";
    }
  }

  out << "(assert " << encode(q.formula, 0, q.negate) << ")\n";

  if (q.domain) {
    for (const auto & sq : q.domain->removed()) {
      if (sq.center.size() != H * nfree) { throw DimensionError("removed square has the wrong dimension"); }
      out << "(assert (not (and";
      for (Eigen::Index j = 0; j < sq.center.size(); ++j) {
        const std::string v = var(free, static_cast<long>(j / nfree), static_cast<long>(j % nfree));
        const std::string c = num(sq.center(j)), r = num(sq.radius);
        out << " (<= (- " << v << " " << c << ") " << r << ")";
        out << " (<= (- " << c << " " << v << ") " << r << ")";
      }
      out << ")))\n";
    }
  }
  out << "(check-sat)\n(get-model)\n";
  return out.str();
}

}  // namespace reactsynth
