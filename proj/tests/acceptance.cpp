// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "support.hpp"

#include "reactsynth/cegis.hpp"
#include "reactsynth/decision_tree.hpp"
#include "reactsynth/game_string.hpp"
#include "reactsynth/oracle.hpp"
#include "reactsynth/robustness.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>

using namespace reactsynth;
using namespace reactsynth::testing;

namespace {

struct Verdict
{
  bool pass = false;
  std::string detail;
};

/// Every modified_cegis / dominant_env run made by the suite, for the spacing check.
struct LoggedRun
{
  std::string label;
  CegisOutcome outcome;
  Eigen::VectorXd initial;
  double epsilon = 0;
};

std::vector<LoggedRun> g_runs;

CegisOutcome logged(const std::string & label, const LinearSystem & sys, const Formula & f, const CegisConfig & cfg,
                    bool env = false)
{
  auto out = env ? dominant_env(sys, f, cfg) : modified_cegis(sys, f, cfg);
  Eigen::VectorXd initial;
  if (!cfg.seed) { initial = (env ? sys.control_space() : sys.disturbance_space()).center(); }
  g_runs.push_back(LoggedRun{label, out, initial, cfg.epsilon});
  return out;
}

std::string fmt(double v)
{
  std::ostringstream s;
  s << v;
  return s.str();
}

Verdict criterion1()
{
  auto p = bundled("discrete_rps");
  auto out = naive_cegis(p.finite_game(), p.formula, p.cegis_config());
  const bool ok = out.status == CegisStatus::NoDominant && out.iterations == 3;
  return {ok, to_string(out.status) + " after " + std::to_string(out.iterations) + " iterations"};
}

Verdict criterion2()
{
  auto p = bundled("rps_assumptions");
  auto game = p.finite_game();
  auto sys_out = naive_cegis(game, p.formula, p.cegis_config());
  auto env_out = naive_cegis_env(game, p.formula, p.cegis_config());
  std::string detail = "system " + to_string(sys_out.status) + ", environment " + to_string(env_out.status);
  bool ok = sys_out.status == CegisStatus::NoDominant && env_out.status == CegisStatus::NoDominant;

  const Arena arena = p.arena();
  TreeConfig cfg;
  cfg.game.epsilon = p.epsilon;
  auto tree = build_decision_tree(arena, cfg);
  detail += ", tree " + to_string(tree.status);
  if (tree.status != TreeStatus::Success) { return {false, detail}; }
  const int R = 0, P = 1;
  const TreeNode & root = *tree.root;
  bool shape = root.kind == TreeNode::Kind::Assign && root.round == 0 && root.move == R && root.next &&
               root.next->kind == TreeNode::Kind::Branch && root.next->round == 0 && root.next->segments.size() == 3;
  std::string p_branch = "?";
  if (shape) {
    for (int j = 0; j < 3; ++j) {
      const auto & seg = root.next->segments[static_cast<std::size_t>(j)];
      const auto & c = seg.child;
      shape = shape && seg.move == j && c && c->kind == TreeNode::Kind::Assign && c->round == 1 && c->next &&
              c->next->kind == TreeNode::Kind::Leaf;
      if (!shape) { break; }
      if (j == P) {
        p_branch = arena.move_name(Var{Player::Control, 1}, c->move);
      } else {
        shape = shape && c->move == j;
      }
    }
  }
  ok = ok && shape && verify_tree(root, arena, p.epsilon).ok;
  detail += shape ? ", i1 = R, i2(R) = R, i2(S) = S, i2(P) = " + p_branch + " (assumption violated)"
                  : ", tree shape differs: " + tree_to_json(root, arena, -1);
  return {ok, detail};
}

Verdict criterion3()
{
  auto p = bundled("continuous_rps");
  const auto L = lipschitz_bounds(p.system, p.formula);
  bool ok = std::abs(L.u - 1) <= 1e-9 && std::abs(L.w - 1) <= 1e-9;
  std::string detail = "L_u = " + fmt(L.u) + ", L_w = " + fmt(L.w);
  for (double eps : {0.05, 0.125}) {
    auto cfg = p.cegis_config();
    cfg.epsilon = eps;
    auto out = logged("continuous_rps eps=" + fmt(eps), p.system, p.formula, cfg);
    const double upper = out.remaining.remaining_measure_bounds(24).second;
    ok = ok && out.status == CegisStatus::NoDominant && upper < 1e-6;
    detail += "; eps " + fmt(eps) + ": " + to_string(out.status) + " in " + std::to_string(out.iterations) +
              " iterations, measure <= " + fmt(upper);
  }
  return {ok, detail};
}

Verdict criterion4()
{
  auto p = bundled("modified_rps");
  auto cfg = p.cegis_config();
  auto sys_out = logged("modified_rps system", p.system, p.formula, cfg);
  auto env_out = logged("modified_rps environment", p.system, p.formula, cfg, true);
  bool ok = sys_out.status == CegisStatus::NoDominant && env_out.status == CegisStatus::NoDominant;
  std::string detail = "(a) " + to_string(sys_out.status) + " (b) " + to_string(env_out.status);

  const Arena arena = p.arena();
  TreeConfig tcfg;
  tcfg.game.epsilon = p.epsilon;
  auto tree = build_decision_tree(arena, tcfg);
  detail += " (c) " + to_string(tree.status);
  if (tree.status != TreeStatus::Success) { return {false, detail}; }
  const double pitch = 0.125, boundary = 0.625;
  const TreeNode & root = *tree.root;
  if (root.kind != TreeNode::Kind::Assign || root.round != 0 || !root.next ||
      root.next->kind != TreeNode::Kind::Branch || root.next->round != 0) {
    return {false, detail + ", unexpected tree " + tree_to_json(root, arena, -1)};
  }
  const double u0 = root.value(0);
  // The lattice cell of the root decision must contain 1.0.
  bool tree_ok = u0 >= 1.0 - pitch && u0 <= 1.0;
  double last_zero = -1;
  bool upper_one = true, low_zero = true;
  for (const auto & seg : root.next->segments) {
    const auto & c = seg.child;
    if (!c || c->kind != TreeNode::Kind::Assign || c->round != 1) {
      tree_ok = false;
      continue;
    }
    const double u1 = c->value(0), lo = seg.box.lo(0), hi = seg.box.hi(0);
    if (u1 == 0.0) { last_zero = std::max(last_zero, hi); }
    if (hi <= boundary - pitch && u1 != 0.0) { low_zero = false; }
    if (hi > boundary && lo < 0.75 && u1 != 1.0) { upper_one = false; }
  }
  tree_ok = tree_ok && low_zero && upper_one && std::abs(last_zero - boundary) <= pitch;
  const auto v = verify_tree(root, arena, p.epsilon);
  ok = ok && tree_ok && v.ok;
  detail += ", u0 = " + fmt(u0) + ", u1 = 0 up to w0 = " + fmt(last_zero) + ", u1 = 1 on (5/8, 6/8]: " +
            (upper_one ? "yes" : "no") + ", verified min rho " + fmt(v.min_robustness);
  return {ok, detail};
}

struct RandomInstance
{
  LinearSystem sys;
  Formula formula;
};

RandomInstance random_instance(std::mt19937_64 & rng, int flat_dim)
{
  const int H = flat_dim == 2 && std::uniform_int_distribution<int>(0, 1)(rng) ? 2 : 1;
  const Eigen::Index n_u = H == 2 ? 1 : flat_dim;
  RandomInstance r{random_plant(rng, H, n_u), {}};
  FormulaShape shape{2, 2, 1, 1, false};
  while (true) {
    r.formula = random_formula_within(rng, shape, H);
    // Anchor at least one step so the inputs matter.
    r.formula = Formula::next(1, r.formula);
    if (horizon(r.formula) <= H) { break; }
  }
  return r;
}

Verdict criterion5()
{
  std::mt19937_64 rng(5);
  std::size_t surviving_bad = 0, removed_bad = 0, checked = 0;
  std::ostringstream where;
  for (int n = 0; n < 20; ++n) {
    RandomInstance inst;
    if (n == 0) {
      // i_1 = u_0 against i_1 > 0.5, the disturbance has no effect.
      inst.sys.A = Eigen::MatrixXd::Zero(1, 1);
      inst.sys.B = Eigen::MatrixXd::Ones(1, 1);
      inst.sys.C = Eigen::MatrixXd::Zero(1, 1);
      inst.sys.x0 = Eigen::VectorXd::Zero(1);
      inst.sys.horizon = 1;
      inst.sys.u_box = Box::cube(1, 0, 1);
      inst.sys.w_box = Box::cube(1, 0, 1);
      inst.formula = Formula::next(1, Formula::predicate(Eigen::VectorXd::Ones(1), 0.5));
    } else {
      inst = random_instance(rng, 1 + n % 2);
    }
    CegisConfig cfg;
    cfg.epsilon = 0.1;
    const auto game = make_split_game(inst.sys, inst.formula, cfg);
    Eigen::VectorXd e(game.env_box.dim());
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      e(i) = std::uniform_real_distribution<double>(game.env_box.lo(i), game.env_box.hi(i))(rng);
    }
    RegionSet region(game.sys_box);
    without_refuted(game, e, region, cfg);
    const double L = std::max(game.lipschitz_sys, 1e-9);
    const double granularity = L * (cfg.epsilon / (4 * L));
    const int per = game.sys_box.dim() == 1 ? 10000 : 100;
    for_each_grid_point(game.sys_box, per, [&](const Eigen::VectorXd & s) {
      ++checked;
      const double rho = game.rho(s, e);
      if (region.contains(s)) {
        if (rho <= -granularity) {
          ++surviving_bad;
          where << " instance " << n << " survivor rho " << rho << ";";
        }
      } else if (rho >= cfg.epsilon) {
        ++removed_bad;
        where << " instance " << n << " removed rho " << rho << ";";
      }
    });
  }
  const bool ok = surviving_bad == 0 && removed_bad == 0;
  std::string detail = std::to_string(checked) + " grid points, " + std::to_string(surviving_bad) +
                       " refuted survivors, " + std::to_string(removed_bad) + " removed points with rho >= eps";
  if (!ok) { detail += ":" + where.str().substr(0, 400); }
  return {ok, detail};
}

Verdict criterion6()
{
  // Extra runs on random instances on top of those made by the other criteria.
  std::mt19937_64 rng(6);
  for (int n = 0; n < 60; ++n) {
    auto inst = random_instance(rng, 1 + n % 2);
    CegisConfig cfg;
    cfg.epsilon = n < 30 ? 0.1 : 0.05;
    cfg.max_iters = 5000;
    logged("random " + std::to_string(n), inst.sys, inst.formula, cfg, n % 2 == 1);
  }
  for (const char * name : {"continuous_rps", "modified_rps"}) {
    const auto p = bundled(name);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto cfg = p.cegis_config();
      cfg.seed = seed;
      for (bool env : {false, true}) { logged(std::string(name) + " seed " + std::to_string(seed), p.system, p.formula, cfg, env); }
    }
  }
  std::size_t pairs = 0, violations = 0;
  std::string where;
  for (const auto & run : g_runs) {
    const double L = std::max(run.outcome.lipschitz_env, 1e-9);
    const double gap = run.epsilon / L;
    std::vector<Eigen::VectorXd> seq;
    if (run.initial.size() > 0) { seq.push_back(run.initial); }
    seq.insert(seq.end(), run.outcome.counterexamples.begin(), run.outcome.counterexamples.end());
    for (std::size_t i = 1; i < seq.size(); ++i) {
      ++pairs;
      const double d = (seq[i] - seq[i - 1]).lpNorm<Eigen::Infinity>();
      if (d < gap) {
        ++violations;
        if (where.size() < 300) { where += " " + run.label + " #" + std::to_string(i) + " gap " + fmt(d) + ";"; }
      }
    }
  }
  std::string detail = std::to_string(g_runs.size()) + " runs, " + std::to_string(pairs) + " successive pairs, " +
                       std::to_string(violations) + " closer than eps/L_w";
  if (violations) { detail += ":" + where; }
  return {violations == 0, detail};
}

Verdict criterion7()
{
  std::mt19937_64 rng(7);
  const double eps = 0.05;
  int found = 0, dominant = 0, verified = 0;
  std::size_t attempts = 0;
  double worst = std::numeric_limits<double>::infinity();
  while (found < 10 && attempts < 20000) {
    ++attempts;
    auto inst = random_instance(rng, 1 + found % 2);
    const RunModel model(inst.sys);
    const auto L = lipschitz_bounds(inst.sys, inst.formula);
    const Box U = inst.sys.control_space(), W = inst.sys.disturbance_space();
    // Certified worst case of the best grid control: grid minimum less the Lipschitz slack.
    const double hw = 0.02;
    double certified = -std::numeric_limits<double>::infinity();
    for_each_grid_point(U, points_for_pitch(1, 0.05), [&](const Eigen::VectorXd & u) {
      const double m = grid_min(W, hw, [&](const Eigen::VectorXd & w) { return model.robustness(inst.formula, u, w); });
      certified = std::max(certified, m - L.w * hw / 2);
    });
    if (certified < 2 * eps) { continue; }
    ++found;
    CegisConfig cfg;
    cfg.epsilon = eps;
    auto out = logged("robust " + std::to_string(found), inst.sys, inst.formula, cfg);
    if (out.status != CegisStatus::Dominant) { continue; }
    ++dominant;
    const double pitch = eps / (2 * std::max(L.w, 1e-9));
    const double m = grid_min(W, pitch, [&](const Eigen::VectorXd & w) {
      return model.robustness(inst.formula, out.witness, w);
    });
    worst = std::min(worst, m);
    if (m > 0) { ++verified; }
  }
  const bool ok = found == 10 && dominant == 10 && verified == 10;
  return {ok, std::to_string(found) + " certified instances (" + std::to_string(attempts) + " drawn), " +
                  std::to_string(dominant) + " DOMINANT, " + std::to_string(verified) +
                  " pass the grid check, worst grid rho " + fmt(worst)};
}

Verdict criterion8()
{
  std::mt19937_64 rng(8);
  int qualifying = 0, sat_misses = 0, false_positive = 0, max_misses = 0;
  std::size_t drawn = 0;
  const double delta = 0.02;
  while (qualifying < 50 && drawn < 5000) {
    ++drawn;
    auto inst = random_instance(rng, 1 + qualifying % 2);
    Query q;
    q.sys = inst.sys;
    q.formula = inst.formula;
    q.free_player = std::uniform_int_distribution<int>(0, 1)(rng) ? Player::Disturbance : Player::Control;
    q.negate = std::uniform_int_distribution<int>(0, 3)(rng) == 0;
    const Box opp = q.free_player == Player::Control ? q.sys.disturbance_space() : q.sys.control_space();
    Eigen::VectorXd fixed(opp.dim());
    for (Eigen::Index i = 0; i < fixed.size(); ++i) { fixed(i) = std::uniform_real_distribution<double>(0, 1)(rng); }
    q.fixed_opponent = unflatten(fixed, q.sys.horizon);
    q.precision = delta;
    const auto dom = q.effective_domain().base();
    if (dom.dim() > 2) { continue; }
    const double L = q.effective_lipschitz();
    const Objective g = q.objective();
    const double gmax = grid_max(dom, delta / 2, g);
    if (gmax < L * delta) { continue; }
    ++qualifying;
    q.mode = OracleMode::Satisfy;
    auto sat = find_sat(q);
    if (!sat) {
      ++sat_misses;
    } else if (!(g(flatten(sat->point)) > 0)) {
      ++false_positive;
    }
    q.mode = OracleMode::Maximize;
    auto best = find_sat(q);
    if (!best || g(flatten(best->point)) < gmax - L * delta) { ++max_misses; }
  }
  const bool ok = qualifying == 50 && sat_misses == 0 && false_positive == 0 && max_misses == 0;
  return {ok, std::to_string(qualifying) + " qualifying queries (" + std::to_string(drawn) + " drawn), " +
                  std::to_string(sat_misses) + " SATISFY misses, " + std::to_string(false_positive) +
                  " false positives, " + std::to_string(max_misses) + " MAXIMIZE answers off by more than L*delta"};
}

FiniteGame random_finite_game(std::mt19937_64 & rng, int H)
{
  LinearSystem s;
  s.A = Eigen::MatrixXd::Identity(2, 2) * std::uniform_int_distribution<int>(0, 1)(rng);
  s.B = (Eigen::MatrixXd(2, 1) << 1, 0).finished();
  s.C = (Eigen::MatrixXd(2, 1) << 0, 1).finished();
  s.x0 = Eigen::VectorXd::Zero(2);
  s.horizon = H;
  s.u_box = Box::cube(1, 0, 3);
  s.w_box = Box::cube(1, 0, 3);
  auto moves = [&](int n) {
    std::vector<int> values = {0, 1, 2, 3};
    std::shuffle(values.begin(), values.end(), rng);
    std::vector<Move> m;
    for (int i = 0; i < n; ++i) { m.push_back(Move{std::string(1, char('a' + i)), Eigen::VectorXd::Constant(1, values[i])}); }
    return m;
  };
  const int alphabet = H >= 4 ? 2 : std::uniform_int_distribution<int>(2, 3)(rng);
  return FiniteGame{s, moves(alphabet), moves(alphabet)};
}

Verdict criterion9()
{
  std::vector<std::pair<std::string, Walk>> walks;
  auto collect = [&](const std::string & label, const Arena & arena, double eps) {
    TreeConfig cfg;
    cfg.game.epsilon = eps;
    auto r = build_decision_tree(arena, cfg);
    for (const auto & w : r.walks) { walks.emplace_back(label, w); }
    return r.walks.size();
  };
  std::size_t empty = 0;
  for (const char * name : {"discrete_rps", "rps_assumptions", "modified_rps", "true_spec"}) {
    auto p = bundled(name);
    if (collect(name, p.arena(), p.epsilon) == 0) { ++empty; }
  }
  std::mt19937_64 rng(9);
  for (int n = 0; n < 100; ++n) {
    const int H = 1 + n % 4;
    auto game = random_finite_game(rng, H);
    FormulaShape shape{2, 3, 1, 1, true};
    auto f = random_formula_within(rng, shape, H);
    if (collect("random " + std::to_string(n), Arena(game, f), 0.1) == 0) { ++empty; }
  }
  std::size_t violations = 0, transitions = 0;
  std::string where;
  for (const auto & [label, w] : walks) {
    bool ok = traversal_length_check(w);
    for (const auto & s : w.steps) {
      if (s.label && s.edge == Edge::UpdateDom) {
        const auto next = next_node(s.node, true);
        ok = ok && alpha(next) <= alpha(s.node) - 1;
      }
    }
    if (!ok) {
      ++violations;
      if (where.size() < 300) { where += " " + label + ";"; }
    }
    transitions += w.steps.size();
  }
  const bool pass = violations == 0 && empty == 0;
  std::string detail = std::to_string(walks.size()) + " walks, " + std::to_string(transitions) + " transitions, " +
                       std::to_string(violations) + " violations";
  if (empty) { detail += ", " + std::to_string(empty) + " runs logged no walk"; }
  if (violations) { detail += ":" + where; }
  return {pass, detail};
}

Verdict criterion10()
{
  std::mt19937_64 rng(10);
  std::size_t mismatches = 0, sat_mismatches = 0, zeros = 0;
  double worst = 0;
  for (int n = 0; n < 1000; ++n) {
    FormulaShape shape;
    shape.dim = 1 + n % 3;
    shape.depth = 4;
    shape.integral = n % 2 == 0;
    const auto f = random_formula_within(rng, shape, 7);
    const auto len = static_cast<std::size_t>(std::uniform_int_distribution<int>(horizon(f) + 1, 8)(rng));
    const auto xi = random_trace(rng, len, shape.dim, shape.integral);
    const int t = std::uniform_int_distribution<int>(0, static_cast<int>(len) - 1 - horizon(f))(rng);
    const double want = reference_robustness(f, plain(xi), t);
    const double got = robustness(f, xi, t);
    worst = std::max(worst, std::abs(got - want));
    if (!(std::abs(got - want) <= 1e-12)) { ++mismatches; }
    if (satisfies(f, xi, t) != (want > 0) || satisfies(f, xi, t) != (got > 0)) { ++sat_mismatches; }
    if (want == 0) { ++zeros; }
  }
  const bool ok = mismatches == 0 && sat_mismatches == 0;
  return {ok, "1000 formulas, max |error| " + fmt(worst) + ", " + std::to_string(mismatches) + " value mismatches, " +
                  std::to_string(sat_mismatches) + " verdict mismatches, " + std::to_string(zeros) +
                  " cases with rho exactly 0"};
}

}  // namespace

int main()
{
  using Clock = std::chrono::steady_clock;
  struct Entry
  {
    int id;
    const char * name;
    Verdict (*run)();
    Verdict verdict;
    double seconds = 0;
  };
  // Criterion 6 inspects the runs logged by 3, 4 and 7, so it goes last.
  std::vector<Entry> entries = {
      {1, "naive CEGIS on one-round discrete RPS", criterion1, {}},
      {2, "RPS with assumptions: no dominant strategies, reactive tree", criterion2, {}},
      {3, "continuous RPS: Lipschitz constants and NO_DOMINANT", criterion3, {}},
      {4, "modified continuous RPS: both players and the decision tree", criterion4, {}},
      {5, "region removal sandwich on random instances", criterion5, {}},
      {7, "DOMINANT results pass dense grid checks", criterion7, {}},
      {8, "oracle completeness on random queries", criterion8, {}},
      {9, "D-walk properties", criterion9, {}},
      {10, "robustness against the reference evaluator", criterion10, {}},
      {6, "counterexample spacing", criterion6, {}},
  };
  for (auto & e : entries) {
    const auto t0 = Clock::now();
    try {
      e.verdict = e.run();
    } catch (const std::exception & ex) {
      e.verdict = {false, std::string("exception: ") + ex.what()};
    }
    e.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  }
  std::sort(entries.begin(), entries.end(), [](const Entry & a, const Entry & b) { return a.id < b.id; });
  bool all = true;
  for (const auto & e : entries) {
    all = all && e.verdict.pass;
    std::printf("%s criterion %d: %s | %s (%.2fs)\n", e.verdict.pass ? "PASS" : "FAIL", e.id, e.name,
                e.verdict.detail.c_str(), e.seconds);
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
