#include "reactsynth/cegis.hpp"

#include "reactsynth/error.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <set>

namespace reactsynth {

std::string to_string(CegisStatus s)
{
  switch (s) {
  case CegisStatus::Dominant: return "DOMINANT";
  case CegisStatus::NoDominant: return "NO_DOMINANT";
  case CegisStatus::BudgetExhausted: return "BUDGET_EXHAUSTED";
  }
  return "?";
}

namespace {

constexpr double kMinLipschitz = 1e-9;

double floor_l(double L) { return std::max(L, kMinLipschitz); }

double sys_precision(const SplitGame & game, const CegisConfig & cfg)
{
  return cfg.precision ? *cfg.precision : cfg.epsilon / (4 * floor_l(game.lipschitz_sys));
}

double env_precision(const SplitGame & game, const CegisConfig & cfg)
{
  return cfg.epsilon / (256 * floor_l(game.lipschitz_env));
}

int measure_depth(const CegisConfig & cfg, Eigen::Index dim)
{
  if (cfg.measure_depth >= 0) { return cfg.measure_depth; }
  return static_cast<int>(std::min<Eigen::Index>(12 * std::max<Eigen::Index>(dim, 1), 24));
}

void check_config(const CegisConfig & cfg)
{
  if (!(cfg.epsilon > 0) || !std::isfinite(cfg.epsilon)) { throw DomainError("epsilon must be positive"); }
  if (cfg.precision && !(*cfg.precision > 0)) { throw DomainError("oracle precision must be positive"); }
}

/// Largest radius in [r0, r_max] whose square keeps rho below epsilon, by bisection.
double enlarge(const SplitGame & game, const Eigen::VectorXd & center, const Eigen::VectorXd & e_star, double r0,
               const CegisConfig & cfg, std::size_t * calls)
{
  const double L = floor_l(game.lipschitz_sys);
  const Objective f = [&](const Eigen::VectorXd & s) { return game.rho(s, e_star); };
  auto below = [&](double r) {
    Box sq(center.array() - r, center.array() + r);
    sq.lo = sq.lo.cwiseMax(game.sys_box.lo);
    sq.hi = sq.hi.cwiseMin(game.sys_box.hi);
    MaximizeOptions opt;
    opt.lipschitz = L;
    opt.precision = cfg.epsilon / (4 * L);
    opt.max_nodes = cfg.max_nodes;
    opt.stop_at = cfg.epsilon;
    opt.certify_below = cfg.epsilon;
    if (calls) { ++*calls; }
    auto res = bnb_maximize(f, RegionSet(sq), opt);
    return res.upper_bound < cfg.epsilon;
  };
  double lo = r0, hi = 2 * game.sys_box.radius() + r0;
  if (below(hi)) { return hi; }
  for (int i = 0; i < 20; ++i) {
    const double mid = 0.5 * (lo + hi);
    (below(mid) ? lo : hi) = mid;
  }
  return lo;
}

Eigen::VectorXd initial_counterexample(const Box & env, const CegisConfig & cfg)
{
  if (!cfg.seed) { return env.center(); }
  std::mt19937_64 rng(*cfg.seed);
  Eigen::VectorXd e(env.dim());
  for (Eigen::Index i = 0; i < env.dim(); ++i) {
    e(i) = std::uniform_real_distribution<double>(env.lo(i), env.hi(i))(rng);
  }
  return e;
}

struct CandidateSearch
{
  const SplitGame & game;
  const CegisConfig & cfg;
  CegisOutcome & out;
  std::size_t iteration;

  /// A region point beating e_star by more than epsilon, or none once the region is exhausted.
  std::optional<Candidate> operator()(RegionSet & region, const Eigen::VectorXd & e_star)
  {
    const double eps = cfg.epsilon;
    const double L = floor_l(game.lipschitz_sys);
    const Objective f = [&](const Eigen::VectorXd & s) { return game.rho(s, e_star); };
    BnbOptions opt;
    opt.lipschitz = L;
    opt.precision = sys_precision(game, cfg);
    opt.max_nodes = cfg.max_nodes;
    ++out.oracle_calls;
    if (cfg.oracle == OracleMode::Satisfy) {
      if (auto hit = bnb_satisfy([&](const Eigen::VectorXd & s) { return f(s) - eps; }, region, opt)) {
        return Candidate{hit->point, hit->value + eps};
      }
    } else {
      MaximizeOptions mopt;
      static_cast<BnbOptions &>(mopt) = opt;
      auto res = bnb_maximize(f, region, mopt);
      if (res.best && res.best->value > eps) { return res.best; }
    }
    if (cfg.memoryless) { return std::nullopt; }
    // Sweep the remainder: any point left either qualifies or is removed at the
    // 2 epsilon level, so the region empties in finitely many steps.
    while (auto p = region.find_point(opt.precision)) {
      const double v = f(*p);
      if (v > eps) { return Candidate{*p, v}; }
      const double r = (2 * eps - v) / L;
      region.remove(*p, r);
      out.removals.push_back(RemovalRecord{iteration, *p, r, e_star, v, true});
    }
    return std::nullopt;
  }
};

}  // namespace

std::vector<RemovalRecord> without_refuted(const SplitGame & game, const Eigen::VectorXd & e_star, RegionSet & region,
                                           const CegisConfig & cfg, std::size_t * oracle_calls)
{
  check_config(cfg);
  const double L = floor_l(game.lipschitz_sys);
  BnbOptions opt;
  opt.lipschitz = L;
  opt.precision = sys_precision(game, cfg);
  opt.max_nodes = cfg.max_nodes;
  const Objective neg = [&](const Eigen::VectorXd & s) { return -game.rho(s, e_star); };
  std::vector<RemovalRecord> removed;
  while (true) {
    if (oracle_calls) { ++*oracle_calls; }
    auto hit = bnb_satisfy(neg, region, opt);
    if (!hit) { break; }
    const double rho = -hit->value;
    double r = (cfg.epsilon + std::abs(rho)) / L;
    if (cfg.enlarge_squares) { r = enlarge(game, hit->point, e_star, r, cfg, oracle_calls); }
    region.remove(hit->point, r);
    removed.push_back(RemovalRecord{0, hit->point, r, e_star, rho, false});
  }
  return removed;
}

CegisOutcome cegis(const SplitGame & game, const CegisConfig & cfg)
{
  check_config(cfg);
  CegisOutcome out;
  out.lipschitz_sys = game.lipschitz_sys;
  out.lipschitz_env = game.lipschitz_env;
  RegionSet region(game.sys_box);
  const int depth = measure_depth(cfg, game.sys_box.dim());
  Eigen::VectorXd e_star = initial_counterexample(game.env_box, cfg);
  const double L_env = floor_l(game.lipschitz_env);

  try {
    while (true) {
      if (out.iterations >= cfg.max_iters) {
        out.status = CegisStatus::BudgetExhausted;
        out.message = "iteration cap reached";
        break;
      }
      CandidateSearch search{game, cfg, out, out.iterations + 1};
      auto cand = search(region, e_star);
      if (!cand) {
        out.status = CegisStatus::NoDominant;
        out.message = "no candidate beats the latest counterexample by epsilon";
        break;
      }
      ++out.iterations;
      IterationRecord rec;
      rec.iteration = out.iterations;
      rec.candidate = cand->point;
      rec.candidate_robustness = cand->value;

      const Eigen::VectorXd s_star = cand->point;
      MaximizeOptions mopt;
      mopt.lipschitz = L_env;
      mopt.precision = env_precision(game, cfg);
      mopt.max_nodes = cfg.max_nodes;
      mopt.stop_at = 0.0;
      mopt.certify_below = 0.0;
      ++out.oracle_calls;
      auto refute = bnb_maximize([&](const Eigen::VectorXd & e) { return -game.rho(s_star, e); },
                                 RegionSet(game.env_box), mopt);
      if (refute.upper_bound < 0) {
        out.status = CegisStatus::Dominant;
        out.witness = s_star;
        out.witness_robustness = -refute.upper_bound;
        rec.measure = region.remaining_measure_bounds(depth);
        out.log.push_back(std::move(rec));
        out.message = "worst-case robustness certified positive";
        break;
      }
      if (!refute.best) { throw Error("refutation search found no disturbance"); }
      e_star = refute.best->point;
      rec.counterexample = e_star;
      rec.counterexample_robustness = -refute.best->value;
      rec.refuting = refute.best->value >= 0;
      out.counterexamples.push_back(e_star);

      if (!cfg.memoryless) {
        auto removed = without_refuted(game, e_star, region, cfg, &out.oracle_calls);
        for (auto & r : removed) { r.iteration = out.iterations; }
        rec.squares_removed = removed.size();
        out.removals.insert(out.removals.end(), removed.begin(), removed.end());
      }
      rec.measure = region.remaining_measure_bounds(depth);
      out.log.push_back(std::move(rec));
    }
  } catch (const BudgetExhausted & e) {
    out.status = CegisStatus::BudgetExhausted;
    out.message = e.what();
  }
  out.remaining = std::move(region);
  return out;
}

SplitGame make_split_game(const LinearSystem & sys, const Formula & f, const CegisConfig & cfg, bool env)
{
  sys.validate();
  if (horizon(f) > sys.horizon) { throw TraceTooShort("formula horizon exceeds the system horizon"); }
  if (signal_dimension(f) > sys.state_dim()) {
    throw DimensionError("formula references states beyond the system dimension");
  }
  const auto L = lipschitz_bounds(sys, f, cfg.norm);
  const double Lu = cfg.lipschitz_u.value_or(L.u);
  const double Lw = cfg.lipschitz_w.value_or(L.w);
  auto model = std::make_shared<RunModel>(sys);
  SplitGame g;
  if (!env) {
    g.rho = [model, f](const Eigen::VectorXd & u, const Eigen::VectorXd & w) { return model->robustness(f, u, w); };
    g.sys_box = sys.control_space();
    g.env_box = sys.disturbance_space();
    g.lipschitz_sys = Lu;
    g.lipschitz_env = Lw;
  } else {
    g.rho = [model, f](const Eigen::VectorXd & w, const Eigen::VectorXd & u) { return -model->robustness(f, u, w); };
    g.sys_box = sys.disturbance_space();
    g.env_box = sys.control_space();
    g.lipschitz_sys = Lw;
    g.lipschitz_env = Lu;
  }
  return g;
}

CegisOutcome modified_cegis(const LinearSystem & sys, const Formula & f, const CegisConfig & cfg)
{
  return cegis(make_split_game(sys, f, cfg, false), cfg);
}

CegisOutcome dominant_env(const LinearSystem & sys, const Formula & f, const CegisConfig & cfg)
{
  return cegis(make_split_game(sys, f, cfg, true), cfg);
}

namespace {

CegisOutcome naive(const FiniteGame & game, const Formula & f, const CegisConfig & cfg, bool env)
{
  game.validate();
  if (horizon(f) > game.horizon()) { throw TraceTooShort("formula horizon exceeds the game horizon"); }
  const int H = game.horizon();
  const Player me = env ? Player::Disturbance : Player::Control;
  const Player them = env ? Player::Control : Player::Disturbance;
  const int their_alphabet = static_cast<int>(env ? game.u_moves.size() : game.w_moves.size());

  CegisOutcome out;
  std::vector<int> e_star(static_cast<std::size_t>(H), 0);
  if (cfg.seed) {
    std::mt19937_64 rng(*cfg.seed);
    for (auto & m : e_star) { m = std::uniform_int_distribution<int>(0, their_alphabet - 1)(rng); }
  }
  auto values = [&](Player p, const std::vector<int> & moves) {
    return flatten(p == Player::Control ? game.controls(moves) : game.disturbances(moves));
  };
  std::set<std::vector<int>> excluded;
  while (true) {
    if (out.iterations >= cfg.max_iters) {
      out.status = CegisStatus::BudgetExhausted;
      out.message = "iteration cap reached";
      break;
    }
    ++out.oracle_calls;
    auto cand = find_sat_finite(FiniteQuery{game, f, me, e_star, excluded, env});
    if (!cand) {
      out.status = CegisStatus::NoDominant;
      out.message = "every candidate has been refuted";
      break;
    }
    ++out.iterations;
    IterationRecord rec;
    rec.iteration = out.iterations;
    rec.candidate = values(me, cand->moves);
    rec.candidate_robustness = cand->margin;
    ++out.oracle_calls;
    auto refute = find_sat_finite(FiniteQuery{game, f, them, cand->moves, {}, !env});
    if (!refute) {
      out.status = CegisStatus::Dominant;
      out.witness_moves = cand->moves;
      out.witness = rec.candidate;
      out.log.push_back(std::move(rec));
      out.message = "no opponent sequence beats the candidate";
      break;
    }
    e_star = refute->moves;
    rec.counterexample = values(them, e_star);
    rec.counterexample_robustness = -refute->margin;
    rec.refuting = true;
    rec.squares_removed = 1;
    out.counterexamples.push_back(*rec.counterexample);
    out.counterexample_moves.push_back(e_star);
    excluded.insert(cand->moves);
    out.log.push_back(std::move(rec));
  }
  out.remaining = RegionSet();
  return out;
}

}  // namespace

CegisOutcome naive_cegis(const FiniteGame & game, const Formula & f, const CegisConfig & cfg)
{
  return naive(game, f, cfg, false);
}

CegisOutcome naive_cegis_env(const FiniteGame & game, const Formula & f, const CegisConfig & cfg)
{
  return naive(game, f, cfg, true);
}

}  // namespace reactsynth
