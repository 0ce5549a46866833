#include "reactsynth/game_eval.hpp"

#include "reactsynth/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <optional>

namespace reactsynth {

namespace {

struct Block
{
  bool exists = false;
  std::vector<Var> vars;
};

struct Assignment
{
  Eigen::VectorXd u;
  Eigen::VectorXd w;
};

struct Counters
{
  std::atomic<std::size_t> steps{0};
  std::atomic<std::size_t> oracle_calls{0};
  std::atomic<std::size_t> cells{0};
};

// Values within 1e-9 count as equal.
long long tie_key(double v)
{
  if (!std::isfinite(v)) { return v > 0 ? std::numeric_limits<long long>::max() : std::numeric_limits<long long>::min(); }
  return std::llround(v * 1e9);
}

// Best value first; ties go to the point farthest from the box center, then to lattice order.
std::vector<std::size_t> order_by(const std::vector<double> & keys, const std::vector<Eigen::VectorXd> & pts,
                                  const Box & box)
{
  std::vector<double> spread(pts.size(), 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (Eigen::Index d = 0; d < box.dim(); ++d) {
      if (box.width(d) > 0) { spread[i] += std::pow((pts[i](d) - 0.5 * (box.lo(d) + box.hi(d))) / box.width(d), 2); }
    }
  }
  std::vector<std::size_t> idx(keys.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto ka = tie_key(keys[a]), kb = tie_key(keys[b]);
    if (ka != kb) { return ka > kb; }
    return tie_key(spread[a]) > tie_key(spread[b]);
  });
  return idx;
}

std::vector<Eigen::Index> divisions(const Box & box, double pitch)
{
  std::vector<Eigen::Index> n(static_cast<std::size_t>(box.dim()));
  for (Eigen::Index d = 0; d < box.dim(); ++d) {
    const double w = box.width(d);
    n[static_cast<std::size_t>(d)] = w <= 0 ? 0 : static_cast<Eigen::Index>(std::ceil(w / pitch - 1e-9));
  }
  return n;
}

template<typename Visit>
void for_each_index(const std::vector<Eigen::Index> & extent, Visit && visit)
{
  std::vector<Eigen::Index> i(extent.size(), 0);
  while (true) {
    visit(i);
    std::size_t d = extent.size();
    while (d > 0) {
      --d;
      if (++i[d] < extent[d]) { break; }
      i[d] = 0;
      if (d == 0) { return; }
    }
    if (extent.empty()) { return; }
  }
}

class Evaluator
{
public:
  Evaluator(const Arena & arena, const Context & ctx, const GameConfig & cfg, std::vector<Block> blocks,
            Counters & counters)
    : arena_(arena), ctx_(ctx), cfg_(cfg), blocks_(std::move(blocks)), counters_(counters)
  {
  }

  WitnessPtr eval(std::size_t bi, std::size_t vi, const Assignment & a, double theta, bool top)
  {
    if (++counters_.steps > cfg_.max_steps) { throw BudgetExhausted("game evaluation step budget exhausted"); }
    if (bi == blocks_.size()) {
      return rho(a) - theta > 0 ? win() : nullptr;
    }
    const Block & b = blocks_[bi];
    if (arena_.finite()) { return b.exists ? finite_exists(bi, a, theta, top) : finite_forall(bi, vi, a, theta, top); }
    if (b.exists) {
      if (bi + 1 == blocks_.size()) { return exists_last(bi, a, theta); }
      if (bi + 2 == blocks_.size()) { return exists_then_forall(bi, a, theta); }
      return exists_alternating(bi, a, theta, top);
    }
    if (bi + 1 == blocks_.size()) { return forall_last(bi, vi, a, theta); }
    return forall_split(bi, vi, a, theta, top);
  }

private:
  static WitnessPtr win() { return std::make_shared<Witness>(); }

  double rho(const Assignment & a) const { return arena_.robustness(a.u, a.w); }

  void set(Assignment & a, const Var & v, const Eigen::VectorXd & value) const
  {
    const Eigen::Index n = arena_.dim(v.player);
    (v.player == Player::Control ? a.u : a.w).segment(v.round * n, n) = value;
  }

  void set_all(Assignment & a, const std::vector<Var> & vars, const Eigen::VectorXd & flat) const
  {
    Eigen::Index at = 0;
    for (const auto & v : vars) {
      const Eigen::Index n = arena_.dim(v.player);
      set(a, v, flat.segment(at, n));
      at += n;
    }
  }

  Box box_of(const std::vector<Var> & vars) const
  {
    Box b{Eigen::VectorXd(0), Eigen::VectorXd(0)};
    for (const auto & v : vars) { b = b.product(ctx_.at(v).box); }
    return b;
  }

  std::vector<Var> vars_from(std::size_t bi, std::size_t vi) const
  {
    std::vector<Var> out;
    for (std::size_t i = bi; i < blocks_.size(); ++i) {
      const auto & vs = blocks_[i].vars;
      out.insert(out.end(), vs.begin() + static_cast<std::ptrdiff_t>(i == bi ? vi : 0), vs.end());
    }
    return out;
  }

  std::pair<std::size_t, std::size_t> after(std::size_t bi, std::size_t vi) const
  {
    return vi + 1 < blocks_[bi].vars.size() ? std::pair{bi, vi + 1} : std::pair{bi + 1, std::size_t{0}};
  }

  WitnessPtr commit(const std::vector<Var> & vars, const Eigen::VectorXd & flat, std::vector<int> moves,
                    WitnessPtr next) const
  {
    auto w = std::make_shared<Witness>();
    w->kind = Witness::Kind::Commit;
    w->vars = vars;
    Eigen::Index at = 0;
    for (const auto & v : vars) {
      const Eigen::Index n = arena_.dim(v.player);
      w->values.push_back(flat.segment(at, n));
      at += n;
    }
    w->moves = moves.empty() ? std::vector<int>(vars.size(), -1) : std::move(moves);
    w->next = std::move(next);
    return w;
  }

  std::vector<Eigen::VectorXd> lattice(const Box & box, double pitch) const
  {
    const auto n = divisions(box, pitch);
    double count = 1;
    for (auto k : n) { count *= static_cast<double>(k + 1); }
    if (count > static_cast<double>(cfg_.max_lattice)) { return {}; }
    std::vector<Eigen::Index> extent;
    for (auto k : n) { extent.push_back(k + 1); }
    std::vector<Eigen::VectorXd> pts;
    for_each_index(extent, [&](const std::vector<Eigen::Index> & i) {
      Eigen::VectorXd p = box.lo;
      for (Eigen::Index d = 0; d < box.dim(); ++d) {
        const auto k = n[static_cast<std::size_t>(d)];
        if (k > 0) { p(d) = box.lo(d) + box.width(d) * static_cast<double>(i[static_cast<std::size_t>(d)]) / static_cast<double>(k); }
      }
      pts.push_back(std::move(p));
    });
    return pts;
  }

  // Largest value of rho - theta reachable when every variable in `rest` cooperates.
  double cooperative(const Assignment & a, const std::vector<Var> & rest, double theta) const
  {
    if (rest.empty()) { return rho(a) - theta; }
    const double L = arena_.lipschitz(rest);
    MaximizeOptions opt;
    opt.lipschitz = L;
    opt.precision = cfg_.epsilon / (4 * L);
    opt.max_nodes = cfg_.max_nodes;
    ++counters_.oracle_calls;
    const auto r = bnb_maximize(
      [&](const Eigen::VectorXd & p) {
        Assignment b = a;
        set_all(b, rest, p);
        return rho(b) - theta;
      },
      RegionSet(box_of(rest)), opt);
    return r.best ? r.best->value : -std::numeric_limits<double>::infinity();
  }

  // min over `rest` of rho - theta is certified positive.
  bool certify(const Assignment & a, const std::vector<Var> & rest, double theta) const
  {
    if (rest.empty()) { return rho(a) - theta > 0; }
    const double L = arena_.lipschitz(rest);
    MaximizeOptions opt;
    opt.lipschitz = L;
    opt.precision = cfg_.epsilon / (64 * L);
    opt.max_nodes = cfg_.max_nodes;
    opt.stop_at = 0.0;
    opt.certify_below = 0.0;
    ++counters_.oracle_calls;
    const auto r = bnb_maximize(
      [&](const Eigen::VectorXd & p) {
        Assignment b = a;
        set_all(b, rest, p);
        return theta - rho(b);
      },
      RegionSet(box_of(rest)), opt);
    return r.upper_bound < 0;
  }

  WitnessPtr exists_last(std::size_t bi, const Assignment & a, double theta) const
  {
    const auto & vars = blocks_[bi].vars;
    const Box box = box_of(vars);
    const double L = arena_.lipschitz(vars);
    const auto pts = lattice(box, cfg_.epsilon / L);
    std::vector<double> values;
    for (const auto & p : pts) {
      Assignment b = a;
      set_all(b, vars, p);
      values.push_back(rho(b) - theta);
    }
    if (!pts.empty()) {
      const auto best = order_by(values, pts, box).front();
      if (values[best] > 0) { return commit(vars, pts[best], {}, win()); }
    }
    BnbOptions opt;
    opt.lipschitz = L;
    opt.precision = cfg_.epsilon / (4 * L);
    opt.max_nodes = cfg_.max_nodes;
    ++counters_.oracle_calls;
    const auto found = bnb_satisfy(
      [&](const Eigen::VectorXd & p) {
        Assignment b = a;
        set_all(b, vars, p);
        return rho(b) - theta;
      },
      RegionSet(box), opt);
    return found ? commit(vars, found->point, {}, win()) : nullptr;
  }

  WitnessPtr exists_then_forall(std::size_t bi, const Assignment & a, double theta) const
  {
    const auto & vars = blocks_[bi].vars;
    const auto & opp = blocks_[bi + 1].vars;
    const Box box = box_of(vars);
    const double L = arena_.lipschitz(vars);
    const auto pts = lattice(box, cfg_.epsilon / L);
    std::vector<double> coop;
    for (const auto & p : pts) {
      Assignment b = a;
      set_all(b, vars, p);
      coop.push_back(cooperative(b, opp, theta));
    }
    for (auto i : order_by(coop, pts, box)) {
      if (coop[i] <= 0) { break; }
      Assignment b = a;
      set_all(b, vars, pts[i]);
      if (certify(b, opp, theta)) { return commit(vars, pts[i], {}, win()); }
    }

    SplitGame game;
    game.sys_box = box;
    game.env_box = box_of(opp);
    game.lipschitz_sys = L;
    game.lipschitz_env = arena_.lipschitz(opp);
    game.rho = [&](const Eigen::VectorXd & s, const Eigen::VectorXd & e) {
      Assignment b = a;
      set_all(b, vars, s);
      set_all(b, opp, e);
      return rho(b) - theta;
    };
    CegisConfig c = cfg_.cegis;
    c.epsilon = cfg_.epsilon;
    c.max_nodes = cfg_.max_nodes;
    const auto out = cegis(game, c);
    counters_.oracle_calls += out.oracle_calls;
    if (out.status == CegisStatus::BudgetExhausted) { throw BudgetExhausted("dominant-strategy loop: " + out.message); }
    return out.status == CegisStatus::Dominant ? commit(vars, out.witness, {}, win()) : nullptr;
  }

  WitnessPtr exists_alternating(std::size_t bi, const Assignment & a, double theta, bool top)
  {
    const auto & vars = blocks_[bi].vars;
    const double L = arena_.lipschitz(vars);
    const Box box = box_of(vars);
    const auto pts = lattice(box, cfg_.epsilon / L);
    if (pts.empty()) { throw BudgetExhausted("candidate lattice exceeds max_lattice"); }
    const auto rest = vars_from(bi + 1, 0);
    std::vector<double> coop;
    for (const auto & p : pts) {
      Assignment b = a;
      set_all(b, vars, p);
      coop.push_back(cooperative(b, rest, theta));
    }
    for (auto i : order_by(coop, pts, box)) {
      if (coop[i] <= 0) { break; }
      Assignment b = a;
      set_all(b, vars, pts[i]);
      if (auto child = eval(bi + 1, 0, b, theta, top)) { return commit(vars, pts[i], {}, std::move(child)); }
    }
    return nullptr;
  }

  WitnessPtr forall_last(std::size_t bi, std::size_t vi, const Assignment & a, double theta) const
  {
    return certify(a, vars_from(bi, vi), theta) ? win() : nullptr;
  }

  WitnessPtr forall_split(std::size_t bi, std::size_t vi, const Assignment & a, double theta, bool top)
  {
    const Var v = blocks_[bi].vars[vi];
    const Box & box = ctx_.at(v).box;
    const double L = arena_.lipschitz({v});
    const auto n = divisions(box, cfg_.epsilon / L);
    std::vector<Eigen::Index> extent;
    for (auto k : n) { extent.push_back(std::max<Eigen::Index>(k, 1)); }
    std::vector<Box> cells;
    for_each_index(extent, [&](const std::vector<Eigen::Index> & i) {
      Box c = box;
      for (Eigen::Index d = 0; d < box.dim(); ++d) {
        const auto k = n[static_cast<std::size_t>(d)];
        if (k == 0) { continue; }
        const double step = box.width(d) / static_cast<double>(k);
        const auto j = static_cast<double>(i[static_cast<std::size_t>(d)]);
        c.lo(d) = box.lo(d) + step * j;
        c.hi(d) = i[static_cast<std::size_t>(d)] + 1 == k ? box.hi(d) : box.lo(d) + step * (j + 1);
      }
      cells.push_back(std::move(c));
    });
    const auto [nb, nv] = after(bi, vi);
    return split(v, cells, {}, top, [&, nb = nb, nv = nv](std::size_t i) {
      Assignment b = a;
      set(b, v, cells[i].center());
      return eval(nb, nv, b, theta + L * cells[i].radius(), false);
    });
  }

  WitnessPtr finite_exists(std::size_t bi, const Assignment & a, double theta, bool top)
  {
    const auto & vars = blocks_[bi].vars;
    WitnessPtr found;
    for_each_moves(vars, [&](const std::vector<int> & moves) {
      Assignment b = a;
      Eigen::VectorXd flat = values_of(vars, moves);
      set_all(b, vars, flat);
      if (auto child = eval(bi + 1, 0, b, theta, top)) {
        found = commit(vars, flat, moves, std::move(child));
        return false;
      }
      return true;
    });
    return found;
  }

  WitnessPtr finite_forall(std::size_t bi, std::size_t vi, const Assignment & a, double theta, bool top)
  {
    if (bi + 1 == blocks_.size()) {
      const auto rest = vars_from(bi, vi);
      bool ok = true;
      for_each_moves(rest, [&](const std::vector<int> & moves) {
        Assignment b = a;
        set_all(b, rest, values_of(rest, moves));
        ok = rho(b) - theta > 0;
        return ok;
      });
      return ok ? win() : nullptr;
    }
    const Var v = blocks_[bi].vars[vi];
    const auto & moves = ctx_.at(v).moves;
    const std::vector<Box> cells(moves.size(), Box{Eigen::VectorXd(0), Eigen::VectorXd(0)});
    const auto [nb, nv] = after(bi, vi);
    return split(v, cells, moves, top, [&, nb = nb, nv = nv](std::size_t i) {
      Assignment b = a;
      set(b, v, arena_.move_value(v, moves[i]));
      return eval(nb, nv, b, theta, false);
    });
  }

  // Children are evaluated in order, or in batches of `jobs` threads at the outermost split.
  WitnessPtr split(const Var & v, const std::vector<Box> & cells, const std::vector<int> & moves, bool top,
                   const std::function<WitnessPtr(std::size_t)> & run)
  {
    counters_.cells += cells.size();
    auto w = std::make_shared<Witness>();
    w->kind = Witness::Kind::Split;
    w->split = v;
    const std::size_t batch = top && cfg_.jobs > 1 ? static_cast<std::size_t>(cfg_.jobs) : 1;
    for (std::size_t start = 0; start < cells.size(); start += batch) {
      const std::size_t stop = std::min(cells.size(), start + batch);
      std::vector<WitnessPtr> results;
      if (batch == 1) {
        results.push_back(run(start));
      } else {
        std::vector<std::future<WitnessPtr>> futures;
        for (std::size_t i = start; i < stop; ++i) { futures.push_back(std::async(std::launch::async, run, i)); }
        for (auto & f : futures) { results.push_back(f.get()); }
      }
      for (std::size_t i = start; i < stop; ++i) {
        if (!results[i - start]) { return nullptr; }
        w->cells.push_back(WitnessCell{cells[i], moves.empty() ? -1 : moves[i], std::move(results[i - start])});
      }
    }
    return w;
  }

  Eigen::VectorXd values_of(const std::vector<Var> & vars, const std::vector<int> & moves) const
  {
    Eigen::Index total = 0;
    for (const auto & v : vars) { total += arena_.dim(v.player); }
    Eigen::VectorXd flat(total);
    Eigen::Index at = 0;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const auto & val = arena_.move_value(vars[i], moves[i]);
      flat.segment(at, val.size()) = val;
      at += val.size();
    }
    return flat;
  }

  template<typename Visit>
  void for_each_moves(const std::vector<Var> & vars, Visit && visit) const
  {
    std::vector<Eigen::Index> extent;
    for (const auto & v : vars) { extent.push_back(static_cast<Eigen::Index>(ctx_.at(v).moves.size())); }
    bool go = true;
    for_each_index(extent, [&](const std::vector<Eigen::Index> & i) {
      if (!go) { return; }
      std::vector<int> moves;
      for (std::size_t k = 0; k < vars.size(); ++k) {
        moves.push_back(ctx_.at(vars[k]).moves[static_cast<std::size_t>(i[k])]);
      }
      go = visit(moves);
    });
  }

  const Arena & arena_;
  const Context & ctx_;
  const GameConfig & cfg_;
  std::vector<Block> blocks_;
  Counters & counters_;
};

}  // namespace

GameResult evaluate_game(const GameString & q, const Arena & arena, const Context & ctx, const GameConfig & cfg,
                         double theta)
{
  if (q.horizon() != arena.horizon()) { throw DimensionError("game string horizon differs from the arena horizon"); }
  if (ctx.u.size() != static_cast<std::size_t>(arena.horizon()) ||
      ctx.w.size() != static_cast<std::size_t>(arena.horizon())) {
    throw DimensionError("context must have one domain per round and player");
  }
  if (!(cfg.epsilon > 0)) { throw DomainError("epsilon must be positive"); }
  if (cfg.jobs < 1) { throw DomainError("jobs must be at least 1"); }

  const int H = arena.horizon();
  Assignment a{Eigen::VectorXd::Zero(H * arena.dim(Player::Control)),
               Eigen::VectorXd::Zero(H * arena.dim(Player::Disturbance))};
  std::vector<Block> blocks;
  for (const auto & t : q.tokens()) {
    const Var v{t.exists() ? Player::Control : Player::Disturbance, t.round - 1};
    const VarDomain & d = ctx.at(v);
    if (arena.finite() && d.moves.empty()) { throw DomainError("empty move list for " + to_string(v)); }
    if (d.fixed()) {
      const Eigen::Index n = arena.dim(v.player);
      (v.player == Player::Control ? a.u : a.w).segment(v.round * n, n) =
        arena.finite() ? arena.move_value(v, d.moves.front()) : d.box.lo;
      continue;
    }
    if (blocks.empty() || blocks.back().exists != t.exists()) { blocks.push_back(Block{t.exists(), {}}); }
    blocks.back().vars.push_back(v);
  }

  Counters counters;
  Evaluator ev(arena, ctx, cfg, std::move(blocks), counters);
  GameResult r;
  r.witness = ev.eval(0, 0, a, theta, true);
  r.value = r.witness != nullptr;
  r.stats.steps = counters.steps;
  r.stats.oracle_calls = counters.oracle_calls;
  r.stats.cells = counters.cells;
  return r;
}

}  // namespace reactsynth
