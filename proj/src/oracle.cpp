#include "reactsynth/oracle.hpp"

#include "reactsynth/error.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>

namespace reactsynth {

namespace {

struct Node
{
  Box box;
  std::vector<std::size_t> squares;
  double key;
  std::size_t seq;
};

struct NodeOrder
{
  bool operator()(const Node & a, const Node & b) const
  {
    if (a.key != b.key) { return a.key < b.key; }
    return a.seq > b.seq;
  }
};

using NodeQueue = std::priority_queue<Node, std::vector<Node>, NodeOrder>;

class Search
{
public:
  Search(const Objective & g, const RegionSet & region, const BnbOptions & opt, BnbStats * stats)
      : g_(g), region_(region), opt_(opt), stats_(stats ? stats : &local_)
  {
    if (!(opt.lipschitz >= 0) || !std::isfinite(opt.lipschitz)) {
      throw DomainError("branch-and-bound needs a finite non-negative Lipschitz constant");
    }
    if (!(opt.precision > 0)) { throw DomainError("branch-and-bound needs a positive precision"); }
    queue_.push(Node{region.base(), region.overlapping(region.base()), std::numeric_limits<double>::infinity(), seq_++});
  }

  bool empty() const { return queue_.empty(); }
  double top_key() const { return queue_.top().key; }

  Node pop()
  {
    if (++stats_->nodes > opt_.max_nodes) { throw BudgetExhausted("branch-and-bound node budget exhausted"); }
    Node n = queue_.top();
    queue_.pop();
    return n;
  }

  bool covered(const Node & n) const
  {
    const auto & sq = region_.removed();
    return std::any_of(n.squares.begin(), n.squares.end(), [&](std::size_t i) { return sq[i].covers(n.box); });
  }

  bool admissible(const Node & n, const Eigen::VectorXd & p) const
  {
    const auto & sq = region_.removed();
    return std::none_of(n.squares.begin(), n.squares.end(), [&](std::size_t i) { return sq[i].contains(p); });
  }

  double eval(const Eigen::VectorXd & p)
  {
    ++stats_->evaluations;
    return g_(p);
  }

  bool splittable(const Node & n) const
  {
    const Eigen::Index d = n.box.widest();
    return d >= 0 && n.box.width(d) >= opt_.precision;
  }

  /// A region point inside a box too small to split whose center was removed.
  std::optional<Eigen::VectorXd> probe(const Node & n) const
  {
    const Eigen::Index d = n.box.widest();
    const double gap = std::max(d >= 0 ? n.box.width(d) / 8 : 0.0, 1e-15);
    return region_.find_point_in(n.box, gap);
  }

  void split(const Node & n, double key)
  {
    auto [lo, hi] = n.box.split(n.box.widest());
    auto lo_sq = region_.overlapping(lo, &n.squares);
    auto hi_sq = region_.overlapping(hi, &n.squares);
    queue_.push(Node{std::move(lo), std::move(lo_sq), key, seq_++});
    queue_.push(Node{std::move(hi), std::move(hi_sq), key, seq_++});
  }

  double lipschitz() const { return opt_.lipschitz; }
  double precision() const { return opt_.precision; }

private:
  const Objective & g_;
  const RegionSet & region_;
  const BnbOptions & opt_;
  BnbStats local_;
  BnbStats * stats_;
  NodeQueue queue_;
  std::size_t seq_ = 0;
};

}  // namespace

std::optional<Candidate> bnb_satisfy(const Objective & g, const RegionSet & region, const BnbOptions & opt,
                                     BnbStats * stats)
{
  Search s(g, region, opt, stats);
  while (!s.empty()) {
    Node n = s.pop();
    if (s.covered(n)) { continue; }
    const Eigen::VectorXd c = n.box.center();
    const double v = s.eval(c);
    const bool inside = s.admissible(n, c);
    if (inside && v > 0) { return Candidate{c, v}; }
    const double ub = v + s.lipschitz() * n.box.radius();
    if (ub <= 0) { continue; }
    if (!s.splittable(n)) {
      if (!inside) {
        if (auto p = s.probe(n)) {
          const double pv = s.eval(*p);
          if (pv > 0) { return Candidate{*p, pv}; }
        }
      }
      continue;
    }
    s.split(n, ub);
  }
  return std::nullopt;
}

MaximizeResult bnb_maximize(const Objective & g, const RegionSet & region, const MaximizeOptions & opt,
                            BnbStats * stats)
{
  Search s(g, region, opt, stats);
  MaximizeResult out;
  double best = -std::numeric_limits<double>::infinity();
  double discarded = -std::numeric_limits<double>::infinity();
  auto offer = [&](const Eigen::VectorXd & p, double v) {
    if (v > best) {
      best = v;
      out.best = Candidate{p, v};
    }
    return opt.stop_at && v >= *opt.stop_at;
  };
  const double tolerance = s.lipschitz() * s.precision();
  while (true) {
    const double pending = s.empty() ? -std::numeric_limits<double>::infinity() : s.top_key();
    out.upper_bound = std::max({best, discarded, pending});
    if (s.empty()) { break; }
    if (opt.certify_below && out.upper_bound < *opt.certify_below) { break; }
    if (out.best && pending <= best + tolerance) { break; }
    Node n = s.pop();
    if (s.covered(n)) { continue; }
    const Eigen::VectorXd c = n.box.center();
    const double v = s.eval(c);
    const bool inside = s.admissible(n, c);
    if (inside && offer(c, v)) { break; }
    const double ub = v + s.lipschitz() * n.box.radius();
    if (out.best && ub <= best) { continue; }
    if (!s.splittable(n)) {
      if (!inside) {
        if (auto p = s.probe(n)) {
          if (offer(*p, s.eval(*p))) { break; }
        }
      }
      discarded = std::max(discarded, ub);
      continue;
    }
    s.split(n, ub);
  }
  if (out.best) { out.upper_bound = std::max(out.upper_bound, best); }
  return out;
}

RegionSet Query::effective_domain() const
{
  if (domain) { return *domain; }
  return RegionSet(free_player == Player::Control ? sys.control_space() : sys.disturbance_space());
}

double Query::effective_lipschitz() const
{
  if (lipschitz) {
    if (!(*lipschitz >= 0) || !std::isfinite(*lipschitz)) { throw DomainError("Lipschitz override must be finite"); }
    return *lipschitz;
  }
  const auto L = lipschitz_bounds(sys, formula);
  return free_player == Player::Control ? L.u : L.w;
}

Objective Query::objective() const
{
  if (static_cast<int>(fixed_opponent.size()) != sys.horizon) {
    throw DimensionError("fixed opponent sequence must have one value per round");
  }
  auto model = std::make_shared<RunModel>(sys);
  const Eigen::VectorXd fixed = flatten(fixed_opponent);
  const double sign = negate ? -1.0 : 1.0;
  const Formula f = formula;
  if (free_player == Player::Control) {
    return [model, fixed, sign, f](const Eigen::VectorXd & u) { return sign * model->robustness(f, u, fixed); };
  }
  return [model, fixed, sign, f](const Eigen::VectorXd & w) { return sign * model->robustness(f, fixed, w); };
}

std::optional<FoundPoint> find_sat(const Query & q, BnbStats * stats)
{
  q.sys.validate();
  const RegionSet region = q.effective_domain();
  const Box full = q.free_player == Player::Control ? q.sys.control_space() : q.sys.disturbance_space();
  if (region.dim() != full.dim()) { throw DimensionError("query domain has the wrong dimension"); }
  const Objective g = q.objective();
  BnbOptions opt;
  opt.lipschitz = q.effective_lipschitz();
  opt.precision = q.precision;
  std::optional<Candidate> hit;
  if (q.mode == OracleMode::Satisfy) {
    hit = bnb_satisfy(g, region, opt, stats);
  } else {
    MaximizeOptions mopt;
    static_cast<BnbOptions &>(mopt) = opt;
    hit = bnb_maximize(g, region, mopt, stats).best;
  }
  if (!hit) { return std::nullopt; }
  return FoundPoint{unflatten(hit->point, q.sys.horizon), hit->value};
}

void for_each_sequence(int alphabet, int rounds, const std::function<bool(const std::vector<int> &)> & visit)
{
  if (alphabet <= 0 || rounds < 0) { return; }
  std::vector<int> seq(static_cast<std::size_t>(rounds), 0);
  while (true) {
    if (!visit(seq)) { return; }
    int k = rounds - 1;
    while (k >= 0 && seq[static_cast<std::size_t>(k)] == alphabet - 1) {
      seq[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) { return; }
    ++seq[static_cast<std::size_t>(k)];
  }
}

std::optional<FoundMoves> find_sat_finite(const FiniteQuery & q, std::size_t * evaluations)
{
  q.game.validate();
  const int H = q.game.horizon();
  if (static_cast<int>(q.fixed_opponent.size()) != H) {
    throw DimensionError("fixed opponent sequence must have one move per round");
  }
  const bool control = q.free_player == Player::Control;
  const InputSequence fixed = control ? q.game.disturbances(q.fixed_opponent) : q.game.controls(q.fixed_opponent);
  const double sign = q.negate ? -1.0 : 1.0;
  const int alphabet = static_cast<int>(control ? q.game.u_moves.size() : q.game.w_moves.size());
  std::optional<FoundMoves> found;
  for_each_sequence(alphabet, H, [&](const std::vector<int> & moves) {
    if (q.excluded.count(moves)) { return true; }
    const InputSequence mine = control ? q.game.controls(moves) : q.game.disturbances(moves);
    const Trace xi = control ? unroll(q.game.plant, mine, fixed) : unroll(q.game.plant, fixed, mine);
    if (evaluations) { ++*evaluations; }
    const double m = sign * robustness(q.formula, xi);
    if (m > 0) {
      found = FoundMoves{moves, m};
      return false;
    }
    return true;
  });
  return found;
}

}  // namespace reactsynth
