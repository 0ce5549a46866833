#include "reactsynth/decision_tree.hpp"

#include "reactsynth/error.hpp"
#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

namespace reactsynth {

std::string to_string(TreeStatus s)
{
  switch (s) {
  case TreeStatus::Success: return "TREE";
  case TreeStatus::NoStrategy: return "NO_STRATEGY";
  case TreeStatus::BudgetExhausted: return "BUDGET_EXHAUSTED";
  }
  return "?";
}

namespace {

std::string vec_text(const Eigen::VectorXd & v)
{
  if (v.size() == 1) { return detail::format_double(v(0)); }
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) { s += ", "; }
    s += detail::format_double(v(i));
  }
  return s + ")";
}

std::string box_text(const Box & b)
{
  if (b.dim() == 1) { return "[" + detail::format_double(b.lo(0)) + ", " + detail::format_double(b.hi(0)) + "]"; }
  return "[" + vec_text(b.lo) + ", " + vec_text(b.hi) + "]";
}

VarDomain fixed_domain(const Eigen::VectorXd & value, int move)
{
  VarDomain d;
  if (move >= 0) {
    d.moves = {move};
  } else {
    d.box = Box(value, value);
  }
  d.branched = true;
  return d;
}

class Builder
{
public:
  Builder(const Arena & arena, const TreeConfig & cfg, TreeResult & out) : arena_(arena), cfg_(cfg), out_(out) {}

  TreePtr walk(Context ctx, GameNode node, Walk w, const std::string & branch)
  {
    while (true) {
      const auto res = evaluate_game(node.game, arena_, ctx, cfg_.game);
      const Edge e = edge_rule(node, res.value);
      w.steps.push_back(WalkStep{node, res.value, e});
      out_.log.push_back(WalkRecord{out_.walks.size(), w.steps.size() - 1, branch, w.steps.back(), alpha(node), res.stats});
      const GameNode next = next_node(node, res.value);
      switch (e) {
      case Edge::PathToBot:
        w.end = next;
        out_.walks.push_back(std::move(w));
        return nullptr;
      case Edge::PathToCont:
        w.end = next;
        out_.walks.push_back(std::move(w));
        return convert(*res.witness);
      case Edge::UpdateReact:
        node = next;
        continue;
      case Edge::UpdateDom:
        return apply(*res.witness, ctx, node.decision - 1, next, w, branch);
      }
    }
  }

private:
  // Follows the witness down to the commitment of u_k, branching on the splits met on the way.
  TreePtr apply(const Witness & W, const Context & ctx, int k, const GameNode & next, const Walk & w,
                const std::string & branch)
  {
    switch (W.kind) {
    case Witness::Kind::Commit: {
      for (std::size_t i = 0; i < W.vars.size(); ++i) {
        const Var & v = W.vars[i];
        if (v.player != Player::Control || v.round != k) { continue; }
        Context c = ctx;
        c.at(v) = fixed_domain(W.values[i], W.moves[i]);
        auto child = walk(std::move(c), next, w, branch);
        if (!child) { return nullptr; }
        auto t = std::make_shared<TreeNode>();
        t->kind = TreeNode::Kind::Assign;
        t->round = k;
        t->value = W.values[i];
        t->move = W.moves[i];
        t->next = std::move(child);
        return t;
      }
      return apply(*W.next, ctx, k, next, w, branch);
    }
    case Witness::Kind::Split: {
      auto t = std::make_shared<TreeNode>();
      t->kind = TreeNode::Kind::Branch;
      t->round = W.split.round;
      for (const auto & cell : W.cells) {
        Context c = ctx;
        VarDomain & d = c.at(W.split);
        if (cell.move >= 0) {
          d.moves = {cell.move};
        } else {
          d.box = cell.box;
        }
        d.branched = true;
        const std::string here = to_string(W.split) + " in " +
                                 (cell.move >= 0 ? arena_.move_name(W.split, cell.move) : box_text(cell.box));
        auto child = apply(*cell.child, c, k, next, w, branch.empty() ? here : branch + ", " + here);
        if (!child) { return nullptr; }
        t->segments.push_back(TreeSegment{cell.box, cell.move, std::move(child)});
      }
      if (t->segments.size() == 1) { return t->segments.front().child; }
      return t;
    }
    case Witness::Kind::Win: break;
    }
    throw Error("witness of a true game does not commit u" + std::to_string(k));
  }

  TreePtr convert(const Witness & W) const
  {
    switch (W.kind) {
    case Witness::Kind::Commit: {
      TreePtr rest = convert(*W.next);
      for (std::size_t i = W.vars.size(); i-- > 0;) {
        if (W.vars[i].player != Player::Control) { continue; }
        auto t = std::make_shared<TreeNode>();
        t->kind = TreeNode::Kind::Assign;
        t->round = W.vars[i].round;
        t->value = W.values[i];
        t->move = W.moves[i];
        t->next = std::move(rest);
        rest = std::move(t);
      }
      return rest;
    }
    case Witness::Kind::Split: {
      if (W.cells.size() == 1) { return convert(*W.cells.front().child); }
      auto t = std::make_shared<TreeNode>();
      t->kind = TreeNode::Kind::Branch;
      t->round = W.split.round;
      for (const auto & cell : W.cells) { t->segments.push_back(TreeSegment{cell.box, cell.move, convert(*cell.child)}); }
      return t;
    }
    case Witness::Kind::Win: break;
    }
    return std::make_shared<TreeNode>();
  }

  const Arena & arena_;
  const TreeConfig & cfg_;
  TreeResult & out_;
};

bool adjacent(const Box & a, const Box & b)
{
  if (a.dim() != b.dim() || a.dim() == 0) { return false; }
  int touching = 0;
  for (Eigen::Index d = 0; d < a.dim(); ++d) {
    if (a.lo(d) == b.lo(d) && a.hi(d) == b.hi(d)) { continue; }
    if (std::abs(a.hi(d) - b.lo(d)) > 1e-12) { return false; }
    ++touching;
  }
  return touching == 1;
}

}  // namespace

TreeResult build_decision_tree(const Arena & arena, const TreeConfig & cfg)
{
  TreeResult out;
  Builder b(arena, cfg, out);
  try {
    Walk w;
    w.horizon = arena.horizon();
    auto root = b.walk(arena.initial_context(), GameNode::initial(arena.horizon()), w, "");
    if (!root) {
      out.status = TreeStatus::NoStrategy;
      out.message = "a walk reached BOTTOM";
      return out;
    }
    out.leaves_before_merge = count_leaves(*root);
    out.root = cfg.merge ? merge_segments(root) : root;
    out.status = TreeStatus::Success;
  } catch (const BudgetExhausted & e) {
    out.status = TreeStatus::BudgetExhausted;
    out.message = e.what();
  }
  return out;
}

TreePtr merge_segments(const TreePtr & t)
{
  if (!t) { return t; }
  switch (t->kind) {
  case TreeNode::Kind::Leaf: return t;
  case TreeNode::Kind::Assign: {
    auto c = std::make_shared<TreeNode>(*t);
    c->next = merge_segments(t->next);
    return c;
  }
  case TreeNode::Kind::Branch: break;
  }
  std::vector<TreeSegment> segs;
  for (const auto & s : t->segments) { segs.push_back(TreeSegment{s.box, s.move, merge_segments(s.child)}); }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
      auto & a = segs[i];
      const auto & b = segs[i + 1];
      if (a.move >= 0 || b.move >= 0 || !adjacent(a.box, b.box) || !same_tree(*a.child, *b.child)) { continue; }
      a.box = Box(a.box.lo.cwiseMin(b.box.lo), a.box.hi.cwiseMax(b.box.hi));
      segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(i + 1));
      changed = true;
      break;
    }
  }
  if (segs.size() == 1) { return segs.front().child; }
  auto c = std::make_shared<TreeNode>(*t);
  c->segments = std::move(segs);
  return c;
}

bool same_tree(const TreeNode & a, const TreeNode & b, double tol)
{
  if (a.kind != b.kind || a.round != b.round) { return false; }
  switch (a.kind) {
  case TreeNode::Kind::Leaf: return true;
  case TreeNode::Kind::Assign:
    return a.move == b.move && a.value.size() == b.value.size() &&
           (a.value - b.value).cwiseAbs().maxCoeff() <= tol && same_tree(*a.next, *b.next, tol);
  case TreeNode::Kind::Branch:
    if (a.segments.size() != b.segments.size()) { return false; }
    for (std::size_t i = 0; i < a.segments.size(); ++i) {
      const auto & x = a.segments[i];
      const auto & y = b.segments[i];
      if (x.move != y.move || !(x.box == y.box) || !same_tree(*x.child, *y.child, tol)) { return false; }
    }
    return true;
  }
  return false;
}

std::size_t count_leaves(const TreeNode & t)
{
  switch (t.kind) {
  case TreeNode::Kind::Leaf: return 1;
  case TreeNode::Kind::Assign: return count_leaves(*t.next);
  case TreeNode::Kind::Branch: {
    std::size_t n = 0;
    for (const auto & s : t.segments) { n += count_leaves(*s.child); }
    return n;
  }
  }
  return 0;
}

std::size_t count_nodes(const TreeNode & t)
{
  switch (t.kind) {
  case TreeNode::Kind::Leaf: return 1;
  case TreeNode::Kind::Assign: return 1 + count_nodes(*t.next);
  case TreeNode::Kind::Branch: {
    std::size_t n = 1;
    for (const auto & s : t.segments) { n += count_nodes(*s.child); }
    return n;
  }
  }
  return 0;
}

namespace {

struct PathState
{
  std::vector<std::optional<Eigen::VectorXd>> u;
  std::vector<VarDomain> w;
  int observed = -1;
};

class Verifier
{
public:
  Verifier(const Arena & arena, double epsilon, std::size_t max_points, VerifyResult & out)
    : arena_(arena), max_points_(max_points), out_(out)
  {
    std::vector<Var> all;
    for (int k = 0; k < arena.horizon(); ++k) { all.push_back(Var{Player::Disturbance, k}); }
    pitch_ = epsilon / (2 * arena.lipschitz(all));
  }

  bool visit(const TreeNode & t, PathState & s)
  {
    switch (t.kind) {
    case TreeNode::Kind::Assign:
      if (t.round < 0 || t.round >= arena_.horizon()) { return fail("assignment to a round outside the horizon"); }
      if (t.round <= s.observed) {
        return fail("u" + std::to_string(t.round) + " is assigned after observing w" + std::to_string(s.observed));
      }
      if (s.u[static_cast<std::size_t>(t.round)]) { return fail("u" + std::to_string(t.round) + " is assigned twice"); }
      s.u[static_cast<std::size_t>(t.round)] = t.value;
      if (!visit(*t.next, s)) { return false; }
      s.u[static_cast<std::size_t>(t.round)].reset();
      return true;
    case TreeNode::Kind::Branch: {
      if (t.round < 0 || t.round >= arena_.horizon()) { return fail("branch on a round outside the horizon"); }
      const auto j = static_cast<std::size_t>(t.round);
      const VarDomain saved = s.w[j];
      if (!covers(t, saved)) { return fail("segments of w" + std::to_string(t.round) + " do not cover its domain"); }
      const int observed = s.observed;
      s.observed = std::max(s.observed, t.round);
      for (const auto & seg : t.segments) {
        if (seg.move >= 0) {
          s.w[j].moves = {seg.move};
        } else {
          s.w[j].box = seg.box;
        }
        if (!visit(*seg.child, s)) { return false; }
      }
      s.w[j] = saved;
      s.observed = observed;
      return true;
    }
    case TreeNode::Kind::Leaf: return leaf(s);
    }
    return false;
  }

private:
  bool fail(const std::string & msg)
  {
    out_.message = msg;
    return false;
  }

  bool covers(const TreeNode & t, const VarDomain & d) const
  {
    if (arena_.finite()) {
      std::vector<int> seen;
      for (const auto & seg : t.segments) { seen.push_back(seg.move); }
      std::sort(seen.begin(), seen.end());
      std::vector<int> want = d.moves;
      std::sort(want.begin(), want.end());
      return seen == want;
    }
    double vol = 0;
    for (const auto & seg : t.segments) {
      if (seg.box.dim() != d.box.dim()) { return false; }
      for (Eigen::Index i = 0; i < d.box.dim(); ++i) {
        if (seg.box.lo(i) < d.box.lo(i) - 1e-12 || seg.box.hi(i) > d.box.hi(i) + 1e-12) { return false; }
      }
      vol += seg.box.volume();
    }
    return std::abs(vol - d.box.volume()) <= 1e-9 * std::max(1.0, d.box.volume());
  }

  bool leaf(const PathState & s)
  {
    ++out_.paths;
    const int H = arena_.horizon();
    const Eigen::Index nu = arena_.dim(Player::Control), nw = arena_.dim(Player::Disturbance);
    Eigen::VectorXd u(H * nu);
    for (int k = 0; k < H; ++k) {
      if (!s.u[static_cast<std::size_t>(k)]) { return fail("path leaves u" + std::to_string(k) + " unassigned"); }
      u.segment(k * nu, nu) = *s.u[static_cast<std::size_t>(k)];
    }
    std::vector<Eigen::Index> extent;
    std::vector<std::function<Eigen::VectorXd(Eigen::Index)>> value;
    for (int k = 0; k < H; ++k) {
      const VarDomain & d = s.w[static_cast<std::size_t>(k)];
      const Var v{Player::Disturbance, k};
      if (arena_.finite()) {
        extent.push_back(static_cast<Eigen::Index>(d.moves.size()));
        value.push_back([this, &d, v](Eigen::Index i) { return arena_.move_value(v, d.moves[static_cast<std::size_t>(i)]); });
        continue;
      }
      for (Eigen::Index i = 0; i < nw; ++i) {
        const double lo = d.box.lo(i), width = d.box.width(i);
        const auto n = width <= 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(std::ceil(width / pitch_ - 1e-9));
        extent.push_back(n + 1);
        value.push_back([lo, width, n](Eigen::Index j) {
          Eigen::VectorXd x(1);
          x(0) = n == 0 ? lo : lo + width * static_cast<double>(j) / static_cast<double>(n);
          return x;
        });
      }
    }
    double total = 1;
    for (auto e : extent) { total *= static_cast<double>(e); }
    if (out_.points + total > static_cast<double>(max_points_)) { return fail("verification grid exceeds max_points"); }

    Eigen::VectorXd w(H * nw);
    std::vector<Eigen::Index> i(extent.size(), 0);
    while (true) {
      Eigen::Index at = 0;
      for (std::size_t d = 0; d < extent.size(); ++d) {
        const auto x = value[d](i[d]);
        w.segment(at, x.size()) = x;
        at += x.size();
      }
      const double r = arena_.robustness(u, w);
      ++out_.points;
      out_.min_robustness = std::min(out_.min_robustness, r);
      if (!(r > 0)) {
        std::ostringstream msg;
        msg << "robustness " << detail::format_double(r) << " at w = " << vec_text(w) << " with u = " << vec_text(u);
        return fail(msg.str());
      }
      std::size_t d = extent.size();
      bool done = true;
      while (d > 0) {
        --d;
        if (++i[d] < extent[d]) {
          done = false;
          break;
        }
        i[d] = 0;
      }
      if (done) { return true; }
    }
  }

  const Arena & arena_;
  std::size_t max_points_;
  VerifyResult & out_;
  double pitch_ = 1;
};

}  // namespace

VerifyResult verify_tree(const TreeNode & t, const Arena & arena, double epsilon, std::size_t max_points)
{
  if (!(epsilon > 0)) { throw DomainError("epsilon must be positive"); }
  VerifyResult out;
  PathState s;
  const Context ctx = arena.initial_context();
  s.u.resize(static_cast<std::size_t>(arena.horizon()));
  s.w = ctx.w;
  Verifier v(arena, epsilon, max_points, out);
  out.ok = v.visit(t, s);
  if (out.ok) { out.message = "ok"; }
  return out;
}

InputSequence execute(const TreeNode & t, const Arena & arena, const InputSequence & w)
{
  const int H = arena.horizon();
  if (static_cast<int>(w.size()) != H) { throw DimensionError("disturbance sequence must have one value per round"); }
  InputSequence u(static_cast<std::size_t>(H));
  const TreeNode * n = &t;
  while (n->kind != TreeNode::Kind::Leaf) {
    if (n->kind == TreeNode::Kind::Assign) {
      u[static_cast<std::size_t>(n->round)] = n->value;
      n = n->next.get();
      continue;
    }
    const auto & x = w[static_cast<std::size_t>(n->round)];
    const TreeNode * chosen = nullptr;
    for (const auto & seg : n->segments) {
      const bool hit = seg.move >= 0 ? arena.move_value(Var{Player::Disturbance, n->round}, seg.move) == x
                                     : ((x.array() >= seg.box.lo.array()) && (x.array() <= seg.box.hi.array())).all();
      if (hit) {
        chosen = seg.child.get();
        break;
      }
    }
    if (!chosen) { throw DomainError("disturbance at round " + std::to_string(n->round) + " matches no segment"); }
    n = chosen;
  }
  for (int k = 0; k < H; ++k) {
    if (u[static_cast<std::size_t>(k)].size() == 0) { throw DomainError("tree leaves u" + std::to_string(k) + " unassigned"); }
  }
  return u;
}

namespace {

nlohmann::ordered_json vec_json(const Eigen::VectorXd & v)
{
  auto a = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) { a.push_back(v(i)); }
  return a;
}

nlohmann::ordered_json to_json(const TreeNode & t, const Arena & arena)
{
  nlohmann::ordered_json j;
  switch (t.kind) {
  case TreeNode::Kind::Leaf: j["leaf"] = true; break;
  case TreeNode::Kind::Assign:
    j["assign"] = "u" + std::to_string(t.round);
    j["value"] = vec_json(t.value);
    if (t.move >= 0) { j["move"] = arena.move_name(Var{Player::Control, t.round}, t.move); }
    j["next"] = to_json(*t.next, arena);
    break;
  case TreeNode::Kind::Branch: {
    j["branch"] = "w" + std::to_string(t.round);
    auto segs = nlohmann::ordered_json::array();
    for (const auto & s : t.segments) {
      nlohmann::ordered_json seg;
      if (s.move >= 0) {
        seg["move"] = arena.move_name(Var{Player::Disturbance, t.round}, s.move);
      } else {
        seg["lo"] = vec_json(s.box.lo);
        seg["hi"] = vec_json(s.box.hi);
      }
      seg["then"] = to_json(*s.child, arena);
      segs.push_back(std::move(seg));
    }
    j["segments"] = std::move(segs);
    break;
  }
  }
  return j;
}

}  // namespace

std::string tree_to_json(const TreeNode & t, const Arena & arena, int indent)
{
  return to_json(t, arena).dump(indent);
}

std::string tree_to_dot(const TreeNode & t, const Arena & arena)
{
  std::ostringstream out;
  out << "digraph tree {\n  node [fontname=\"monospace\"];\n";
  int next_id = 0;
  std::function<int(const TreeNode &)> emit = [&](const TreeNode & n) {
    const int id = next_id++;
    switch (n.kind) {
    case TreeNode::Kind::Leaf: out << "  n" << id << " [shape=point];\n"; break;
    case TreeNode::Kind::Assign: {
      std::string label = "u" + std::to_string(n.round) + " := ";
      label += n.move >= 0 ? arena.move_name(Var{Player::Control, n.round}, n.move) : vec_text(n.value);
      out << "  n" << id << " [shape=box, label=\"" << label << "\"];\n";
      const int c = emit(*n.next);
      out << "  n" << id << " -> n" << c << ";\n";
      break;
    }
    case TreeNode::Kind::Branch: {
      out << "  n" << id << " [shape=diamond, label=\"w" << n.round << "\"];\n";
      for (const auto & s : n.segments) {
        const int c = emit(*s.child);
        const std::string label =
          s.move >= 0 ? arena.move_name(Var{Player::Disturbance, n.round}, s.move) : box_text(s.box);
        out << "  n" << id << " -> n" << c << " [label=\"" << label << "\"];\n";
      }
      break;
    }
    }
    return id;
  };
  emit(t);
  out << "}\n";
  return out.str();
}

}  // namespace reactsynth
