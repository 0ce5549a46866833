#include "reactsynth/game_string.hpp"

#include "reactsynth/error.hpp"

#include <algorithm>
#include <cctype>

namespace reactsynth {

namespace {

constexpr auto E = GameToken::Quant::Exists;
constexpr auto A = GameToken::Quant::ForAll;

}  // namespace

GameString::GameString(std::vector<GameToken> tokens) : tokens_(std::move(tokens))
{
  if (tokens_.empty() || tokens_.size() % 2 != 0) { throw DomainError("game string needs one u and one w per round"); }
  int next_u = 1, next_w = 1;
  for (const auto & t : tokens_) {
    int & next = t.exists() ? next_u : next_w;
    if (t.round != next) { throw DomainError("game string is not an order-preserving interleaving"); }
    ++next;
  }
  if (next_u != next_w) { throw DomainError("game string needs one u and one w per round"); }
}

GameString GameString::initial(int H)
{
  if (H < 1) { throw DomainError("horizon must be at least 1"); }
  std::vector<GameToken> t{{E, 1}};
  for (int k = 1; k <= H; ++k) { t.push_back({A, k}); }
  for (int k = 2; k <= H; ++k) { t.push_back({E, k}); }
  return GameString(std::move(t));
}

GameString GameString::dominant(int H)
{
  if (H < 1) { throw DomainError("horizon must be at least 1"); }
  std::vector<GameToken> t;
  for (int k = 1; k <= H; ++k) { t.push_back({E, k}); }
  for (int k = 1; k <= H; ++k) { t.push_back({A, k}); }
  return GameString(std::move(t));
}

GameString GameString::alternating(int H)
{
  if (H < 1) { throw DomainError("horizon must be at least 1"); }
  std::vector<GameToken> t;
  for (int k = 1; k <= H; ++k) {
    t.push_back({E, k});
    t.push_back({A, k});
  }
  return GameString(std::move(t));
}

std::size_t GameString::position(GameToken::Quant q, int k) const
{
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].quant == q && tokens_[i].round == k) { return i; }
  }
  throw DomainError("variable " + std::string(q == E ? "u" : "w") + std::to_string(k) + " is not in the game");
}

GameString parse_game_string(std::string_view text)
{
  std::vector<GameToken> t;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == '_')) { ++i; }
  };
  while (true) {
    skip();
    if (i >= text.size()) { break; }
    const char q = text[i++];
    skip();
    if (i >= text.size()) { throw DomainError("truncated game string"); }
    const char v = text[i++];
    skip();
    std::size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) { ++j; }
    if (j == i) { throw DomainError("expected a round number in game string"); }
    const int k = std::stoi(std::string(text.substr(i, j - i)));
    i = j;
    if (q == 'E' && v == 'u') {
      t.push_back({E, k});
    } else if (q == 'A' && v == 'w') {
      t.push_back({A, k});
    } else {
      throw DomainError(std::string("unexpected game token '") + q + v + "'");
    }
  }
  return GameString(std::move(t));
}

std::string to_string(const GameString & q)
{
  std::string s;
  for (const auto & t : q.tokens()) {
    if (!s.empty()) { s += ' '; }
    s += t.exists() ? "Eu" : "Aw";
    s += std::to_string(t.round);
  }
  return s;
}

bool is_causal(const GameString & q)
{
  for (int k = 1; k <= q.horizon(); ++k) {
    if (q.position(E, k) > q.position(A, k)) { return false; }
  }
  return true;
}

GameString extend(const GameString & q, int k)
{
  if (k < 1 || k >= q.horizon()) { throw DomainError("extend needs 1 <= k < H"); }
  auto t = q.tokens();
  const auto from = static_cast<std::ptrdiff_t>(q.position(E, k + 1));
  const auto to = static_cast<std::ptrdiff_t>(q.position(E, k)) + 1;
  std::rotate(t.begin() + to, t.begin() + from, t.begin() + from + 1);
  return GameString(std::move(t));
}

GameString reveal(const GameString & q, int k)
{
  const std::size_t pu = q.position(E, k);
  std::vector<GameToken> before, moved, after;
  for (std::size_t i = 0; i < q.tokens().size(); ++i) {
    const auto & t = q.tokens()[i];
    if (i < pu) {
      before.push_back(t);
    } else if (!t.exists() && t.round <= k - 1 && i > pu) {
      moved.push_back(t);
    } else {
      after.push_back(t);
    }
  }
  before.insert(before.end(), moved.begin(), moved.end());
  before.insert(before.end(), after.begin(), after.end());
  return GameString(std::move(before));
}

std::string to_string(const GameNode & a)
{
  switch (a.kind) {
  case GameNode::Kind::Bottom: return "BOTTOM";
  case GameNode::Kind::Causal: return "CAUSAL";
  case GameNode::Kind::Game: break;
  }
  return "(u" + std::to_string(a.decision) + ", " + to_string(a.game) + ")";
}

int alpha(const GameNode & a)
{
  if (a.terminal()) { return 0; }
  const auto & t = a.game.tokens();
  const auto start = a.game.position(E, a.decision);
  const auto n = std::count_if(t.begin() + static_cast<std::ptrdiff_t>(start), t.end(),
                               [](const GameToken & x) { return x.exists(); });
  return static_cast<int>(n) - 1;
}

std::string to_string(Edge e)
{
  switch (e) {
  case Edge::PathToCont: return "PathToCont";
  case Edge::PathToBot: return "PathToBot";
  case Edge::UpdateDom: return "UpdateDom";
  case Edge::UpdateReact: return "UpdateReact";
  }
  return "?";
}

Edge edge_rule(const GameNode & a, bool label)
{
  if (a.terminal()) { throw DomainError("terminal nodes have no successors"); }
  if (label) {
    if (is_causal(a.game)) { return Edge::PathToCont; }
    if (a.decision < a.game.horizon()) { return Edge::UpdateDom; }
    throw DomainError("no edge rule applies to " + to_string(a) + " with label true");
  }
  return reveal(a.game, a.decision) == a.game ? Edge::PathToBot : Edge::UpdateReact;
}

GameNode next_node(const GameNode & a, bool label)
{
  switch (edge_rule(a, label)) {
  case Edge::PathToCont: return GameNode::causal();
  case Edge::PathToBot: return GameNode::bottom();
  case Edge::UpdateDom: return GameNode{GameNode::Kind::Game, a.decision + 1, extend(a.game, a.decision)};
  case Edge::UpdateReact: return GameNode{GameNode::Kind::Game, a.decision, reveal(a.game, a.decision)};
  }
  return GameNode::bottom();
}

Walk walk(int H, const std::function<bool(const GameNode &)> & label)
{
  Walk w;
  w.horizon = H;
  GameNode a = GameNode::initial(H);
  while (!a.terminal()) {
    const bool l = label(a);
    w.steps.push_back(WalkStep{a, l, edge_rule(a, l)});
    a = next_node(a, l);
  }
  w.end = a;
  return w;
}

bool traversal_length_check(const Walk & w)
{
  if (w.steps.size() > static_cast<std::size_t>(2 * w.horizon)) { return false; }
  for (std::size_t i = 0; i + 1 < w.steps.size(); ++i) {
    if (alpha(w.steps[i + 1].node) > alpha(w.steps[i].node)) { return false; }
    if (!w.steps[i].label && !w.steps[i + 1].label) {
      const bool last = i + 2 == w.steps.size();
      if (!last || w.end.kind != GameNode::Kind::Bottom) { return false; }
    }
  }
  if (!w.steps.empty() && alpha(w.end) > alpha(w.steps.back().node)) { return false; }
  return true;
}

}  // namespace reactsynth
