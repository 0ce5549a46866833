#ifndef REACTSYNTH_GAME_STRING_HPP_
#define REACTSYNTH_GAME_STRING_HPP_

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reactsynth {

/// A quantified variable: E u_k (system) or A w_k (environment), k = 1..H.
struct GameToken
{
  enum class Quant { Exists, ForAll };
  Quant quant;
  int round;

  bool exists() const { return quant == Quant::Exists; }
  bool operator==(const GameToken & o) const { return quant == o.quant && round == o.round; }
};

/**
 * An interleaving of E u_1 .. E u_H with A w_1 .. A w_H that keeps each
 * player's variables in round order.
 */
class GameString
{
public:
  GameString() = default;
  /// Throws DomainError unless the tokens form an order-preserving interleaving.
  explicit GameString(std::vector<GameToken> tokens);

  /// E u_1, A w_1 .. A w_H, E u_2 .. E u_H.
  static GameString initial(int H);
  /// E u_1 .. E u_H, A w_1 .. A w_H.
  static GameString dominant(int H);
  /// E u_1 A w_1 .. E u_H A w_H.
  static GameString alternating(int H);

  const std::vector<GameToken> & tokens() const { return tokens_; }
  int horizon() const { return static_cast<int>(tokens_.size() / 2); }
  /// 0-based index of E u_k or A w_k.
  std::size_t position(GameToken::Quant q, int k) const;

  bool operator==(const GameString & o) const { return tokens_ == o.tokens_; }

private:
  std::vector<GameToken> tokens_;
};

/// Text form "Eu1 Aw1 Aw2 Eu2"; whitespace between tokens is optional.
GameString parse_game_string(std::string_view text);
std::string to_string(const GameString & q);

/// Every E u_k precedes A w_k.
bool is_causal(const GameString & q);

/// Moves E u_{k+1} to just after E u_k. Throws DomainError unless 1 <= k < H.
GameString extend(const GameString & q, int k);

/// Moves each A w_j with j <= k-1 found after E u_k to just before it, keeping their order.
GameString reveal(const GameString & q, int k);

/// A node of the game transition system: a game with its decision index, or a terminal.
struct GameNode
{
  enum class Kind { Game, Bottom, Causal };
  Kind kind = Kind::Game;
  int decision = 1;
  GameString game;

  static GameNode initial(int H) { return GameNode{Kind::Game, 1, GameString::initial(H)}; }
  static GameNode bottom() { return GameNode{Kind::Bottom, 0, {}}; }
  static GameNode causal() { return GameNode{Kind::Causal, 0, {}}; }
  bool terminal() const { return kind != Kind::Game; }
  bool operator==(const GameNode & o) const
  {
    return kind == o.kind && decision == o.decision && game == o.game;
  }
};

std::string to_string(const GameNode & a);

/// Number of E tokens from E u_k to the end, minus one; 0 at terminals.
int alpha(const GameNode & a);

enum class Edge { PathToCont, PathToBot, UpdateDom, UpdateReact };

std::string to_string(Edge e);

/// Which rule fires at (a, label). Throws DomainError at terminals or when no rule applies.
Edge edge_rule(const GameNode & a, bool label);

/**
 * Successor of `a` under `label`:
 * true and causal -> Causal; true otherwise -> (k+1, extend(q, k));
 * false when reveal changes nothing -> Bottom; false otherwise -> (k, reveal(q, k)).
 */
GameNode next_node(const GameNode & a, bool label);

struct WalkStep
{
  GameNode node;
  bool label = false;
  Edge edge = Edge::PathToBot;
};

/// A walk through the transition system from the initial node to a terminal.
struct Walk
{
  int horizon = 0;
  std::vector<WalkStep> steps;
  GameNode end;
};

/// Walks from the initial node, asking `label` at every non-terminal node.
Walk walk(int H, const std::function<bool(const GameNode &)> & label);

/**
 * At most 2H transitions, alpha never increases, and two consecutive false
 * labels occur only on the final edge into Bottom.
 */
bool traversal_length_check(const Walk & w);

}  // namespace reactsynth

#endif  // REACTSYNTH_GAME_STRING_HPP_
