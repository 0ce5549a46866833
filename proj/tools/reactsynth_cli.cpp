// reactsynth command-line front end.
//
// Exit codes: 0 synthesized / satisfied / true, 1 none / violated / false,
// 2 invalid input, 3 budget exhausted.

#include "reactsynth/cegis.hpp"
#include "reactsynth/decision_tree.hpp"
#include "reactsynth/error.hpp"
#include "reactsynth/game_eval.hpp"
#include "reactsynth/game_string.hpp"
#include "reactsynth/problem.hpp"
#include "reactsynth/robustness.hpp"
#include "reactsynth/smtlib.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace reactsynth;

namespace {

enum Exit { kOk = 0, kNegative = 1, kInvalid = 2, kBudget = 3 };

struct Overrides
{
  std::optional<double> epsilon;
  std::optional<int> horizon;
  std::optional<std::string> oracle;
  std::optional<double> precision;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_iters;
  int jobs = 1;
  std::string out = ".";
};

ProblemSpec load(const std::string & path, const Overrides & o)
{
  ProblemSpec p = load_problem(path);
  if (o.epsilon) { p.epsilon = *o.epsilon; }
  if (o.horizon) { p.system.horizon = *o.horizon; }
  if (o.oracle) { p.oracle = *o.oracle == "maximize" ? OracleMode::Maximize : OracleMode::Satisfy; }
  if (o.precision) { p.precision = *o.precision; }
  if (o.seed) { p.seed = *o.seed; }
  if (o.max_iters) { p.max_iters = *o.max_iters; }
  p.validate();
  return p;
}

json vec(const Eigen::VectorXd & v)
{
  auto a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) { a.push_back(v(i)); }
  return a;
}

json rounds(const Eigen::VectorXd & flat, int H)
{
  auto a = json::array();
  for (const auto & r : unflatten(flat, H)) { a.push_back(vec(r)); }
  return a;
}

void write(const fs::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) { throw DomainError("cannot write " + path.string()); }
  out << text;
}

fs::path out_dir(const Overrides & o)
{
  fs::path dir(o.out);
  fs::create_directories(dir);
  return dir;
}

int run_monitor(const std::string & spec_path, const std::string & trace_path, const std::vector<int> & times)
{
  const ProblemSpec p = load_problem(spec_path);
  const Trace trace = load_trace_csv(trace_path);
  if (trace.front().size() < signal_dimension(p.formula)) {
    throw DimensionError("trace has fewer columns than the formula needs");
  }
  bool all = true;
  for (int t : times) {
    const double r = robustness(p.formula, trace, t);
    const bool sat = r > 0;
    all = all && sat;
    std::cout << "t=" << t << " rho=" << json(r).dump() << " " << (sat ? "sat" : "unsat") << "\n";
  }
  return all ? kOk : kNegative;
}

int dominant(const ProblemSpec & p, bool env, const Overrides & o)
{
  const CegisConfig cfg = p.cegis_config();
  CegisOutcome out;
  if (p.finite()) {
    out = env ? naive_cegis_env(p.finite_game(), p.formula, cfg) : naive_cegis(p.finite_game(), p.formula, cfg);
  } else {
    out = env ? dominant_env(p.system, p.formula, cfg) : modified_cegis(p.system, p.formula, cfg);
  }
  const int H = p.system.horizon;
  const auto dir = out_dir(o);

  json j;
  j["problem"] = p.name;
  j["mode"] = env ? "dominant-env" : "dominant";
  j["status"] = to_string(out.status);
  j["epsilon"] = p.epsilon;
  j["iterations"] = out.iterations;
  j["oracle_calls"] = out.oracle_calls;
  j["lipschitz"] = {{"sys", out.lipschitz_sys}, {"env", out.lipschitz_env}};
  if (out.status == CegisStatus::Dominant) {
    j["witness"] = out.witness_moves.empty() ? rounds(out.witness, H) : json(nullptr);
    if (!out.witness_moves.empty()) {
      const auto & moves = env ? p.w_moves : p.u_moves;
      auto names = json::array();
      for (int m : out.witness_moves) { names.push_back((*moves)[static_cast<std::size_t>(m)].name); }
      j["witness_moves"] = names;
    }
    j["witness_robustness"] = out.witness_robustness;
  }
  j["counterexamples"] = json::array();
  for (const auto & c : out.counterexamples) { j["counterexamples"].push_back(rounds(c, H)); }
  if (!p.finite()) {
    const auto m = out.remaining.remaining_measure_bounds(std::min<int>(24, 12 * static_cast<int>(out.remaining.dim())));
    j["remaining_measure"] = {m.first, m.second};
  }
  j["removals"] = out.removals.size();
  j["message"] = out.message;
  write(dir / "outcome.json", j.dump(2) + "\n");

  std::string it;
  for (const auto & r : out.log) {
    json l;
    l["iteration"] = r.iteration;
    l["candidate"] = rounds(r.candidate, H);
    l["candidate_robustness"] = r.candidate_robustness;
    l["counterexample"] = r.counterexample ? rounds(*r.counterexample, H) : json(nullptr);
    l["counterexample_robustness"] = r.counterexample_robustness;
    l["refuting"] = r.refuting;
    l["squares_removed"] = r.squares_removed;
    l["measure"] = {r.measure.first, r.measure.second};
    it += l.dump() + "\n";
  }
  write(dir / "iterations.jsonl", it);

  std::string rm;
  for (const auto & r : out.removals) {
    json l;
    l["iteration"] = r.iteration;
    l["center"] = vec(r.center);
    l["radius"] = r.radius;
    l["counterexample"] = vec(r.counterexample);
    l["robustness"] = r.robustness;
    l["closing"] = r.closing;
    rm += l.dump() + "\n";
  }
  write(dir / "removals.jsonl", rm);

  std::cout << to_string(out.status) << " after " << out.iterations << " iterations, " << out.oracle_calls
            << " oracle calls\n";
  switch (out.status) {
  case CegisStatus::Dominant: return kOk;
  case CegisStatus::NoDominant: return kNegative;
  case CegisStatus::BudgetExhausted: return kBudget;
  }
  return kInvalid;
}

GameConfig game_config(const ProblemSpec & p, const Overrides & o)
{
  GameConfig g;
  g.epsilon = p.epsilon;
  g.jobs = o.jobs;
  g.cegis = p.cegis_config();
  return g;
}

std::string walks_dot(const TreeResult & r)
{
  std::map<std::string, int> ids;
  std::vector<std::pair<std::string, std::string>> nodes;
  std::map<std::string, std::string> edges;
  auto id = [&](const GameNode & n) {
    const std::string key = to_string(n);
    auto [pos, fresh] = ids.emplace(key, static_cast<int>(ids.size()));
    if (fresh) { nodes.emplace_back("d" + std::to_string(pos->second), key); }
    return "d" + std::to_string(pos->second);
  };
  for (const auto & w : r.walks) {
    for (std::size_t i = 0; i < w.steps.size(); ++i) {
      const auto & s = w.steps[i];
      const auto from = id(s.node);
      const auto to = id(i + 1 < w.steps.size() ? w.steps[i + 1].node : w.end);
      edges[from + " -> " + to] = std::string(s.label ? "True" : "False") + ", " + to_string(s.edge);
    }
  }
  std::string dot = "digraph walks {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (const auto & [name, label] : nodes) { dot += "  " + name + " [label=\"" + label + "\"];\n"; }
  for (const auto & [e, label] : edges) { dot += "  " + e + " [label=\"" + label + "\"];\n"; }
  return dot + "}\n";
}

int reactive_tree(const ProblemSpec & p, const Overrides & o)
{
  const Arena arena = p.arena();
  TreeConfig cfg;
  cfg.game = game_config(p, o);
  const TreeResult r = build_decision_tree(arena, cfg);
  const auto dir = out_dir(o);

  std::string log;
  for (const auto & rec : r.log) {
    json l;
    l["walk"] = rec.walk;
    l["step"] = rec.step;
    l["branch"] = rec.branch;
    l["decision"] = rec.step_info.node.decision;
    l["game"] = to_string(rec.step_info.node.game);
    l["label"] = rec.step_info.label;
    l["edge"] = to_string(rec.step_info.edge);
    l["alpha"] = rec.alpha;
    l["evaluation_steps"] = rec.stats.steps;
    l["oracle_calls"] = rec.stats.oracle_calls;
    log += l.dump() + "\n";
  }
  write(dir / "dwalk.jsonl", log);
  write(dir / "dwalk.dot", walks_dot(r));

  json j;
  j["problem"] = p.name;
  j["mode"] = "reactive-tree";
  j["status"] = to_string(r.status);
  j["epsilon"] = p.epsilon;
  j["walks"] = r.walks.size();
  bool ok = true;
  for (const auto & w : r.walks) { ok = ok && traversal_length_check(w); }
  j["walks_well_formed"] = ok;
  if (r.root) {
    const auto v = verify_tree(*r.root, arena, p.epsilon);
    j["leaves_before_merge"] = r.leaves_before_merge;
    j["leaves"] = count_leaves(*r.root);
    j["nodes"] = count_nodes(*r.root);
    j["verified"] = v.ok;
    j["verify_points"] = v.points;
    j["verify_min_robustness"] = v.min_robustness;
    j["verify_message"] = v.message;
    j["tree"] = json::parse(tree_to_json(*r.root, arena));
    write(dir / "tree.json", tree_to_json(*r.root, arena) + "\n");
    write(dir / "tree.dot", tree_to_dot(*r.root, arena));
  }
  j["message"] = r.message;
  write(dir / "outcome.json", j.dump(2) + "\n");

  std::cout << to_string(r.status);
  if (r.root) { std::cout << " with " << count_leaves(*r.root) << " leaves"; }
  if (!r.message.empty()) { std::cout << " (" << r.message << ")"; }
  std::cout << "\n";
  switch (r.status) {
  case TreeStatus::Success: return kOk;
  case TreeStatus::NoStrategy: return kNegative;
  case TreeStatus::BudgetExhausted: return kBudget;
  }
  return kInvalid;
}

json witness_json(const Witness & w, const Arena & arena)
{
  json j;
  switch (w.kind) {
  case Witness::Kind::Win: j["win"] = true; break;
  case Witness::Kind::Commit: {
    auto c = json::array();
    for (std::size_t i = 0; i < w.vars.size(); ++i) {
      json v;
      v["var"] = to_string(w.vars[i]);
      v["value"] = vec(w.values[i]);
      if (w.moves[i] >= 0) { v["move"] = arena.move_name(w.vars[i], w.moves[i]); }
      c.push_back(v);
    }
    j["commit"] = c;
    j["next"] = witness_json(*w.next, arena);
    break;
  }
  case Witness::Kind::Split: {
    j["split"] = to_string(w.split);
    auto cells = json::array();
    for (const auto & cell : w.cells) {
      json c;
      if (cell.move >= 0) {
        c["move"] = arena.move_name(w.split, cell.move);
      } else {
        c["lo"] = vec(cell.box.lo);
        c["hi"] = vec(cell.box.hi);
      }
      c["then"] = witness_json(*cell.child, arena);
      cells.push_back(c);
    }
    j["cells"] = cells;
    break;
  }
  }
  return j;
}

int eval_game(const ProblemSpec & p, const std::string & game, const Overrides & o)
{
  const Arena arena = p.arena();
  const GameString q = parse_game_string(game);
  const GameResult r = evaluate_game(q, arena, arena.initial_context(), game_config(p, o));
  json j;
  j["problem"] = p.name;
  j["mode"] = "eval-game";
  j["game"] = to_string(q);
  j["causal"] = is_causal(q);
  j["value"] = r.value;
  j["evaluation_steps"] = r.stats.steps;
  j["oracle_calls"] = r.stats.oracle_calls;
  if (r.witness) { j["witness"] = witness_json(*r.witness, arena); }
  write(out_dir(o) / "outcome.json", j.dump(2) + "\n");
  std::cout << to_string(q) << " is " << (r.value ? "true" : "false") << "\n";
  return r.value ? kOk : kNegative;
}

int run_synth(const std::string & spec_path, const std::string & mode, const std::string & game, const Overrides & o)
{
  const ProblemSpec p = load(spec_path, o);
  if (mode == "dominant") { return dominant(p, false, o); }
  if (mode == "dominant-env") { return dominant(p, true, o); }
  if (mode == "reactive-tree") { return reactive_tree(p, o); }
  if (game.empty()) { throw DomainError("eval-game needs --game"); }
  return eval_game(p, game, o);
}

int run_export(const std::string & spec_path, const std::string & fixed_path, const std::string & player, bool negate,
               const std::string & output, const Overrides & o)
{
  const ProblemSpec p = load(spec_path, o);
  Query q;
  q.sys = p.system;
  q.formula = p.formula;
  q.free_player = player == "w" ? Player::Disturbance : Player::Control;
  q.fixed_opponent = load_trace_csv(fixed_path);
  q.negate = negate;
  const std::string text = export_smtlib(q);
  if (output.empty()) {
    std::cout << text;
  } else {
    write(output, text);
  }
  return kOk;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Dominant and reactive controller synthesis for bounded temporal logic specifications"};
  app.require_subcommand(1);
  Overrides o;
  auto common = [&](CLI::App * cmd) {
    cmd->add_option("--epsilon", o.epsilon, "Robustness granularity")->check(CLI::PositiveNumber);
    cmd->add_option("--horizon", o.horizon, "Number of rounds")->check(CLI::PositiveNumber);
    cmd->add_option("--oracle", o.oracle, "Oracle mode")->check(CLI::IsMember({"satisfy", "maximize"}));
    cmd->add_option("--precision", o.precision, "Branch-and-bound precision")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Seed for the first counterexample");
    cmd->add_option("--max-iters", o.max_iters, "Iteration budget");
    cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "Output directory");
  };

  std::string spec, trace, mode = "dominant", game, fixed, player = "u", output;
  std::vector<int> times{0};
  bool negate = false;

  auto * monitor = app.add_subcommand("monitor", "Robustness of a trace");
  monitor->add_option("spec", spec, "Spec JSON")->required();
  monitor->add_option("trace", trace, "Trace CSV, one row per time step")->required();
  monitor->add_option("-t,--time", times, "Time steps to evaluate")->delimiter(',');

  auto * synth = app.add_subcommand("synth", "Synthesize a controller or evaluate a game");
  synth->add_option("spec", spec, "Spec JSON")->required();
  synth->add_option("--mode", mode, "What to synthesize")
    ->check(CLI::IsMember({"dominant", "dominant-env", "reactive-tree", "eval-game"}));
  synth->add_option("--game", game, "Game string for eval-game, e.g. \"Eu1 Aw1 Aw2 Eu2\"");
  common(synth);

  auto * smt = app.add_subcommand("export-smt", "SMT-LIB2 encoding of one oracle query");
  smt->add_option("spec", spec, "Spec JSON")->required();
  smt->add_option("fixed", fixed, "CSV with the opponent's value per round")->required();
  smt->add_option("--player", player, "Free player")->check(CLI::IsMember({"u", "w"}));
  smt->add_flag("--negate", negate, "Search for a violation");
  smt->add_option("-o,--output", output, "Output file instead of stdout");
  common(smt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*monitor) { return run_monitor(spec, trace, times); }
    if (*synth) { return run_synth(spec, mode, game, o); }
    return run_export(spec, fixed, player, negate, output, o);
  } catch (const BudgetExhausted & e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
}
