#ifndef REACTSYNTH_PROBLEM_HPP_
#define REACTSYNTH_PROBLEM_HPP_

#include "reactsynth/arena.hpp"
#include "reactsynth/cegis.hpp"
#include "reactsynth/dynamics.hpp"
#include "reactsynth/formula.hpp"
#include "reactsynth/parser.hpp"
#include "reactsynth/robustness.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace reactsynth {

/**
 * A synthesis problem as read from a spec file. The JSON schema:
 *
 *   name         string, optional
 *   system       { A, B, C: row-major matrices; x0: vector; horizon: int;
 *                  u_box, w_box: one [lo, hi] interval per input coordinate }
 *   u_moves,     optional lists of { name, value } making the game finite;
 *   w_moves      both or neither
 *   definitions  optional object of named formulas, each may use earlier ones
 *   formula      formula text
 *   epsilon      positive number, default 0.1
 *   lipschitz    optional { u, w } overrides
 *   oracle       optional { mode: "satisfy" | "maximize", precision }
 *   seed         optional integer
 *   max_iters    optional integer
 */
struct ProblemSpec
{
  std::string name;
  LinearSystem system;
  std::optional<std::vector<Move>> u_moves;
  std::optional<std::vector<Move>> w_moves;
  Definitions definitions;
  std::string formula_text;
  Formula formula;
  double epsilon = 0.1;
  std::optional<double> lipschitz_u;
  std::optional<double> lipschitz_w;
  OracleMode oracle = OracleMode::Satisfy;
  std::optional<double> precision;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_iters;

  bool finite() const { return u_moves.has_value(); }
  FiniteGame finite_game() const;
  CegisConfig cegis_config() const;
  Arena arena() const;
  /// Rejects a non-positive epsilon and inconsistent dimensions.
  void validate() const;
};

/// Throws ParseError on malformed JSON or formulas, DomainError or DimensionError on invalid content.
ProblemSpec parse_problem(std::string_view json_text);
ProblemSpec load_problem(const std::filesystem::path & path);

/**
 * One row per time step, comma-separated numbers. A first row that does not
 * parse as numbers is taken as a header. Throws ParseError on malformed rows
 * and DimensionError on ragged rows.
 */
Trace parse_trace_csv(std::string_view text);
Trace load_trace_csv(const std::filesystem::path & path);

}  // namespace reactsynth

#endif  // REACTSYNTH_PROBLEM_HPP_
