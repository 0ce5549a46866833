#include "reactsynth/problem.hpp"

#include "reactsynth/error.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace reactsynth {

namespace {

using json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) { throw DomainError("cannot open " + path.string()); }
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const json & field(const json & j, const char * key)
{
  if (!j.is_object() || !j.contains(key)) { throw DomainError(std::string("missing field '") + key + "'"); }
  return j.at(key);
}

double number(const json & j, const std::string & what)
{
  if (!j.is_number()) { throw DomainError(what + " must be a number"); }
  return j.get<double>();
}

Eigen::VectorXd vector_of(const json & j, const std::string & what)
{
  if (!j.is_array()) { throw DomainError(what + " must be an array of numbers"); }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) { v(static_cast<Eigen::Index>(i)) = number(j[i], what); }
  return v;
}

Eigen::MatrixXd matrix_of(const json & j, const std::string & what, Eigen::Index rows_if_empty)
{
  if (!j.is_array()) { throw DomainError(what + " must be an array of rows"); }
  if (j.empty()) { return Eigen::MatrixXd(rows_if_empty, 0); }
  const auto cols = j[0].is_array() ? j[0].size() : 0;
  Eigen::MatrixXd M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto row = vector_of(j[r], what);
    if (static_cast<std::size_t>(row.size()) != cols) { throw DimensionError(what + " has rows of different lengths"); }
    M.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return M;
}

Box box_of(const json & j, const std::string & what)
{
  if (!j.is_array()) { throw DomainError(what + " must be a list of [lo, hi] intervals"); }
  Eigen::VectorXd lo(static_cast<Eigen::Index>(j.size())), hi(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto iv = vector_of(j[i], what);
    if (iv.size() != 2) { throw DomainError(what + " intervals must have two ends"); }
    lo(static_cast<Eigen::Index>(i)) = iv(0);
    hi(static_cast<Eigen::Index>(i)) = iv(1);
  }
  return Box(lo, hi);
}

std::vector<Move> moves_of(const json & j, const std::string & what)
{
  if (!j.is_array()) { throw DomainError(what + " must be a list of moves"); }
  std::vector<Move> out;
  for (const auto & m : j) {
    const auto & name = field(m, "name");
    if (!name.is_string()) { throw DomainError(what + " names must be strings"); }
    out.push_back(Move{name.get<std::string>(), vector_of(field(m, "value"), what)});
  }
  return out;
}

// Line and column of a byte offset, both 1-based.
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t offset)
{
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

FiniteGame ProblemSpec::finite_game() const
{
  if (!finite()) { throw DomainError("problem has no move lists"); }
  FiniteGame g{system, *u_moves, *w_moves};
  g.validate();
  return g;
}

CegisConfig ProblemSpec::cegis_config() const
{
  CegisConfig c;
  c.epsilon = epsilon;
  c.lipschitz_u = lipschitz_u;
  c.lipschitz_w = lipschitz_w;
  c.oracle = oracle;
  c.precision = precision;
  c.seed = seed;
  if (max_iters) { c.max_iters = *max_iters; }
  return c;
}

Arena ProblemSpec::arena() const
{
  return finite() ? Arena(finite_game(), formula) : Arena(system, formula);
}

void ProblemSpec::validate() const
{
  if (!(epsilon > 0)) { throw DomainError("epsilon must be positive"); }
  if (precision && !(*precision > 0)) { throw DomainError("oracle precision must be positive"); }
  for (const auto & L : {lipschitz_u, lipschitz_w}) {
    if (L && !(*L >= 0)) { throw DomainError("Lipschitz overrides must be non-negative"); }
  }
  system.validate();
  if (u_moves.has_value() != w_moves.has_value()) { throw DomainError("give both u_moves and w_moves or neither"); }
  if (finite()) { finite_game(); }
  if (horizon(formula) > system.horizon) { throw TraceTooShort("formula horizon exceeds the system horizon"); }
  if (signal_dimension(formula) > system.state_dim()) {
    throw DimensionError("formula references states beyond the system dimension");
  }
}

ProblemSpec parse_problem(std::string_view text)
{
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error & e) {
    const auto [line, col] = locate(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("malformed JSON", line, col);
  }
  if (!j.is_object()) { throw DomainError("spec must be a JSON object"); }

  ProblemSpec p;
  if (j.contains("name")) { p.name = j.at("name").get<std::string>(); }
  const auto & s = field(j, "system");
  p.system.A = matrix_of(field(s, "A"), "A", 0);
  const Eigen::Index n = p.system.A.rows();
  p.system.B = matrix_of(field(s, "B"), "B", n);
  p.system.C = matrix_of(field(s, "C"), "C", n);
  p.system.x0 = vector_of(field(s, "x0"), "x0");
  const auto & H = field(s, "horizon");
  if (!H.is_number_integer()) { throw DomainError("horizon must be an integer"); }
  p.system.horizon = H.get<int>();
  p.system.u_box = box_of(field(s, "u_box"), "u_box");
  p.system.w_box = box_of(field(s, "w_box"), "w_box");

  if (j.contains("u_moves")) { p.u_moves = moves_of(j.at("u_moves"), "u_moves"); }
  if (j.contains("w_moves")) { p.w_moves = moves_of(j.at("w_moves"), "w_moves"); }

  if (j.contains("definitions")) {
    const auto & defs = j.at("definitions");
    if (!defs.is_object()) { throw DomainError("definitions must be an object"); }
    for (const auto & [key, value] : defs.items()) {
      if (!value.is_string()) { throw DomainError("definition '" + key + "' must be formula text"); }
      p.definitions[key] = parse_formula(value.get<std::string>(), p.definitions);
    }
  }
  const auto & f = field(j, "formula");
  if (!f.is_string()) { throw DomainError("formula must be text"); }
  p.formula_text = f.get<std::string>();
  p.formula = parse_formula(p.formula_text, p.definitions);

  if (j.contains("epsilon")) { p.epsilon = number(j.at("epsilon"), "epsilon"); }
  if (j.contains("lipschitz")) {
    const auto & L = j.at("lipschitz");
    if (L.contains("u")) { p.lipschitz_u = number(L.at("u"), "lipschitz.u"); }
    if (L.contains("w")) { p.lipschitz_w = number(L.at("w"), "lipschitz.w"); }
  }
  if (j.contains("oracle")) {
    const auto & o = j.at("oracle");
    if (o.contains("mode")) {
      const auto mode = o.at("mode").get<std::string>();
      if (mode == "satisfy") {
        p.oracle = OracleMode::Satisfy;
      } else if (mode == "maximize") {
        p.oracle = OracleMode::Maximize;
      } else {
        throw DomainError("oracle mode must be satisfy or maximize");
      }
    }
    if (o.contains("precision")) { p.precision = number(o.at("precision"), "oracle.precision"); }
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) { throw DomainError("seed must be a non-negative integer"); }
    p.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("max_iters")) {
    if (!j.at("max_iters").is_number_unsigned()) { throw DomainError("max_iters must be a non-negative integer"); }
    p.max_iters = j.at("max_iters").get<std::size_t>();
  }
  p.validate();
  return p;
}

ProblemSpec load_problem(const std::filesystem::path & path)
{
  return parse_problem(read_file(path));
}

Trace parse_trace_csv(std::string_view text)
{
  Trace rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') { line.remove_suffix(1); }
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (end == text.size()) { break; }
      continue;
    }
    std::vector<double> values;
    bool ok = true;
    std::size_t col = 0, bad_col = 1;
    while (col <= line.size()) {
      const std::size_t comma = std::min(line.find(',', col), line.size());
      std::string_view cell = line.substr(col, comma - col);
      while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) { cell.remove_prefix(1); }
      while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) { cell.remove_suffix(1); }
      double v = 0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        ok = false;
        bad_col = col + 1;
        break;
      }
      values.push_back(v);
      col = comma + 1;
    }
    if (!ok) {
      if (rows.empty() && line_no == 1) { continue; }
      throw ParseError("malformed number in trace", line_no, bad_col);
    }
    if (!rows.empty() && static_cast<std::size_t>(rows.front().size()) != values.size()) {
      throw DimensionError("trace row " + std::to_string(line_no) + " has a different number of columns");
    }
    rows.push_back(Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
    if (end == text.size()) { break; }
  }
  if (rows.empty()) { throw ParseError("trace has no rows", line_no, 1); }
  return rows;
}

Trace load_trace_csv(const std::filesystem::path & path)
{
  return parse_trace_csv(read_file(path));
}

}  // namespace reactsynth
