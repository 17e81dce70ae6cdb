#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cqbound/bounds.hpp"
#include "cqbound/eof.hpp"
#include "cqbound/errors.hpp"
#include "cqbound/explorer.hpp"
#include "cqbound/states.hpp"
#include "cqbound/version.hpp"

namespace cqbound {

using Json = nlohmann::json;

namespace detail {

inline Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      rows.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
  return rows;
}

inline ComplexMatrix matrix_from_json(const Json& j, std::size_t rows, std::size_t cols) {
  if (!j.is_array() || j.size() != rows * cols)
    throw ParseError("matrix: expected " + std::to_string(rows * cols) + " [re,im] entries");
  ComplexMatrix m(rows, cols);
  for (std::size_t k = 0; k < rows * cols; ++k) {
    const Json& cell = j[k];
    if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() || !cell[1].is_number())
      throw ParseError("matrix: entry " + std::to_string(k) + " is not [re,im]");
    m(k / cols, k % cols) = Complex(cell[0].get<double>(), cell[1].get<double>());
  }
  return m;
}

inline Json vector_to_json(const std::vector<Complex>& v) {
  Json out = Json::array();
  for (const Complex& z : v) out.push_back(Json::array({z.real(), z.imag()}));
  return out;
}

inline const Json& field(const Json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end()) throw ParseError(std::string("missing field \"") + name + "\"");
  return *it;
}

inline std::size_t positive_field(const Json& j, const char* name) {
  const Json& f = field(j, name);
  if (!f.is_number_unsigned() || f.get<std::uint64_t>() == 0)
    throw ParseError(std::string("field \"") + name + "\" must be a positive integer");
  return f.get<std::size_t>();
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline Json to_json(const DensityOperator& rho) {
  return Json{{"kind", "density"}, {"dim", rho.dim}, {"matrix", detail::matrix_to_json(rho.matrix)}};
}

inline Json to_json(const CQState& s) {
  Json conditionals = Json::array();
  for (const auto& c : s.conditionals) conditionals.push_back(detail::matrix_to_json(c));
  return Json{{"kind", "cq"},
              {"alphabet", s.alphabet_size},
              {"dim_b", s.dim_b},
              {"weights", s.weights.weights},
              {"conditionals", std::move(conditionals)}};
}

inline DensityOperator density_from_json(const Json& j,
                                         const Tolerances& tol = default_tolerances()) {
  if (detail::field(j, "kind") != "density") throw ParseError("expected kind \"density\"");
  const std::size_t dim = detail::positive_field(j, "dim");
  return make_density(detail::matrix_from_json(detail::field(j, "matrix"), dim, dim), tol);
}

inline CQState cq_from_json(const Json& j, const Tolerances& tol = default_tolerances()) {
  if (detail::field(j, "kind") != "cq") throw ParseError("expected kind \"cq\"");
  const std::size_t alphabet = detail::positive_field(j, "alphabet");
  const std::size_t dim_b = detail::positive_field(j, "dim_b");
  const Json& jw = detail::field(j, "weights");
  if (!jw.is_array() || jw.size() != alphabet)
    throw ParseError("weights: expected " + std::to_string(alphabet) + " entries");
  std::vector<double> weights;
  weights.reserve(alphabet);
  for (const Json& w : jw) {
    if (!w.is_number()) throw ParseError("weights: non-numeric entry");
    weights.push_back(w.get<double>());
  }
  const Json& jc = detail::field(j, "conditionals");
  if (!jc.is_array() || jc.size() != alphabet)
    throw ParseError("conditionals: expected " + std::to_string(alphabet) + " matrices");
  std::vector<ComplexMatrix> conditionals;
  conditionals.reserve(alphabet);
  for (const Json& c : jc) conditionals.push_back(detail::matrix_from_json(c, dim_b, dim_b));
  return make_cq(std::move(weights), std::move(conditionals), tol);
}

using AnyState = std::variant<DensityOperator, CQState>;

inline AnyState state_from_json(const Json& j, const Tolerances& tol = default_tolerances()) {
  const Json& kind = detail::field(j, "kind");
  if (kind == "density") return density_from_json(j, tol);
  if (kind == "cq") return cq_from_json(j, tol);
  throw ParseError("unknown state kind");
}

inline Json parse_json_text(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed JSON");
  return j;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

inline AnyState load_state(const std::string& path,
                           const Tolerances& tol = default_tolerances()) {
  return state_from_json(parse_json_text(read_text_file(path)), tol);
}

inline Json to_json(const BoundReport& r) {
  return Json{{"lhs", r.lhs},           {"rhs", r.rhs},
              {"epsilon", r.epsilon},   {"epsilon_valid", r.epsilon_valid},
              {"dim", r.dim},           {"satisfied", r.satisfied},
              {"margin", r.margin}};
}

inline Json to_json(const PureDecomposition& dec) {
  Json states = Json::array();
  for (const auto& v : dec.pure_states) states.push_back(detail::vector_to_json(v));
  return Json{{"weights", dec.weights.weights}, {"states", std::move(states)}};
}

inline Json to_json(const TruncationStep& step) {
  return Json{{"level", step.level}, {"report", to_json(step.report)},
              {"entropy_gap", step.entropy_gap}};
}

inline Json to_json(const std::vector<TruncationStep>& steps) {
  Json arr = Json::array();
  for (const auto& s : steps) arr.push_back(to_json(s));
  return Json{{"steps", std::move(arr)}};
}

inline Json to_json(const EofResult& r) {
  return Json{{"value", r.value}, {"converged", r.converged}, {"witness", to_json(r.witness)}};
}

inline Json to_json(const EofCorollaryReport& r) {
  return Json{{"report", to_json(r.report)},
              {"heuristic", r.heuristic},
              {"eof_rho", r.rho_estimate.value},
              {"eof_sigma", r.sigma_estimate.value}};
}

inline Json to_json(const SearchConfig& c) {
  return Json{{"conjecture", conjecture_name(c.conjecture)},
              {"dim1", c.dim1},
              {"dim2", c.dim2},
              {"epsilon_grid", c.epsilon_grid},
              {"trials_per_cell", c.trials_per_cell},
              {"seed", c.seed},
              {"local_refine_steps", c.local_refine_steps},
              {"seed_pairs", c.seed_cq.size() + c.seed_dm.size()}};
}

inline Json to_json(const CellRecord& cell, Conjecture conjecture) {
  Json witness;
  if (cell.trials > 0) {
    if (conjecture == Conjecture::qc) {
      const auto& pair = std::get<CqPair>(cell.witness);
      witness = Json{{"rho", to_json(pair.rho)}, {"sigma", to_json(pair.sigma)}};
    } else {
      const auto& pair = std::get<DmPair>(cell.witness);
      witness = Json{{"rho", to_json(pair.rho)}, {"sigma", to_json(pair.sigma)}};
    }
  }
  return Json{{"epsilon", cell.epsilon},
              {"best_margin", cell.best_margin},
              {"best_epsilon", cell.best_epsilon},
              {"trials", cell.trials},
              {"seed", cell.seed},
              {"violation_candidate", cell.violation_candidate},
              {"witness", std::move(witness)}};
}

inline Json to_json(const SearchRecord& record) {
  Json cells = Json::array();
  for (const auto& cell : record.cells) cells.push_back(to_json(cell, record.config.conjecture));
  return Json{{"config", to_json(record.config)}, {"cells", std::move(cells)}};
}

struct SweepRow {
  std::size_t d = 0;
  double epsilon = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool satisfied = false;
};

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "d,epsilon,lhs,rhs,margin,satisfied\n";
  for (const auto& r : rows) {
    out += std::to_string(r.d);
    out += ',';
    out += detail::format_double(r.epsilon);
    out += ',';
    out += detail::format_double(r.lhs);
    out += ',';
    out += detail::format_double(r.rhs);
    out += ',';
    out += detail::format_double(r.margin);
    out += ',';
    out += r.satisfied ? '1' : '0';
    out += '\n';
  }
  return out;
}

inline std::string search_csv(const SearchRecord& record) {
  std::string out = "conjecture,d1,d2,epsilon,best_margin,trials,seed\n";
  for (const auto& cell : record.cells) {
    out += conjecture_name(record.config.conjecture);
    out += ',';
    out += std::to_string(record.config.dim1);
    out += ',';
    out += std::to_string(record.config.dim2);
    out += ',';
    out += detail::format_double(cell.epsilon);
    out += ',';
    out += detail::format_double(cell.best_margin);
    out += ',';
    out += std::to_string(cell.trials);
    out += ',';
    out += std::to_string(cell.seed);
    out += '\n';
  }
  return out;
}

struct RunManifest {
  std::string command;
  Json config;
  std::uint64_t seed = 0;
  double duration_seconds = 0.0;
  std::vector<std::string> outputs;
};

inline Json to_json(const RunManifest& m) {
  return Json{{"command", m.command},       {"config", m.config},
              {"seed", m.seed},             {"version", kVersion},
              {"duration_seconds", m.duration_seconds}, {"outputs", m.outputs}};
}

}  // namespace cqbound
