#ifndef GSR_IO_HPP
#define GSR_IO_HPP

// Set documents and report serialization. Doubles are written in the
// shortest form that parses back to the same binary64 value.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsr/bounds.hpp"
#include "gsr/certify.hpp"
#include "gsr/criteria.hpp"
#include "gsr/error.hpp"
#include "gsr/kozyakin.hpp"
#include "gsr/smallmat.hpp"
#include "gsr/words.hpp"

namespace gsr {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

struct ParsedSet {
  MatrixSet set;
  std::optional<KozyakinModel> kozyakin;
};

namespace detail {

[[noreturn]] inline void schema_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::invalid_input, where + ": " + what);
}

inline double number_at(const json& j, const std::string& where) {
  double v = 0.0;
  if (j.is_number()) {
    v = j.get<double>();
  } else if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size()) schema_error(where, "'" + s + "' is not a decimal number");
  } else {
    schema_error(where, "expected a number");
  }
  if (!std::isfinite(v)) schema_error(where, "number is not finite");
  return v;
}

inline std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json word_json(const Word& w) { return json(w.letters); }

inline json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

/// 64-bit FNV-1a, rendered as "fnv1a64:" plus 16 hex digits.
inline std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline json model_json(const KozyakinModel& m) {
  return json{{"a", m.a}, {"b", m.b}, {"c", m.c}, {"d", m.d}, {"alpha", m.alpha}, {"beta", m.beta}};
}

inline json set_to_json(const MatrixSet& set, const std::optional<KozyakinModel>& model = std::nullopt) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["dim"] = set.dim();
  json mats = json::array();
  for (std::size_t k = 0; k < set.size(); ++k)
    mats.push_back(json{{"name", set.names()[k]}, {"rows", detail::matrix_json(set[k])}});
  doc["matrices"] = std::move(mats);
  if (model) doc["kozyakin"] = model_json(*model);
  return doc;
}

/// Hash of the canonical serialization of the members (names excluded).
inline std::string set_hash(const MatrixSet& set) {
  json canon = json::array();
  for (const auto& m : set.members()) canon.push_back(detail::matrix_json(m));
  return fnv1a64(canon.dump());
}

inline ParsedSet parse_set_json(const json& doc) {
  if (!doc.is_object()) detail::schema_error("document", "expected an object");
  if (!doc.contains("schema_version")) detail::schema_error("schema_version", "missing");
  if (doc["schema_version"] != kSchemaVersion)
    detail::schema_error("schema_version", "unsupported version " + doc["schema_version"].dump() + ", expected \"1\"");

  std::optional<KozyakinModel> model;
  if (doc.contains("kozyakin")) {
    const json& k = doc["kozyakin"];
    if (!k.is_object()) detail::schema_error("kozyakin", "expected an object");
    double p[6];
    const char* keys[6] = {"a", "b", "c", "d", "alpha", "beta"};
    for (int i = 0; i < 6; ++i) {
      if (!k.contains(keys[i])) detail::schema_error(std::string("kozyakin.") + keys[i], "missing");
      p[i] = detail::number_at(k[keys[i]], std::string("kozyakin.") + keys[i]);
    }
    model = build_model(p[0], p[1], p[2], p[3], p[4], p[5]);
  }

  std::optional<std::size_t> dim;
  if (doc.contains("dim")) {
    const json& d = doc["dim"];
    if (!d.is_number_integer() || d.get<long long>() < 1) detail::schema_error("dim", "expected a positive integer");
    dim = d.get<std::size_t>();
  }

  if (!doc.contains("matrices")) {
    if (!model) detail::schema_error("matrices", "missing");
    if (dim && *dim != 2) detail::schema_error("dim", "kozyakin model needs dim 2");
    return {model->set(), model};
  }
  if (!dim) detail::schema_error("dim", "missing");
  const json& mats = doc["matrices"];
  if (!mats.is_array() || mats.empty()) detail::schema_error("matrices", "expected a non-empty list");

  std::vector<Matrix> members;
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (std::size_t k = 0; k < mats.size(); ++k) {
    const std::string where = "matrices[" + std::to_string(k) + "]";
    const json& m = mats[k];
    if (!m.is_object()) detail::schema_error(where, "expected an object");
    std::string name = "A" + std::to_string(k + 1);
    if (m.contains("name")) {
      if (!m["name"].is_string()) detail::schema_error(where + ".name", "expected a string");
      name = m["name"].get<std::string>();
    }
    if (!seen.insert(name).second) detail::schema_error(where + ".name", "duplicate matrix name '" + name + "'");
    if (!m.contains("rows") || !m["rows"].is_array()) detail::schema_error(where + ".rows", "expected a list of rows");
    const json& rows = m["rows"];
    if (rows.size() != *dim)
      detail::schema_error(where + ".rows", "matrix " + name + " has " + std::to_string(rows.size()) +
                                                " rows, expected " + std::to_string(*dim));
    Matrix a(*dim);
    for (std::size_t i = 0; i < *dim; ++i) {
      const std::string rw = where + ".rows[" + std::to_string(i) + "]";
      if (!rows[i].is_array()) detail::schema_error(rw, "expected a list of numbers");
      if (rows[i].size() != *dim)
        detail::schema_error(rw, "matrix " + name + " row " + std::to_string(i + 1) + " has " +
                                     std::to_string(rows[i].size()) + " entries, expected " + std::to_string(*dim));
      for (std::size_t j = 0; j < *dim; ++j) a(i, j) = detail::number_at(rows[i][j], rw + "[" + std::to_string(j) + "]");
    }
    members.push_back(std::move(a));
    names.push_back(std::move(name));
  }
  MatrixSet set(std::move(members), std::move(names));
  if (model) {
    const MatrixSet expect = model->set();
    if (set.size() != 2 || set.dim() != 2 || !approx_equal(set[0], expect[0], 1e-12) ||
        !approx_equal(set[1], expect[1], 1e-12)) {
      detail::schema_error("matrices", "members do not match the kozyakin block (A0, A1 in that order)");
    }
  }
  return {std::move(set), model};
}

inline json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorKind::invalid_input,
                source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::invalid_input, path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ParsedSet parse_set_text(const std::string& text, const std::string& source = "<input>") {
  try {
    return parse_set_json(parse_json_text(text, source));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_input && std::string(e.what()).rfind(source + ":", 0) != 0)
      throw Error(e.kind(), source + ": " + e.what());
    throw;
  }
}

inline ParsedSet parse_set(const std::string& path) { return parse_set_text(read_file(path), path); }

// ---- results to JSON ----

inline json to_json(const Certificate& c) {
  json j;
  j["criterion"] = to_string(c.criterion);
  j["value"] = c.value;
  j["word"] = detail::word_json(c.word);
  if (c.optimal_word) j["optimal_word"] = detail::word_json(*c.optimal_word);
  j["n"] = c.n;
  j["exact"] = c.exact;
  if (c.bracket) j["bracket"] = json::array({c.bracket->first, c.bracket->second});
  json tol = json::object();
  for (const auto& [k, v] : c.tolerances) tol[k] = v;
  j["tolerances"] = std::move(tol);
  json wit = json::array();
  for (const auto& w : c.witness) wit.push_back(json{{"label", w.label}, {"rows", detail::matrix_json(w.matrix)}});
  j["witness"] = std::move(wit);
  j["notes"] = c.notes;
  return j;
}

inline Word word_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) detail::schema_error(where, "expected a list of letters");
  std::vector<int> letters;
  for (const auto& l : j) {
    if (!l.is_number_integer() || l.get<long long>() < 1) detail::schema_error(where, "letters are positive integers");
    letters.push_back(l.get<int>());
  }
  return Word(std::move(letters));
}

inline Certificate certificate_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) detail::schema_error(where, "expected an object");
  Certificate c;
  try {
    c.criterion = criterion_from_string(j.at("criterion").get<std::string>());
    c.value = j.at("value").get<double>();
    c.word = word_from_json(j.at("word"), where + ".word");
    if (j.contains("optimal_word")) c.optimal_word = word_from_json(j["optimal_word"], where + ".optimal_word");
    c.n = j.value("n", 0);
    c.exact = j.value("exact", true);
    if (j.contains("tolerances"))
      for (const auto& [k, v] : j["tolerances"].items()) c.tolerances.emplace_back(k, v.get<double>());
    c.notes = j.value("notes", std::string{});
  } catch (const json::exception& e) {
    detail::schema_error(where, e.what());
  }
  return c;
}

inline json to_json(const BoundsReport& r) {
  json j;
  j["lower"] = detail::finite_or_null(r.lower);
  j["lower_witness"] = detail::word_json(r.lower_witness);
  j["lower_depth"] = r.lower_depth;
  j["upper"] = detail::finite_or_null(r.upper);
  j["upper_depth"] = r.upper_depth;
  j["gap"] = detail::finite_or_null(r.gap);
  j["completed_depth"] = r.completed_depth;
  j["partial"] = r.partial;
  j["converged"] = r.converged;
  j["nodes"] = r.nodes;
  json rows = json::array();
  for (const auto& d : r.per_depth) {
    rows.push_back(json{{"depth", d.depth},
                        {"lower_at", d.lower_at ? json(*d.lower_at) : json(nullptr)},
                        {"upper_at", d.upper_at},
                        {"lower", d.lower},
                        {"upper", d.upper}});
  }
  j["per_depth"] = std::move(rows);
  return j;
}

inline json to_json(const BarabanovApprox& a) {
  json j;
  j["grid_size"] = a.grid_size;
  j["rho_hat"] = a.rho_hat;
  j["rho_lo"] = a.rho_lo;
  j["rho_hi"] = a.rho_hi;
  j["growth"] = a.growth;
  j["iterations"] = a.iterations;
  j["residual"] = a.residual;
  j["converged"] = a.converged;
  json hist = json::array();
  for (const auto& [lo, hi] : a.bracket_history) hist.push_back(json::array({lo, hi}));
  j["bracket_history"] = std::move(hist);
  return j;
}

inline json to_json(const FrequencyEstimate& e) {
  json j;
  j["sigma"] = e.sigma;
  j["horizon"] = e.horizon;
  j["burn_in"] = e.burn_in;
  j["p"] = e.p;
  j["q"] = e.q;
  j["approx_error"] = e.approx_error;
  j["barabanov"] = to_json(e.approx);
  return j;
}

inline json to_json(const Theorem8Result& r) {
  json j;
  j["decided"] = r.certificate.has_value();
  j["frequency"] = to_json(r.estimate);
  j["candidate"] = detail::word_json(r.candidate);
  j["candidate_value"] = r.candidate_value;
  j["upper"] = detail::finite_or_null(r.upper);
  j["enumeration_upper"] = detail::finite_or_null(r.enumeration_upper);
  j["polygon_upper"] = r.polygon_upper;
  j["necklaces_complete"] = r.necklaces_complete;
  j["reason"] = r.reason;
  return j;
}

inline json to_json(const KozyakinConfig& c) {
  return json{{"grid", c.grid},           {"tol", c.tol},
              {"max_sweeps", c.max_sweeps}, {"burn_in", c.burn_in},
              {"horizon", c.horizon},     {"q_max", c.q_max},
              {"rational_tol", c.rational_tol}, {"value_tol", c.value_tol},
              {"x0_angle", c.x0_angle},   {"upper_depth", c.upper_depth},
              {"budget", c.budget},       {"necklace_budget", c.necklace_budget}};
}

inline json to_json(const CriteriaConfig& c) {
  json j{{"eq_tol", c.eq_tol},     {"member_tol", c.member_tol}, {"sym_tol", c.sym_tol},
         {"rank_tol", c.rank_tol}, {"word_tol", c.word_tol},     {"budget", c.budget},
         {"refine", json{{"tol", c.refine.tol}, {"budget", c.refine.budget}, {"max_depth", c.refine.max_depth}}}};
  j["cor3_b"] = c.cor3_b_index ? json(*c.cor3_b_index + 1) : json(nullptr);
  return j;
}

inline json to_json(const KozyakinOutcome& k) {
  json j;
  j["swapped"] = k.swapped;
  if (k.triangular) {
    j["triangular"] = json{{"case", k.triangular->case_number}, {"referral", k.triangular->referral}};
    if (k.triangular->decision) j["triangular"]["decision"] = to_json(*k.triangular->decision);
  }
  if (k.decision) j["decision"] = to_json(*k.decision);
  return j;
}

}  // namespace gsr

#endif  // GSR_IO_HPP
