#pragma once

// JSON and CSV serialization: matrices as {"rows","cols","re","im"} (row-major),
// weights with an optional "psd_tol", estimates, law reports.

#include "aqrange/laws.hpp"
#include "aqrange/radius.hpp"
#include "aqrange/semispace.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

namespace aqr {

using Json = nlohmann::json;

struct ParseError : Error {
  using Error::Error;
};

inline CMatrix matrix_from_json(const Json& j) {
  try {
    const auto rows = j.at("rows").get<long>();
    const auto cols = j.at("cols").get<long>();
    if (rows <= 0 || cols <= 0) throw ParseError("matrix JSON: rows and cols must be positive");
    const auto re = j.at("re").get<std::vector<double>>();
    std::vector<double> im(re.size(), 0.0);
    if (j.contains("im")) im = j.at("im").get<std::vector<double>>();
    const auto count = static_cast<std::size_t>(rows * cols);
    if (re.size() != count || im.size() != count)
      throw ParseError("matrix JSON: expected " + std::to_string(count) + " entries in re and im");
    CMatrix m(rows, cols);
    for (long r = 0; r < rows; ++r)
      for (long c = 0; c < cols; ++c) {
        auto k = static_cast<std::size_t>(r * cols + c);
        m(r, c) = Complex(re[k], im[k]);
      }
    return m;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("matrix JSON: ") + e.what());
  }
}

inline Json matrix_to_json(const CMatrix& m) {
  std::vector<double> re, im;
  re.reserve(static_cast<std::size_t>(m.size()));
  im.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

inline Weight weight_from_json(const Json& j) {
  std::optional<double> tol;
  if (j.contains("psd_tol")) {
    try {
      tol = j.at("psd_tol").get<double>();
    } catch (const Json::exception& e) {
      throw ParseError(std::string("weight JSON: ") + e.what());
    }
  }
  return Weight(matrix_from_json(j), tol);
}

inline Json weight_to_json(const Weight& w) {
  Json j = matrix_to_json(w.matrix());
  j["psd_tol"] = w.psd_tol();
  return j;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline Json vector_to_json(const CVector& v) {
  std::vector<double> re, im;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return Json{{"re", re}, {"im", im}};
}

inline Json budget_to_json(const Budget& b) {
  return Json{{"restarts", b.restarts},
              {"iterations", b.iterations},
              {"samples", b.samples},
              {"grid_resolution", b.grid_resolution}};
}

inline Json estimate_to_json(const Estimate& e) {
  return Json{{"value", e.value},
              {"direction", to_string(e.direction)},
              {"witness_x", vector_to_json(e.witness_x)},
              {"witness_y", vector_to_json(e.witness_y)},
              {"budget", budget_to_json(e.budget)},
              {"seed", e.seed}};
}

inline Json report_to_json(const LawReport& r) {
  Json j{{"law_id", r.law_id},
         {"lhs", r.lhs},
         {"rhs", r.rhs},
         {"slack", r.slack},
         {"pass", r.pass},
         {"skipped", r.skipped},
         {"tol_law", r.tol_law},
         {"instance_digest", r.instance_digest},
         {"estimator_budget", budget_to_json(r.estimator_budget)}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

/// One JSON object per line.
inline void write_jsonl(std::ostream& os, const std::vector<LawReport>& reports) {
  for (const auto& r : reports) os << report_to_json(r).dump() << '\n';
}

/// Columns law_id, pass_rate, min_slack (plus counts); 12 significant digits.
inline void write_summary_csv(std::ostream& os, const std::vector<LawSummary>& rows) {
  os << "law_id,pass_rate,min_slack,evaluated,skipped\n";
  char buf[256];
  for (const auto& s : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%d,%d\n", s.law_id.c_str(), s.pass_rate,
                  s.min_slack, s.evaluated, s.skipped);
    os << buf;
  }
}

}  // namespace aqr
