#pragma once

// Command results: a human table on stdout plus machine-readable JSON and
// CSV files. Files and stdout are byte-stable across runs for identical
// configs; timings go to stderr only.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace eulerint {

struct CheckRow {
  std::string method;
  std::optional<double> t;
  double value = 0.0;
  std::optional<double> tolerance;  // absent = informational row
  bool pass = true;
  std::string note;
};

struct Report {
  std::string command;
  nlohmann::ordered_json config_echo;
  std::vector<CheckRow> rows;
  nlohmann::ordered_json extra;

  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }
};

namespace reportdetail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace reportdetail

inline void print_report(const Report& rep, std::ostream& os) {
  os << "== " << rep.command << " ==\n";
  std::size_t wm = 6, wn = 4;
  for (const auto& r : rep.rows) {
    wm = std::max(wm, r.method.size());
    wn = std::max(wn, r.note.size());
  }
  char line[512];
  std::snprintf(line, sizeof(line), "%-*s  %10s  %16s  %10s  %-4s  %s\n",
                static_cast<int>(wm), "method", "t", "value", "tolerance", "pass", "note");
  os << line;
  for (const auto& r : rep.rows) {
    const std::string ts = r.t ? reportdetail::fmt(*r.t) : "-";
    const std::string tol = r.tolerance ? reportdetail::fmt(*r.tolerance) : "-";
    std::snprintf(line, sizeof(line), "%-*s  %10s  %16s  %10s  %-4s  %s\n",
                  static_cast<int>(wm), r.method.c_str(), ts.c_str(),
                  reportdetail::fmt(r.value).c_str(), tol.c_str(), r.pass ? "ok" : "FAIL",
                  r.note.c_str());
    os << line;
  }
  os << (rep.all_pass() ? "all checks passed\n" : "SOME CHECKS FAILED\n");
}

inline nlohmann::ordered_json report_to_json(const Report& rep) {
  nlohmann::ordered_json j;
  j["command"] = rep.command;
  j["all_pass"] = rep.all_pass();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : rep.rows) {
    nlohmann::ordered_json row;
    row["method"] = r.method;
    if (r.t)
      row["t"] = *r.t;
    else
      row["t"] = nullptr;
    row["value"] = r.value;
    if (r.tolerance)
      row["tolerance"] = *r.tolerance;
    else
      row["tolerance"] = nullptr;
    row["pass"] = r.pass;
    if (!r.note.empty()) row["note"] = r.note;
    rows.push_back(row);
  }
  j["rows"] = rows;
  if (!rep.extra.is_null()) j["extra"] = rep.extra;
  j["config"] = rep.config_echo;
  return j;
}

inline std::string report_to_csv(const Report& rep) {
  std::string out = "method,t,value,tolerance,pass\n";
  for (const auto& r : rep.rows) {
    out += r.method;
    out += ',';
    if (r.t) out += reportdetail::fmt(*r.t);
    out += ',';
    out += reportdetail::fmt(r.value);
    out += ',';
    if (r.tolerance) out += reportdetail::fmt(*r.tolerance);
    out += ',';
    out += r.pass ? "true" : "false";
    out += '\n';
  }
  return out;
}

/// Writes <base>.json and <base>.csv.
inline void write_outputs(const Report& rep, const std::string& base) {
  {
    std::ofstream js(base + ".json");
    if (!js) throw std::runtime_error("cannot write '" + base + ".json'");
    js << report_to_json(rep).dump(2) << "\n";
  }
  {
    std::ofstream cs(base + ".csv");
    if (!cs) throw std::runtime_error("cannot write '" + base + ".csv'");
    cs << report_to_csv(rep);
  }
}

}  // namespace eulerint
