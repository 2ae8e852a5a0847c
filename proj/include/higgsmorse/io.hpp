#pragma once

// Text serialization: stratum records, CSV tables, JSON lines, flow states and config files.

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "higgsmorse/census.hpp"
#include "higgsmorse/critical.hpp"
#include "higgsmorse/flow.hpp"
#include "higgsmorse/morse.hpp"

namespace higgsmorse {

enum class OutputFormat { csv, records, json_lines };

inline OutputFormat parse_format(const std::string &s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "records") return OutputFormat::records;
  if (s == "json-lines" || s == "jsonl") return OutputFormat::json_lines;
  throw ValidationError("unknown output format: " + s + " (csv, records, json-lines)");
}

namespace detail {

/// CSV field quoting: wrap in quotes when the text has a comma, quote or newline.
inline std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string summand_table(const HodgeType &h) {
  std::string out;
  for (const auto &s : h.summands) {
    if (!out.empty()) out += ";";
    out += s.name + "(" + std::to_string(s.rank) + "," + std::to_string(s.degree) + "," + weight_string(s.weight) + ")";
  }
  return out;
}

inline std::string route_table(const HodgeType &h) {
  std::string out;
  for (const auto &r : h.routes) {
    if (!out.empty()) out += ";";
    out += route_tag_name(r.tag) + ":" + std::to_string(r.source) + "->" + std::to_string(r.target);
  }
  return out;
}

inline std::string opt_string(const std::optional<long> &v) { return v ? std::to_string(*v) : ""; }

} // namespace detail

// ---------------------------------------------------------------------------
// Strata.

/// One stratum per record:
///   stratum <label>
///   group <name>
///   ... key value lines ...
///   summand <name> <rank> <degree> <weight>
///   route <tag> <source> <target>
///   end
inline void write_stratum_record(std::ostream &os, const CriticalStratum &s, const IndexReport *idx = nullptr,
                                 const char *kind = "stratum") {
  os << kind << " " << label_name(s.label) << "\n";
  os << "group " << s.hodge.group.name << "\n";
  os << "total_degree " << s.hodge.total_degree << "\n";
  os << "phi_zero " << (s.is_phi_zero ? 1 : 0) << "\n";
  if (s.parameter) os << "parameter " << *s.parameter << "\n";
  if (s.offset) os << "offset " << *s.offset << "\n";
  os << "multiplicity " << s.multiplicity.str() << "\n";
  os << "description " << s.description << "\n";
  for (const auto &m : s.hodge.summands)
    os << "summand " << m.name << " " << m.rank << " " << m.degree << " " << weight_string(m.weight) << "\n";
  for (const auto &r : s.hodge.routes) os << "route " << route_tag_name(r.tag) << " " << r.source << " " << r.target << "\n";
  for (const auto &f : s.flags) os << "flag " << f << "\n";
  if (idx) {
    os << "index " << idx->index << (idx->exact ? "" : " lower_bound") << "\n";
    for (const auto &w : idx->per_weight)
      os << "weight " << weight_string(w.mu) << " h1 " << w.dim_h1 << " " << w.status << "\n";
  }
  os << "end\n";
}

inline const char *kStrataCsvHeader = "group,label,total_degree,phi_zero,parameter,offset,multiplicity,summands,routes,index,index_exact,description";

inline void write_stratum_csv(std::ostream &os, const CriticalStratum &s, const IndexReport *idx = nullptr) {
  using detail::csv_field;
  os << csv_field(s.hodge.group.name) << "," << label_name(s.label) << "," << s.hodge.total_degree << ","
     << (s.is_phi_zero ? 1 : 0) << "," << detail::opt_string(s.parameter) << "," << detail::opt_string(s.offset) << ","
     << s.multiplicity.str() << "," << csv_field(detail::summand_table(s.hodge)) << "," << csv_field(detail::route_table(s.hodge))
     << "," << (idx ? std::to_string(idx->index) : "") << "," << (idx ? (idx->exact ? "1" : "0") : "") << ","
     << csv_field(s.description) << "\n";
}

inline nlohmann::json stratum_json(const CriticalStratum &s, const IndexReport *idx = nullptr) {
  nlohmann::json j;
  j["group"] = s.hodge.group.name;
  j["label"] = label_name(s.label);
  j["total_degree"] = s.hodge.total_degree;
  j["phi_zero"] = s.is_phi_zero;
  if (s.parameter) j["parameter"] = *s.parameter;
  if (s.offset) j["offset"] = *s.offset;
  j["multiplicity"] = s.multiplicity.str();
  j["description"] = s.description;
  j["summands"] = nlohmann::json::array();
  for (const auto &m : s.hodge.summands)
    j["summands"].push_back({{"name", m.name}, {"rank", m.rank}, {"degree", m.degree}, {"weight", weight_string(m.weight)}});
  j["routes"] = nlohmann::json::array();
  for (const auto &r : s.hodge.routes)
    j["routes"].push_back({{"tag", route_tag_name(r.tag)}, {"source", r.source}, {"target", r.target}});
  j["flags"] = s.flags;
  if (idx) {
    j["index"] = idx->index;
    j["index_exact"] = idx->exact;
    j["per_weight"] = nlohmann::json::array();
    for (const auto &w : idx->per_weight)
      j["per_weight"].push_back({{"mu", weight_string(w.mu)}, {"h1", w.dim_h1}, {"status", w.status}});
  }
  return j;
}

// ---------------------------------------------------------------------------
// Component reports.

inline const char *kCensusCsvHeader = "group,g,d,label,count,provenance";

inline void write_component_report(std::ostream &os, const ComponentReport &r, OutputFormat f) {
  using detail::csv_field;
  switch (f) {
  case OutputFormat::csv:
    os << kCensusCsvHeader << "\n";
    for (const auto &e : r.breakdown)
      os << csv_field(r.group.name) << "," << r.genus << "," << r.toledo << "," << csv_field(e.label) << "," << e.count.str()
         << "," << csv_field(e.provenance) << "\n";
    os << csv_field(r.group.name) << "," << r.genus << "," << r.toledo << ",total," << r.total_string() << ","
       << (r.total ? "sum of breakdown" : "conjectured 1") << "\n";
    break;
  case OutputFormat::records:
    os << "census " << r.group.name << "\n"
       << "g " << r.genus << "\n"
       << "d " << r.toledo << "\n"
       << "total " << r.total_string() << "\n";
    for (const auto &e : r.breakdown) os << "component " << e.count.str() << " " << e.label << " | " << e.provenance << "\n";
    os << "end\n";
    break;
  case OutputFormat::json_lines:
    for (const auto &e : r.breakdown)
      os << nlohmann::json{{"group", r.group.name}, {"g", r.genus}, {"d", r.toledo}, {"label", e.label},
                           {"count", e.count.str()}, {"provenance", e.provenance}}
                .dump()
         << "\n";
    os << nlohmann::json{{"group", r.group.name}, {"g", r.genus}, {"d", r.toledo}, {"label", "total"},
                         {"count", r.total_string()}, {"provenance", r.total ? "sum of breakdown" : "conjectured 1"}}
              .dump()
       << "\n";
    break;
  }
}

// ---------------------------------------------------------------------------
// Flow traces and states.

inline std::string full_precision(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline const char *kTraceCsvHeader = "time,energy,gradient_norm,step";

inline void write_trace_csv(std::ostream &os, const FlowTrace &t) {
  os << kTraceCsvHeader << "\n";
  for (const auto &s : t.steps)
    os << full_precision(s.time) << "," << full_precision(s.energy) << "," << full_precision(s.gradient_norm) << ","
       << full_precision(s.step) << "\n";
}

/// State text format:
///   higgsmorse-state 1
///   size <N> spacing <s> rank <n> group <tag>
///   flux
///   <n rows of n "re im" pairs>
///   site <i> <j>          (site-major, i fastest)
///   alpha / phi / h       each followed by n rows of n "re im" pairs
inline void write_state(std::ostream &os, const FlowState &s) {
  auto mat = [&](const Mat &m) {
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j)
        os << (j ? " " : "") << full_precision(m(i, j).real()) << " " << full_precision(m(i, j).imag());
      os << "\n";
    }
  };
  os << "higgsmorse-state 1\n";
  os << "size " << s.geometry.size << " spacing " << full_precision(s.geometry.spacing) << " rank " << s.rank << " group "
     << flow_group_name(s.group) << "\n";
  os << "flux\n";
  mat(s.flux);
  for (int k = 0; k < s.geometry.sites(); ++k) {
    os << "site " << k % s.geometry.size << " " << k / s.geometry.size << "\n";
    os << "alpha\n";
    mat(s.alpha[k]);
    os << "phi\n";
    mat(s.phi[k]);
    os << "h\n";
    mat(s.h[k]);
  }
}

inline FlowState read_state(std::istream &is) {
  auto expect = [&](const std::string &want) {
    std::string w;
    if (!(is >> w) || w != want) throw ValidationError("state file: expected '" + want + "', got '" + w + "'");
  };
  expect("higgsmorse-state");
  int version = 0;
  is >> version;
  require(version == 1, "state file: unsupported version");
  int size = 0, rank = 0;
  double spacing = 0;
  std::string tag;
  expect("size");
  is >> size;
  expect("spacing");
  is >> spacing;
  expect("rank");
  is >> rank;
  expect("group");
  is >> tag;
  require(static_cast<bool>(is), "state file: malformed header");
  FlowState s = zero_state(LatticeGeometry(size, spacing), rank, parse_flow_group(tag));
  auto mat = [&](Mat &m) {
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < rank; ++j) {
        double re = 0, im = 0;
        if (!(is >> re >> im)) throw ValidationError("state file: truncated matrix");
        m(i, j) = {re, im};
      }
  };
  expect("flux");
  mat(s.flux);
  for (int k = 0; k < s.geometry.sites(); ++k) {
    int i = -1, j = -1;
    expect("site");
    is >> i >> j;
    require(i == k % size && j == k / size, "state file: sites out of order");
    expect("alpha");
    mat(s.alpha[k]);
    expect("phi");
    mat(s.phi[k]);
    expect("h");
    mat(s.h[k]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Config files: "key = value" lines, optional "[section]" headers, '#' or ';' comments.
// Keys inside a section are stored as "section.key".

using ConfigMap = std::map<std::string, std::string>;

inline ConfigMap parse_config(std::istream &is) {
  ConfigMap out;
  std::string line, section;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      require(line.back() == ']', "config line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      require(!section.empty() && section.find('.') == std::string::npos,
              "config line " + std::to_string(lineno) + ": bad section name");
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos, "config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    require(!key.empty(), "config line " + std::to_string(lineno) + ": empty key");
    out[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
  }
  return out;
}

inline ConfigMap parse_config_string(const std::string &text) {
  std::istringstream is(text);
  return parse_config(is);
}

} // namespace higgsmorse
