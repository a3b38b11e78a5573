#pragma once

// Fixed-format MPS writer and a reader for the subset it writes.
//
// Names are cut to 8 characters; collisions after truncation get a numeric
// suffix. Values carry 12 significant digits. The objective constant is
// written as the RHS of the objective row with its sign flipped, which is
// how common solvers interpret that entry.

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

#include "ccdispatch/error.hpp"
#include "ccdispatch/lp/instance.hpp"

namespace ccd::lp {

inline constexpr std::size_t kMpsNameLength = 8;
inline constexpr const char* kMpsObjectiveRow = "COST";

namespace detail {

/// Unique names of at most 8 characters for `names`, in order.
inline std::vector<std::string> mps_names(const std::vector<std::string>& names, std::set<std::string> taken) {
  std::vector<std::string> out;
  out.reserve(names.size());
  for (const auto& full : names) {
    std::string n = full.substr(0, kMpsNameLength);
    for (char& c : n)
      if (c == ' ') c = '_';
    if (n.empty()) n = "_";
    for (int k = 1; taken.count(n) != 0; ++k) {
      const std::string suffix = "~" + std::to_string(k);
      n = full.substr(0, kMpsNameLength - suffix.size()) + suffix;
    }
    taken.insert(n);
    out.push_back(std::move(n));
  }
  return out;
}

inline std::string mps_value(double v) { return fmt::format("{:.12g}", v); }

inline std::string mps_line(const char* code, const std::string& a, const std::string& b, const std::string& v) {
  return fmt::format(" {:<2} {:<8}  {:<8}  {:>12}\n", code, a, b, v);
}

}  // namespace detail

/// Writes `inst` as fixed-format MPS. Throws std::invalid_argument for an
/// invalid or empty instance.
inline void write_mps(const Instance& inst, std::ostream& out, const std::string& name = "CCDISP") {
  inst.validate();
  std::vector<std::string> labels;
  labels.reserve(inst.rows.size());
  for (const auto& r : inst.rows) labels.push_back(r.label);
  const auto rows = detail::mps_names(labels, {kMpsObjectiveRow});
  const auto cols = detail::mps_names(inst.var_names, {});

  // Column-wise view of the rows.
  std::vector<std::vector<std::pair<int, double>>> by_col(inst.objective.size());
  for (std::size_t i = 0; i < inst.rows.size(); ++i) {
    const Row& r = inst.rows[i];
    for (std::size_t k = 0; k < r.index.size(); ++k)
      by_col[static_cast<std::size_t>(r.index[k])].emplace_back(static_cast<int>(i), r.value[k]);
  }

  out << "NAME          " << name.substr(0, kMpsNameLength) << "\n";
  out << "ROWS\n";
  out << " N  " << kMpsObjectiveRow << "\n";
  for (std::size_t i = 0; i < inst.rows.size(); ++i) {
    const char code = inst.rows[i].relation == Relation::kLessEqual ? 'L'
                      : inst.rows[i].relation == Relation::kEqual   ? 'E'
                                                                    : 'G';
    out << ' ' << code << "  " << rows[i] << "\n";
  }

  out << "COLUMNS\n";
  for (std::size_t j = 0; j < by_col.size(); ++j) {
    // Every column is listed at least once so readers see the full variable set.
    out << detail::mps_line("", cols[j], kMpsObjectiveRow, detail::mps_value(inst.objective[j]));
    for (const auto& [row, v] : by_col[j]) {
      if (v == 0.0) continue;
      out << detail::mps_line("", cols[j], rows[static_cast<std::size_t>(row)], detail::mps_value(v));
    }
  }

  out << "RHS\n";
  if (inst.objective_offset != 0.0)
    out << detail::mps_line("", "RHS", kMpsObjectiveRow, detail::mps_value(-inst.objective_offset));
  for (std::size_t i = 0; i < inst.rows.size(); ++i) {
    if (inst.rows[i].rhs == 0.0) continue;
    out << detail::mps_line("", "RHS", rows[i], detail::mps_value(inst.rows[i].rhs));
  }

  out << "BOUNDS\n";
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const double lo = inst.lower[j];
    const double up = inst.upper[j];
    if (lo == up) {
      out << detail::mps_line("FX", "BND", cols[j], detail::mps_value(lo));
      continue;
    }
    if (lo != 0.0) out << detail::mps_line("LO", "BND", cols[j], detail::mps_value(lo));
    if (std::isfinite(up)) out << detail::mps_line("UP", "BND", cols[j], detail::mps_value(up));
  }
  out << "ENDATA\n";
}

/// Writes `inst` to `path`. Throws IoError when the file cannot be written.
inline void export_mps(const Instance& inst, const std::string& path) {
  inst.validate();
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  write_mps(inst, f);
  f.flush();
  if (!f) throw IoError("write to " + path + " failed");
}

/// Reads the MPS subset produced by write_mps (one N row, L/E/G rows,
/// RHS, and LO/UP/FX/FR/MI bounds). Names become the truncated MPS names.
[[nodiscard]] inline Instance read_mps(std::istream& in) {
  Instance inst;
  std::string objective_row;
  std::unordered_map<std::string, int> row_of;
  std::unordered_map<std::string, int> col_of;
  std::string section;
  std::string line;
  std::size_t line_no = 0;

  const auto fail = [&](const std::string& what) {
    throw Error(fmt::format("mps line {}: {}", line_no, what));
  };
  const auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      fail("bad number '" + s + "'");
    }
    if (used != s.size()) fail("bad number '" + s + "'");
    return v;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '*') continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (line[0] != ' ') {
      section = tok[0];
      if (section == "ENDATA") break;
      continue;
    }

    if (section == "ROWS") {
      if (tok.size() != 2) fail("ROWS entry needs type and name");
      if (tok[0] == "N") {
        if (!objective_row.empty()) fail("more than one objective row");
        objective_row = tok[1];
        continue;
      }
      const Relation rel = tok[0] == "L"   ? Relation::kLessEqual
                           : tok[0] == "E" ? Relation::kEqual
                           : tok[0] == "G" ? Relation::kGreaterEqual
                                           : (fail("unknown row type " + tok[0]), Relation::kEqual);
      row_of[tok[1]] = inst.num_rows();
      inst.add_row(tok[1], rel, 0.0);
    } else if (section == "COLUMNS") {
      if (tok.size() != 3 && tok.size() != 5) fail("COLUMNS entry needs 3 or 5 fields");
      auto it = col_of.find(tok[0]);
      if (it == col_of.end()) it = col_of.emplace(tok[0], inst.add_var(tok[0], 0.0)).first;
      for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
        const double v = number(tok[k + 1]);
        if (tok[k] == objective_row) {
          inst.objective[static_cast<std::size_t>(it->second)] = v;
          continue;
        }
        const auto r = row_of.find(tok[k]);
        if (r == row_of.end()) fail("unknown row " + tok[k]);
        inst.rows[static_cast<std::size_t>(r->second)].index.push_back(it->second);
        inst.rows[static_cast<std::size_t>(r->second)].value.push_back(v);
      }
    } else if (section == "RHS") {
      if (tok.size() != 3 && tok.size() != 5) fail("RHS entry needs 3 or 5 fields");
      for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
        const double v = number(tok[k + 1]);
        if (tok[k] == objective_row) {
          inst.objective_offset = -v;
          continue;
        }
        const auto r = row_of.find(tok[k]);
        if (r == row_of.end()) fail("unknown row " + tok[k]);
        inst.rows[static_cast<std::size_t>(r->second)].rhs = v;
      }
    } else if (section == "BOUNDS") {
      if (tok.size() < 3) fail("BOUNDS entry too short");
      const auto c = col_of.find(tok[2]);
      if (c == col_of.end()) fail("unknown column " + tok[2]);
      const auto j = static_cast<std::size_t>(c->second);
      const std::string& type = tok[0];
      if (type == "FR") {
        fail("free variables are not supported");
      } else if (type == "MI") {
        fail("variables unbounded below are not supported");
      } else {
        if (tok.size() != 4) fail("bound needs a value");
        const double v = number(tok[3]);
        if (type == "LO") inst.lower[j] = v;
        else if (type == "UP") inst.upper[j] = v;
        else if (type == "FX") inst.lower[j] = inst.upper[j] = v;
        else fail("unknown bound type " + type);
      }
    } else {
      fail("data outside a known section");
    }
  }
  if (objective_row.empty()) throw Error("mps: no objective row");
  inst.validate();
  return inst;
}

}  // namespace ccd::lp
