#include "cpds/report.hpp"

#include <cstdio>
#include <sstream>

#include "cpds/errors.hpp"

namespace cpds {

namespace {

bool excludes(const QuantityInterval& iv, double observed) {
  return !(iv.lo <= observed && observed <= iv.hi);
}

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

}  // namespace

void flag_observed(ReportTable& table) {
  for (auto& row : table.rows) {
    if (row.cells.size() != table.columns.size())
      throw DimensionError("report row has wrong cell count");
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
      auto it = table.observed.find(table.columns[c]);
      if (it == table.observed.end()) {
        row.cells[c].estimated_flagged.reset();
        row.cells[c].credible_flagged.reset();
        continue;
      }
      row.cells[c].estimated_flagged = excludes(row.cells[c].estimated, it->second);
      row.cells[c].credible_flagged = excludes(row.cells[c].credible, it->second);
    }
  }
}

std::string report_table_csv(const ReportTable& table, int precision) {
  std::ostringstream out;
  out << "scenario,row";
  for (const auto& col : table.columns) out << "," << col;
  out << ",flags\n";
  for (const auto& row : table.rows) {
    for (int kind = 0; kind < 2; ++kind) {
      out << row.scenario << "," << (kind == 0 ? "estimated_set" : "credible_set");
      std::vector<std::string> flagged;
      for (std::size_t c = 0; c < row.cells.size(); ++c) {
        const auto& cell = row.cells[c];
        const QuantityInterval& iv = kind == 0 ? cell.estimated : cell.credible;
        out << ",\"[" << fixed(iv.lo, precision) << ", " << fixed(iv.hi, precision)
            << "]\"";
        const auto& flag = kind == 0 ? cell.estimated_flagged : cell.credible_flagged;
        if (flag.has_value() && *flag) flagged.push_back(table.columns[c]);
      }
      out << ",\"";
      for (std::size_t k = 0; k < flagged.size(); ++k)
        out << (k ? ";" : "") << flagged[k];
      out << "\"\n";
    }
  }
  if (!table.observed.empty()) {
    out << "observed,observed";
    for (const auto& col : table.columns) {
      auto it = table.observed.find(col);
      if (it == table.observed.end())
        out << ",";
      else
        out << "," << fixed(it->second, precision);
    }
    out << ",\n";
  }
  return out.str();
}

nlohmann::json report_table_json(const ReportTable& table) {
  nlohmann::json j;
  j["columns"] = table.columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r;
    r["scenario"] = row.scenario;
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : row.cells) {
      nlohmann::json c;
      c["estimated_set"] = {cell.estimated.lo, cell.estimated.hi};
      c["credible_set"] = {cell.credible.lo, cell.credible.hi};
      if (cell.estimated_flagged.has_value()) {
        c["estimated_excludes_observed"] = *cell.estimated_flagged;
        c["credible_excludes_observed"] = *cell.credible_flagged;
      }
      cells.push_back(std::move(c));
    }
    r["cells"] = std::move(cells);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  if (!table.observed.empty()) j["observed"] = table.observed;
  j["metadata"] = {{"seed", table.seed},
                   {"n_draws", table.n_draws},
                   {"mode", table.mode},
                   {"level", table.level},
                   {"credible_rule", table.credible_rule},
                   {"partitions", table.partitions}};
  return j;
}

}  // namespace cpds
