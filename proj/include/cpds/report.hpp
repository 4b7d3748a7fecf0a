#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpds/identify.hpp"

namespace cpds {

// One table cell: the estimated identified set and the credible set for a
// quantity, plus a flag when the observed value falls outside the interval.
struct ReportCell {
  QuantityInterval estimated;
  QuantityInterval credible;
  std::optional<bool> estimated_flagged;  // set only when an observed value exists
  std::optional<bool> credible_flagged;
};

struct ReportRow {
  std::string scenario;
  std::vector<ReportCell> cells;  // one per column
};

struct ReportTable {
  std::vector<std::string> columns;
  std::vector<ReportRow> rows;
  std::map<std::string, double> observed;  // per column name, optional
  // run metadata
  std::uint64_t seed = 0;
  std::uint64_t n_draws = 0;
  std::string mode;           // "exact" or "mc"
  double level = 0.95;
  std::string credible_rule = "width_ranked";
  std::uint32_t partitions = 1;
};

// Flags cells whose interval excludes the observed value (closed intervals,
// full-precision comparison).
void flag_observed(ReportTable& table);

// CSV at fixed display precision (default one decimal) plus a JSON mirror at
// full precision. Flags in the CSV list the flagged columns per row.
std::string report_table_csv(const ReportTable& table, int precision = 1);
nlohmann::json report_table_json(const ReportTable& table);

}  // namespace cpds
