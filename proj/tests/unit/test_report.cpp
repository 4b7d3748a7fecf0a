#include <doctest.h>

#include "cpds/errors.hpp"
#include "cpds/report.hpp"

using namespace cpds;

namespace {

ReportTable sample_table() {
  ReportTable t;
  t.columns = {"p_no_entry", "p_monopoly"};
  ReportRow row;
  row.scenario = "real_world";
  row.cells = {{{6.2, 25.9}, {5.4, 26.1}, {}, {}},
               {{32.0, 57.0}, {31.5, 57.1}, {}, {}}};
  t.rows.push_back(row);
  ReportRow shut;
  shut.scenario = "shut_down";
  shut.cells = {{{0.0, 0.0}, {0.0, 0.0}, {}, {}},
                {{36.0, 76.4}, {35.5, 80.9}, {}, {}}};
  t.rows.push_back(shut);
  return t;
}

}  // namespace

TEST_CASE("observed values flag exactly the excluding intervals") {
  ReportTable t = sample_table();
  t.observed = {{"p_no_entry", 16.1}};
  flag_observed(t);
  // [6.2, 25.9] contains 16.1: unflagged. [0, 0] excludes it: flagged.
  CHECK(*t.rows[0].cells[0].estimated_flagged == false);
  CHECK(*t.rows[1].cells[0].estimated_flagged == true);
  CHECK(*t.rows[1].cells[0].credible_flagged == true);
  // No observed value for the second column: flags stay absent.
  CHECK_FALSE(t.rows[0].cells[1].estimated_flagged.has_value());
  CHECK_FALSE(t.rows[1].cells[1].credible_flagged.has_value());
}

TEST_CASE("csv carries interval cells at one decimal with a flags column") {
  ReportTable t = sample_table();
  t.observed = {{"p_no_entry", 16.1}};
  flag_observed(t);
  std::string csv = report_table_csv(t);
  CHECK(csv.find("scenario,row,p_no_entry,p_monopoly,flags") != std::string::npos);
  CHECK(csv.find("real_world,estimated_set,\"[6.2, 25.9]\"") != std::string::npos);
  CHECK(csv.find("shut_down,estimated_set,\"[0.0, 0.0]\"") != std::string::npos);
  // The shut-down row lists the flagged column by name.
  CHECK(csv.find("\"p_no_entry\"") != std::string::npos);
  CHECK(csv.find("observed,observed,16.1") != std::string::npos);
}

TEST_CASE("json mirror keeps full precision and metadata") {
  ReportTable t = sample_table();
  t.observed = {{"p_no_entry", 16.1}};
  t.seed = 11;
  t.n_draws = 4000;
  t.mode = "mc";
  t.level = 0.95;
  flag_observed(t);
  nlohmann::json j = report_table_json(t);
  CHECK(j["rows"][0]["cells"][0]["estimated_set"][1].get<double>() == 25.9);
  CHECK(j["metadata"]["credible_rule"] == "width_ranked");
  CHECK(j["metadata"]["level"].get<double>() == 0.95);
  // Flags in the mirror are re-checkable against the full-precision values.
  bool flagged = j["rows"][1]["cells"][0]["estimated_excludes_observed"];
  double lo = j["rows"][1]["cells"][0]["estimated_set"][0];
  double hi = j["rows"][1]["cells"][0]["estimated_set"][1];
  double obs = j["observed"]["p_no_entry"];
  CHECK(flagged == !(lo <= obs && obs <= hi));
}

TEST_CASE("ragged rows are rejected") {
  ReportTable t = sample_table();
  t.rows[0].cells.pop_back();
  CHECK_THROWS_AS(flag_observed(t), DimensionError);
}
