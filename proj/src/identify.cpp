#include "cpds/identify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "cpds/errors.hpp"
#include "cpds/rng.hpp"

namespace cpds {

void ThetaGrid::validate() const {
  if (nodes.empty()) throw ConfigError("theta grid is empty");
  const std::size_t d = nodes[0].size();
  if (d == 0) throw ConfigError("theta grid nodes need at least one coordinate");
  for (const auto& n : nodes)
    if (n.size() != d) throw ConfigError("theta grid nodes disagree on dimension");
}

std::pair<double, double> ThetaGrid::hull(std::size_t d) const {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& n : nodes) {
    lo = std::min(lo, n.at(d));
    hi = std::max(hi, n.at(d));
  }
  return {lo, hi};
}

Quantity quantity_from_string(const std::string& s) {
  if (s == "outcome_bounds") return Quantity::outcome_bounds;
  if (s == "event_probability") return Quantity::event_probability;
  if (s == "e_sup") return Quantity::e_sup;
  if (s == "e_inf") return Quantity::e_inf;
  if (s == "p_could") return Quantity::p_could;
  if (s == "p_must") return Quantity::p_must;
  if (s == "p_cannot") return Quantity::p_cannot;
  throw ConfigError("unknown quantity selector '" + s + "'");
}

const char* quantity_name(Quantity q) {
  switch (q) {
    case Quantity::outcome_bounds: return "outcome_bounds";
    case Quantity::event_probability: return "event_probability";
    case Quantity::e_sup: return "e_sup";
    case Quantity::e_inf: return "e_inf";
    case Quantity::p_could: return "p_could";
    case Quantity::p_must: return "p_must";
    case Quantity::p_cannot: return "p_cannot";
  }
  return "?";
}

namespace {

std::pair<double, double> quantity_fields(const PartialCpds& r, Quantity q) {
  switch (q) {
    case Quantity::outcome_bounds: return {r.e_inf, r.e_sup};
    case Quantity::event_probability: return {r.p_must, r.p_could};
    case Quantity::e_sup: return {r.e_sup, r.e_sup};
    case Quantity::e_inf: return {r.e_inf, r.e_inf};
    case Quantity::p_could: return {r.p_could, r.p_could};
    case Quantity::p_must: return {r.p_must, r.p_must};
    case Quantity::p_cannot: return {r.p_cannot, r.p_cannot};
  }
  return {0, 0};
}

}  // namespace

QuantityInterval population_bounds(const QuantityProfile& profile,
                                   const IdentifiedSetDraw& theta_set,
                                   Quantity quantity) {
  if (theta_set.node_ids.empty())
    throw EmptinessError("identified-set draw has no grid nodes");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t id : theta_set.node_ids) {
    if (id >= profile.per_node.size())
      throw DimensionError("identified-set node id out of range");
    auto [l, h] = quantity_fields(profile.per_node[id], quantity);
    if (std::isnan(l) || std::isnan(h))
      throw ConfigError("profile node " + std::to_string(id) +
                        " lacks the requested quantity");
    lo = std::min(lo, l);
    hi = std::max(hi, h);
  }
  return {lo, hi};
}

std::vector<QuantityInterval> posterior_cpds(const QuantityProfile& profile,
                                             std::span<const IdentifiedSetDraw> draws,
                                             Quantity quantity) {
  if (draws.empty()) throw ConfigError("posterior has no draws");
  std::vector<QuantityInterval> out;
  out.reserve(draws.size());
  for (std::size_t j = 0; j < draws.size(); ++j) {
    if (draws[j].node_ids.empty())
      throw EmptinessError("posterior draw " + std::to_string(j) + " is empty", j);
    out.push_back(population_bounds(profile, draws[j], quantity));
  }
  return out;
}

QuantityInterval estimated_identified_set(std::span<const QuantityInterval> intervals) {
  if (intervals.empty()) throw ConfigError("no intervals to summarize");
  double lo = 0.0, hi = 0.0;
  for (const auto& iv : intervals) {
    lo += iv.lo;
    hi += iv.hi;
  }
  double n = static_cast<double>(intervals.size());
  return {lo / n, hi / n};
}

QuantityInterval credible_set(std::span<const QuantityInterval> intervals,
                              double level) {
  if (intervals.empty()) throw ConfigError("no intervals to summarize");
  if (!(level > 0.0 && level <= 1.0)) throw ConfigError("level must be in (0, 1]");
  std::vector<std::size_t> order(intervals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return intervals[a].hi - intervals[a].lo < intervals[b].hi - intervals[b].lo;
  });
  const auto keep = static_cast<std::size_t>(
      std::ceil(level * static_cast<double>(intervals.size())));
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k < keep; ++k) {
    lo = std::min(lo, intervals[order[k]].lo);
    hi = std::max(hi, intervals[order[k]].hi);
  }
  return {lo, hi};
}

IdentifiedSetDraw grid_nodes_in_box(const ThetaGrid& grid, const ThetaBox& box) {
  if (box.lo.size() != grid.dim() || box.hi.size() != grid.dim())
    throw DimensionError("box dimension does not match the theta grid");
  IdentifiedSetDraw draw;
  for (std::size_t id = 0; id < grid.nodes.size(); ++id) {
    bool inside = true;
    for (std::size_t d = 0; d < grid.dim(); ++d) {
      double v = grid.nodes[id][d];
      if (v < box.lo[d] || v > box.hi[d]) {
        inside = false;
        break;
      }
    }
    if (inside) draw.node_ids.push_back(id);
  }
  return draw;
}

std::vector<IdentifiedSetDraw> ingest_posterior(const std::string& path,
                                                const ThetaGrid& grid) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open posterior file '" + path + "'", 0);
  return ingest_posterior_stream(in, grid);
}

std::vector<IdentifiedSetDraw> ingest_posterior_stream(std::istream& in,
                                                       const ThetaGrid& grid) {
  grid.validate();
  std::vector<IdentifiedSetDraw> draws;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::size_t colon = line.find(':', start);
    if (colon == std::string::npos)
      throw IngestionError("expected 'draw_id: ...'", line_no);
    std::string rest = line.substr(colon + 1);
    std::istringstream body(rest);
    std::string first;
    if (!(body >> first)) throw IngestionError("empty draw body", line_no);

    IdentifiedSetDraw draw;
    if (first == "box") {
      ThetaBox box;
      double v;
      std::vector<double> values;
      while (body >> v) values.push_back(v);
      if (values.size() != 2 * grid.dim())
        throw IngestionError("box needs " + std::to_string(2 * grid.dim()) +
                                 " numbers, got " + std::to_string(values.size()),
                             line_no);
      for (std::size_t d = 0; d < grid.dim(); ++d) {
        box.lo.push_back(values[2 * d]);
        box.hi.push_back(values[2 * d + 1]);
      }
      draw = grid_nodes_in_box(grid, box);
      if (draw.node_ids.empty())
        throw IngestionError("box draw contains no grid nodes", line_no);
    } else {
      // comma- or space-separated node ids
      for (char& ch : rest)
        if (ch == ',') ch = ' ';
      std::istringstream ids(rest);
      long long id;
      while (ids >> id) {
        if (id < 0 || static_cast<std::size_t>(id) >= grid.size())
          throw IngestionError("unknown node id " + std::to_string(id), line_no);
        draw.node_ids.push_back(static_cast<std::size_t>(id));
      }
      if (ids.fail() && !ids.eof())
        throw IngestionError("malformed node id list", line_no);
      std::sort(draw.node_ids.begin(), draw.node_ids.end());
      draw.node_ids.erase(std::unique(draw.node_ids.begin(), draw.node_ids.end()),
                          draw.node_ids.end());
      if (draw.node_ids.empty())
        throw IngestionError("draw has no node ids", line_no);
    }
    draws.push_back(std::move(draw));
  }
  if (draws.empty()) throw IngestionError("posterior file has no draws", line_no);
  return draws;
}

std::vector<IdentifiedSetDraw> synthetic_posterior(const ThetaBox& truth,
                                                   std::uint64_t N, std::size_t J,
                                                   std::uint64_t seed,
                                                   const ThetaGrid& grid,
                                                   double scale_c) {
  grid.validate();
  if (J < 1 || N < 1) throw ConfigError("synthetic posterior needs J >= 1 and N >= 1");
  if (truth.lo.size() != grid.dim() || truth.hi.size() != grid.dim())
    throw DimensionError("truth box dimension does not match the theta grid");
  const double scale = scale_c / std::sqrt(static_cast<double>(N));
  constexpr std::uint64_t kRetryCap = 64;

  std::vector<IdentifiedSetDraw> draws;
  draws.reserve(J);
  for (std::size_t j = 0; j < J; ++j) {
    IdentifiedSetDraw draw;
    bool ok = false;
    for (std::uint64_t attempt = 0; attempt < kRetryCap && !ok; ++attempt) {
      const std::uint64_t stream = j * kRetryCap + attempt;
      ThetaBox box;
      for (std::size_t d = 0; d < grid.dim(); ++d) {
        double lo = truth.lo[d] + scale * rng::normal_sample(seed ^ N, stream, 2 * d, 0, 1);
        double hi = truth.hi[d] + scale * rng::normal_sample(seed ^ N, stream, 2 * d + 1, 0, 1);
        if (lo > hi) std::swap(lo, hi);
        auto [hull_lo, hull_hi] = grid.hull(d);
        box.lo.push_back(std::max(lo, hull_lo));
        box.hi.push_back(std::min(hi, hull_hi));
      }
      draw = grid_nodes_in_box(grid, box);
      ok = !draw.node_ids.empty();
    }
    if (!ok)
      throw ConfigError("synthetic posterior draw " + std::to_string(j) +
                        " stayed empty after retries");
    draws.push_back(std::move(draw));
  }
  return draws;
}

}  // namespace cpds
