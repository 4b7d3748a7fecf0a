#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cpds/engine.hpp"

namespace cpds {

struct ThetaGrid {
  std::vector<std::vector<double>> nodes;  // node id = position

  std::size_t dim() const { return nodes.empty() ? 0 : nodes[0].size(); }
  std::size_t size() const { return nodes.size(); }
  void validate() const;
  std::pair<double, double> hull(std::size_t d) const;
};

// Per-node engine results for one quantity column.
struct QuantityProfile {
  std::vector<PartialCpds> per_node;
};

// One posterior draw of the identified set, as a subset of grid nodes.
struct IdentifiedSetDraw {
  std::vector<std::size_t> node_ids;  // sorted, unique, nonempty
};

struct QuantityInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Which field(s) of a PartialCpds a reported quantity reads. Averaged-outcome
// quantities pair (e_inf, e_sup); event quantities pair (p_must, p_could);
// single fields use min/max of that field.
enum class Quantity {
  outcome_bounds,
  event_probability,
  e_sup,
  e_inf,
  p_could,
  p_must,
  p_cannot,
};

Quantity quantity_from_string(const std::string& s);
const char* quantity_name(Quantity q);

// Envelope of the per-node quantity over the nodes of one identified-set draw.
QuantityInterval population_bounds(const QuantityProfile& profile,
                                   const IdentifiedSetDraw& theta_set,
                                   Quantity quantity);

// One interval per posterior draw.
std::vector<QuantityInterval> posterior_cpds(const QuantityProfile& profile,
                                             std::span<const IdentifiedSetDraw> draws,
                                             Quantity quantity);

// Mean of lower bounds, mean of upper bounds.
QuantityInterval estimated_identified_set(std::span<const QuantityInterval> intervals);

// Envelope of the narrowest ceil(level * J) draws, width-ranked with ties by
// draw index.
QuantityInterval credible_set(std::span<const QuantityInterval> intervals,
                              double level);

// Posterior file: one draw per line, either "id: n1,n2,..." (grid membership)
// or "id: box lo_1 hi_1 ... lo_d hi_d" (intersected with the grid).
std::vector<IdentifiedSetDraw> ingest_posterior(const std::string& path,
                                                const ThetaGrid& grid);
std::vector<IdentifiedSetDraw> ingest_posterior_stream(std::istream& in,
                                                       const ThetaGrid& grid);

struct ThetaBox {
  std::vector<double> lo, hi;
};

// Synthetic posterior draws around a truth box: every endpoint is perturbed by
// independent noise of scale c/sqrt(N), clipped to the grid hull, and
// intersected with the grid. Draws that come out empty are regenerated up to a
// retry cap.
std::vector<IdentifiedSetDraw> synthetic_posterior(const ThetaBox& truth,
                                                   std::uint64_t N, std::size_t J,
                                                   std::uint64_t seed,
                                                   const ThetaGrid& grid,
                                                   double scale_c = 1.0);

// Grid nodes inside the (inclusive) box.
IdentifiedSetDraw grid_nodes_in_box(const ThetaGrid& grid, const ThetaBox& box);

}  // namespace cpds
