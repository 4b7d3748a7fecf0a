#pragma once

#include "cpds/engine.hpp"
#include "fixtures.hpp"

namespace cpds::testing {

inline EventSet pure_entry_event() {
  Polyhedron a;
  a.dim = 4;
  a.eq.push_back({{1, 0, 0, 0}, 0.0});
  a.eq.push_back({{0, 1, 0, 0}, 0.0});
  Polyhedron b;
  b.dim = 4;
  b.eq.push_back({{1, 0, 0, 0}, 0.0});
  b.eq.push_back({{0, 0, 1, 0}, 0.0});
  return EventSet{RegionUnion{a, b}};
}

inline CounterfactualSpec two_point_spec(Game first, Game second, double w_first,
                                         Concept concept_kind,
                                         OutcomeSpec outcome,
                                         std::optional<EventSet> events = {}) {
  CounterfactualSpec spec;
  spec.players = first.actions.num_players();
  spec.actions = first.actions;
  DiscreteSupport support;
  support.games = {std::move(first), std::move(second)};
  support.probs = {w_first, 1.0 - w_first};
  spec.dist = std::move(support);
  spec.solution_concept = concept_kind;
  spec.outcome = std::move(outcome);
  spec.events = std::move(events);
  return spec;
}

// The curve-sweep configuration: x ~ N(0.4375, 0.25^2), eps ~ N(0, 0.125^2),
// competitive effect -1, intercept and slope bound to theta.
inline CounterfactualSpec curve_sweep_spec(Concept concept_kind, OutcomeSpec outcome,
                                           double alpha = 0.0, double beta = 1.0) {
  CounterfactualSpec spec;
  spec.players = 2;
  spec.actions = ActionSpace({2, 2});
  LinearEntryTemplate tmpl;
  tmpl.base.alpha = {0.0, 0.0};
  tmpl.base.beta = {{1.0}, {1.0}};
  tmpl.base.delta = {{0.0, -1.0}, {-1.0, 0.0}};
  tmpl.base.x = {{0.0}, {0.0}};
  tmpl.base.epsilon = {0.0, 0.0};
  tmpl.bindings.push_back({"alpha", ThetaBinding::Target::alpha, -1, -1, -1, alpha});
  tmpl.bindings.push_back({"beta", ThetaBinding::Target::beta, -1, -1, -1, beta});
  spec.utility = std::move(tmpl);
  ParametricDist dist;
  ScalarDist x;
  x.kind = ScalarDist::Kind::normal;
  x.mean = 0.4375;
  x.sd = 0.25;
  ScalarDist eps;
  eps.kind = ScalarDist::Kind::normal;
  eps.mean = 0.0;
  eps.sd = 0.125;
  dist.x = {{x}, {x}};
  dist.epsilon = {eps, eps};
  spec.dist = std::move(dist);
  spec.solution_concept = concept_kind;
  spec.outcome = std::move(outcome);
  return spec;
}

// Finite support sampled from the curve-sweep distribution, uniform weights.
inline CounterfactualSpec discretized_support_spec(std::size_t points,
                                                   Concept concept_kind,
                                                   OutcomeSpec outcome,
                                                   std::optional<EventSet> events,
                                                   std::uint64_t seed) {
  CounterfactualSpec source =
      curve_sweep_spec(concept_kind, outcome, 0.25, 1.0);
  std::vector<double> theta = source.default_theta();
  std::vector<Game> games = draw_utilities(source, theta, points, seed);
  CounterfactualSpec spec;
  spec.players = 2;
  spec.actions = games[0].actions;
  DiscreteSupport support;
  support.games = std::move(games);
  support.probs.assign(points, 1.0 / static_cast<double>(points));
  spec.dist = std::move(support);
  spec.solution_concept = concept_kind;
  spec.outcome = outcome;
  spec.events = std::move(events);
  return spec;
}

}  // namespace cpds::testing
