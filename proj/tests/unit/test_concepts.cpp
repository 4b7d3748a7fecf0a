#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cpds/concepts.hpp"
#include "cpds/errors.hpp"
#include "cpds/simplex.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cpds;
using namespace cpds::testing;

namespace {

bool has_degenerate_vertex(const SolutionSet& set, std::size_t profile) {
  for (const auto& v : set.vertices())
    if (v.probs[profile] == 1.0) return true;
  return false;
}

RegionUnion pure_entry_union() {
  // p1 = 1 is the face {s00 = 0, s01 = 0}; p2 = 1 is {s00 = 0, s10 = 0}.
  Polyhedron a;
  a.dim = 4;
  a.eq.push_back({{1, 0, 0, 0}, 0.0});
  a.eq.push_back({{0, 1, 0, 0}, 0.0});
  Polyhedron b;
  b.dim = 4;
  b.eq.push_back({{1, 0, 0, 0}, 0.0});
  b.eq.push_back({{0, 0, 1, 0}, 0.0});
  return {a, b};
}

}  // namespace

TEST_CASE("pure equilibria of the canonical games") {
  SolutionSet mult = enumerate_psne(multi_equilibrium_entry_game());
  REQUIRE(mult.vertices().size() == 2);
  CHECK(has_degenerate_vertex(mult, 1));  // (0,1)
  CHECK(has_degenerate_vertex(mult, 2));  // (1,0)

  SolutionSet dom = enumerate_psne(dominant_entry_game());
  REQUIRE(dom.vertices().size() == 1);
  CHECK(has_degenerate_vertex(dom, 3));

  CHECK(enumerate_psne(cycle_entry_game()).vertices().empty());
}

TEST_CASE("psne uses weak inequalities, so ties stay in") {
  ActionSpace a({2, 2});
  Game g = Game::make(a, {{0, 0, 0, 0}, {0, 0, 0, 0}});
  CHECK(enumerate_psne(g).vertices().size() == 4);
}

TEST_CASE("2x2 mixed solver on the canonical games") {
  SolutionSet mult = solve_mixed_ne_2x2(multi_equilibrium_entry_game());
  REQUIRE(mult.vertices().size() == 3);
  const Solution& mixed = mult.vertices().back();
  CHECK(mixed.probs[0] == doctest::Approx(0.12).epsilon(1e-12));
  CHECK(mixed.probs[1] == doctest::Approx(0.18).epsilon(1e-12));
  CHECK(mixed.probs[2] == doctest::Approx(0.28).epsilon(1e-12));
  CHECK(mixed.probs[3] == doctest::Approx(0.42).epsilon(1e-12));

  SolutionSet dom = solve_mixed_ne_2x2(dominant_entry_game());
  REQUIRE(dom.vertices().size() == 1);
  CHECK(dom.vertices()[0].probs[3] == 1.0);

  SolutionSet pennies = solve_mixed_ne_2x2(matching_pennies());
  REQUIRE(pennies.vertices().size() == 1);
  for (double p : pennies.vertices()[0].probs) CHECK(p == doctest::Approx(0.25));

  CHECK_THROWS_AS(solve_mixed_ne_2x2(cycle_entry_game()), UnsupportedError);
}

TEST_CASE("mixed equilibria agree with a 1e-3 grid regret scan") {
  // Every exact equilibrium must look like an approximate equilibrium on the
  // grid, and every low-regret grid point must sit near an exact equilibrium.
  std::mt19937 gen(29);
  for (int rep = 0; rep < 20; ++rep) {
    Game g = random_entry_game(gen);
    SolutionSet set = solve_mixed_ne_2x2(g);
    std::vector<std::pair<double, double>> exact;
    for (const auto& v : set.vertices()) {
      double p1 = v.probs[2] + v.probs[3];
      double p2 = v.probs[1] + v.probs[3];
      exact.emplace_back(p1, p2);
      CHECK(regret_2x2(g, p1, p2) <= 1e-9);
    }
    const double step = 1e-3;
    for (double p1 = 0.0; p1 <= 1.0 + 1e-12; p1 += step)
      for (double p2 = 0.0; p2 <= 1.0 + 1e-12; p2 += step) {
        if (regret_2x2(g, p1, p2) > 1e-8) continue;
        double nearest = 1e300;
        for (auto [q1, q2] : exact)
          nearest = std::min(nearest,
                             std::max(std::fabs(p1 - q1), std::fabs(p2 - q2)));
        CHECK(nearest <= 5e-3);
      }
  }
}

TEST_CASE("every returned solution is a probability vector") {
  std::mt19937 gen(31);
  for (int rep = 0; rep < 200; ++rep) {
    Game g = rep % 2 ? random_entry_game(gen) : random_tensor_game(gen);
    SolutionSet mixed = solve_mixed_ne_2x2(g);
    for (const auto& v : mixed.vertices()) CHECK(v.is_distribution());
    SolutionSet pure = enumerate_psne(g);
    for (const auto& v : pure.vertices()) CHECK(v.is_distribution());
  }
}

TEST_CASE("correlated equilibrium constraint counts") {
  SolutionSet set = ce_constraints(multi_equilibrium_entry_game());
  const Polyhedron& poly = set.polyhedron();
  // 4 obedience rows, then 4 nonnegativity rows, then the unit-sum equality.
  CHECK(poly.le.size() == 8);
  CHECK(poly.eq.size() == 1);

  SolutionSet cycle_set = ce_constraints(cycle_entry_game());
  const Polyhedron& cycle = cycle_set.polyhedron();
  CHECK(cycle.le.size() == 6 + 8);
  CHECK(cycle.eq.size() == 1);
}

TEST_CASE("cycle game has a nonempty correlated equilibrium polytope") {
  SolutionSet cycle_ce = ce_constraints(cycle_entry_game());
  const Polyhedron& poly = cycle_ce.polyhedron();
  CHECK(lp_feasible(poly).status == LpStatus::optimal);
  // The independent uniform profile distribution satisfies every constraint.
  std::vector<double> uniform(8, 0.125);
  CHECK(poly.contains(uniform));
}

TEST_CASE("dominance collapses the CE polytope to a point") {
  SolutionSet set = ce_constraints(dominant_entry_game());
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<double> e(4, 0.0);
    e[k] = 1.0;
    double hi = maximize_over(set, {e, 0.0}, Direction::maximize).value;
    double lo = maximize_over(set, {e, 0.0}, Direction::minimize).value;
    CHECK(hi == doctest::Approx(lo).epsilon(1e-9));
    CHECK(hi == doctest::Approx(k == 3 ? 1.0 : 0.0).epsilon(1e-9));
  }
}

TEST_CASE("maximize_over on vertex sets and polytopes") {
  Game mult = multi_equilibrium_entry_game();
  LinearFunctional entrants{{0, 1, 1, 2}, 0.0};

  Optimum co_ne = maximize_over(solve_mixed_ne_2x2(mult), entrants,
                                Direction::maximize);
  CHECK(co_ne.value == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(co_ne.arg.probs[3] == doctest::Approx(0.42));

  SolutionSet ce = ce_constraints(mult);
  Optimum ce_max = maximize_over(ce, entrants, Direction::maximize);
  CHECK(ce_max.value == doctest::Approx(65.0 / 44.0).epsilon(1e-9));
  Optimum ce_min = maximize_over(ce, entrants, Direction::minimize);
  CHECK(ce_min.value == doctest::Approx(23.0 / 29.0).epsilon(1e-9));

  // Singleton: the functional evaluated at the point.
  SolutionSet singleton = solve_mixed_ne_2x2(dominant_entry_game());
  Optimum at_point = maximize_over(singleton, entrants, Direction::minimize);
  CHECK(at_point.value == doctest::Approx(2.0));

  SolutionSet empty = enumerate_psne(cycle_entry_game());
  CHECK_THROWS_AS(maximize_over(empty, entrants, Direction::maximize),
                  EmptinessError);
}

TEST_CASE("intersects") {
  Game mult = multi_equilibrium_entry_game();
  SolutionSet co_ne = solve_mixed_ne_2x2(mult);
  RegionUnion faces = pure_entry_union();
  CHECK(intersects(co_ne, faces[0]));  // vertex (0,0,1,0) has p1 = 1

  SolutionSet dom = solve_mixed_ne_2x2(dominant_entry_game());
  Polyhedron no_duopoly;
  no_duopoly.dim = 4;
  no_duopoly.eq.push_back({{0, 0, 0, 1}, 0.0});
  CHECK_FALSE(intersects(dom, no_duopoly));

  CHECK(intersects(co_ne, simplex_polyhedron(4)));
  CHECK_THROWS_AS(intersects(enumerate_psne(cycle_entry_game()),
                             simplex_polyhedron(8)),
                  EmptinessError);
}

TEST_CASE("intersects finds interior convex combinations") {
  // No vertex lies in the region but a mixture does.
  Game mult = multi_equilibrium_entry_game();
  SolutionSet co_ne = solve_mixed_ne_2x2(mult);
  Polyhedron mid;  // s01 = s10, s11 = 0: mix of the two monopoly equilibria
  mid.dim = 4;
  mid.eq.push_back({{0, 1, -1, 0}, 0.0});
  mid.eq.push_back({{0, 0, 0, 1}, 0.0});
  CHECK(intersects(co_ne, mid));
}

TEST_CASE("subset_of decides the paper's pure-entry events") {
  RegionUnion faces = pure_entry_union();
  CHECK(subset_of(solve_mixed_ne_2x2(dominant_entry_game()), faces) == Tribool::yes);
  CHECK(subset_of(solve_mixed_ne_2x2(multi_equilibrium_entry_game()), faces) ==
        Tribool::no);
  CHECK(subset_of(ce_constraints(multi_equilibrium_entry_game()),
                  {simplex_polyhedron(4)}) == Tribool::yes);
  CHECK(subset_of(ce_constraints(dominant_entry_game()), faces) == Tribool::yes);
  CHECK_THROWS_AS(subset_of(enumerate_psne(cycle_entry_game()),
                            {simplex_polyhedron(8)}),
                  EmptinessError);
}

TEST_CASE("subset_of is indeterminate only on genuinely undecided unions") {
  // Vertices split across the two faces: the hull leaves the union, but no
  // vertex witnesses it. The sound answer is indeterminate.
  SolutionSet set = SolutionSet::from_vertices(
      {Solution{{0, 0, 1, 0}}, Solution{{0, 1, 0, 0}}});
  CHECK(subset_of(set, pure_entry_union()) == Tribool::indeterminate);
}

TEST_CASE("correlated equilibria contain the convex hull of Nash equilibria") {
  std::mt19937 gen(37);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  for (int rep = 0; rep < 1000; ++rep) {
    Game g = random_entry_game(gen);
    SolutionSet ce_set = ce_constraints(g);
    const Polyhedron& ce = ce_set.polyhedron();
    SolutionSet ne_set = solve_mixed_ne_2x2(g);
    const auto& ne = ne_set.vertices();
    REQUIRE(!ne.empty());
    for (const auto& v : ne) CHECK(ce.contains(v.probs, 1e-9));
    for (int combo = 0; combo < 10; ++combo) {
      std::vector<double> weights(ne.size());
      double total = 0.0;
      for (auto& x : weights) total += (x = w(gen) + 1e-9);
      std::vector<double> point(4, 0.0);
      for (std::size_t k = 0; k < ne.size(); ++k)
        for (std::size_t j = 0; j < 4; ++j)
          point[j] += weights[k] / total * ne[k].probs[j];
      CHECK(ce.contains(point, 1e-9));
    }
  }
}

TEST_CASE("entry games with strict payoffs have 1 or 3 equilibria") {
  std::mt19937 gen(41);
  for (int rep = 0; rep < 500; ++rep) {
    Game g = random_entry_game(gen);
    std::size_t count = solve_mixed_ne_2x2(g).vertices().size();
    CHECK((count == 1 || count == 3));
  }
}

TEST_CASE("only utility differences matter") {
  std::mt19937 gen(43);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  std::uniform_real_distribution<double> scale(0.1, 4.0);
  LinearFunctional entrants{{0, 1, 1, 2}, 0.0};
  for (int rep = 0; rep < 500; ++rep) {
    Game g = rep % 2 ? random_entry_game(gen) : random_tensor_game(gen);
    Game shifted = g;
    Game scaled = g;
    int player = rep % 2;
    double c = shift(gen), lambda = scale(gen);
    for (auto& v : shifted.utility[player]) v += c;
    for (auto& v : scaled.utility[player]) v *= lambda;

    for (const Game* variant : {&shifted, &scaled}) {
      auto base_pure = enumerate_psne(g).vertices();
      auto var_pure = enumerate_psne(*variant).vertices();
      REQUIRE(base_pure.size() == var_pure.size());
      for (std::size_t k = 0; k < base_pure.size(); ++k)
        CHECK(base_pure[k].probs == var_pure[k].probs);

      auto base_ne = solve_mixed_ne_2x2(g).vertices();
      auto var_ne = solve_mixed_ne_2x2(*variant).vertices();
      REQUIRE(base_ne.size() == var_ne.size());
      for (std::size_t k = 0; k < base_ne.size(); ++k)
        for (std::size_t j = 0; j < 4; ++j)
          CHECK(base_ne[k].probs[j] ==
                doctest::Approx(var_ne[k].probs[j]).epsilon(1e-9));

      for (auto dir : {Direction::maximize, Direction::minimize}) {
        double base_opt = maximize_over(ce_constraints(g), entrants, dir).value;
        double var_opt = maximize_over(ce_constraints(*variant), entrants, dir).value;
        CHECK(base_opt == doctest::Approx(var_opt).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("max dominates min; equality only for directionally degenerate sets") {
  std::mt19937 gen(47);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    Game g = random_tensor_game(gen);
    SolutionSet set = rep % 2 ? ce_constraints(g) : solve_mixed_ne_2x2(g);
    std::vector<double> coeffs(4);
    for (auto& v : coeffs) v = c(gen);
    LinearFunctional f{coeffs, 0.0};
    double hi = maximize_over(set, f, Direction::maximize).value;
    double lo = maximize_over(set, f, Direction::minimize).value;
    CHECK(hi >= lo - 1e-9);
  }
}

TEST_CASE("knife-edge indifference is excluded but counted") {
  // Player 1 is indifferent everywhere; partially-mixed continua exist.
  ActionSpace a({2, 2});
  Game g = Game::make(a, {{0, 0, 0, 0}, {0.3, -0.2, 0.3, -0.2}});
  SolutionSet set = solve_mixed_ne_2x2(g);
  CHECK(set.knife_edge_count > 0);
  for (const auto& v : set.vertices()) CHECK(v.is_distribution());
}
