#pragma once

#include <span>
#include <string>

#include "cpds/game.hpp"
#include "cpds/solution.hpp"

namespace cpds {

enum class Concept { psne, mixed2x2, ce };

Concept concept_from_string(const std::string& name);
const char* concept_name(Concept c);

enum class Tribool { no, yes, indeterminate };

enum class Direction { minimize, maximize };

struct Optimum {
  double value = 0.0;
  Solution arg;
};

// Profiles at which no player has a profitable unilateral deviation, with weak
// inequality so payoff ties count as best responses. May be empty.
SolutionSet enumerate_psne(const Game& game);

// All Nash equilibria of a 2-player, 2-action game as joint distributions:
// the pure equilibria plus the interior mixed equilibrium when each player's
// indifference probability lies strictly in (0,1). Exact-indifference
// continua are excluded and counted in knife_edge_count.
SolutionSet solve_mixed_ne_2x2(const Game& game);

// Correlated-equilibrium polytope: per player and ordered action pair the
// obedience inequality, plus explicit simplex constraints.
SolutionSet ce_constraints(const Game& game);

// Exact optimum of an affine functional over the convex hull of the set:
// vertex scan for vertex sets, LP for polyhedra.
Optimum maximize_over(const SolutionSet& set, const LinearFunctional& f,
                      Direction direction);

// Whether co(set) intersects the given region.
bool intersects(const SolutionSet& set, const Polyhedron& region);

// Sound partial decision of co(set) being contained in a union of polyhedra.
// Decides yes for a single region via support-function checks, or when all
// vertices land in one common component; decides no when a witness point of
// co(set) lies outside the whole union; otherwise indeterminate.
Tribool subset_of(const SolutionSet& set, const RegionUnion& regions);

}  // namespace cpds
