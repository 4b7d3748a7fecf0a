#pragma once

#include <random>

#include "cpds/game.hpp"

namespace cpds::testing {

// Entry game with monopoly payoffs (0.6, 0.7) and competitive effect -1:
// two pure equilibria plus an interior mixed one.
inline Game multi_equilibrium_entry_game() {
  LinearEntryGameParams p;
  p.alpha = {0.6, 0.7};
  p.beta = {{0.0}, {0.0}};
  p.delta = {{0.0, -1.0}, {-1.0, 0.0}};
  p.x = {{0.0}, {0.0}};
  p.epsilon = {0.0, 0.0};
  return build_linear_entry_game(p);
}

// Entry is strictly dominant for both players: unique equilibrium (1,1).
inline Game dominant_entry_game() {
  LinearEntryGameParams p;
  p.alpha = {1.5, 1.2};
  p.beta = {{0.0}, {0.0}};
  p.delta = {{0.0, -1.0}, {-1.0, 0.0}};
  p.x = {{0.0}, {0.0}};
  p.epsilon = {0.0, 0.0};
  return build_linear_entry_game(p);
}

// Three-player entry cycle: each player profits exactly when its successor
// stays out, so no pure-strategy equilibrium exists.
inline Game cycle_entry_game() {
  LinearEntryGameParams p;
  p.alpha = {1.0, 1.0, 1.0};
  p.beta = {{0.0}, {0.0}, {0.0}};
  p.delta = {{0.0, -2.0, 0.0}, {0.0, 0.0, -2.0}, {-2.0, 0.0, 0.0}};
  p.x = {{0.0}, {0.0}, {0.0}};
  p.epsilon = {0.0, 0.0, 0.0};
  return build_linear_entry_game(p);
}

inline Game matching_pennies() {
  ActionSpace actions({2, 2});
  return Game::make(actions, {{1.0, -1.0, -1.0, 1.0}, {-1.0, 1.0, 1.0, -1.0}});
}

// Random 2x2 entry game with monopoly payoffs in (margin, 1] and competitive
// effect in [-1.5, -0.5]; duopoly payoffs stay bounded away from zero.
inline Game random_entry_game(std::mt19937& gen, double margin = 0.05) {
  std::uniform_real_distribution<double> pi(margin, 1.0);
  std::uniform_real_distribution<double> comp(0.5, 1.5);
  LinearEntryGameParams p;
  double d1 = -(pi(gen) + comp(gen) * margin);  // duopoly payoff < -margin
  double d2 = -(pi(gen) + comp(gen) * margin);
  double pi1 = pi(gen), pi2 = pi(gen);
  p.alpha = {pi1, pi2};
  p.beta = {{0.0}, {0.0}};
  p.delta = {{0.0, d1 - pi1}, {d2 - pi2, 0.0}};
  p.x = {{0.0}, {0.0}};
  p.epsilon = {0.0, 0.0};
  return build_linear_entry_game(p);
}

// Entry-structured 2x2 game with random monopoly/duopoly payoff signs, all
// bounded away from zero.
inline Game random_signed_entry_game(std::mt19937& gen, double margin = 0.05) {
  std::uniform_real_distribution<double> mag(margin, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  auto draw = [&] { return (coin(gen) ? 1.0 : -1.0) * mag(gen); };
  double m1 = draw(), d1 = draw(), m2 = draw(), d2 = draw();
  ActionSpace actions({2, 2});
  return Game::make(actions, {{0.0, 0.0, m1, d1}, {0.0, m2, 0.0, d2}});
}

// Fully random 2x2 utility tensor in [-1, 1].
inline Game random_tensor_game(std::mt19937& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ActionSpace actions({2, 2});
  std::vector<std::vector<double>> utility(2, std::vector<double>(4));
  for (auto& row : utility)
    for (auto& v : row) v = u(gen);
  return Game::make(actions, std::move(utility));
}

}  // namespace cpds::testing
