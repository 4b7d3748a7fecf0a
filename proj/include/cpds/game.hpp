#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cpds {

using Count = std::uint32_t;

// Finite action space: one action count per decision maker. Profile indices
// are row-major with player 0 most significant, so a 2x2 game orders joint
// probabilities as (p00, p01, p10, p11).
class ActionSpace {
 public:
  ActionSpace() = default;
  explicit ActionSpace(std::vector<Count> sizes);  // validates, overflow-checked

  std::size_t num_players() const { return sizes_.size(); }
  std::size_t num_profiles() const { return num_profiles_; }
  Count size(std::size_t player) const { return sizes_.at(player); }
  const std::vector<Count>& sizes() const { return sizes_; }
  bool binary() const;

  std::size_t profile_index(std::span<const Count> tuple) const;
  std::vector<Count> profile_tuple(std::size_t index) const;
  void profile_tuple_into(std::size_t index, std::span<Count> out) const;

  bool operator==(const ActionSpace& o) const { return sizes_ == o.sizes_; }

 private:
  std::vector<Count> sizes_;
  std::size_t num_profiles_ = 0;
};

// Normal-form game as a dense utility tensor, [player][profile]. Immutable by
// convention once built; all operations on it are pure.
struct Game {
  ActionSpace actions;
  std::vector<std::vector<double>> utility;

  static Game make(ActionSpace actions, std::vector<std::vector<double>> utility);
  double payoff(std::size_t player, std::size_t profile) const;
  void validate() const;
};

// Parameters of the linear entry-game family: payoff to entering is
// alpha_i + x_i . beta_i + sum_{j != i} delta_ij a_j + epsilon_i, and the
// payoff to staying out is normalized to zero. delta is a full per-pair
// matrix with zero diagonal, covering asymmetric competitive effects.
struct LinearEntryGameParams {
  std::vector<double> alpha;               // [player]
  std::vector<std::vector<double>> beta;   // [player][covariate]
  std::vector<std::vector<double>> delta;  // [player][player], zero diagonal
  std::vector<std::vector<double>> x;      // [player][covariate]
  std::vector<double> epsilon;             // [player]

  void validate() const;
  double entry_payoff_base(std::size_t player) const;  // alpha + x.beta + eps
};

Game build_linear_entry_game(const LinearEntryGameParams& params);
void build_linear_entry_game_into(const LinearEntryGameParams& params, Game& out);

// Number of players choosing a nonzero action in the given profile.
std::size_t entrant_count(const ActionSpace& actions, std::size_t profile);

}  // namespace cpds
