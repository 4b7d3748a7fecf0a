#include "cpds/game.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cpds/errors.hpp"

namespace cpds {

ActionSpace::ActionSpace(std::vector<Count> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw DimensionError("action space needs at least one player");
  std::size_t n = 1;
  for (Count s : sizes_) {
    if (s < 1) throw DimensionError("every action count must be >= 1");
    if (n > std::numeric_limits<std::size_t>::max() / s)
      throw DimensionError("profile count overflows");
    n *= s;
  }
  num_profiles_ = n;
}

bool ActionSpace::binary() const {
  for (Count s : sizes_)
    if (s != 2) return false;
  return true;
}

std::size_t ActionSpace::profile_index(std::span<const Count> tuple) const {
  if (tuple.size() != sizes_.size())
    throw DimensionError("action tuple length " + std::to_string(tuple.size()) +
                         " != number of players " + std::to_string(sizes_.size()));
  std::size_t idx = 0;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (tuple[i] >= sizes_[i])
      throw DimensionError("action " + std::to_string(tuple[i]) +
                           " out of range for player " + std::to_string(i));
    idx = idx * sizes_[i] + tuple[i];
  }
  return idx;
}

std::vector<Count> ActionSpace::profile_tuple(std::size_t index) const {
  std::vector<Count> tuple(sizes_.size());
  profile_tuple_into(index, tuple);
  return tuple;
}

void ActionSpace::profile_tuple_into(std::size_t index, std::span<Count> out) const {
  if (index >= num_profiles_) throw DimensionError("profile index out of range");
  if (out.size() != sizes_.size()) throw DimensionError("tuple buffer size mismatch");
  for (std::size_t i = sizes_.size(); i-- > 0;) {
    out[i] = static_cast<Count>(index % sizes_[i]);
    index /= sizes_[i];
  }
}

Game Game::make(ActionSpace actions, std::vector<std::vector<double>> utility) {
  Game g{std::move(actions), std::move(utility)};
  g.validate();
  return g;
}

void Game::validate() const {
  if (utility.size() != actions.num_players())
    throw DimensionError("utility tensor has " + std::to_string(utility.size()) +
                         " players, action space has " +
                         std::to_string(actions.num_players()));
  for (const auto& row : utility) {
    if (row.size() != actions.num_profiles())
      throw DimensionError("utility row length != number of profiles");
    for (double v : row)
      if (!std::isfinite(v)) throw DimensionError("utility entries must be finite");
  }
}

double Game::payoff(std::size_t player, std::size_t profile) const {
  if (player >= utility.size()) throw DimensionError("player index out of range");
  if (profile >= actions.num_profiles()) throw DimensionError("profile index out of range");
  return utility[player][profile];
}

void LinearEntryGameParams::validate() const {
  const std::size_t n = alpha.size();
  if (n == 0) throw DimensionError("entry game needs at least one player");
  if (beta.size() != n || delta.size() != n || x.size() != n || epsilon.size() != n)
    throw DimensionError("entry-game parameter blocks disagree on player count");
  const std::size_t covariates = beta[0].size();
  for (std::size_t i = 0; i < n; ++i) {
    if (beta[i].size() != covariates || x[i].size() != covariates)
      throw DimensionError("beta/x covariate counts disagree");
    if (delta[i].size() != n) throw DimensionError("delta must be players x players");
    if (delta[i][i] != 0.0) throw DimensionError("delta diagonal must be exactly zero");
  }
}

double LinearEntryGameParams::entry_payoff_base(std::size_t player) const {
  double v = alpha[player] + epsilon[player];
  for (std::size_t c = 0; c < beta[player].size(); ++c)
    v += x[player][c] * beta[player][c];
  return v;
}

Game build_linear_entry_game(const LinearEntryGameParams& params) {
  Game g;
  build_linear_entry_game_into(params, g);
  return g;
}

void build_linear_entry_game_into(const LinearEntryGameParams& params, Game& out) {
  params.validate();
  const std::size_t n = params.alpha.size();
  if (out.actions.num_players() != n || !out.actions.binary())
    out.actions = ActionSpace(std::vector<Count>(n, 2));
  out.utility.resize(n);
  const std::size_t profiles = out.actions.num_profiles();

  std::vector<double> base(n);
  for (std::size_t i = 0; i < n; ++i) base[i] = params.entry_payoff_base(i);

  std::vector<Count> tuple(n);
  for (auto& row : out.utility) row.assign(profiles, 0.0);
  for (std::size_t p = 0; p < profiles; ++p) {
    out.actions.profile_tuple_into(p, tuple);
    for (std::size_t i = 0; i < n; ++i) {
      if (tuple[i] == 0) continue;  // staying out pays zero
      double v = base[i];
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && tuple[j] != 0) v += params.delta[i][j];
      out.utility[i][p] = v;
    }
  }
}

std::size_t entrant_count(const ActionSpace& actions, std::size_t profile) {
  std::vector<Count> tuple = actions.profile_tuple(profile);
  std::size_t k = 0;
  for (Count a : tuple)
    if (a != 0) ++k;
  return k;
}

}  // namespace cpds
