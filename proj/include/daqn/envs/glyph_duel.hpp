#pragma once

#include <vector>

#include "daqn/envs/environment.hpp"
#include "daqn/envs/glyph.hpp"
#include "daqn/nnkit/layers.hpp"

namespace daqn {

/// +1 when `agent` beats `opponent` (paper > rock, scissors > paper,
/// rock > scissors), 0 on a draw, -1 otherwise. Hand glyphs only.
double duel_reward(Glyph agent, Glyph opponent);
Glyph winning_move(Glyph opponent);

/// One-shot hand game: the state is an image of the opponent's sign, the
/// action is the agent's sign, and every episode ends after one step.
class GlyphDuel final : public Environment {
 public:
  explicit GlyphDuel(GlyphDuelConfig cfg = {}, std::uint64_t seed = 0);

  Shape state_shape() const override { return {1, cfg_.image_size, cfg_.image_size}; }
  int n_actions() const override { return kHandGlyphs; }
  Tensor reset() override;
  StepResult step(int action) override;
  void seed(std::uint64_t seed) override { rng_.seed(seed); }

  /// Hidden label of the current opponent sign.
  Glyph opponent() const { return opponent_; }
  const GlyphDuelConfig& config() const { return cfg_; }

 private:
  Tensor draw();

  GlyphDuelConfig cfg_;
  Rng rng_;
  Glyph opponent_ = Glyph::rock;
  bool done_ = true;
};

/// Labelled hand-sign images for greedy evaluation.
struct GlyphTestSet {
  Tensor images;  // [N, 1, S, S]
  std::vector<Glyph> labels;
};

/// Balanced over the three hand signs, drawn from a seed stream disjoint
/// from the environment's.
GlyphTestSet make_glyph_test_set(const GlyphDuelConfig& cfg, int n, std::uint64_t seed);

}  // namespace daqn
