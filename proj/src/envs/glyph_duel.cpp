#include "daqn/envs/glyph_duel.hpp"

#include <stdexcept>

namespace daqn {

double duel_reward(Glyph agent, Glyph opponent) {
  if (agent == Glyph::background || opponent == Glyph::background)
    throw std::invalid_argument("duel_reward takes hand glyphs only");
  if (agent == opponent) return 0.0;
  return agent == winning_move(opponent) ? 1.0 : -1.0;
}

Glyph winning_move(Glyph opponent) {
  switch (opponent) {
    case Glyph::rock: return Glyph::paper;
    case Glyph::paper: return Glyph::scissors;
    case Glyph::scissors: return Glyph::rock;
    default: throw std::invalid_argument("background has no winning move");
  }
}

GlyphDuel::GlyphDuel(GlyphDuelConfig cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {}

Tensor GlyphDuel::draw() {
  opponent_ = static_cast<Glyph>(std::uniform_int_distribution<int>(0, kHandGlyphs - 1)(rng_));
  return glyph_render(opponent_, rng_(), cfg_);
}

Tensor GlyphDuel::reset() {
  done_ = false;
  return draw();
}

StepResult GlyphDuel::step(int action) {
  if (done_) throw std::logic_error("glyph duel step after the episode ended; call reset()");
  if (action < 0 || action >= kHandGlyphs) throw std::out_of_range("glyph duel action must be 0, 1 or 2");
  const double reward = duel_reward(static_cast<Glyph>(action), opponent_);
  done_ = true;
  // The observation after the decision is the next opponent's sign; the
  // transition is terminal so it never enters a bootstrap target.
  Tensor next = draw();
  return {std::move(next), reward, true, false};
}

GlyphTestSet make_glyph_test_set(const GlyphDuelConfig& cfg, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("test set size must be >= 1");
  GlyphTestSet set;
  std::vector<Tensor> images;
  Rng rng(seed ^ 0x7e57'5e7'0000ULL);
  for (int i = 0; i < n; ++i) {
    const Glyph g = static_cast<Glyph>(i % kHandGlyphs);
    images.push_back(glyph_render(g, rng(), cfg));
    set.labels.push_back(g);
  }
  set.images = stack(images);
  return set;
}

}  // namespace daqn
