#include "emogap/synthetic.hpp"

#include <cmath>
#include <cstdio>

#include "emogap/errors.hpp"
#include "emogap/random.hpp"

namespace emogap {
namespace {

std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%03zu", prefix, i);
  return buf;
}

int draw_intensity(Rng& rng) {
  // Mostly 0, like real annotations.
  static constexpr int kTable[10] = {0, 0, 0, 0, 0, 0, 1, 1, 2, 3};
  return kTable[rng.below(10)];
}

}  // namespace

PlantedCorpus generate_planted_corpus(const PlantedCorpusSpec& spec) {
  if (spec.posts == 0) throw ArgumentError("planted corpus needs at least one post");
  if (!(spec.hidden_fraction >= 0.0 && spec.hidden_fraction <= 1.0)) throw ArgumentError("hidden_fraction outside [0,1]");
  if (spec.min_filler > spec.max_filler || spec.filler_vocabulary == 0) throw ArgumentError("bad filler settings");

  Rng rng(spec.seed);
  PlantedCorpus out;
  for (std::size_t m = 0; m < spec.markers; ++m) out.markers.push_back(numbered("mark", m));

  const auto hidden_total = static_cast<std::size_t>(std::llround(spec.hidden_fraction * static_cast<double>(spec.posts)));
  out.hidden.assign(spec.posts, false);
  std::vector<char> flags(spec.posts, 0);
  for (std::size_t i = 0; i < hidden_total; ++i) flags[i] = 1;
  rng.shuffle(std::span(flags));
  for (std::size_t i = 0; i < spec.posts; ++i) out.hidden[i] = flags[i] != 0;

  const auto target = spec.emotion;
  for (std::size_t p = 0; p < spec.posts; ++p) {
    const bool hidden = out.hidden[p];
    AnnotatedPost post;
    post.post_id = std::to_string(p);
    post.readers.resize(kReaderCount);
    for (auto e : kAllEmotions) {
      post.writer[e] = draw_intensity(rng);
      for (auto& r : post.readers) r[e] = draw_intensity(rng);
    }
    // Redraw the target emotion until its gap matches the hidden flag.
    while (true) {
      const int writer = hidden ? 2 + static_cast<int>(rng.below(2)) : static_cast<int>(rng.below(4));
      int sum = 0;
      for (auto& r : post.readers) {
        r[target] = hidden ? static_cast<int>(rng.below(2)) : static_cast<int>(rng.below(4));
        sum += r[target];
      }
      const bool gap_at_least_two = 3 * writer - sum >= 6;
      if (gap_at_least_two == hidden) {
        post.writer[target] = writer;
        break;
      }
    }

    std::vector<std::string> tokens;
    const std::size_t filler = spec.min_filler + rng.below(spec.max_filler - spec.min_filler + 1);
    for (std::size_t i = 0; i < filler; ++i) tokens.push_back(numbered("w", rng.below(spec.filler_vocabulary)));
    const double rate = hidden ? spec.marker_rate_hidden : spec.marker_rate_other;
    for (const auto& marker : out.markers) {
      if (rng.bernoulli(rate)) tokens.push_back(marker);
    }
    rng.shuffle(std::span(tokens));
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) post.text += ' ';
      post.text += tokens[i];
    }
    out.corpus.push_back(std::move(post));
  }
  return out;
}

}  // namespace emogap
