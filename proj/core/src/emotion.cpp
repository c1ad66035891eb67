#include "emogap/emotion.hpp"

#include <algorithm>
#include <cctype>

#include "emogap/errors.hpp"

namespace emogap {
namespace {

constexpr std::array<std::string_view, kEmotionCount> kNames = {
    "joy", "sadness", "anticipation", "surprise", "anger", "fear", "disgust", "trust",
};

}  // namespace

std::string_view emotion_name(Emotion e) noexcept { return kNames[index_of(e)]; }

std::string emotion_title(Emotion e) {
  std::string s(emotion_name(e));
  s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::optional<Emotion> parse_emotion(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    const auto& candidate = kNames[i];
    if (candidate.size() == name.size() &&
        std::equal(candidate.begin(), candidate.end(), name.begin(), [](char a, char b) {
          return a == std::tolower(static_cast<unsigned char>(b));
        })) {
      return static_cast<Emotion>(i);
    }
  }
  return std::nullopt;
}

Emotion emotion_from_name(std::string_view name) {
  if (auto e = parse_emotion(name)) return *e;
  throw ArgumentError("unknown emotion '" + std::string(name) + "'");
}

}  // namespace emogap
