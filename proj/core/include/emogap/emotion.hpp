#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace emogap {

// Plutchik's eight emotions, in the corpus' fixed order.
enum class Emotion : std::size_t {
  kJoy = 0,
  kSadness,
  kAnticipation,
  kSurprise,
  kAnger,
  kFear,
  kDisgust,
  kTrust,
};

inline constexpr std::size_t kEmotionCount = 8;
inline constexpr int kMaxIntensity = 3;

inline constexpr std::array<Emotion, kEmotionCount> kAllEmotions = {
    Emotion::kJoy,   Emotion::kSadness, Emotion::kAnticipation, Emotion::kSurprise,
    Emotion::kAnger, Emotion::kFear,    Emotion::kDisgust,      Emotion::kTrust,
};

// Lower-case name ("anger").
std::string_view emotion_name(Emotion e) noexcept;
// Capitalized name used in default column headers ("Anger").
std::string emotion_title(Emotion e);
// Case-insensitive lookup; nullopt for unknown names.
std::optional<Emotion> parse_emotion(std::string_view name) noexcept;
// Like parse_emotion but throws ArgumentError.
Emotion emotion_from_name(std::string_view name);

constexpr std::size_t index_of(Emotion e) noexcept { return static_cast<std::size_t>(e); }

// One annotator's intensities, stored as read; valid vectors hold only 0..3.
struct EmotionVector {
  std::array<int, kEmotionCount> intensities{};

  int operator[](Emotion e) const noexcept { return intensities[index_of(e)]; }
  int& operator[](Emotion e) noexcept { return intensities[index_of(e)]; }

  bool operator==(const EmotionVector&) const = default;
};

}  // namespace emogap
