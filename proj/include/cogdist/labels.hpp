#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cogdist {

/// The 15 cognitive distortion categories plus the NotDistorted sentinel.
/// Enumerator order is the canonical order: alphabetical by display name,
/// NotDistorted last.
enum class DistortionLabel : uint8_t {
    BeingRight,
    Blaming,
    Catastrophizing,
    ControlFallacy,
    EmotionalReasoning,
    FallacyOfChange,
    FallacyOfFairness,
    Filtering,
    GlobalLabeling,
    HeavensRewardFallacy,
    MindReading,
    Overgeneralization,
    Personalization,
    PolarizedThinking,
    Shoulds,
    NotDistorted,
};

inline constexpr size_t kDistortionCount = 15;
inline constexpr size_t kLabelCount = 16;

std::string_view to_string(DistortionLabel label);

/// Parses a display string; returns nullopt for anything outside the closed set.
std::optional<DistortionLabel> parse_label(std::string_view name);

/// All 16 values in canonical order (NotDistorted last).
const std::array<DistortionLabel, kLabelCount>& all_labels();

/// The 15 distortion display names in canonical order.
const std::vector<std::string>& distortion_names();

/// Detection-task class names.
inline constexpr std::string_view kDistortedName = "Distorted";
inline constexpr std::string_view kNotDistortedName = "NotDistorted";

/// Canonical ordering for class-label strings: lexicographic ascending with
/// "NotDistorted" sorting after everything else. Reproduces canonical
/// DistortionLabel order on distortion names and puts Distorted before
/// NotDistorted for the detection task.
bool label_order_less(std::string_view a, std::string_view b);

}  // namespace cogdist
