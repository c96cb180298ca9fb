#include "cogdist/labels.hpp"

#include <algorithm>
#include <unordered_map>

namespace cogdist {

namespace {

constexpr std::array<std::string_view, kLabelCount> kNames = {
    "Being Right",
    "Blaming",
    "Catastrophizing",
    "Control Fallacy",
    "Emotional Reasoning",
    "Fallacy of Change",
    "Fallacy of Fairness",
    "Filtering",
    "Global Labeling",
    "Heaven's Reward Fallacy",
    "Mind Reading",
    "Overgeneralization",
    "Personalization",
    "Polarized Thinking",
    "Should's",
    "NotDistorted",
};

}  // namespace

std::string_view to_string(DistortionLabel label) {
    return kNames[static_cast<size_t>(label)];
}

std::optional<DistortionLabel> parse_label(std::string_view name) {
    static const std::unordered_map<std::string_view, DistortionLabel> lookup = [] {
        std::unordered_map<std::string_view, DistortionLabel> m;
        for (size_t i = 0; i < kLabelCount; ++i) {
            m.emplace(kNames[i], static_cast<DistortionLabel>(i));
        }
        return m;
    }();
    const auto it = lookup.find(name);
    if (it == lookup.end()) return std::nullopt;
    return it->second;
}

const std::array<DistortionLabel, kLabelCount>& all_labels() {
    static const auto labels = [] {
        std::array<DistortionLabel, kLabelCount> a{};
        for (size_t i = 0; i < kLabelCount; ++i) a[i] = static_cast<DistortionLabel>(i);
        return a;
    }();
    return labels;
}

const std::vector<std::string>& distortion_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        v.reserve(kDistortionCount);
        for (size_t i = 0; i < kDistortionCount; ++i) v.emplace_back(kNames[i]);
        return v;
    }();
    return names;
}

bool label_order_less(std::string_view a, std::string_view b) {
    const bool a_nd = (a == kNotDistortedName);
    const bool b_nd = (b == kNotDistortedName);
    if (a_nd != b_nd) return b_nd;
    return a < b;
}

}  // namespace cogdist
