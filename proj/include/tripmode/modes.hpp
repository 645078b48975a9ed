#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace tripmode {

enum class Mode { drive, rail, bus, bike, walk, nonmotor };

/// Five-mode labels keep bike and walk apart; four-mode labels pool them as nonmotor.
enum class ModeSet { four, five };

std::string_view mode_name(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

std::string_view mode_set_name(ModeSet s);
std::optional<ModeSet> parse_mode_set(std::string_view s);

/// Class labels in model order.
const std::vector<Mode>& modes_of(ModeSet s);

/// Maps a mode into the set (bike/walk become nonmotor for the four-mode set).
/// Returns nullopt when the mode has no place in the set.
std::optional<Mode> collapse(Mode m, ModeSet s);

/// Position of a (collapsed) mode in the set's label order.
std::optional<int> class_index(Mode m, ModeSet s);

}  // namespace tripmode
