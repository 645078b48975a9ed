#include "tripmode/modes.hpp"

#include <algorithm>

namespace tripmode {

std::string_view mode_name(Mode m) {
    switch (m) {
        case Mode::drive: return "drive";
        case Mode::rail: return "rail";
        case Mode::bus: return "bus";
        case Mode::bike: return "bike";
        case Mode::walk: return "walk";
        case Mode::nonmotor: return "nonmotor";
    }
    return "?";
}

std::optional<Mode> parse_mode(std::string_view s) {
    for (Mode m : {Mode::drive, Mode::rail, Mode::bus, Mode::bike, Mode::walk, Mode::nonmotor}) {
        if (mode_name(m) == s) return m;
    }
    return std::nullopt;
}

std::string_view mode_set_name(ModeSet s) { return s == ModeSet::four ? "four" : "five"; }

std::optional<ModeSet> parse_mode_set(std::string_view s) {
    if (s == "four") return ModeSet::four;
    if (s == "five") return ModeSet::five;
    return std::nullopt;
}

const std::vector<Mode>& modes_of(ModeSet s) {
    static const std::vector<Mode> five{Mode::drive, Mode::rail, Mode::bus, Mode::bike, Mode::walk};
    static const std::vector<Mode> four{Mode::drive, Mode::rail, Mode::bus, Mode::nonmotor};
    return s == ModeSet::four ? four : five;
}

std::optional<Mode> collapse(Mode m, ModeSet s) {
    if (s == ModeSet::four) {
        if (m == Mode::bike || m == Mode::walk) return Mode::nonmotor;
        return m;
    }
    if (m == Mode::nonmotor) return std::nullopt;
    return m;
}

std::optional<int> class_index(Mode m, ModeSet s) {
    const auto c = collapse(m, s);
    if (!c) return std::nullopt;
    const auto& order = modes_of(s);
    const auto it = std::find(order.begin(), order.end(), *c);
    return static_cast<int>(it - order.begin());
}

}  // namespace tripmode
