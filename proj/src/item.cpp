#include "esdp/item.h"

#include <cstdlib>

namespace esdp {

namespace {

constexpr std::array<std::string_view, 17> kKindNames = {
    "PD", "ID", "TD", "FD", "CI", "MD", "MI", "II", "VD",
    "ACD", "AA", "AC", "CTI", "FA", "SCI", "RT", "SC",
};

} // namespace

std::string_view to_string(ItemKind kind) {
    return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<ItemKind> parse_item_kind(std::string_view text) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == text) return kAllItemKinds[i];
    }
    return std::nullopt;
}

std::string format_key(const ItemKey& key) {
    std::string out(to_string(key.kind));
    out += '#';
    out += key.name;
    return out;
}

std::optional<ItemKey> parse_key(std::string_view text) {
    auto hash = text.find('#');
    if (hash == std::string_view::npos || hash + 1 >= text.size()) return std::nullopt;
    auto kind = parse_item_kind(text.substr(0, hash));
    if (!kind) return std::nullopt;
    return ItemKey{*kind, std::string(text.substr(hash + 1))};
}

std::string_view to_string(ControlMarker::Kind kind) {
    switch (kind) {
    case ControlMarker::Kind::IfBegin: return "IF_BEGIN";
    case ControlMarker::Kind::IfEnd: return "IF_END";
    case ControlMarker::Kind::LoopBegin: return "LOOP_BEGIN";
    case ControlMarker::Kind::LoopEnd: return "LOOP_END";
    }
    return "?";
}

std::string format_fixed2(long long num, long long den) {
    // round(num * 100 / den) with ties going up
    __int128 scaled = (static_cast<__int128>(num) * 200 + den) / (2 * static_cast<__int128>(den));
    long long hundredths = static_cast<long long>(scaled);
    std::string frac = std::to_string(hundredths % 100);
    if (frac.size() < 2) frac.insert(0, "0");
    return std::to_string(hundredths / 100) + "." + frac;
}

} // namespace esdp
