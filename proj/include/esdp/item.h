#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace esdp {

/// The seventeen abstracted item kinds.
enum class ItemKind {
    PD,  // package declaration
    ID,  // import declaration
    TD,  // type declaration
    FD,  // field declaration
    CI,  // class instance creation
    MD,  // method declaration
    MI,  // method invocation
    II,  // interface implementation
    VD,  // local variable declaration
    ACD, // anonymous class declaration
    AA,  // array access
    AC,  // array creation
    CTI, // constructor invocation (this(...))
    FA,  // field access
    SCI, // super constructor invocation
    RT,  // return statement
    SC,  // super class inheritance
};

inline constexpr std::array<ItemKind, 17> kAllItemKinds = {
    ItemKind::PD,  ItemKind::ID, ItemKind::TD, ItemKind::FD,  ItemKind::CI,  ItemKind::MD,
    ItemKind::MI,  ItemKind::II, ItemKind::VD, ItemKind::ACD, ItemKind::AA,  ItemKind::AC,
    ItemKind::CTI, ItemKind::FA, ItemKind::SCI, ItemKind::RT, ItemKind::SC,
};

std::string_view to_string(ItemKind kind);
std::optional<ItemKind> parse_item_kind(std::string_view text);

/// Mining identity of an item. Location metadata never takes part in it.
struct ItemKey {
    ItemKind kind = ItemKind::MI;
    std::string name;

    friend auto operator<=>(const ItemKey&, const ItemKey&) = default;
    friend bool operator==(const ItemKey&, const ItemKey&) = default;
};

/// "KIND#name", the notation used by gold files and debug output.
std::string format_key(const ItemKey& key);
std::optional<ItemKey> parse_key(std::string_view text);

struct SourceItem {
    ItemKind kind = ItemKind::MI;
    std::string name;
    std::string enclosing; // package.Class or package.Class.method(...)
    int line = 0;
    int column = 0;

    // Metadata below is used for grouping and graph construction only.
    std::string file;         // label of the originating file
    std::string class_block;  // innermost class path ("" for file-level items)
    std::string method_block; // method path the item belongs to ("" for class-level items)
    std::string owner_type;   // receiver/owner type for action items ("unknown" when unresolved)
    std::string member;       // invoked method or accessed field name
    std::vector<std::string> vars; // local variables used or defined by the construct

    ItemKey key() const { return {kind, name}; }
};

struct ControlMarker {
    enum class Kind { IfBegin, IfEnd, LoopBegin, LoopEnd };

    Kind kind = Kind::IfBegin;
    std::string enclosing;
    int line = 0;
    int column = 0;
    std::vector<std::string> vars; // variables read by the condition (begin markers only)
};

std::string_view to_string(ControlMarker::Kind kind);

/// Exact non-negative rational, used wherever the value must survive round trips.
struct Ratio {
    long long num = 0;
    long long den = 1;

    double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Ratio& a, const Ratio& b) {
        return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
    }
    friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
        return static_cast<__int128>(a.num) * b.den <=> static_cast<__int128>(b.num) * a.den;
    }
};

/// Rounds num/den half-up to two decimals, e.g. 35/12 -> "2.92".
std::string format_fixed2(long long num, long long den);

} // namespace esdp
