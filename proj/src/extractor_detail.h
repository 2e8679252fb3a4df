#pragma once

#include "esdp/extractor.h"

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace esdp::detail {

struct SnippetParse {
    ExtractResult result;
    std::optional<std::string> first_skipped; // "<end>" for premature end of input
    std::map<std::string, std::string> bindings; // locals and fields visible after the snippet
};

SnippetParse parse_snippet(std::string_view statements, const ScopeContext& ctx);

} // namespace esdp::detail
