#pragma once

#include "esdp/item.h"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace esdp {

struct ExtractResult {
    std::vector<SourceItem> items;     // sorted by (line, column)
    std::vector<ControlMarker> markers; // sorted by (line, column)
};

/// Declarations visible to a free-standing statement (a user query or a
/// rendered skeleton) that is abstracted outside of any source file.
struct ScopeContext {
    std::string package;
    std::string class_name = "Snippet";
    std::string method_name = "snippet";
    std::string super_class;
    std::string return_type;           // as written; empty when unknown
    std::vector<std::string> imports;  // single-type imports, e.g. "org.eclipse.jdt.core.dom.ASTParser"
    std::map<std::string, std::string> variables; // name -> type as written
};

/// Abstracts one compilation unit into items and control markers.
/// Throws UnparsableSource on lexical failure or unbalanced brackets.
ExtractResult extract_items(std::string_view source, std::string_view file_label);

/// Abstracts statements (and modifier-led field declarations) as if they were
/// written inside `ctx.method_name` of `ctx.class_name`.
ExtractResult extract_statements(std::string_view statements, const ScopeContext& ctx);

/// Canonical item name for a raw construct. `raw_name` is the construct as
/// written (e.g. "Connection conn" or "parser.setKind(int)") and
/// `declared_type` the type of the declared/receiver variable, if known.
std::string normalize_item(ItemKind kind, std::string_view raw_name, std::string_view declared_type);

/// Import table of one file: simple type name -> fully qualified candidates.
class ImportTable {
public:
    ImportTable() = default;
    explicit ImportTable(const std::vector<std::string>& imports);

    void add(std::string_view qualified);
    /// Qualified names whose last segment is `simple`.
    const std::vector<std::string>* lookup(std::string_view simple) const;

private:
    std::map<std::string, std::vector<std::string>, std::less<>> by_simple_;
};

/// Canonical rendering of a type reference: generics dropped, array suffix
/// kept, package shortened to its last segment ("org.x.dom.ASTParser" ->
/// "dom.ASTParser"). Simple names are qualified only through an unambiguous
/// import.
std::string resolve_type(std::string_view written, const ImportTable& imports);

/// "ASTParser" -> "aSTParser"; "dom.ASTParser" -> "aSTParser"; "File[]" -> "file[]".
std::string lower_camel(std::string_view type_name);

/// Last dotted segment of a type, array suffix kept.
std::string simple_type_name(std::string_view type_name);

/// `KIND<TAB>name<TAB>enclosing<TAB>line` per item.
std::string format_item_dump(const std::vector<SourceItem>& items);

struct SourceFile {
    std::filesystem::path path;
    std::string label; // path relative to its corpus root, '/'-separated
};

/// Recursively lists files under each root whose extension equals `extension`,
/// sorted by label.
std::vector<SourceFile> discover_sources(const std::vector<std::filesystem::path>& roots,
                                         std::string_view extension = ".java");

/// Extracts every file, concatenating the item streams in file order.
ExtractResult extract_corpus(const std::vector<SourceFile>& files);

} // namespace esdp
