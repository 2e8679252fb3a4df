#include "esdp/extractor.h"

#include "esdp/errors.h"
#include "extractor_detail.h"
#include "java_lexer.h"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>

namespace esdp {

using detail::Token;
using detail::TokenKind;
using detail::is_java_keyword;
using detail::is_primitive_type;

// ---------------------------------------------------------------------------
// Type name helpers

namespace {

bool starts_upper(std::string_view s) {
    return !s.empty() && std::isupper(static_cast<unsigned char>(s.front()));
}

std::vector<std::string> split_dots(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto dot = s.find('.', start);
        out.emplace_back(s.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return out;
}

std::string strip_generics(std::string_view written) {
    std::string out;
    int depth = 0;
    for (char c : written) {
        if (c == '<') {
            ++depth;
        } else if (c == '>') {
            if (depth > 0) --depth;
        } else if (depth == 0 && !std::isspace(static_cast<unsigned char>(c))) {
            out += c;
        }
    }
    return out;
}

// "Type.CONSTANT" members are treated as int flags.
bool is_constant_name(std::string_view s) {
    bool letter = false;
    for (char c : s) {
        if (std::islower(static_cast<unsigned char>(c))) return false;
        if (std::isalpha(static_cast<unsigned char>(c))) letter = true;
    }
    return letter;
}

std::string shorten_qualified(std::string_view qualified) {
    auto segs = split_dots(qualified);
    std::size_t first_type = segs.size();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (starts_upper(segs[i])) {
            first_type = i;
            break;
        }
    }
    if (first_type == segs.size() || first_type == 0) return std::string(qualified);
    std::string out = segs[first_type - 1];
    for (std::size_t i = first_type; i < segs.size(); ++i) out += "." + segs[i];
    return out;
}

} // namespace

ImportTable::ImportTable(const std::vector<std::string>& imports) {
    for (const auto& q : imports) add(q);
}

void ImportTable::add(std::string_view qualified) {
    auto dot = qualified.rfind('.');
    if (dot == std::string_view::npos || qualified.ends_with(".*")) return;
    auto& bucket = by_simple_[std::string(qualified.substr(dot + 1))];
    std::string q(qualified);
    if (std::find(bucket.begin(), bucket.end(), q) == bucket.end()) bucket.push_back(std::move(q));
}

const std::vector<std::string>* ImportTable::lookup(std::string_view simple) const {
    auto it = by_simple_.find(simple);
    return it == by_simple_.end() ? nullptr : &it->second;
}

std::string resolve_type(std::string_view written, const ImportTable& imports) {
    std::string t = strip_generics(written);
    std::string suffix;
    if (t.ends_with("...")) {
        t.resize(t.size() - 3);
        suffix = "[]";
    }
    while (t.ends_with("[]")) {
        t.resize(t.size() - 2);
        suffix += "[]";
    }
    if (t.empty() || is_primitive_type(t) || t == "var") return t + suffix;

    auto segs = split_dots(t);
    if (segs.size() > 1 && !starts_upper(segs.front())) return shorten_qualified(t) + suffix;

    // Simple name, or a nested reference like Map.Entry: qualify the head.
    if (const auto* candidates = imports.lookup(segs.front()); candidates && candidates->size() == 1) {
        std::string full = candidates->front();
        for (std::size_t i = 1; i < segs.size(); ++i) full += "." + segs[i];
        return shorten_qualified(full) + suffix;
    }
    return t + suffix;
}

std::string simple_type_name(std::string_view type_name) {
    std::string t(type_name);
    std::string suffix;
    while (t.ends_with("[]")) {
        t.resize(t.size() - 2);
        suffix += "[]";
    }
    auto dot = t.rfind('.');
    if (dot != std::string::npos) t = t.substr(dot + 1);
    return t + suffix;
}

std::string lower_camel(std::string_view type_name) {
    std::string s = simple_type_name(type_name);
    if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
    return s;
}

std::string normalize_item(ItemKind kind, std::string_view raw_name, std::string_view declared_type) {
    std::string raw(raw_name);
    while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) raw.pop_back();
    while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.front()))) raw.erase(raw.begin());
    ImportTable none;

    switch (kind) {
    case ItemKind::FD:
    case ItemKind::VD: {
        if (!declared_type.empty()) return resolve_type(declared_type, none);
        if (auto eq = raw.find('='); eq != std::string::npos) raw = raw.substr(0, eq);
        while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) raw.pop_back();
        // drop the declared variable identifier
        auto sp = raw.find_last_of(" \t");
        if (sp != std::string::npos) raw = raw.substr(0, sp);
        return resolve_type(raw, none);
    }
    case ItemKind::MI:
    case ItemKind::FA: {
        auto paren = raw.find('(');
        auto head = raw.substr(0, paren);
        auto dot = head.rfind('.');
        if (dot == std::string::npos) return raw;
        std::string receiver = raw.substr(0, dot);
        std::string rest = raw.substr(dot + 1);
        if (!declared_type.empty()) return lower_camel(declared_type) + "." + rest;
        if (receiver == "super") return raw;
        if (starts_upper(split_dots(receiver).back()) || receiver.find('.') != std::string::npos) {
            return resolve_type(receiver, none) + "." + rest;
        }
        return "unknown." + rest;
    }
    default:
        return strip_generics(raw);
    }
}

std::string format_item_dump(const std::vector<SourceItem>& items) {
    std::string out;
    for (const auto& it : items) {
        out += to_string(it.kind);
        out += '\t';
        out += it.name;
        out += '\t';
        out += it.enclosing;
        out += '\t';
        out += std::to_string(it.line);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct SkipStatement {
    std::size_t at;
};

struct ClassCtx {
    std::string path;
    std::string simple;    // empty for anonymous classes
    std::string type_name; // what `this` denotes
    std::string super_type;
    std::map<std::string, std::string> fields;
    std::map<std::string, std::string> captured; // locals visible to local/anonymous classes
    ClassCtx* outer = nullptr;
};

struct MethodJob {
    std::size_t body = 0; // index of '{'
    ClassCtx* cls = nullptr;
    std::string path;
    std::string return_type;
    std::map<std::string, std::string> params;
};

struct Expr {
    enum class Cat { Value, TypeRef, Ambiguous, This, Super };
    Cat cat = Cat::Value;
    std::string type;
    std::string text; // TypeRef: resolved type; Ambiguous: dotted name as written
    std::string var;  // set when the expression is exactly a variable
    std::vector<std::string> vars;
    int item = -1;
    std::size_t last_tok = 0;
};

void merge_vars(std::vector<std::string>& into, const std::vector<std::string>& from) {
    for (const auto& v : from) {
        if (std::find(into.begin(), into.end(), v) == into.end()) into.push_back(v);
    }
}

void add_var(std::vector<std::string>& into, const std::string& v) {
    if (!v.empty() && std::find(into.begin(), into.end(), v) == into.end()) into.push_back(v);
}

int numeric_rank(std::string_view t) {
    if (t == "double") return 4;
    if (t == "float") return 3;
    if (t == "long") return 2;
    if (t == "int" || t == "short" || t == "byte" || t == "char") return 1;
    return 0;
}

std::string promote(std::string_view a, std::string_view b) {
    int ra = numeric_rank(a), rb = numeric_rank(b);
    if (ra == 0 || rb == 0) return "";
    static const char* names[] = {"", "int", "long", "float", "double"};
    return names[std::max(ra, rb)];
}

class Parser {
public:
    Parser(std::vector<Token> tokens, std::string file_label)
        : toks_(std::move(tokens)), file_(std::move(file_label)) {}

    ExtractResult parse_unit() {
        while (!at_end()) {
            std::size_t start = pos_;
            try {
                skip_modifiers();
                if (is_word("package")) {
                    parse_package();
                } else if (is_word("import")) {
                    parse_import();
                } else if (accept(";")) {
                } else if (is_type_decl_start()) {
                    parse_type_decl(nullptr, false);
                    flush_jobs(0);
                } else {
                    pos_ = start;
                    skip_member();
                }
            } catch (const SkipStatement&) {
                pos_ = start;
                skip_member();
            }
        }
        return finish();
    }

    ExtractResult parse_snippet(const ScopeContext& ctx) {
        package_ = ctx.package;
        for (const auto& imp : ctx.imports) imports_.add(imp);
        ClassCtx& cls = new_class();
        cls.simple = ctx.class_name.empty() ? "Snippet" : ctx.class_name;
        cls.path = qualify(package_, cls.simple);
        cls.type_name = cls.simple;
        cls.super_type = ctx.super_class.empty() ? "" : resolve(ctx.super_class);
        for (const auto& [name, type] : ctx.variables) cls.fields[name] = resolve(type);

        cur_class_ = &cls;
        method_path_ = cls.path + "." + (ctx.method_name.empty() ? "snippet" : ctx.method_name) + "()";
        set_block(method_path_, cls.path, method_path_);
        scopes_.assign(1, {});
        returns_.assign(1, ctx.return_type.empty() ? "" : resolve(ctx.return_type));

        while (!at_end()) {
            if (is_word("package")) {
                with_file_level([&] { parse_package(); });
            } else if (is_word("import")) {
                with_file_level([&] { parse_import(); });
            } else if (is_member_start()) {
                with_class_level(cls, [&] { parse_member(cls); });
                flush_jobs(0);
            } else {
                parse_statement();
            }
        }
        return finish();
    }

    std::map<std::string, std::string> snippet_bindings() const {
        std::map<std::string, std::string> out;
        if (!classes_.empty()) out = classes_.front().fields;
        for (const auto& scope : scopes_) {
            for (const auto& [k, v] : scope) out[k] = v;
        }
        return out;
    }

    std::optional<Token> first_skip() const {
        if (!first_skip_) return std::nullopt;
        return toks_[std::min(*first_skip_, toks_.size() - 1)];
    }

private:
    // -- token access -------------------------------------------------------

    const Token& tok(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    bool at_end() const { return tok().kind == TokenKind::End; }
    bool is_op(std::string_view op, std::size_t ahead = 0) const {
        const auto& t = tok(ahead);
        return t.kind == TokenKind::Op && t.text == op;
    }
    bool is_word(std::string_view w, std::size_t ahead = 0) const {
        const auto& t = tok(ahead);
        return t.kind == TokenKind::Ident && t.text == w;
    }
    bool is_name(std::size_t ahead = 0) const {
        const auto& t = tok(ahead);
        return t.kind == TokenKind::Ident && !is_java_keyword(t.text);
    }
    bool adjacent(std::size_t a) const {
        const auto& x = tok(a);
        const auto& y = tok(a + 1);
        return y.kind != TokenKind::End && x.offset + x.length == y.offset;
    }
    const Token& take() {
        const Token& t = tok();
        if (!at_end()) ++pos_;
        return t;
    }
    bool accept(std::string_view op) {
        if (is_op(op)) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool accept_word(std::string_view w) {
        if (is_word(w)) {
            ++pos_;
            return true;
        }
        return false;
    }
    [[noreturn]] void skip() const { throw SkipStatement{pos_}; }
    void expect(std::string_view op) {
        if (!accept(op)) skip();
    }
    const Token& expect_name() {
        if (!is_name()) skip();
        return take();
    }

    // -- state ---------------------------------------------------------------

    struct Snapshot {
        std::size_t pos, items, markers, pending, scopes, returns;
        ClassCtx* cls;
        std::string method, enclosing, class_block, method_block;
    };

    Snapshot snapshot() const {
        return {pos_, items_.size(), markers_.size(), pending_.size(), scopes_.size(), returns_.size(),
                cur_class_, method_path_, enclosing_, class_block_, method_block_};
    }

    void restore_context(const Snapshot& s) {
        cur_class_ = s.cls;
        method_path_ = s.method;
        enclosing_ = s.enclosing;
        class_block_ = s.class_block;
        method_block_ = s.method_block;
        if (scopes_.size() > s.scopes) scopes_.resize(s.scopes);
        if (returns_.size() > s.returns) returns_.resize(s.returns);
    }

    void rollback(const Snapshot& s) {
        items_.resize(s.items);
        markers_.resize(s.markers);
        if (pending_.size() > s.pending) pending_.resize(s.pending);
        restore_context(s);
    }

    void set_block(std::string enclosing, std::string class_block, std::string method_block) {
        enclosing_ = std::move(enclosing);
        class_block_ = std::move(class_block);
        method_block_ = std::move(method_block);
    }

    std::string file_level() const { return package_.empty() ? file_ : package_; }

    static std::string qualify(const std::string& prefix, const std::string& name) {
        return prefix.empty() ? name : prefix + "." + name;
    }

    std::string resolve(std::string_view written) const { return resolve_type(written, imports_); }

    template <typename Fn>
    void with_file_level(Fn&& fn) {
        Snapshot s = snapshot();
        set_block(file_level(), "", "");
        fn();
        restore_context(s);
    }

    template <typename Fn>
    void with_class_level(ClassCtx& cls, Fn&& fn) {
        Snapshot s = snapshot();
        auto outer_scopes = std::move(scopes_);
        auto outer_returns = std::move(returns_);
        cur_class_ = &cls;
        method_path_.clear();
        scopes_.clear();
        returns_.clear();
        set_block(cls.path, cls.path, "");
        try {
            fn();
        } catch (...) {
            scopes_ = std::move(outer_scopes);
            returns_ = std::move(outer_returns);
            restore_context(s);
            throw;
        }
        scopes_ = std::move(outer_scopes);
        returns_ = std::move(outer_returns);
        restore_context(s);
    }

    ClassCtx& new_class() {
        classes_.emplace_back();
        return classes_.back();
    }

    int emit(ItemKind kind, std::string name, const Token& at, std::string owner = {}, std::string member = {},
             std::vector<std::string> vars = {}) {
        SourceItem it;
        it.kind = kind;
        it.name = std::move(name);
        it.enclosing = enclosing_.empty() ? file_level() : enclosing_;
        it.line = at.line;
        it.column = at.column;
        it.file = file_;
        it.class_block = class_block_;
        it.method_block = method_block_;
        it.owner_type = std::move(owner);
        it.member = std::move(member);
        it.vars = std::move(vars);
        items_.push_back(std::move(it));
        return static_cast<int>(items_.size()) - 1;
    }

    void mark(ControlMarker::Kind kind, const Token& at, std::vector<std::string> vars = {}) {
        ControlMarker m;
        m.kind = kind;
        m.enclosing = enclosing_.empty() ? file_level() : enclosing_;
        m.line = at.line;
        m.column = at.column;
        m.vars = std::move(vars);
        markers_.push_back(std::move(m));
    }

    const Token& prev() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }

    std::optional<std::string> lookup(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            if (auto f = it->find(name); f != it->end()) return f->second;
        }
        for (const ClassCtx* c = cur_class_; c; c = c->outer) {
            if (auto f = c->fields.find(name); f != c->fields.end()) return f->second;
            if (auto f = c->captured.find(name); f != c->captured.end()) return f->second;
        }
        return std::nullopt;
    }

    std::map<std::string, std::string> visible_locals() const {
        std::map<std::string, std::string> out;
        for (const auto& s : scopes_) {
            for (const auto& [k, v] : s) out[k] = v;
        }
        return out;
    }

    void declare(const std::string& name, const std::string& type) {
        if (scopes_.empty()) scopes_.emplace_back();
        scopes_.back()[name] = type;
    }

    ExtractResult finish() {
        auto by_pos = [](const auto& a, const auto& b) {
            return a.line != b.line ? a.line < b.line : a.column < b.column;
        };
        std::stable_sort(items_.begin(), items_.end(), by_pos);
        std::stable_sort(markers_.begin(), markers_.end(), by_pos);
        return {std::move(items_), std::move(markers_)};
    }

    // -- skipping ------------------------------------------------------------

    void skip_balanced() {
        // at an opening bracket; the lexer guarantees a matching close
        int depth = 0;
        do {
            const auto& t = take();
            if (t.kind == TokenKind::Op) {
                if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
                else if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
            }
        } while (depth > 0 && !at_end());
    }

    bool skip_angle() {
        // generic argument/parameter list starting at '<'
        std::size_t start = pos_;
        int depth = 0;
        do {
            const auto& t = tok();
            if (t.kind == TokenKind::Op) {
                if (t.text == "<") {
                    ++depth;
                } else if (t.text == ">") {
                    --depth;
                } else if (t.text == "[" && is_op("]", 1)) {
                    ++pos_;
                } else if (t.text != "." && t.text != "," && t.text != "?" && t.text != "&" && t.text != "@") {
                    pos_ = start;
                    return false;
                }
            } else if (t.kind != TokenKind::Ident ||
                       (is_java_keyword(t.text) && !is_primitive_type(t.text) && t.text != "extends" &&
                        t.text != "super")) {
                pos_ = start;
                return false;
            }
            ++pos_;
        } while (depth > 0);
        return true;
    }

    void skip_member() {
        std::size_t start = pos_;
        while (!at_end()) {
            if (is_op("}")) {
                if (pos_ == start) ++pos_;
                return;
            }
            if (accept(";")) return;
            if (is_op("{")) {
                skip_balanced();
                return;
            }
            if (is_op("(") || is_op("[")) {
                skip_balanced();
                continue;
            }
            ++pos_;
        }
    }

    void skip_statement() {
        std::size_t start = pos_;
        while (!at_end()) {
            if (is_op("}")) {
                if (pos_ == start) ++pos_;
                return;
            }
            if (accept(";")) return;
            if (is_op("(") || is_op("[")) {
                skip_balanced();
                continue;
            }
            if (is_op("{")) {
                skip_balanced();
                const auto& t = tok();
                bool continues = t.kind == TokenKind::Op && t.text != "{" && t.text != "}" && t.text != "@";
                if (!continues) return;
                continue;
            }
            ++pos_;
        }
    }

    void skip_annotation() {
        // at '@'
        ++pos_;
        expect_name();
        while (is_op(".") && is_name(1)) pos_ += 2;
        if (is_op("(")) skip_balanced();
    }

    struct Mods {
        bool is_static = false;
    };

    Mods skip_modifiers() {
        Mods m;
        while (true) {
            if (is_op("@") && !is_word("interface", 1)) {
                skip_annotation();
                continue;
            }
            const auto& t = tok();
            if (t.kind != TokenKind::Ident) break;
            const auto& w = t.text;
            if (w == "public" || w == "private" || w == "protected" || w == "static" || w == "final" ||
                w == "abstract" || w == "native" || w == "synchronized" || w == "transient" ||
                w == "volatile" || w == "strictfp" || (w == "default" && !is_op(":", 1) && !is_op("->", 1)) ||
                ((w == "sealed") && (is_word("class", 1) || is_word("interface", 1) || is_word("abstract", 1)))) {
                if (w == "static") m.is_static = true;
                ++pos_;
                continue;
            }
            if (w == "non" && is_op("-", 1) && is_word("sealed", 2)) {
                pos_ += 3;
                continue;
            }
            break;
        }
        return m;
    }

    // -- types ---------------------------------------------------------------

    std::optional<std::string> try_parse_type() {
        std::size_t start = pos_;
        while (is_op("@") && !is_word("interface", 1)) {
            try {
                skip_annotation();
            } catch (const SkipStatement&) {
                pos_ = start;
                return std::nullopt;
            }
        }
        const auto& t = tok();
        if (t.kind != TokenKind::Ident || (is_java_keyword(t.text) && !is_primitive_type(t.text))) {
            pos_ = start;
            return std::nullopt;
        }
        std::string out = t.text;
        bool primitive = is_primitive_type(t.text);
        ++pos_;
        if (!primitive) {
            if (is_op("<") && !skip_angle()) {
                pos_ = start;
                return std::nullopt;
            }
            while (is_op(".") && is_name(1)) {
                out += "." + tok(1).text;
                pos_ += 2;
                if (is_op("<") && !skip_angle()) {
                    pos_ = start;
                    return std::nullopt;
                }
            }
        }
        while (is_op("[") && is_op("]", 1)) {
            pos_ += 2;
            out += "[]";
        }
        if (is_op("...")) {
            ++pos_;
            out += "[]";
        }
        return out;
    }

    // -- declarations ----------------------------------------------------------

    void parse_package() {
        const Token& kw = take();
        std::string name = expect_name().text;
        while (accept(".")) name += "." + expect_name().text;
        expect(";");
        package_ = name;
        set_block(package_, "", "");
        emit(ItemKind::PD, name, kw);
        set_block("", "", "");
    }

    void parse_import() {
        const Token& kw = take();
        bool is_static = accept_word("static");
        std::string name = expect_name().text;
        while (accept(".")) {
            if (accept("*")) {
                name += ".*";
                break;
            }
            name += "." + expect_name().text;
        }
        expect(";");
        if (!is_static) imports_.add(name);
        emit(ItemKind::ID, name, kw);
    }

    bool is_type_decl_start() const {
        if (is_word("class") || is_word("interface") || is_word("enum")) return true;
        if (is_op("@") && is_word("interface", 1)) return true;
        return is_word("record") && is_name(1) && (is_op("(", 2) || is_op("<", 2));
    }

    bool is_member_start() const {
        const auto& t = tok();
        if (t.kind != TokenKind::Ident) return false;
        const auto& w = t.text;
        return w == "public" || w == "private" || w == "protected" || w == "static" || w == "abstract" ||
               w == "class" || w == "interface" || w == "enum";
    }

    void parse_type_decl(ClassCtx* outer, bool local) {
        const Token& kw = tok();
        bool is_enum = is_word("enum");
        bool is_record = is_word("record");
        bool is_interface = is_word("interface");
        if (is_op("@")) {
            pos_ += 2;
            is_interface = true;
        } else {
            ++pos_;
        }
        const Token& name_tok = expect_name();
        std::string name = name_tok.text;

        ClassCtx& cls = new_class();
        cls.simple = name;
        cls.type_name = name;
        if (local) {
            cls.path = method_path_ + "." + name;
            cls.outer = cur_class_;
            cls.captured = visible_locals();
        } else if (outer) {
            cls.path = outer->path + "." + name;
            cls.outer = outer;
        } else {
            cls.path = qualify(package_, name);
        }

        std::string container = local ? method_path_ : outer ? outer->path : file_level();
        Snapshot s = snapshot();
        set_block(container, cls.path, "");
        emit(ItemKind::TD, name, kw);
        set_block(cls.path, cls.path, "");

        if (is_op("<")) skip_angle();
        if (is_record && is_op("(")) {
            ++pos_;
            while (!is_op(")") && !at_end()) {
                skip_modifiers();
                auto type = try_parse_type();
                if (!type) skip();
                cls.fields[expect_name().text] = resolve(*type);
                if (!accept(",")) break;
            }
            expect(")");
        }
        while (true) {
            if (accept_word("extends")) {
                do {
                    const Token& at = tok();
                    auto type = try_parse_type();
                    if (!type) skip();
                    std::string resolved = resolve(*type);
                    if (cls.super_type.empty() && !is_interface) cls.super_type = resolved;
                    emit(ItemKind::SC, resolved, at);
                } while (accept(","));
            } else if (accept_word("implements")) {
                do {
                    const Token& at = tok();
                    auto type = try_parse_type();
                    if (!type) skip();
                    emit(ItemKind::II, resolve(*type), at);
                } while (accept(","));
            } else if (is_word("permits")) {
                ++pos_;
                do {
                    if (!try_parse_type()) skip();
                } while (accept(","));
            } else {
                break;
            }
        }
        restore_context(s);
        if (!is_op("{")) skip();
        if (is_enum) {
            parse_enum_body(cls);
        } else {
            parse_class_body(cls);
        }
    }

    void parse_class_body(ClassCtx& cls) {
        with_class_level(cls, [&] {
            expect("{");
            while (!is_op("}") && !at_end()) parse_member(cls);
            expect("}");
        });
    }

    void parse_enum_body(ClassCtx& cls) {
        with_class_level(cls, [&] {
            expect("{");
            // constants
            while (!is_op(";") && !is_op("}") && !at_end()) {
                skip_modifiers();
                if (!is_name()) {
                    skip_member();
                    break;
                }
                cls.fields[tok().text] = cls.simple;
                ++pos_;
                if (is_op("(")) parse_args();
                if (is_op("{")) skip_balanced();
                if (!accept(",")) break;
            }
            accept(";");
            while (!is_op("}") && !at_end()) parse_member(cls);
            expect("}");
        });
    }

    std::vector<std::pair<std::string, std::string>> parse_params() {
        std::vector<std::pair<std::string, std::string>> params;
        expect("(");
        while (!is_op(")") && !at_end()) {
            skip_modifiers();
            auto type = try_parse_type();
            if (!type) skip();
            if (is_word("this")) {
                ++pos_; // receiver parameter
            } else {
                std::string name = expect_name().text;
                std::string t = resolve(*type);
                while (is_op("[") && is_op("]", 1)) {
                    pos_ += 2;
                    t += "[]";
                }
                params.emplace_back(name, t);
            }
            if (!accept(",")) break;
        }
        expect(")");
        return params;
    }

    static std::string join_types(const std::vector<std::pair<std::string, std::string>>& params) {
        std::string out;
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (i) out += ",";
            out += params[i].second;
        }
        return out;
    }

    void queue_body(ClassCtx& cls, std::string path, std::string return_type,
                    const std::vector<std::pair<std::string, std::string>>& params) {
        MethodJob job;
        job.body = pos_;
        job.cls = &cls;
        job.path = std::move(path);
        job.return_type = std::move(return_type);
        for (const auto& [n, t] : params) job.params[n] = t;
        pending_.push_back(std::move(job));
        skip_balanced();
    }

    void parse_member(ClassCtx& cls) {
        Snapshot s = snapshot();
        try {
            Mods mods = skip_modifiers();
            if (accept(";")) return;
            if (is_op("{")) {
                queue_body(cls, cls.path + (mods.is_static ? ".<clinit>()" : ".<init>()"), "", {});
                return;
            }
            if (is_type_decl_start()) {
                parse_type_decl(&cls, false);
                return;
            }
            if (is_op("<")) skip_angle();

            if (is_name() && tok().text == cls.simple && is_op("(", 1)) {
                const Token& name_tok = take();
                auto params = parse_params();
                skip_throws();
                std::string sig = cls.simple + "(" + join_types(params) + ")";
                std::string path = cls.path + "." + sig;
                set_block(cls.path, cls.path, path);
                emit(ItemKind::MD, sig, name_tok, cls.type_name, cls.simple);
                set_block(cls.path, cls.path, "");
                if (is_op("{")) queue_body(cls, path, "", params);
                else expect(";");
                return;
            }

            const Token& type_tok = tok();
            auto type = try_parse_type();
            if (!type || !is_name()) {
                rollback(s);
                pos_ = s.pos;
                skip_member();
                return;
            }
            if (is_op("(", 1)) {
                const Token& name_tok = take();
                auto params = parse_params();
                std::string ret = resolve(*type);
                while (is_op("[") && is_op("]", 1)) {
                    pos_ += 2;
                    ret += "[]";
                }
                skip_throws();
                std::string sig = name_tok.text + "(" + join_types(params) + ")";
                std::string path = cls.path + "." + sig;
                set_block(cls.path, cls.path, path);
                emit(ItemKind::MD, sig, name_tok, cls.type_name, name_tok.text);
                set_block(cls.path, cls.path, "");
                if (accept_word("default")) {
                    while (!is_op(";") && !at_end()) {
                        if (is_op("{") || is_op("(")) skip_balanced();
                        else ++pos_;
                    }
                }
                if (is_op("{")) queue_body(cls, path, ret, params);
                else expect(";");
                return;
            }
            // field declaration
            std::string resolved = resolve(*type);
            emit(ItemKind::FD, resolved, type_tok, resolved);
            parse_declarators(resolved, [&](const std::string& n, const std::string& t) { cls.fields[n] = t; });
            expect(";");
        } catch (const SkipStatement& e) {
            note_skip(e.at);
            rollback(s);
            pos_ = s.pos;
            skip_member();
        }
    }

    void skip_throws() {
        if (accept_word("throws")) {
            do {
                if (!try_parse_type()) skip();
            } while (accept(","));
        }
    }

    template <typename Declare>
    void parse_declarators(const std::string& base_type, Declare&& declare, int vd_item = -1) {
        do {
            std::string name = expect_name().text;
            std::string type = base_type;
            while (is_op("[") && is_op("]", 1)) {
                pos_ += 2;
                type += "[]";
            }
            if (accept("=")) {
                Expr init = is_op("{") ? parse_array_init() : parse_expression();
                if (type == "var") {
                    type = init.type.empty() ? "var" : init.type;
                    if (vd_item >= 0 && !init.type.empty()) items_[vd_item].name = init.type;
                }
                if (init.item >= 0) add_var(items_[init.item].vars, name);
                if (vd_item >= 0) {
                    add_var(items_[vd_item].vars, name);
                    merge_vars(items_[vd_item].vars, init.vars);
                }
            } else if (vd_item >= 0) {
                add_var(items_[vd_item].vars, name);
            }
            declare(name, type);
        } while (accept(","));
    }

    void flush_jobs(std::size_t mark) {
        while (pending_.size() > mark) {
            MethodJob job = std::move(pending_.back());
            pending_.pop_back();
            run_job(job);
        }
    }

    void run_job(const MethodJob& job) {
        Snapshot s = snapshot();
        auto saved_scopes = scopes_;
        auto saved_returns = returns_;
        pos_ = job.body;
        cur_class_ = job.cls;
        method_path_ = job.path;
        set_block(job.path, job.cls->path, job.path);
        scopes_.assign(1, job.params);
        returns_.assign(1, job.return_type);
        parse_block();
        restore_context(s);
        scopes_ = std::move(saved_scopes);
        returns_ = std::move(saved_returns);
        pos_ = s.pos;
    }

    // -- statements ------------------------------------------------------------

    void note_skip(std::size_t at) {
        if (!first_skip_) first_skip_ = at;
    }

    void parse_block() {
        expect("{");
        scopes_.emplace_back();
        while (!is_op("}") && !at_end()) parse_statement();
        expect("}");
        scopes_.pop_back();
    }

    void parse_statement() {
        Snapshot s = snapshot();
        try {
            parse_statement_inner();
        } catch (const SkipStatement& e) {
            note_skip(e.at);
            rollback(s);
            pos_ = s.pos;
            skip_statement();
        }
    }

    void parse_statement_inner() {
        if (is_op("{")) {
            parse_block();
            return;
        }
        if (accept(";")) return;

        const Token& t = tok();
        if (t.kind == TokenKind::Ident) {
            const std::string& w = t.text;
            if (w == "if") return parse_if();
            if (w == "while") return parse_while();
            if (w == "do") return parse_do();
            if (w == "for") return parse_for();
            if (w == "return") return parse_return();
            if (w == "switch") return parse_switch();
            if (w == "try") return parse_try();
            if (w == "throw") {
                ++pos_;
                parse_expression();
                expect(";");
                return;
            }
            if (w == "break" || w == "continue") {
                ++pos_;
                if (is_name()) ++pos_;
                expect(";");
                return;
            }
            if (w == "yield" && !is_op("=", 1) && !is_op("(", 1) && !is_op(".", 1)) {
                ++pos_;
                parse_expression();
                expect(";");
                return;
            }
            if (w == "assert") {
                ++pos_;
                parse_expression();
                if (accept(":")) parse_expression();
                expect(";");
                return;
            }
            if (w == "synchronized") {
                ++pos_;
                expect("(");
                parse_expression();
                expect(")");
                parse_block();
                return;
            }
            if ((w == "this" || w == "super") && is_op("(", 1)) {
                ++pos_;
                auto args = parse_args();
                std::vector<std::string> vars;
                for (const auto& a : args) add_var(vars, a.var);
                std::string owner = w == "this" ? (cur_class_ ? cur_class_->type_name : "this")
                                                : (cur_class_ && !cur_class_->super_type.empty()
                                                       ? cur_class_->super_type
                                                       : "super");
                emit(w == "this" ? ItemKind::CTI : ItemKind::SCI, w + "(" + arg_types(args) + ")", t, owner,
                     "<init>", vars);
                expect(";");
                return;
            }
            if (is_type_decl_start() || ((w == "abstract" || w == "final" || w == "static") &&
                                         (is_word("class", 1) || is_word("interface", 1)))) {
                skip_modifiers();
                std::size_t mark = pending_.size();
                parse_type_decl(cur_class_, true);
                flush_jobs(mark);
                return;
            }
            if (is_name() && is_op(":", 1)) {
                pos_ += 2;
                parse_statement();
                return;
            }
        }
        if (try_local_declaration()) return;
        parse_expression();
        expect(";");
    }

    /// Parses `[final] Type name [= init], ...;` when the tokens form one.
    bool try_local_declaration(bool require_semicolon = true) {
        std::size_t start = pos_;
        while (is_word("final") || (is_op("@") && !is_word("interface", 1))) {
            if (is_op("@")) skip_annotation();
            else ++pos_;
        }
        const Token& type_tok = tok();
        auto type = try_parse_type();
        if (!type || !is_name()) {
            pos_ = start;
            return false;
        }
        const auto& after = tok(1);
        bool decl_follow = after.kind == TokenKind::Op &&
                           (after.text == "=" || after.text == ";" || after.text == "," || after.text == "[" ||
                            after.text == ":" || after.text == ")");
        if (!decl_follow) {
            pos_ = start;
            return false;
        }
        std::string resolved = resolve(*type);
        int vd = emit(ItemKind::VD, resolved, type_tok, resolved);
        parse_declarators(resolved, [&](const std::string& n, const std::string& t) { declare(n, t); }, vd);
        if (require_semicolon) expect(";");
        return true;
    }

    void parse_if() {
        const Token& kw = take();
        expect("(");
        Expr cond = parse_expression();
        expect(")");
        mark(ControlMarker::Kind::IfBegin, kw, cond.vars);
        parse_statement();
        if (accept_word("else")) parse_statement();
        mark(ControlMarker::Kind::IfEnd, prev());
    }

    void parse_while() {
        const Token& kw = take();
        expect("(");
        Expr cond = parse_expression();
        expect(")");
        mark(ControlMarker::Kind::LoopBegin, kw, cond.vars);
        parse_statement();
        mark(ControlMarker::Kind::LoopEnd, prev());
    }

    void parse_do() {
        const Token& kw = take();
        std::size_t begin_marker = markers_.size();
        mark(ControlMarker::Kind::LoopBegin, kw);
        parse_statement();
        if (!accept_word("while")) skip();
        expect("(");
        Expr cond = parse_expression();
        expect(")");
        expect(";");
        markers_[begin_marker].vars = cond.vars;
        mark(ControlMarker::Kind::LoopEnd, prev());
    }

    void parse_for() {
        const Token& kw = take();
        expect("(");
        scopes_.emplace_back();
        std::vector<std::string> vars;

        // enhanced for
        std::size_t start = pos_;
        skip_modifiers();
        auto type = try_parse_type();
        if (type && is_name() && is_op(":", 1)) {
            std::string name = take().text;
            ++pos_;
            declare(name, resolve(*type));
            Expr iter = parse_expression();
            merge_vars(vars, iter.vars);
        } else {
            pos_ = start;
            if (!try_local_declaration()) {
                while (!is_op(";")) {
                    merge_vars(vars, parse_expression().vars);
                    if (!accept(",")) break;
                }
                expect(";");
            }
            if (!is_op(";")) merge_vars(vars, parse_expression().vars);
            expect(";");
            while (!is_op(")")) {
                parse_expression();
                if (!accept(",")) break;
            }
        }
        expect(")");
        mark(ControlMarker::Kind::LoopBegin, kw, vars);
        parse_statement();
        mark(ControlMarker::Kind::LoopEnd, prev());
        scopes_.pop_back();
    }

    void parse_return() {
        ++pos_;
        std::optional<Expr> value;
        if (!is_op(";")) value = parse_expression();
        const Token& end = tok();
        expect(";");
        std::string declared = returns_.empty() ? "" : returns_.back();
        std::string name;
        if (!declared.empty() && declared != "void") {
            name = declared;
        } else if (value) {
            name = value->cat == Expr::Cat::TypeRef || value->type.empty() ? "Object" : value->type;
        } else {
            name = "void";
        }
        emit(ItemKind::RT, name, end, {}, {}, value ? value->vars : std::vector<std::string>{});
    }

    void parse_switch() {
        ++pos_;
        expect("(");
        parse_expression();
        expect(")");
        expect("{");
        scopes_.emplace_back();
        while (!is_op("}") && !at_end()) {
            if (is_word("case") || is_word("default")) {
                ++pos_;
                while (!is_op(":") && !is_op("->") && !at_end()) {
                    if (is_op("(") || is_op("{") || is_op("[")) skip_balanced();
                    else ++pos_;
                }
                if (accept("->")) {
                    if (is_op("{")) parse_block();
                    else parse_statement();
                } else {
                    expect(":");
                }
                continue;
            }
            parse_statement();
        }
        expect("}");
        scopes_.pop_back();
    }

    void parse_try() {
        ++pos_;
        scopes_.emplace_back();
        if (accept("(")) {
            while (!is_op(")") && !at_end()) {
                if (!try_local_declaration(false)) parse_expression();
                if (!accept(";")) break;
            }
            expect(")");
        }
        parse_block();
        while (accept_word("catch")) {
            expect("(");
            skip_modifiers();
            auto type = try_parse_type();
            if (!type) skip();
            while (accept("|")) {
                if (!try_parse_type()) skip();
            }
            std::string name = expect_name().text;
            expect(")");
            scopes_.emplace_back();
            declare(name, resolve(*type));
            parse_block();
            scopes_.pop_back();
        }
        if (accept_word("finally")) parse_block();
        scopes_.pop_back();
    }

    // -- expressions -----------------------------------------------------------

    std::string gt_run(std::size_t& count) const {
        // joins adjacent '>' / '>=' tokens into shift / assignment operators
        std::string s;
        count = 0;
        std::size_t i = 0;
        while (i < 3) {
            const auto& t = tok(i);
            if (t.kind != TokenKind::Op || (t.text != ">" && t.text != ">=")) break;
            if (i > 0 && !adjacent(i - 1)) break;
            s += t.text;
            ++i;
            if (t.text == ">=") break;
        }
        count = i;
        return s;
    }

    std::size_t assignment_op_length() const {
        const auto& t = tok();
        if (t.kind != TokenKind::Op) return 0;
        static const std::set<std::string, std::less<>> simple = {"=", "+=", "-=", "*=", "/=", "%=",
                                                                   "&=", "|=", "^=", "<<="};
        if (simple.count(t.text)) return 1;
        if (t.text == ">") {
            std::size_t n = 0;
            std::string run = gt_run(n);
            if (run == ">>=" || run == ">>>=") return n;
        }
        return 0;
    }

    bool lambda_start() const {
        if (is_name() && is_op("->", 1)) return true;
        if (!is_op("(")) return false;
        int depth = 0;
        for (std::size_t i = 0;; ++i) {
            const auto& t = tok(i);
            if (t.kind == TokenKind::End) return false;
            if (t.kind == TokenKind::Op) {
                if (t.text == "(") ++depth;
                else if (t.text == ")" && --depth == 0) return is_op("->", i + 1);
            }
        }
    }

    Expr parse_lambda() {
        scopes_.emplace_back();
        if (is_name()) {
            declare(take().text, "");
        } else {
            expect("(");
            while (!is_op(")") && !at_end()) {
                skip_modifiers();
                std::size_t save = pos_;
                auto type = try_parse_type();
                if (type && is_name()) {
                    declare(take().text, *type == "var" ? "" : resolve(*type));
                } else {
                    pos_ = save;
                    declare(expect_name().text, "");
                }
                if (!accept(",")) break;
            }
            expect(")");
        }
        expect("->");
        returns_.push_back("");
        Expr body;
        if (is_op("{")) parse_block();
        else body = parse_expression();
        returns_.pop_back();
        scopes_.pop_back();
        Expr out;
        out.vars = body.vars;
        return out;
    }

    Expr parse_expression() {
        if (lambda_start()) return parse_lambda();
        Expr lhs = parse_conditional();
        std::size_t n = assignment_op_length();
        if (n == 0) return lhs;
        pos_ += n;
        Expr rhs = parse_expression();
        if (!lhs.var.empty() && rhs.item >= 0) add_var(items_[rhs.item].vars, lhs.var);
        Expr out = lhs;
        merge_vars(out.vars, rhs.vars);
        out.item = rhs.item >= 0 ? rhs.item : lhs.item;
        return out;
    }

    Expr parse_conditional() {
        Expr c = parse_binary(1);
        if (!accept("?")) return c;
        Expr a = parse_expression();
        expect(":");
        Expr b = lambda_start() ? parse_lambda() : parse_conditional();
        Expr out;
        out.type = !a.type.empty() ? a.type : b.type;
        out.vars = c.vars;
        merge_vars(out.vars, a.vars);
        merge_vars(out.vars, b.vars);
        return out;
    }

    struct BinOp {
        std::string text;
        int prec = 0;
        std::size_t length = 0;
    };

    BinOp peek_binary() const {
        const auto& t = tok();
        if (t.kind == TokenKind::Ident) {
            if (t.text == "instanceof") return {"instanceof", 7, 1};
            return {};
        }
        if (t.kind != TokenKind::Op) return {};
        const auto& s = t.text;
        if (s == ">") {
            std::size_t n = 0;
            std::string run = gt_run(n);
            if (run == ">") return {">", 7, 1};
            if (run == ">=") return {">=", 7, 1};
            if (run == ">>") return {">>", 8, 2};
            if (run == ">>>") return {">>>", 8, 3};
            return {};
        }
        if (s == "||") return {s, 1, 1};
        if (s == "&&") return {s, 2, 1};
        if (s == "|") return {s, 3, 1};
        if (s == "^") return {s, 4, 1};
        if (s == "&") return {s, 5, 1};
        if (s == "==" || s == "!=") return {s, 6, 1};
        if (s == "<" || s == "<=" || s == ">=") return {s, 7, 1};
        if (s == "<<") return {s, 8, 1};
        if (s == "+" || s == "-") return {s, 9, 1};
        if (s == "*" || s == "/" || s == "%") return {s, 10, 1};
        return {};
    }

    Expr parse_binary(int min_prec) {
        Expr left = parse_unary();
        while (true) {
            BinOp op = peek_binary();
            if (op.prec == 0 || op.prec < min_prec) break;
            pos_ += op.length;
            if (op.text == "instanceof") {
                accept_word("final");
                if (!try_parse_type()) skip();
                if (is_name()) declare(take().text, "");
                Expr out;
                out.type = "boolean";
                out.vars = left.vars;
                left = out;
                continue;
            }
            Expr right = parse_binary(op.prec + 1);
            Expr out;
            out.vars = left.vars;
            merge_vars(out.vars, right.vars);
            if (op.prec <= 2 || op.prec == 6 || op.prec == 7) {
                out.type = "boolean";
            } else if (op.text == "+" && (left.type == "String" || right.type == "String")) {
                out.type = "String";
            } else if (op.prec == 8) {
                out.type = promote(left.type, "int");
            } else if ((op.prec >= 3 && op.prec <= 5) && left.type == "boolean") {
                out.type = "boolean";
            } else {
                out.type = promote(left.type, right.type);
            }
            left = out;
        }
        return left;
    }

    bool is_cast() {
        if (!is_op("(")) return false;
        std::size_t start = pos_;
        ++pos_;
        auto type = try_parse_type();
        bool cast = false;
        if (type && is_op(")")) {
            std::string base = *type;
            while (base.ends_with("[]")) base.resize(base.size() - 2);
            const auto& next = tok(1);
            if (is_primitive_type(base)) {
                cast = true;
            } else if (next.kind == TokenKind::Ident) {
                cast = next.text != "instanceof";
            } else if (next.kind == TokenKind::Op) {
                cast = next.text == "(" || next.text == "!" || next.text == "~";
            } else {
                cast = next.kind != TokenKind::End;
            }
        }
        pos_ = start;
        return cast;
    }

    Expr parse_unary() {
        const auto& t = tok();
        if (t.kind == TokenKind::Op) {
            const auto& s = t.text;
            if (s == "+" || s == "-" || s == "!" || s == "~" || s == "++" || s == "--") {
                ++pos_;
                Expr e = parse_unary();
                Expr out;
                out.vars = e.vars;
                out.item = e.item;
                if (s == "!") out.type = "boolean";
                else if (s == "++" || s == "--") out.type = e.type;
                else out.type = promote(e.type, "int");
                return out;
            }
            if (s == "(" && is_cast()) {
                ++pos_;
                std::string written = *try_parse_type();
                expect(")");
                Expr e = lambda_start() ? parse_lambda() : parse_unary();
                e.cat = Expr::Cat::Value;
                e.type = resolve(written);
                return e;
            }
        }
        return parse_postfix(parse_primary());
    }

    Expr literal(std::string type) {
        ++pos_;
        Expr e;
        e.type = std::move(type);
        return e;
    }

    Expr parse_primary() {
        const Token& t = tok();
        switch (t.kind) {
        case TokenKind::IntLit: return literal("int");
        case TokenKind::LongLit: return literal("long");
        case TokenKind::FloatLit: return literal("float");
        case TokenKind::DoubleLit: return literal("double");
        case TokenKind::CharLit: return literal("char");
        case TokenKind::StringLit: return literal("String");
        case TokenKind::End: skip();
        case TokenKind::Op: {
            if (t.text == "(") {
                ++pos_;
                Expr e = parse_expression();
                expect(")");
                return e;
            }
            skip();
        }
        case TokenKind::Ident: break;
        }

        const std::string& w = t.text;
        if (w == "true" || w == "false") return literal("boolean");
        if (w == "null") return literal("null");
        if (w == "this") {
            ++pos_;
            Expr e;
            e.cat = Expr::Cat::This;
            e.type = cur_class_ ? cur_class_->type_name : "";
            return e;
        }
        if (w == "super") {
            ++pos_;
            Expr e;
            e.cat = Expr::Cat::Super;
            return e;
        }
        if (w == "new") return parse_creation();
        if (w == "switch") {
            ++pos_;
            if (!is_op("(")) skip();
            skip_balanced();
            if (!is_op("{")) skip();
            skip_balanced();
            return {};
        }
        if (is_primitive_type(w)) {
            auto type = try_parse_type();
            if (!type || !accept(".") || !accept_word("class")) skip();
            Expr e;
            e.type = "Class";
            return e;
        }
        if (is_java_keyword(w)) skip();

        ++pos_;
        if (is_op("(")) {
            auto args = parse_args();
            Expr e;
            std::vector<std::string> vars;
            for (const auto& a : args) {
                add_var(vars, a.var);
                merge_vars(e.vars, a.vars);
            }
            std::string owner = cur_class_ ? cur_class_->type_name : "";
            e.item = emit(ItemKind::MI, w + "(" + arg_types(args) + ")", t, owner, w, vars);
            return e;
        }
        Expr e;
        if (auto type = lookup(w)) {
            e.type = *type;
            e.var = w;
            e.vars = {w};
        } else if (starts_upper(w)) {
            e.cat = Expr::Cat::TypeRef;
            e.text = resolve(w);
        } else {
            e.cat = Expr::Cat::Ambiguous;
            e.text = w;
            e.last_tok = pos_ - 1;
        }
        return e;
    }

    std::vector<Expr> parse_args() {
        std::vector<Expr> args;
        expect("(");
        while (!is_op(")") && !at_end()) {
            args.push_back(parse_expression());
            if (!accept(",")) break;
        }
        expect(")");
        return args;
    }

    static std::string arg_types(const std::vector<Expr>& args) {
        std::string out;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (i) out += ",";
            const auto& a = args[i];
            out += (a.cat == Expr::Cat::TypeRef || a.type.empty()) ? "Object" : a.type;
        }
        return out;
    }

    Expr finalize(Expr e) {
        switch (e.cat) {
        case Expr::Cat::Ambiguous: {
            Expr out;
            auto dot = e.text.rfind('.');
            std::string head = e.text.substr(0, e.text.find('.'));
            if (dot == std::string::npos) {
                out.var = e.text;
                out.vars = {e.text};
            } else {
                std::string member = e.text.substr(dot + 1);
                out.vars = {head};
                out.item = emit(ItemKind::FA, "unknown." + member, toks_[e.last_tok], "unknown", member, {head});
            }
            return out;
        }
        case Expr::Cat::This:
        case Expr::Cat::Super:
        case Expr::Cat::TypeRef:
        case Expr::Cat::Value: return e;
        }
        return e;
    }

    Expr make_call(const Expr& recv, const Token& name_tok, const std::vector<Expr>& args) {
        std::string prefix, owner;
        std::vector<std::string> item_vars;
        switch (recv.cat) {
        case Expr::Cat::TypeRef:
            prefix = recv.text + ".";
            owner = recv.text;
            break;
        case Expr::Cat::This:
            owner = cur_class_ ? cur_class_->type_name : "";
            break;
        case Expr::Cat::Super:
            prefix = "super.";
            owner = cur_class_ && !cur_class_->super_type.empty() ? cur_class_->super_type : "super";
            break;
        case Expr::Cat::Ambiguous:
            prefix = "unknown.";
            owner = "unknown";
            add_var(item_vars, recv.text.substr(0, recv.text.find('.')));
            break;
        case Expr::Cat::Value:
            if (!recv.type.empty() && recv.type != "null") {
                prefix = lower_camel(recv.type) + ".";
                owner = recv.type;
            } else {
                prefix = "unknown.";
                owner = "unknown";
            }
            add_var(item_vars, recv.var);
            break;
        }
        Expr out;
        out.vars = recv.vars;
        if (recv.cat == Expr::Cat::Ambiguous) add_var(out.vars, recv.text.substr(0, recv.text.find('.')));
        for (const auto& a : args) {
            add_var(item_vars, a.var);
            merge_vars(out.vars, a.vars);
        }
        out.item = emit(ItemKind::MI, prefix + name_tok.text + "(" + arg_types(args) + ")", name_tok, owner,
                        name_tok.text, item_vars);
        return out;
    }

    Expr field(const Expr& recv, const Token& name_tok) {
        const std::string& member = name_tok.text;
        Expr out;
        switch (recv.cat) {
        case Expr::Cat::TypeRef:
            if (is_constant_name(member)) {
                out.type = "int";
            } else if (starts_upper(member)) {
                out.cat = Expr::Cat::TypeRef;
                out.text = recv.text + "." + member;
            }
            return out;
        case Expr::Cat::Ambiguous:
            if (starts_upper(member)) {
                out.cat = Expr::Cat::TypeRef;
                out.text = resolve(recv.text + "." + member);
            } else {
                out.cat = Expr::Cat::Ambiguous;
                out.text = recv.text + "." + member;
                out.last_tok = pos_ - 1;
            }
            return out;
        case Expr::Cat::This: {
            std::string cls = cur_class_ ? cur_class_->type_name : "this";
            for (const ClassCtx* c = cur_class_; c; c = c->outer) {
                if (auto f = c->fields.find(member); f != c->fields.end()) {
                    out.type = f->second;
                    break;
                }
            }
            out.var = member;
            out.vars = {member};
            out.item = emit(ItemKind::FA, lower_camel(cls) + "." + member, name_tok, cls, member, {member});
            return out;
        }
        case Expr::Cat::Super:
            out.item = emit(ItemKind::FA, "super." + member, name_tok, "super", member);
            return out;
        case Expr::Cat::Value: {
            bool known = !recv.type.empty() && recv.type != "null";
            std::string owner = known ? recv.type : "unknown";
            if (known && recv.type.ends_with("[]") && member == "length") out.type = "int";
            out.vars = recv.vars;
            std::vector<std::string> vars;
            add_var(vars, recv.var);
            out.item = emit(ItemKind::FA, (known ? lower_camel(recv.type) : std::string("unknown")) + "." + member,
                            name_tok, owner, member, vars);
            return out;
        }
        }
        return out;
    }

    Expr parse_postfix(Expr e) {
        while (true) {
            if (is_op(".")) {
                ++pos_;
                if (is_op("<")) skip_angle();
                if (is_word("new")) {
                    e = parse_creation();
                    continue;
                }
                if (accept_word("class")) {
                    e = Expr{};
                    e.type = "Class";
                    continue;
                }
                if (accept_word("this")) {
                    e = Expr{};
                    e.cat = Expr::Cat::This;
                    e.type = cur_class_ ? cur_class_->type_name : "";
                    continue;
                }
                if (accept_word("super")) {
                    e = Expr{};
                    e.cat = Expr::Cat::Super;
                    continue;
                }
                const Token& name_tok = expect_name();
                if (is_op("(")) {
                    auto args = parse_args();
                    e = make_call(e, name_tok, args);
                } else {
                    e = field(e, name_tok);
                }
            } else if (is_op("[")) {
                if (e.cat == Expr::Cat::TypeRef && is_op("]", 1)) {
                    pos_ += 2;
                    e.text += "[]";
                    continue;
                }
                e = finalize(std::move(e));
                const Token& lb = take();
                Expr idx = parse_expression();
                expect("]");
                bool is_array = e.type.ends_with("[]");
                std::vector<std::string> vars;
                add_var(vars, e.var);
                Expr out;
                out.vars = e.vars;
                merge_vars(out.vars, idx.vars);
                out.type = is_array ? e.type.substr(0, e.type.size() - 2) : "";
                out.item = emit(ItemKind::AA, is_array ? e.type : "unknown[]", lb, is_array ? e.type : "unknown",
                                "[]", vars);
                e = std::move(out);
            } else if (is_op("++") || is_op("--")) {
                ++pos_;
                e = finalize(std::move(e));
            } else if (is_op("::")) {
                ++pos_;
                if (!accept_word("new")) expect_name();
                e = Expr{};
            } else {
                break;
            }
        }
        return finalize(std::move(e));
    }

    Expr parse_array_init() {
        expect("{");
        Expr out;
        while (!is_op("}") && !at_end()) {
            Expr el = is_op("{") ? parse_array_init() : parse_expression();
            merge_vars(out.vars, el.vars);
            if (!accept(",")) break;
        }
        expect("}");
        return out;
    }

    Expr parse_creation() {
        const Token& nt = take(); // new
        if (is_op("<")) skip_angle();
        while (is_op("@")) skip_annotation();
        if (tok().kind != TokenKind::Ident) skip();
        std::string base = take().text;
        if (!is_primitive_type(base)) {
            if (is_op("<")) skip_angle();
            while (is_op(".") && is_name(1)) {
                base += "." + tok(1).text;
                pos_ += 2;
                if (is_op("<")) skip_angle();
            }
        }
        std::string type = resolve(base);
        Expr out;

        if (is_op("[")) {
            while (is_op("[")) {
                ++pos_;
                if (!is_op("]")) merge_vars(out.vars, parse_expression().vars);
                expect("]");
                type += "[]";
            }
            if (is_op("{")) merge_vars(out.vars, parse_array_init().vars);
            out.type = type;
            out.item = emit(ItemKind::AC, type, nt, type, "[]");
            return out;
        }

        auto args = parse_args();
        std::vector<std::string> vars;
        for (const auto& a : args) {
            add_var(vars, a.var);
            merge_vars(out.vars, a.vars);
        }
        out.type = type;
        if (is_op("{")) {
            out.item = emit(ItemKind::ACD, type, nt, type, "<init>", vars);
            ClassCtx& anon = new_class();
            std::string container = !method_path_.empty() ? method_path_ : cur_class_ ? cur_class_->path : file_level();
            anon.path = container + "$" + std::to_string(++anon_counts_[container]);
            anon.type_name = type;
            anon.super_type = type;
            anon.outer = cur_class_;
            anon.captured = visible_locals();
            std::size_t mark = pending_.size();
            parse_class_body(anon);
            flush_jobs(mark);
            return out;
        }
        out.item = emit(ItemKind::CI, type + "(" + arg_types(args) + ")", nt, type, "<init>", vars);
        return out;
    }

    std::vector<Token> toks_;
    std::string file_;
    std::size_t pos_ = 0;
    std::string package_;
    ImportTable imports_;

    std::vector<SourceItem> items_;
    std::vector<ControlMarker> markers_;
    std::deque<ClassCtx> classes_;
    std::vector<MethodJob> pending_;
    std::map<std::string, int> anon_counts_;

    ClassCtx* cur_class_ = nullptr;
    std::string method_path_;
    std::string enclosing_, class_block_, method_block_;
    std::vector<std::map<std::string, std::string>> scopes_;
    std::vector<std::string> returns_;
    std::optional<std::size_t> first_skip_;
};

} // namespace

ExtractResult extract_items(std::string_view source, std::string_view file_label) {
    Parser parser(detail::tokenize_java(source), std::string(file_label));
    return parser.parse_unit();
}

ExtractResult extract_statements(std::string_view statements, const ScopeContext& ctx) {
    Parser parser(detail::tokenize_java(statements), "<snippet>");
    return parser.parse_snippet(ctx);
}

namespace detail {

SnippetParse parse_snippet(std::string_view statements, const ScopeContext& ctx) {
    Parser parser(tokenize_java(statements), "<snippet>");
    SnippetParse out;
    out.result = parser.parse_snippet(ctx);
    if (auto t = parser.first_skip()) out.first_skipped = t->kind == TokenKind::End ? std::string("<end>") : t->text;
    out.bindings = parser.snippet_bindings();
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Corpus discovery

std::vector<SourceFile> discover_sources(const std::vector<std::filesystem::path>& roots,
                                         std::string_view extension) {
    namespace fs = std::filesystem;
    std::vector<SourceFile> out;
    for (const auto& root : roots) {
        if (fs::is_regular_file(root)) {
            out.push_back({root, root.filename().generic_string()});
            continue;
        }
        for (const auto& entry : fs::recursive_directory_iterator(root)) {
            if (!entry.is_regular_file() || entry.path().extension() != extension) continue;
            std::string label = fs::relative(entry.path(), root).generic_string();
            if (roots.size() > 1) label = root.filename().generic_string() + "/" + label;
            out.push_back({entry.path(), label});
        }
    }
    std::sort(out.begin(), out.end(), [](const SourceFile& a, const SourceFile& b) {
        return a.label != b.label ? a.label < b.label : a.path < b.path;
    });
    return out;
}

ExtractResult extract_corpus(const std::vector<SourceFile>& files) {
    ExtractResult all;
    for (const auto& f : files) {
        std::ifstream in(f.path, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        auto r = extract_items(buf.str(), f.label);
        all.items.insert(all.items.end(), std::make_move_iterator(r.items.begin()),
                         std::make_move_iterator(r.items.end()));
        all.markers.insert(all.markers.end(), std::make_move_iterator(r.markers.begin()),
                           std::make_move_iterator(r.markers.end()));
    }
    return all;
}

} // namespace esdp
