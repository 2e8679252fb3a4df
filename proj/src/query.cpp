#include "esdp/query.h"

#include "esdp/errors.h"
#include "extractor_detail.h"
#include "java_lexer.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace esdp {

namespace {

bool starts_upper(std::string_view s) {
    return !s.empty() && std::isupper(static_cast<unsigned char>(s.front()));
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// `x = Type.factory(...)` with x undeclared: assume the factory returns Type.
void bind_factory_target(const std::vector<detail::Token>& toks, const SourceItem& item, ScopeContext& ctx) {
    if (toks.size() < 3 || item.kind != ItemKind::MI) return;
    if (toks[0].kind != detail::TokenKind::Ident || toks[1].text != "=") return;
    const std::string& var = toks[0].text;
    if (detail::is_java_keyword(var) || ctx.variables.count(var)) return;
    const std::string& owner = item.owner_type;
    if (owner.empty() || owner == "unknown" || !starts_upper(simple_type_name(owner))) return;
    if (item.name != owner + "." + item.member + item.name.substr(item.name.find('('))) return;
    ctx.variables[var] = owner;
}

struct CallParts {
    std::string receiver; // "" for unqualified calls
    std::string member;
    std::vector<std::string> args;
    bool has_args = false;
};

CallParts split_call(const std::string& name) {
    CallParts parts;
    auto paren = name.find('(');
    std::string head = name.substr(0, paren);
    auto dot = head.rfind('.');
    if (dot != std::string::npos) {
        parts.receiver = head.substr(0, dot);
        parts.member = head.substr(dot + 1);
    } else {
        parts.member = head;
    }
    if (paren != std::string::npos) {
        parts.has_args = true;
        auto close = name.rfind(')');
        std::string inner = name.substr(paren + 1, close == std::string::npos ? std::string::npos : close - paren - 1);
        std::size_t start = 0;
        while (!inner.empty()) {
            auto comma = inner.find(',', start);
            parts.args.push_back(inner.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }
    return parts;
}

bool is_identifier_text(const std::string& s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
    });
}

class SkeletonWriter {
public:
    explicit SkeletonWriter(const UserQuery& q) {
        for (const auto& [name, type] : q.context.variables) bind(name, type);
    }

    Skeleton render(const std::vector<ItemKey>& elements) {
        for (const auto& e : elements) skeleton_.statements.push_back(statement(e));
        return std::move(skeleton_);
    }

    const std::map<std::string, std::string>& fresh() const { return fresh_; }

private:
    void bind(const std::string& name, const std::string& type) {
        vars_.erase(std::remove_if(vars_.begin(), vars_.end(), [&](const auto& v) { return v.first == name; }),
                    vars_.end());
        vars_.emplace_back(name, type);
        taken_.insert(name);
    }

    std::string fresh_name(std::string base) {
        if (base.ends_with("[]")) {
            while (base.ends_with("[]")) base.resize(base.size() - 2);
            base += "s";
        }
        if (!is_identifier_text(base)) base = "value";
        if (detail::is_java_keyword(base) || base == "unknown") base += "1";
        std::string name = base;
        for (int n = 2; taken_.count(name); ++n) name = base + std::to_string(n);
        taken_.insert(name);
        return name;
    }

    // Most recently bound variable whose type renders as receiver.
    std::string receiver_var(const std::string& receiver) {
        for (auto it = vars_.rbegin(); it != vars_.rend(); ++it) {
            if (lower_camel(it->second) == receiver) return it->first;
        }
        std::string type = receiver;
        type[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(type[0])));
        std::string name = fresh_name(receiver);
        skeleton_.declarations.push_back(type + " " + name + " = null;");
        fresh_[name] = type;
        bind(name, type);
        return name;
    }

    std::string value_of(const std::string& type) {
        if (type != "null" && type != "Object" && !detail::is_primitive_type(type) && type != "String") {
            for (auto it = vars_.rbegin(); it != vars_.rend(); ++it) {
                if (it->second == type) return it->first;
            }
        }
        return placeholder_for(type);
    }

    std::string args_text(const std::vector<std::string>& args) {
        std::string out;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (i) out += ", ";
            out += value_of(args[i]);
        }
        return out;
    }

    std::string target(const std::string& receiver) {
        if (receiver == "unknown" || receiver == "super") return receiver;
        std::string last = receiver.substr(receiver.rfind('.') == std::string::npos ? 0 : receiver.rfind('.') + 1);
        if (starts_upper(last)) return receiver; // static access through the type
        return receiver_var(receiver);
    }

    std::string statement(const ItemKey& e) {
        const std::string& n = e.name;
        switch (e.kind) {
        case ItemKind::MI: {
            auto c = split_call(n);
            std::string call = c.member + "(" + args_text(c.args) + ");";
            return c.receiver.empty() ? call : target(c.receiver) + "." + call;
        }
        case ItemKind::FA: {
            auto c = split_call(n);
            return target(c.receiver) + "." + c.member + ";";
        }
        case ItemKind::CI: {
            auto c = split_call(n);
            return "new " + n.substr(0, n.find('(')) + "(" + args_text(c.args) + ");";
        }
        case ItemKind::ACD: return "new " + n + "() { };";
        case ItemKind::AC: {
            std::string base = n;
            std::string dims;
            while (base.ends_with("[]")) {
                base.resize(base.size() - 2);
                dims += "[0]";
            }
            return "new " + base + dims + ";";
        }
        case ItemKind::AA: {
            if (n == "unknown[]") return "unknown[0];";
            std::string var;
            for (auto it = vars_.rbegin(); it != vars_.rend() && var.empty(); ++it) {
                if (it->second == n) var = it->first;
            }
            if (var.empty()) {
                var = fresh_name(lower_camel(n));
                skeleton_.declarations.push_back(n + " " + var + " = null;");
                fresh_[var] = n;
                bind(var, n);
            }
            return var + "[0];";
        }
        case ItemKind::VD: {
            if (n == "var") {
                std::string name = fresh_name("value");
                bind(name, "");
                return "var " + name + " = unknown;";
            }
            std::string name = fresh_name(lower_camel(n));
            bind(name, n);
            return n + " " + name + ";";
        }
        case ItemKind::FD: {
            std::string name = fresh_name(lower_camel(n));
            bind(name, n);
            return "private " + n + " " + name + ";";
        }
        case ItemKind::RT:
            if (n == "void") return "return;";
            return "return " + value_of(n) + ";";
        case ItemKind::CTI:
        case ItemKind::SCI: {
            auto c = split_call(n);
            return c.member + "(" + args_text(c.args) + ");";
        }
        case ItemKind::MD: {
            auto c = split_call(n);
            std::string params;
            for (std::size_t i = 0; i < c.args.size(); ++i) {
                if (i) params += ", ";
                params += c.args[i] + " p" + std::to_string(i);
            }
            return "public void " + c.member + "(" + params + ") { }";
        }
        case ItemKind::TD: return "class " + n + " { }";
        case ItemKind::SC: return "// extends " + n;
        case ItemKind::II: return "// implements " + n;
        case ItemKind::PD: return "// package " + n;
        case ItemKind::ID: return "// import " + n;
        }
        return "";
    }

    std::vector<std::pair<std::string, std::string>> vars_;
    std::set<std::string> taken_;
    std::map<std::string, std::string> fresh_;
    Skeleton skeleton_;
};

} // namespace

std::string placeholder_for(std::string_view type) {
    if (type == "int") return "0";
    if (type == "long") return "0L";
    if (type == "short") return "(short) 0";
    if (type == "byte") return "(byte) 0";
    if (type == "float") return "0.0f";
    if (type == "double") return "0.0";
    if (type == "char") return "'a'";
    if (type == "boolean") return "true";
    if (type == "String") return "\"\"";
    if (type == "null") return "null";
    return "(" + std::string(type) + ") null";
}

UserQuery abstract_query(std::string_view statement, const ScopeContext& context) {
    std::string text = trim(statement);
    if (text.empty()) throw UnparsableQuery("<empty>", "empty query");
    auto toks = detail::tokenize_java(text);
    auto parsed = detail::parse_snippet(text, context);
    const auto& items = parsed.result.items;
    if (items.empty()) {
        std::string token = parsed.first_skipped.value_or(toks.empty() ? "<empty>" : toks.front().text);
        throw UnparsableQuery(token, "statement yields no API item");
    }
    const SourceItem* chosen = &items.front();
    if (items.size() > 1) {
        for (const auto& it : items) {
            if (it.kind != ItemKind::VD && it.kind != ItemKind::FD) {
                chosen = &it;
                break;
            }
        }
    }
    UserQuery q;
    q.raw_statement = text;
    q.item = chosen->key();
    q.context = context;
    for (const auto& [name, type] : parsed.bindings) {
        if (!q.context.variables.count(name)) q.context.variables[name] = type;
    }
    bind_factory_target(toks, *chosen, q.context);
    return q;
}

std::vector<Recommendation> search(const UserQuery& q, const MinedRepository& repo, std::size_t top_n) {
    if (top_n < 1) throw InvalidThreshold("top_n must be at least 1");
    std::vector<Recommendation> tiers[3];
    for (const auto& p : repo.patterns) {
        if (p.elements.empty()) continue;
        Recommendation r;
        r.pattern = p;
        r.score = p.ranking();
        if (p.elements.front() == q.item) {
            r.tier = MatchTier::Antecedent;
            tiers[0].push_back(std::move(r));
            continue;
        }
        auto hit = std::find(p.elements.begin(), p.elements.end(), q.item);
        if (hit != p.elements.end()) {
            r.tier = MatchTier::Contains;
            r.match_offset = static_cast<std::size_t>(hit - p.elements.begin());
            tiers[1].push_back(std::move(r));
            continue;
        }
        if (q.item.name.empty()) continue;
        auto sub = std::find_if(p.elements.begin(), p.elements.end(),
                                [&](const ItemKey& e) { return e.name.find(q.item.name) != std::string::npos; });
        if (sub != p.elements.end()) {
            r.tier = MatchTier::Substring;
            r.match_offset = static_cast<std::size_t>(sub - p.elements.begin());
            tiers[2].push_back(std::move(r));
        }
    }
    std::vector<Recommendation> out;
    for (auto& tier : tiers) {
        std::stable_sort(tier.begin(), tier.end(),
                         [](const Recommendation& a, const Recommendation& b) { return pattern_before(a.pattern, b.pattern); });
        for (auto& r : tier) {
            if (out.size() == top_n) return out;
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::string Skeleton::text() const {
    std::string out;
    for (const auto& d : declarations) out += d + "\n";
    for (const auto& s : statements) out += s + "\n";
    return out;
}

Skeleton render_skeleton(const Recommendation& rec, const UserQuery& q) {
    std::vector<ItemKey> rest;
    if (rec.match_offset + 1 < rec.pattern.elements.size()) {
        rest.assign(rec.pattern.elements.begin() + static_cast<std::ptrdiff_t>(rec.match_offset) + 1,
                    rec.pattern.elements.end());
    }
    SkeletonWriter writer(q);
    return writer.render(rest);
}

bool skeleton_round_trips(const Recommendation& rec, const UserQuery& q, const Skeleton& skeleton) {
    std::vector<ItemKey> expected;
    for (std::size_t i = rec.match_offset + 1; i < rec.pattern.elements.size(); ++i) {
        expected.push_back(rec.pattern.elements[i]);
    }
    ScopeContext ctx = q.context;
    ctx.return_type.clear();
    // fresh receivers are declared in the skeleton's scaffolding lines
    for (const auto& d : skeleton.declarations) {
        auto sp = d.find(' ');
        auto eq = d.find(" =");
        ctx.variables[d.substr(sp + 1, eq - sp - 1)] = d.substr(0, sp);
    }
    std::string body;
    for (const auto& s : skeleton.statements) body += s + "\n";
    auto got = detail::parse_snippet(body, ctx).result.items;
    if (got.size() != expected.size()) return false;
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (got[i].key() != expected[i]) return false;
    }
    return true;
}

} // namespace esdp
