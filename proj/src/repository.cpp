#include "esdp/repository.h"

#include "esdp/errors.h"
#include "esdp/xml.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace esdp {

void normalize_repository(MinedRepository& repo) {
    std::stable_sort(repo.patterns.begin(), repo.patterns.end(), pattern_before);
    std::set<std::vector<ItemKey>> seen;
    std::vector<SequentialPattern> unique;
    for (auto& p : repo.patterns) {
        if (seen.insert(p.elements).second) unique.push_back(std::move(p));
    }
    repo.patterns = std::move(unique);
}

std::string serialize_repository(const MinedRepository& repo) {
    XmlWriter w;
    w.declaration();
    w.open("esdp-repository", {{"version", "1"},
                               {"corpus", repo.corpus_label},
                               {"created", repo.created_at},
                               {"min-support", std::to_string(repo.min_support_used)}});
    if (repo.patterns.empty()) {
        w.empty("patterns");
    } else {
        w.open("patterns");
        for (const auto& p : repo.patterns) {
            std::string kind(p.elements.empty() ? "MI" : to_string(p.elements.front().kind));
            w.open("pattern", {{"kind", kind}, {"k", std::to_string(p.k())}});
            w.text_element("support",
                           {{"num", std::to_string(p.support_count)}, {"den", std::to_string(p.db_size)}},
                           format_fixed2(p.support_count, p.db_size));
            w.text_element("confidence",
                           {{"num", std::to_string(p.support_count)}, {"den", std::to_string(p.prefix_support)}},
                           format_fixed2(p.support_count, p.prefix_support));
            w.text_element("ranking", {}, format_fixed2(p.ranking().num, p.ranking().den));
            w.open("sequence");
            for (std::size_t i = 0; i < p.elements.size(); ++i) {
                w.text_element("s", {{"i", std::to_string(i + 1)}, {"kind", std::string(to_string(p.elements[i].kind))}},
                               p.elements[i].name);
            }
            w.close();
            w.close();
        }
        w.close();
    }
    w.close();
    return w.str();
}

namespace {

class Validator {
public:
    MinedRepository run(const XmlNode& root) {
        MinedRepository repo;
        std::string path = "/" + root.name;
        if (root.name != "esdp-repository") fail(path, "unexpected root element");
        check_attrs(root, path, {"version", "corpus", "created", "min-support"});
        if (*root.attr("version") != "1") fail(path, "unsupported version " + *root.attr("version"));
        repo.corpus_label = *root.attr("corpus");
        repo.created_at = *root.attr("created");
        if (!is_valid_timestamp(repo.created_at)) fail(path, "created is not an ISO 8601 UTC timestamp");
        repo.min_support_used = positive(*root.attr("min-support"), path, "min-support");
        element_only(root, path);
        if (root.children.size() != 1 || root.children[0].name != "patterns") {
            fail(path, "expected exactly one <patterns> child");
        }
        const XmlNode& patterns = root.children[0];
        std::string ppath = path + "/patterns";
        check_attrs(patterns, ppath, {});
        element_only(patterns, ppath);

        std::set<std::vector<ItemKey>> seen;
        for (std::size_t i = 0; i < patterns.children.size(); ++i) {
            const XmlNode& node = patterns.children[i];
            std::string at = ppath + "/" + node.name + "[" + std::to_string(i + 1) + "]";
            if (node.name != "pattern") fail(at, "unknown element");
            SequentialPattern p = pattern(node, at);
            if (p.support_count < repo.min_support_used) fail(at + "/support", "support below min-support");
            if (!seen.insert(p.elements).second) fail(at, "duplicate sequence");
            if (!repo.patterns.empty() && pattern_before(p, repo.patterns.back())) {
                fail(at, "patterns are not in ranking order");
            }
            repo.patterns.push_back(std::move(p));
        }
        return repo;
    }

private:
    [[noreturn]] static void fail(const std::string& path, const std::string& what) {
        throw SchemaViolation(path, what);
    }

    static void check_attrs(const XmlNode& node, const std::string& path, std::initializer_list<const char*> allowed) {
        for (const auto& [k, v] : node.attrs) {
            bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; });
            if (!ok) fail(path, "unknown attribute " + k);
        }
        for (const char* a : allowed) {
            if (!node.attr(a)) fail(path, std::string("missing attribute ") + a);
        }
    }

    static void element_only(const XmlNode& node, const std::string& path) {
        for (char c : node.text) {
            if (!std::isspace(static_cast<unsigned char>(c))) fail(path, "unexpected text content");
        }
    }

    static void leaf(const XmlNode& node, const std::string& path) {
        if (!node.children.empty()) fail(path + "/" + node.children[0].name, "unknown element");
    }

    static long long positive(const std::string& text, const std::string& path, const std::string& what) {
        if (text.empty() || text.size() > 15 || (text.size() > 1 && text[0] == '0')) {
            fail(path, what + " is not a positive integer");
        }
        long long v = 0;
        for (char c : text) {
            if (!std::isdigit(static_cast<unsigned char>(c))) fail(path, what + " is not a positive integer");
            v = v * 10 + (c - '0');
        }
        if (v < 1) fail(path, what + " is not a positive integer");
        return v;
    }

    static void check_display(const XmlNode& node, const std::string& path, long long num, long long den) {
        std::string expected = format_fixed2(num, den);
        if (node.text != expected) {
            fail(path, "value '" + node.text + "' does not match " + std::to_string(num) + "/" + std::to_string(den));
        }
    }

    SequentialPattern pattern(const XmlNode& node, const std::string& at) {
        check_attrs(node, at, {"kind", "k"});
        element_only(node, at);
        auto kind = parse_item_kind(*node.attr("kind"));
        if (!kind) fail(at, "unknown item kind " + *node.attr("kind"));
        long long k = positive(*node.attr("k"), at, "k");

        static const char* order[] = {"support", "confidence", "ranking", "sequence"};
        if (node.children.size() != 4) fail(at, "expected support, confidence, ranking, sequence");
        for (std::size_t i = 0; i < 4; ++i) {
            if (node.children[i].name != order[i]) {
                fail(at + "/" + node.children[i].name, std::string("expected <") + order[i] + ">");
            }
        }
        SequentialPattern p;

        const XmlNode& sup = node.children[0];
        std::string sp = at + "/support";
        check_attrs(sup, sp, {"num", "den"});
        leaf(sup, sp);
        p.support_count = positive(*sup.attr("num"), sp, "num");
        p.db_size = positive(*sup.attr("den"), sp, "den");
        if (p.support_count > p.db_size) fail(sp, "support exceeds database size");
        check_display(sup, sp, p.support_count, p.db_size);

        const XmlNode& conf = node.children[1];
        std::string cp = at + "/confidence";
        check_attrs(conf, cp, {"num", "den"});
        leaf(conf, cp);
        long long cnum = positive(*conf.attr("num"), cp, "num");
        p.prefix_support = positive(*conf.attr("den"), cp, "den");
        if (cnum != p.support_count) fail(cp, "confidence numerator differs from support");
        if (p.prefix_support < p.support_count || p.prefix_support > p.db_size) fail(cp, "prefix support out of range");
        if (k == 1 && p.prefix_support != p.support_count) fail(cp, "confidence of a 1-pattern must be 1");
        check_display(conf, cp, cnum, p.prefix_support);

        const XmlNode& rank = node.children[2];
        std::string rp = at + "/ranking";
        check_attrs(rank, rp, {});
        leaf(rank, rp);
        check_display(rank, rp, k * p.support_count, p.db_size);

        const XmlNode& seq = node.children[3];
        std::string qp = at + "/sequence";
        check_attrs(seq, qp, {});
        element_only(seq, qp);
        if (static_cast<long long>(seq.children.size()) != k) fail(qp, "sequence length differs from k");
        for (std::size_t i = 0; i < seq.children.size(); ++i) {
            const XmlNode& s = seq.children[i];
            std::string ep = qp + "/" + s.name + "[" + std::to_string(i + 1) + "]";
            if (s.name != "s") fail(ep, "unknown element");
            check_attrs(s, ep, {"i", "kind"});
            leaf(s, ep);
            if (*s.attr("i") != std::to_string(i + 1)) fail(ep, "index out of sequence");
            auto ek = parse_item_kind(*s.attr("kind"));
            if (!ek) fail(ep, "unknown item kind " + *s.attr("kind"));
            if (s.text.empty()) fail(ep, "empty item name");
            for (char c : s.text) {
                if (std::isspace(static_cast<unsigned char>(c))) fail(ep, "whitespace in item name");
            }
            p.elements.push_back({*ek, s.text});
        }
        if (p.elements.front().kind != *kind) fail(at, "kind differs from the first element");
        return p;
    }
};

} // namespace

MinedRepository parse_repository(std::string_view document) {
    XmlNode root = parse_xml(document);
    return Validator().run(root);
}

MinedRepository load_repository(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaViolation("/", "cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_repository(buf.str());
}

void save_repository(const MinedRepository& repo, const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << serialize_repository(repo);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

MinedRepository merge_update(const MinedRepository& existing, const std::vector<SequentialPattern>& fresh,
                             MergeMode mode) {
    MinedRepository out = existing;
    if (mode == MergeMode::Replace) {
        out.patterns = fresh;
    } else {
        std::map<std::vector<ItemKey>, const SequentialPattern*> updates;
        for (const auto& p : fresh) updates.emplace(p.elements, &p);
        for (auto& p : out.patterns) {
            if (auto it = updates.find(p.elements); it != updates.end()) {
                p = *it->second;
                updates.erase(it);
            }
        }
        for (const auto& p : fresh) {
            if (updates.count(p.elements)) {
                out.patterns.push_back(p);
                updates.erase(p.elements);
            }
        }
    }
    normalize_repository(out);
    return out;
}

std::string format_timestamp(long long unix_seconds) {
    using namespace std::chrono;
    sys_seconds tp{seconds{unix_seconds}};
    auto day = floor<days>(tp);
    year_month_day ymd{day};
    hh_mm_ss hms{tp - day};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long long>(hms.seconds().count()));
    return buf;
}

bool is_valid_timestamp(std::string_view t) {
    // YYYY-MM-DDTHH:MM:SSZ
    if (t.size() != 20) return false;
    for (std::size_t i = 0; i < t.size(); ++i) {
        char c = t[i];
        switch (i) {
        case 4:
        case 7:
            if (c != '-') return false;
            break;
        case 10:
            if (c != 'T') return false;
            break;
        case 13:
        case 16:
            if (c != ':') return false;
            break;
        case 19:
            if (c != 'Z') return false;
            break;
        default:
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        }
    }
    auto num = [&](std::size_t at, std::size_t len) {
        int v = 0;
        for (std::size_t i = 0; i < len; ++i) v = v * 10 + (t[at + i] - '0');
        return v;
    };
    using namespace std::chrono;
    year_month_day ymd{year{num(0, 4)}, month{static_cast<unsigned>(num(5, 2))}, day{static_cast<unsigned>(num(8, 2))}};
    return ymd.ok() && num(11, 2) < 24 && num(14, 2) < 60 && num(17, 2) < 60;
}

} // namespace esdp
