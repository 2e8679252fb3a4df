#include "esdp/groum.h"

#include "esdp/errors.h"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>

namespace esdp {

bool Groum::has_edge(int from, int to) const {
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(from, to));
}

namespace {

bool is_action(ItemKind k) {
    return k == ItemKind::CI || k == ItemKind::MI || k == ItemKind::FA || k == ItemKind::CTI || k == ItemKind::SCI;
}

std::string action_label(const SourceItem& it) {
    std::string owner = it.owner_type.empty() ? "unknown" : it.owner_type;
    std::string member = it.member;
    if (it.kind == ItemKind::CI || it.kind == ItemKind::CTI || it.kind == ItemKind::SCI) member = "<init>";
    if (member.empty()) member = it.name;
    return owner + "." + member;
}

} // namespace

Groum build_groum(const std::vector<SourceItem>& items, const std::vector<ControlMarker>& markers, std::string origin) {
    struct Event {
        int line, column;
        const SourceItem* item;
        const ControlMarker* marker;
    };
    std::vector<Event> events;
    for (const auto& it : items) {
        if (is_action(it.kind)) events.push_back({it.line, it.column, &it, nullptr});
    }
    for (const auto& m : markers) events.push_back({m.line, m.column, nullptr, &m});
    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        return a.line != b.line ? a.line < b.line : a.column < b.column;
    });

    Groum g;
    g.origin = std::move(origin);
    std::vector<std::vector<std::string>> vars;
    std::vector<ControlMarker::Kind> open;
    for (const auto& e : events) {
        if (e.marker) {
            auto kind = e.marker->kind;
            if (kind == ControlMarker::Kind::IfEnd || kind == ControlMarker::Kind::LoopEnd) {
                auto expected =
                    kind == ControlMarker::Kind::IfEnd ? ControlMarker::Kind::IfBegin : ControlMarker::Kind::LoopBegin;
                if (open.empty() || open.back() != expected) {
                    throw MalformedControlNesting(std::string(to_string(kind)) + " at line " +
                                                  std::to_string(e.marker->line) + " closes no matching region");
                }
                open.pop_back();
                continue;
            }
            open.push_back(kind);
            GroumNode n;
            n.id = static_cast<int>(g.nodes.size());
            n.label = kind == ControlMarker::Kind::IfBegin ? "IF" : "LOOP";
            n.role = NodeRole::Control;
            g.nodes.push_back(std::move(n));
            vars.push_back(e.marker->vars);
        } else {
            GroumNode n;
            n.id = static_cast<int>(g.nodes.size());
            n.label = action_label(*e.item);
            g.nodes.push_back(std::move(n));
            vars.push_back(e.item->vars);
        }
    }
    if (!open.empty()) {
        throw MalformedControlNesting(std::string(to_string(open.back())) + " region is never closed");
    }

    std::set<std::pair<int, int>> edges;
    for (int j = 1; j < static_cast<int>(g.nodes.size()); ++j) {
        edges.emplace(j - 1, j);
        for (const auto& v : vars[static_cast<std::size_t>(j)]) {
            for (int i = j - 1; i >= 0; --i) {
                const auto& vi = vars[static_cast<std::size_t>(i)];
                if (std::find(vi.begin(), vi.end(), v) != vi.end()) {
                    edges.emplace(i, j);
                    break;
                }
            }
        }
    }
    g.edges.assign(edges.begin(), edges.end());
    return g;
}

std::vector<Groum> build_groums(const ExtractResult& extracted) {
    std::map<std::pair<std::string, std::string>, std::vector<SourceItem>> items;
    std::map<std::pair<std::string, std::string>, std::vector<ControlMarker>> markers;
    for (const auto& it : extracted.items) {
        if (!it.method_block.empty() && is_action(it.kind)) items[{it.method_block, it.file}].push_back(it);
    }
    // markers carry the enclosing block path of the method they belong to
    for (const auto& m : extracted.markers) markers[{m.enclosing, {}}].push_back(m);
    std::set<std::string> blocks;
    for (const auto& [key, v] : items) blocks.insert(key.first);
    for (const auto& [key, v] : markers) blocks.insert(key.first);

    std::vector<Groum> out;
    for (const auto& block : blocks) {
        std::map<std::string, std::vector<SourceItem>> per_file;
        for (auto it = items.lower_bound({block, {}}); it != items.end() && it->first.first == block; ++it) {
            per_file[it->first.second] = it->second;
        }
        std::vector<ControlMarker> ms;
        if (auto it = markers.find({block, {}}); it != markers.end()) ms = it->second;
        if (per_file.empty()) per_file[{}] = {};
        bool first = true;
        for (const auto& [file, its] : per_file) {
            Groum g = build_groum(its, first ? ms : std::vector<ControlMarker>{}, block);
            first = false;
            if (!g.nodes.empty()) out.push_back(std::move(g));
        }
    }
    return out;
}

ExasVector exas_vector(const Groum& g) {
    ExasVector v;
    for (const auto& n : g.nodes) ++v[{n.label}];
    for (const auto& [a, b] : g.edges) {
        ++v[{g.nodes[static_cast<std::size_t>(a)].label, g.nodes[static_cast<std::size_t>(b)].label}];
    }
    return v;
}

namespace {

struct Adjacency {
    std::vector<std::vector<char>> m;
    std::vector<int> in, out;

    explicit Adjacency(const Groum& g)
        : m(g.size(), std::vector<char>(g.size(), 0)), in(g.size(), 0), out(g.size(), 0) {
        for (const auto& [a, b] : g.edges) {
            m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = 1;
            ++out[static_cast<std::size_t>(a)];
            ++in[static_cast<std::size_t>(b)];
        }
    }
};

} // namespace

bool label_isomorphic(const Groum& a, const Groum& b) {
    if (a.size() != b.size() || a.edges.size() != b.edges.size()) return false;
    std::size_t n = a.size();
    Adjacency aa(a), ab(b);
    std::vector<int> map(n, -1);
    std::vector<char> used(n, 0);
    std::function<bool(std::size_t)> extend = [&](std::size_t i) {
        if (i == n) return true;
        for (std::size_t j = 0; j < n; ++j) {
            if (used[j] || a.nodes[i].label != b.nodes[j].label || aa.in[i] != ab.in[j] || aa.out[i] != ab.out[j]) {
                continue;
            }
            bool ok = true;
            for (std::size_t k = 0; k < i && ok; ++k) {
                auto mk = static_cast<std::size_t>(map[k]);
                ok = aa.m[i][k] == ab.m[j][mk] && aa.m[k][i] == ab.m[mk][j];
            }
            if (!ok) continue;
            map[i] = static_cast<int>(j);
            used[j] = 1;
            if (extend(i + 1)) return true;
            used[j] = 0;
        }
        map[i] = -1;
        return false;
    };
    return extend(0);
}

std::string canonical_form(const Groum& g) {
    std::size_t n = g.size();
    Adjacency adj(g);
    // colour refinement: label, then neighbourhood colour multisets
    std::vector<std::string> colour(n);
    for (std::size_t i = 0; i < n; ++i) colour[i] = g.nodes[i].label;
    auto rank = [&](const std::vector<std::string>& c) {
        std::vector<std::string> sorted = c;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        std::vector<int> r(n);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), c[i]) - sorted.begin());
        }
        return r;
    };
    std::vector<int> cls = rank(colour);
    for (std::size_t round = 0; round < n; ++round) {
        std::vector<std::string> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<int> ins, outs;
            for (std::size_t j = 0; j < n; ++j) {
                if (adj.m[j][i]) ins.push_back(cls[j]);
                if (adj.m[i][j]) outs.push_back(cls[j]);
            }
            std::sort(ins.begin(), ins.end());
            std::sort(outs.begin(), outs.end());
            std::string s = colour[i] + "|";
            for (int c : ins) s += std::to_string(c) + ",";
            s += "|";
            for (int c : outs) s += std::to_string(c) + ",";
            next[i] = std::move(s);
        }
        std::vector<int> refined = rank(next);
        std::size_t before = std::set<int>(cls.begin(), cls.end()).size();
        std::size_t after = std::set<int>(refined.begin(), refined.end()).size();
        colour = std::move(next);
        cls = std::move(refined);
        if (after == before) break;
    }

    // nodes ordered by class; try every order within classes, keep the least encoding
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        return cls[static_cast<std::size_t>(x)] < cls[static_cast<std::size_t>(y)];
    });
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && cls[static_cast<std::size_t>(order[j])] == cls[static_cast<std::size_t>(order[i])]) ++j;
        groups.emplace_back(i, j);
        i = j;
    }
    std::string header;
    for (int v : order) header += g.nodes[static_cast<std::size_t>(v)].label + "\n";

    std::string best;
    bool have = false;
    auto encode = [&]() {
        std::string bits(n * n, '0');
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (adj.m[static_cast<std::size_t>(order[i])][static_cast<std::size_t>(order[j])]) bits[i * n + j] = '1';
            }
        }
        if (!have || bits < best) {
            best = std::move(bits);
            have = true;
        }
    };
    std::function<void(std::size_t)> permute = [&](std::size_t gi) {
        if (gi == groups.size()) {
            encode();
            return;
        }
        auto [b, e] = groups[gi];
        std::sort(order.begin() + static_cast<std::ptrdiff_t>(b), order.begin() + static_cast<std::ptrdiff_t>(e));
        do {
            permute(gi + 1);
        } while (std::next_permutation(order.begin() + static_cast<std::ptrdiff_t>(b),
                                       order.begin() + static_cast<std::ptrdiff_t>(e)));
    };
    permute(0);
    return header + best;
}

Groum induced_subgraph(const Groum& g, const std::vector<int>& nodes) {
    std::vector<int> sorted = nodes;
    std::sort(sorted.begin(), sorted.end());
    Groum sub;
    sub.origin = g.origin;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        GroumNode n = g.nodes[static_cast<std::size_t>(sorted[i])];
        n.id = static_cast<int>(i);
        sub.nodes.push_back(std::move(n));
    }
    for (const auto& [a, b] : g.edges) {
        auto ia = std::lower_bound(sorted.begin(), sorted.end(), a);
        auto ib = std::lower_bound(sorted.begin(), sorted.end(), b);
        if (ia != sorted.end() && *ia == a && ib != sorted.end() && *ib == b) {
            sub.edges.emplace_back(static_cast<int>(ia - sorted.begin()), static_cast<int>(ib - sorted.begin()));
        }
    }
    std::sort(sub.edges.begin(), sub.edges.end());
    return sub;
}

long long independent_count(const std::vector<std::vector<int>>& occurrences, bool* exact) {
    std::size_t n = occurrences.size();
    if (exact) *exact = true;
    if (n == 0) return 0;
    auto overlaps = [&](std::size_t i, std::size_t j) {
        const auto& a = occurrences[i];
        const auto& b = occurrences[j];
        for (int x : a) {
            if (std::find(b.begin(), b.end(), x) != b.end()) return true;
        }
        return false;
    };
    if (n > 20) {
        if (exact) *exact = false;
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
            auto a = occurrences[x], b = occurrences[y];
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            return a != b ? a < b : x < y;
        });
        std::vector<std::size_t> chosen;
        for (std::size_t i : idx) {
            bool ok = std::none_of(chosen.begin(), chosen.end(), [&](std::size_t c) { return overlaps(i, c); });
            if (ok) chosen.push_back(i);
        }
        return static_cast<long long>(chosen.size());
    }
    std::vector<std::uint32_t> conflict(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (overlaps(i, j)) {
                conflict[i] |= 1u << j;
                conflict[j] |= 1u << i;
            }
        }
    }
    int best = 0;
    std::function<void(std::uint32_t, int)> search = [&](std::uint32_t candidates, int size) {
        if (candidates == 0) {
            best = std::max(best, size);
            return;
        }
        if (size + std::popcount(candidates) <= best) return;
        int v = std::countr_zero(candidates);
        std::uint32_t bit = 1u << v;
        search(candidates & ~bit & ~conflict[static_cast<std::size_t>(v)], size + 1);
        search(candidates & ~bit, size);
    };
    search(n == 32 ? ~0u : (1u << n) - 1u, 0);
    return best;
}

namespace {

class Explorer {
public:
    Explorer(const std::vector<Groum>& data, const ExplorerOptions& options) : data_(data), options_(options) {
        for (const auto& g : data_) {
            std::vector<std::vector<int>> nb(g.size());
            for (const auto& [a, b] : g.edges) {
                nb[static_cast<std::size_t>(a)].push_back(b);
                nb[static_cast<std::size_t>(b)].push_back(a);
            }
            neighbours_.push_back(std::move(nb));
        }
    }

    std::vector<GroumPattern> run() {
        // size-one patterns, one per label
        std::map<std::string, std::vector<Occurrence>> by_label;
        for (std::size_t gi = 0; gi < data_.size(); ++gi) {
            for (const auto& n : data_[gi].nodes) by_label[n.label].push_back({gi, {n.id}});
        }
        std::vector<std::size_t> seeds;
        for (auto& [label, occs] : by_label) {
            GroumPattern p = make_pattern(std::move(occs));
            if (p.frequency >= options_.sigma && remember(p)) {
                seeds.push_back(found_.size() - 1);
                frequent_labels_.insert(label);
            }
        }
        for (std::size_t s : seeds) explore(s);

        std::vector<std::pair<std::string, std::size_t>> order;
        for (std::size_t i = 0; i < found_.size(); ++i) order.emplace_back(keys_[i], i);
        std::sort(order.begin(), order.end(), [&](const auto& x, const auto& y) {
            std::size_t sx = found_[x.second].size(), sy = found_[y.second].size();
            return sx != sy ? sx < sy : x.first < y.first;
        });
        std::vector<GroumPattern> out;
        for (const auto& [key, i] : order) out.push_back(std::move(found_[i]));
        return out;
    }

private:
    GroumPattern make_pattern(std::vector<Occurrence> occs) {
        GroumPattern p;
        std::sort(occs.begin(), occs.end(), [](const Occurrence& a, const Occurrence& b) {
            return a.graph != b.graph ? a.graph < b.graph : a.nodes < b.nodes;
        });
        occs.erase(std::unique(occs.begin(), occs.end(),
                               [](const Occurrence& a, const Occurrence& b) {
                                   return a.graph == b.graph && a.nodes == b.nodes;
                               }),
                   occs.end());
        p.representative = induced_subgraph(data_[occs.front().graph], occs.front().nodes);
        for (std::size_t i = 0; i < occs.size();) {
            std::size_t j = i;
            std::vector<std::vector<int>> sets;
            while (j < occs.size() && occs[j].graph == occs[i].graph) sets.push_back(occs[j++].nodes);
            bool exact = true;
            p.frequency += independent_count(sets, &exact);
            p.frequency_exact = p.frequency_exact && exact;
            i = j;
        }
        p.occurrences = std::move(occs);
        return p;
    }

    bool remember(GroumPattern& p) {
        std::string key = canonical_form(p.representative);
        if (!seen_.insert(key).second) return false;
        found_.push_back(std::move(p));
        keys_.push_back(std::move(key));
        return true;
    }

    void explore(std::size_t index) {
        if (options_.max_size != 0 && found_[index].size() >= options_.max_size) return;
        // P (+) U: every occurrence grown by one adjacent node with a frequent label
        struct Class {
            Groum representative;
            ExasVector vector;
            std::vector<Occurrence> occurrences;
        };
        std::vector<Class> classes;
        std::map<ExasVector, std::vector<std::size_t>> buckets;
        std::set<std::pair<std::size_t, std::vector<int>>> seen_sets;

        const auto occurrences = found_[index].occurrences;
        for (const auto& occ : occurrences) {
            const Groum& host = data_[occ.graph];
            std::set<int> ext;
            for (int v : occ.nodes) {
                for (int w : neighbours_[occ.graph][static_cast<std::size_t>(v)]) {
                    if (!std::binary_search(occ.nodes.begin(), occ.nodes.end(), w) &&
                        frequent_labels_.count(host.nodes[static_cast<std::size_t>(w)].label)) {
                        ext.insert(w);
                    }
                }
            }
            for (int w : ext) {
                std::vector<int> nodes = occ.nodes;
                nodes.insert(std::upper_bound(nodes.begin(), nodes.end(), w), w);
                if (!seen_sets.insert({occ.graph, nodes}).second) continue;
                Groum sub = induced_subgraph(host, nodes);
                ExasVector vec = exas_vector(sub);
                auto& bucket = buckets[vec];
                bool placed = false;
                for (std::size_t ci : bucket) {
                    if (label_isomorphic(classes[ci].representative, sub)) {
                        classes[ci].occurrences.push_back({occ.graph, nodes});
                        placed = true;
                        break;
                    }
                }
                if (!placed) {
                    bucket.push_back(classes.size());
                    classes.push_back({sub, vec, {{occ.graph, nodes}}});
                }
            }
        }
        for (auto& c : classes) {
            GroumPattern q = make_pattern(std::move(c.occurrences));
            if (q.frequency < options_.sigma) continue;
            if (remember(q)) explore(found_.size() - 1);
        }
    }

    const std::vector<Groum>& data_;
    ExplorerOptions options_;
    std::vector<std::vector<std::vector<int>>> neighbours_;
    std::set<std::string> frequent_labels_;
    std::set<std::string> seen_;
    std::vector<GroumPattern> found_;
    std::vector<std::string> keys_;
};

} // namespace

std::vector<GroumPattern> patt_explorer(const std::vector<Groum>& dataset, const ExplorerOptions& options) {
    if (options.sigma < 1) throw InvalidThreshold("sigma must be at least 1, got " + std::to_string(options.sigma));
    return Explorer(dataset, options).run();
}

std::string format_groum(const Groum& g) {
    std::string out;
    for (const auto& n : g.nodes) out += "node " + std::to_string(n.id) + " " + n.label + "\n";
    for (const auto& [a, b] : g.edges) out += "edge " + std::to_string(a) + " " + std::to_string(b) + "\n";
    return out;
}

} // namespace esdp
