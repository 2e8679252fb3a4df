#include "esdp/errors.h"
#include "esdp/extractor.h"
#include "esdp/groum.h"
#include "oracles.h"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace esdp;

namespace {

Groum graph(const std::vector<std::string>& labels, std::vector<std::pair<int, int>> edges) {
    Groum g;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        g.nodes.push_back({static_cast<int>(i), labels[i],
                           labels[i] == "IF" || labels[i] == "LOOP" ? NodeRole::Control : NodeRole::Action});
    }
    std::sort(edges.begin(), edges.end());
    g.edges = std::move(edges);
    return g;
}

std::vector<std::string> labels(const Groum& g) {
    std::vector<std::string> out;
    for (const auto& n : g.nodes) out.push_back(n.label);
    return out;
}

Groum only_groum(const std::string& body) {
    auto r = extract_items("class G {\n  void m(Alpha a, Beta b) {\n" + body + "\n  }\n}\n", "G.java");
    auto gs = build_groums(r);
    REQUIRE(gs.size() == 1);
    return gs[0];
}

/// Same graph with node ids permuted; edges are kept from < to by
/// renumbering along a random topological order.
Groum shuffled(const Groum& g, std::mt19937_64& rng) {
    std::size_t n = g.size();
    std::vector<int> indeg(n, 0);
    for (const auto& e : g.edges) ++indeg[static_cast<std::size_t>(e.second)];
    std::vector<int> order;
    std::vector<int> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
    }
    while (!ready.empty()) {
        std::size_t pick = rng() % ready.size();
        int v = ready[pick];
        ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(pick));
        order.push_back(v);
        for (const auto& e : g.edges) {
            if (e.first == v && --indeg[static_cast<std::size_t>(e.second)] == 0) ready.push_back(e.second);
        }
    }
    std::vector<int> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    Groum out;
    for (std::size_t i = 0; i < n; ++i) {
        auto node = g.nodes[static_cast<std::size_t>(order[i])];
        node.id = static_cast<int>(i);
        out.nodes.push_back(node);
    }
    for (const auto& e : g.edges) out.edges.emplace_back(pos[static_cast<std::size_t>(e.first)], pos[static_cast<std::size_t>(e.second)]);
    std::sort(out.edges.begin(), out.edges.end());
    return out;
}

void check_against_oracle(const std::vector<Groum>& data, long long sigma) {
    auto got = patt_explorer(data, {sigma, 0});
    auto want = oracle::brute_patterns(data, sigma);
    CHECK(got.size() == want.size());
    for (const auto& w : want) {
        auto hits = std::count_if(got.begin(), got.end(), [&](const GroumPattern& p) {
            return oracle::brute_isomorphic(p.representative, w.representative);
        });
        CHECK(hits == 1);
        auto it = std::find_if(got.begin(), got.end(), [&](const GroumPattern& p) {
            return oracle::brute_isomorphic(p.representative, w.representative);
        });
        if (it != got.end()) {
            CHECK(it->frequency == w.frequency);
            CHECK(it->frequency_exact);
        }
    }
}

} // namespace

TEST_CASE("parser walkthrough becomes a chain") {
    auto r = extract_items(R"(class SearchTest {
  private ASTParser parser;
  private CompilationUnit cu;
  protected CompilationUnit parse(ICompilationUnit lwUnit) {
    parser = ASTParser.newParser(AST.JLS3);
    parser.setKind(ASTParser.K_COMPILATION_UNIT);
    parser.setSource(lwUnit);
    parser.setResolveBindings(true);
    cu = (CompilationUnit) parser.createAST(null);
    return cu;
  }
})",
                           "SearchTest.java");
    auto gs = build_groums(r);
    REQUIRE(gs.size() == 1);
    CHECK(labels(gs[0]) == std::vector<std::string>{"ASTParser.newParser", "ASTParser.setKind", "ASTParser.setSource",
                                                    "ASTParser.setResolveBindings", "ASTParser.createAST"});
    CHECK(gs[0].edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    CHECK(gs[0].origin == "SearchTest.parse(ICompilationUnit)");
}

TEST_CASE("single call gives one node") {
    auto g = only_groum("    a.run();");
    CHECK(g.size() == 1);
    CHECK(g.edges.empty());
}

TEST_CASE("unrelated calls are linked by usage order only") {
    auto g = only_groum("    a.run();\n    b.stop();");
    CHECK(labels(g) == std::vector<std::string>{"Alpha.run", "Beta.stop"});
    CHECK(g.edges == std::vector<std::pair<int, int>>{{0, 1}});
}

TEST_CASE("shared variables add data edges") {
    auto g = only_groum("    a.run();\n    b.stop();\n    a.close();");
    CHECK(g.edges == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});
}

TEST_CASE("control regions become nodes") {
    auto g = only_groum("    if (a.ready()) {\n      b.stop();\n    }\n    for (int i = 0; i < 3; i++) { a.run(); }");
    auto l = labels(g);
    CHECK(std::count(l.begin(), l.end(), "IF") == 1);
    CHECK(std::count(l.begin(), l.end(), "LOOP") == 1);
    for (const auto& e : g.edges) CHECK(e.first < e.second);
}

TEST_CASE("unbalanced markers are rejected") {
    std::vector<ControlMarker> markers = {{ControlMarker::Kind::IfBegin, "m", 1, 1, {}}};
    CHECK_THROWS_AS(build_groum({}, markers, "m"), MalformedControlNesting);
    std::vector<ControlMarker> crossed = {{ControlMarker::Kind::IfBegin, "m", 1, 1, {}},
                                          {ControlMarker::Kind::LoopBegin, "m", 2, 1, {}},
                                          {ControlMarker::Kind::IfEnd, "m", 3, 1, {}},
                                          {ControlMarker::Kind::LoopEnd, "m", 4, 1, {}}};
    CHECK_THROWS_AS(build_groum({}, crossed, "m"), MalformedControlNesting);
}

TEST_CASE("structural vectors") {
    CHECK(exas_vector(graph({"A.m"}, {})) == ExasVector{{{"A.m"}, 1}});
    CHECK(exas_vector(graph({"a", "b"}, {{0, 1}})) == ExasVector{{{"a"}, 1}, {{"b"}, 1}, {{"a", "b"}, 1}});
    auto forward = graph({"A", "B", "A"}, {{0, 1}});
    auto backward = graph({"B", "A", "A"}, {{0, 1}});
    CHECK(exas_vector(forward) != exas_vector(backward));
    CHECK_FALSE(label_isomorphic(forward, backward));
}

TEST_CASE("isomorphism basics") {
    auto g = graph({"a", "b", "c"}, {{0, 1}, {1, 2}});
    CHECK(label_isomorphic(g, g));
    CHECK_FALSE(label_isomorphic(graph({"a", "b"}, {{0, 1}}), graph({"b", "a"}, {{0, 1}})));
    CHECK(label_isomorphic(graph({"a", "b", "b"}, {{0, 2}}), graph({"a", "b", "b"}, {{0, 1}})));
}

TEST_CASE("isomorphism and vectors agree with the permutation oracle") {
    std::mt19937_64 rng(8);
    int isomorphic_pairs = 0;
    for (int round = 0; round < 400; ++round) {
        auto a = oracle::random_dag(rng, 5, 2, 0.4);
        auto b = round % 2 ? shuffled(a, rng) : oracle::random_dag(rng, 5, 2, 0.4);
        bool truth = oracle::brute_isomorphic(a, b);
        isomorphic_pairs += truth ? 1 : 0;
        CHECK(label_isomorphic(a, b) == truth);
        CHECK((canonical_form(a) == canonical_form(b)) == truth);
        if (truth) CHECK(exas_vector(a) == exas_vector(b));
    }
    CHECK(isomorphic_pairs >= 200);
}

TEST_CASE("independent occurrence counting") {
    CHECK(independent_count({{0, 1}, {2, 3}}) == 2);
    CHECK(independent_count({{0, 1}, {1, 2}}) == 1);
    CHECK(independent_count({{0, 1}, {1, 2}, {2, 3}}) == 2);
    CHECK(independent_count({}) == 0);

    std::mt19937_64 rng(17);
    for (int round = 0; round < 100; ++round) {
        std::vector<std::vector<int>> sets(rng() % 12);
        for (auto& s : sets) {
            int a = static_cast<int>(rng() % 10);
            int b = static_cast<int>(rng() % 10);
            s = a == b ? std::vector<int>{a} : std::vector<int>{std::min(a, b), std::max(a, b)};
        }
        bool exact = false;
        CHECK(independent_count(sets, &exact) == oracle::max_disjoint(sets));
        CHECK(exact);
    }

    std::vector<std::vector<int>> many;
    for (int i = 0; i < 25; ++i) many.push_back({i});
    bool exact = true;
    CHECK(independent_count(many, &exact) == 25);
    CHECK_FALSE(exact);
}

TEST_CASE("three identical chains") {
    auto chain = graph({"a", "b"}, {{0, 1}});
    auto got = patt_explorer({chain, chain, chain}, {3, 0});
    REQUIRE(got.size() == 3);
    for (const auto& p : got) CHECK(p.frequency == 3);
    CHECK(labels(got[0].representative) == std::vector<std::string>{"a"});
    CHECK(labels(got[1].representative) == std::vector<std::string>{"b"});
    CHECK(got[2].size() == 2);
    CHECK(got[2].representative.edges.size() == 1);
}

TEST_CASE("threshold above node count finds nothing") {
    auto chain = graph({"a", "b"}, {{0, 1}});
    CHECK(patt_explorer({chain, chain}, {5, 0}).empty());
    CHECK_THROWS_AS(patt_explorer({chain}, {0, 0}), InvalidThreshold);
}

TEST_CASE("one graph at threshold one gives every connected induced subgraph") {
    auto g = graph({"a", "b", "a", "c", "b"}, {{0, 1}, {0, 2}, {1, 3}, {2, 4}, {3, 4}});
    check_against_oracle({g}, 1);
}

TEST_CASE("exploration agrees with exhaustive enumeration on random data") {
    std::mt19937_64 rng(4242);
    for (int round = 0; round < 15; ++round) {
        std::vector<Groum> data;
        int n = std::uniform_int_distribution<int>(1, 4)(rng);
        for (int i = 0; i < n; ++i) data.push_back(oracle::random_dag(rng, 5, 3, 0.45));
        check_against_oracle(data, std::uniform_int_distribution<long long>(1, 3)(rng));
    }
}

TEST_CASE("pattern invariants") {
    std::mt19937_64 rng(77);
    std::vector<Groum> data;
    for (int i = 0; i < 4; ++i) data.push_back(oracle::random_dag(rng, 6, 2, 0.5));
    auto ps = patt_explorer(data, {2, 0});
    REQUIRE(!ps.empty());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto& p = ps[i];
        CHECK(p.frequency >= 2);
        long long total = 0;
        std::map<std::size_t, std::vector<std::vector<int>>> per_graph;
        for (const auto& occ : p.occurrences) {
            auto sub = oracle::induced(data[occ.graph], occ.nodes);
            CHECK(oracle::brute_isomorphic(sub, p.representative));
            per_graph[occ.graph].push_back(occ.nodes);
        }
        for (const auto& [g, sets] : per_graph) total += oracle::max_disjoint(sets);
        CHECK(total == p.frequency);
        if (i > 0) {
            CHECK(std::pair(ps[i - 1].size(), canonical_form(ps[i - 1].representative)) <
                  std::pair(p.size(), canonical_form(p.representative)));
        }
        if (p.size() > 1) {
            bool has_parent = false;
            for (int drop = 0; drop < static_cast<int>(p.size()) && !has_parent; ++drop) {
                std::vector<int> keep;
                for (int v = 0; v < static_cast<int>(p.size()); ++v) {
                    if (v != drop) keep.push_back(v);
                }
                if (!oracle::weakly_connected(p.representative, keep)) continue;
                auto smaller = induced_subgraph(p.representative, keep);
                has_parent = std::any_of(ps.begin(), ps.end(), [&](const GroumPattern& q) {
                    return q.size() == smaller.size() && label_isomorphic(q.representative, smaller);
                });
            }
            CHECK(has_parent);
        }
    }
}

TEST_CASE("size bound stops growth") {
    auto g = graph({"a", "b", "c", "d"}, {{0, 1}, {1, 2}, {2, 3}});
    auto ps = patt_explorer({g, g}, {2, 2});
    for (const auto& p : ps) CHECK(p.size() <= 2);
    CHECK(ps.size() == 7);
}

TEST_CASE("text rendering") {
    CHECK(format_groum(graph({"A.m", "IF"}, {{0, 1}})) == "node 0 A.m\nnode 1 IF\nedge 0 1\n");
}
