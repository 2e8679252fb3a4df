#include "esdp/extractor.h"
#include "esdp/transactions.h"
#include "esdp/xml.h"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

using namespace esdp;

namespace {

const char* kTwoMethods = R"(package pkg;
import org.eclipse.jdt.core.ICompilationUnit;
import org.eclipse.jdt.core.dom.ASTParser;
class Cls {
  private ASTParser parser;
  void m1(ICompilationUnit unit) {
    ICompilationUnit copy = unit;
    ASTParser p = ASTParser.newParser(3);
    p.setKind(1);
    p.setSource(copy);
    p.setKind(2);
  }
  void m2() {
    parser.setResolveBindings(true);
  }
}
)";

std::vector<std::string> keys(const std::vector<ItemKey>& items) {
    std::vector<std::string> out;
    for (const auto& k : items) out.push_back(format_key(k));
    return out;
}

} // namespace

TEST_CASE("empty input gives empty databases") {
    CHECK(build_transactions({}, Granularity::Method).empty());
    CHECK(build_transactions({}, Granularity::Class).empty());
    CHECK(build_sequence_db({}).size() == 0);
}

TEST_CASE("method transactions are keyed by block path") {
    auto r = extract_items(kTwoMethods, "Cls.java");
    auto tx = build_transactions(r.items, Granularity::Method);
    REQUIRE(tx.size() == 2);
    CHECK(tx[0].block_id == "pkg.Cls.m1(core.ICompilationUnit)");
    CHECK(tx[1].block_id == "pkg.Cls.m2()");
    CHECK(keys(tx[0].items) == std::vector<std::string>{
                                   "MD#m1(core.ICompilationUnit)",
                                   "MI#aSTParser.setKind(int)",
                                   "MI#aSTParser.setSource(core.ICompilationUnit)",
                                   "MI#dom.ASTParser.newParser(int)",
                                   "VD#core.ICompilationUnit",
                                   "VD#dom.ASTParser",
                               });
    CHECK(keys(tx[1].items) == std::vector<std::string>{"MD#m2()", "MI#aSTParser.setResolveBindings(boolean)"});
}

TEST_CASE("class transactions gather fields and exclude package and imports") {
    auto r = extract_items(kTwoMethods, "Cls.java");
    auto tx = build_transactions(r.items, Granularity::Class);
    REQUIRE(tx.size() == 1);
    CHECK(tx[0].block_id == "pkg.Cls");
    auto k = keys(tx[0].items);
    CHECK(std::find(k.begin(), k.end(), "FD#dom.ASTParser") != k.end());
    CHECK(std::find(k.begin(), k.end(), "TD#Cls") != k.end());
    CHECK(std::none_of(k.begin(), k.end(), [](const std::string& s) { return s.rfind("PD#", 0) == 0 || s.rfind("ID#", 0) == 0; }));
    CHECK(std::is_sorted(tx[0].items.begin(), tx[0].items.end()));
    CHECK(std::adjacent_find(tx[0].items.begin(), tx[0].items.end()) == tx[0].items.end());
}

TEST_CASE("sequences keep source order and duplicates") {
    auto r = extract_items(kTwoMethods, "Cls.java");
    auto db = build_sequence_db(r.items, "fixture");
    CHECK(db.corpus_label == "fixture");
    REQUIRE(db.size() == 2);
    CHECK(db.records[0].sid == "pkg.Cls.m1(core.ICompilationUnit)");
    CHECK(keys(db.records[0].items) == std::vector<std::string>{
                                           "MD#m1(core.ICompilationUnit)",
                                           "VD#core.ICompilationUnit",
                                           "VD#dom.ASTParser",
                                           "MI#dom.ASTParser.newParser(int)",
                                           "MI#aSTParser.setKind(int)",
                                           "MI#aSTParser.setSource(core.ICompilationUnit)",
                                           "MI#aSTParser.setKind(int)",
                                       });
}

TEST_CASE("single statement method gives a short sequence") {
    auto r = extract_items("class C { void m() { a.b(); } }", "C.java");
    auto db = build_sequence_db(r.items);
    REQUIRE(db.size() == 1);
    CHECK(keys(db.records[0].items) == std::vector<std::string>{"MD#m()", "MI#unknown.b()"});
}

TEST_CASE("sequence order follows lines after shuffling statements") {
    std::vector<std::string> stmts = {"a.alpha();", "b.beta(1);", "c.gamma(true);", "d.delta(\"s\");", "e.eps(null);"};
    std::vector<std::string> expected_names = {"unknown.alpha()", "unknown.beta(int)", "unknown.gamma(boolean)",
                                               "unknown.delta(String)", "unknown.eps(null)"};
    std::vector<int> order(stmts.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(11);
    for (int round = 0; round < 10; ++round) {
        std::shuffle(order.begin(), order.end(), rng);
        std::string src = "class S {\n  void m() {\n";
        for (int i : order) src += "    " + stmts[static_cast<std::size_t>(i)] + "\n";
        src += "  }\n}\n";
        auto db = build_sequence_db(extract_items(src, "S.java").items);
        REQUIRE(db.size() == 1);
        std::vector<std::string> got;
        for (std::size_t i = 1; i < db.records[0].items.size(); ++i) got.push_back(db.records[0].items[i].name);
        std::vector<std::string> want;
        for (int i : order) want.push_back(expected_names[static_cast<std::size_t>(i)]);
        CHECK(got == want);
    }
}

TEST_CASE("transactions are the order-forgetting projection of sequences") {
    auto r = extract_items(kTwoMethods, "Cls.java");
    auto tx = build_transactions(r.items, Granularity::Method);
    auto db = build_sequence_db(r.items);
    REQUIRE(tx.size() == db.size());
    std::size_t total = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) {
        CHECK(tx[i].block_id == db.records[i].sid);
        std::set<ItemKey> seq(db.records[i].items.begin(), db.records[i].items.end());
        CHECK(std::vector<ItemKey>(seq.begin(), seq.end()) == tx[i].items);
        total += db.records[i].items.size();
    }
    auto method_scoped = std::count_if(r.items.begin(), r.items.end(),
                                       [](const SourceItem& it) { return !it.method_block.empty(); });
    CHECK(total == static_cast<std::size_t>(method_scoped));
}

TEST_CASE("building is deterministic") {
    auto a = build_sequence_db(extract_items(kTwoMethods, "Cls.java").items);
    auto b = build_sequence_db(extract_items(kTwoMethods, "Cls.java").items);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.records[i].sid == b.records[i].sid);
        CHECK(a.records[i].items == b.records[i].items);
    }
}

TEST_CASE("transaction document parses back") {
    auto r = extract_items(kTwoMethods, "Cls.java");
    auto tx = build_transactions(r.items, Granularity::Method);
    auto doc = parse_xml(transactions_to_xml(tx, "fixture"));
    CHECK(doc.name == "esdp-transactions");
    REQUIRE(doc.attr("corpus") != nullptr);
    CHECK(*doc.attr("corpus") == "fixture");
    REQUIRE(doc.children.size() == 1);
    const auto& list = doc.children[0];
    REQUIRE(list.children.size() == 2);
    CHECK(*list.children[1].attr("block") == "pkg.Cls.m2()");
    CHECK(list.children[1].children.size() == 2);
}
