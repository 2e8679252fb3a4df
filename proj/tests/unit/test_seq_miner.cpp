#include "esdp/errors.h"
#include "esdp/extractor.h"
#include "esdp/seq_miner.h"
#include "oracles.h"

#include <doctest.h>

#include <map>
#include <random>

using namespace esdp;

namespace {

std::vector<ItemKey> seq(const std::string& letters) {
    std::vector<ItemKey> out;
    for (char c : letters) out.push_back(oracle::letter(c - 'a'));
    return out;
}

SequenceDatabase db_of(const std::vector<std::string>& records) {
    SequenceDatabase db;
    for (std::size_t i = 0; i < records.size(); ++i) db.records.push_back({"r" + std::to_string(i), seq(records[i])});
    return db;
}

std::map<std::vector<ItemKey>, long long> as_map(const std::vector<SequentialPattern>& ps) {
    std::map<std::vector<ItemKey>, long long> out;
    for (const auto& p : ps) out[p.elements] = p.support_count;
    return out;
}

std::vector<ItemKey> planted() {
    return {
        {ItemKind::MI, "dom.ASTParser.newParser(int)"},
        {ItemKind::MI, "aSTParser.setKind(int)"},
        {ItemKind::MI, "aSTParser.setSource(ICompilationUnit)"},
        {ItemKind::MI, "aSTParser.setResolveBindings(boolean)"},
        {ItemKind::MI, "aSTParser.createAST(null)"},
    };
}

SequenceDatabase fixture_db() {
    auto files = discover_sources({oracle::fixture_dir("astparser")});
    return build_sequence_db(extract_corpus(files).items, "astparser");
}

} // namespace

TEST_CASE("support counts containing records once each") {
    auto db = fixture_db();
    CHECK(db.size() == 12);
    CHECK(support(planted(), db) == 7);
    CHECK(format_fixed2(7, 12) == "0.58");
    for (const auto& rec : db.records) CHECK(support(rec.items, db) >= 1);
    CHECK(support({{ItemKind::MI, "nowhere.toBeFound()"}}, db) == 0);

    auto abc = db_of({"aab", "ab", "ba"});
    CHECK(support(seq("ab"), abc) == 2);
    CHECK(support(seq("a"), abc) == 3);
}

TEST_CASE("three record example") {
    auto db = db_of({"abc", "ac", "bc"});
    auto got = as_map(mine_prefixspan(db, 2));
    std::map<std::vector<ItemKey>, long long> want = {
        {seq("a"), 2}, {seq("b"), 2}, {seq("c"), 3}, {seq("ac"), 2}, {seq("bc"), 2}};
    CHECK(got == want);
    CHECK(got == oracle::frequent_subsequences(db, 2));
}

TEST_CASE("single record at threshold one") {
    auto got = as_map(mine_prefixspan(db_of({"ab"}), 1));
    CHECK(got == std::map<std::vector<ItemKey>, long long>{{seq("a"), 1}, {seq("b"), 1}, {seq("ab"), 1}});
}

TEST_CASE("threshold above database size gives nothing") {
    CHECK(mine_prefixspan(db_of({"ab", "ab"}), 3).empty());
    CHECK(mine_prefixspan(SequenceDatabase{}, 1).empty());
}

TEST_CASE("threshold below one is rejected") {
    CHECK_THROWS_AS(mine_prefixspan(db_of({"a"}), 0), InvalidThreshold);
    CHECK_THROWS_AS(mine_prefixspan(db_of({"a"}), -3), InvalidThreshold);
}

TEST_CASE("pattern limit guards explosive databases") {
    MiningOptions opt;
    opt.min_support = 1;
    opt.pattern_limit = 10;
    CHECK_THROWS_AS(mine_prefixspan(db_of({"abcdefgh"}), opt), MiningLimitExceeded);
}

TEST_CASE("length bound trims long patterns") {
    MiningOptions opt;
    opt.min_support = 1;
    opt.max_length = 2;
    auto got = mine_prefixspan(db_of({"abc"}), opt);
    CHECK(got.size() == 6);
    for (const auto& p : got) CHECK(p.k() <= 2);
}

TEST_CASE("mining agrees with exhaustive enumeration") {
    std::mt19937_64 rng(20240131);
    for (int round = 0; round < 60; ++round) {
        auto db = oracle::random_db(rng, 8, 6, 5);
        long long m = std::uniform_int_distribution<long long>(1, 3)(rng);
        CHECK(as_map(mine_prefixspan(db, m)) == oracle::frequent_subsequences(db, m));
    }
}

TEST_CASE("mined output is closed under prefixes and anti-monotone") {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 30; ++round) {
        auto db = oracle::random_db(rng, 8, 6, 4);
        auto ps = mine_prefixspan(db, 2);
        auto by = as_map(ps);
        for (const auto& p : ps) {
            CHECK(p.ranking() == Ratio{static_cast<long long>(p.k()) * p.support_count, p.db_size});
            CHECK(Ratio{p.ranking().num, p.ranking().den * static_cast<long long>(p.k())} == p.support_ratio());
            if (p.k() > 1) {
                std::vector<ItemKey> prefix(p.elements.begin(), p.elements.end() - 1);
                REQUIRE(by.count(prefix) == 1);
                CHECK(p.prefix_support == by[prefix]);
            }
            for (const auto& q : ps) {
                if (oracle::is_subsequence(q.elements, p.elements)) CHECK(p.support_count >= q.support_count);
            }
        }
    }
}

TEST_CASE("scores of the reconstructed pattern") {
    auto db = fixture_db();
    auto ps = mine_prefixspan(db, 2);
    REQUIRE(!ps.empty());
    const auto& top = ps.front();
    CHECK(top.elements == planted());
    CHECK(top.support_count == 7);
    auto s = score(top, db);
    CHECK(s.support_ratio == Ratio{7, 12});
    CHECK(s.ranking == Ratio{35, 12});
    CHECK(s.confidence == Ratio{1, 1});
    CHECK(format_fixed2(s.ranking.num, s.ranking.den) == "2.92");
    CHECK(s.ranking.value() == doctest::Approx(2.9166666667).epsilon(1e-9));
}

TEST_CASE("confidence follows the prefix") {
    auto db = db_of({"abc", "ac", "bc"});
    SequentialPattern ac{seq("ac"), 2, 3, 2};
    CHECK(score(ac, db).confidence == Ratio{1, 1});
    SequentialPattern c{seq("c"), 3, 3, 3};
    CHECK(score(c, db).support_ratio == Ratio{1, 1});
    CHECK(score(c, db).confidence == Ratio{1, 1});
    SequentialPattern bc{seq("bc"), 2, 3, 2};
    CHECK(score(bc, db_of({"abc", "bc", "b"})).confidence == Ratio{2, 3});
}

TEST_CASE("ordering is ranking then support then names") {
    SequentialPattern a{seq("ab"), 3, 10, 3};  // 0.6
    SequentialPattern b{seq("c"), 6, 10, 6};   // 0.6, more support
    SequentialPattern c{seq("abc"), 3, 10, 3}; // 0.9
    SequentialPattern d{seq("ac"), 3, 10, 3};  // 0.6
    std::vector<SequentialPattern> ps{a, b, c, d};
    sort_patterns(ps);
    CHECK(ps[0].elements == seq("abc"));
    CHECK(ps[1].elements == seq("c"));
    CHECK(ps[2].elements == seq("ab"));
    CHECK(ps[3].elements == seq("ac"));
}

TEST_CASE("adaptive mining picks the smallest fitting threshold") {
    SUBCASE("already under the cap") {
        // 31 + 7 + 1 + 1 distinct subsequences.
        auto db = db_of({"abcde", "xyz", "w", "v"});
        CHECK(oracle::frequent_subsequences(db, 1).size() == 40);
        CHECK(adaptive_mine(db, 50).size() == 40);
    }
    SUBCASE("threshold two fits") {
        auto db = db_of({"abcde", "abcde", "xyz", "xyz", "w", "w", "v", "v", "ghijkl", "mnop", "s", "t"});
        CHECK(oracle::frequent_subsequences(db, 1).size() == 120);
        auto at2 = oracle::frequent_subsequences(db, 2);
        CHECK(at2.size() == 40);
        CHECK(as_map(adaptive_mine(db, 50)) == at2);
    }
    SUBCASE("single pattern cap") {
        auto got = adaptive_mine(db_of({"a", "a"}), 1);
        REQUIRE(got.size() == 1);
        CHECK(got[0].elements == seq("a"));
        CHECK(got[0].support_count == 2);
    }
    SUBCASE("falls back to the best patterns at full support") {
        auto db = db_of({"abc", "abc"});
        auto got = adaptive_mine(db, 2);
        REQUIRE(got.size() == 2);
        CHECK(got[0].elements == seq("abc"));
        CHECK(got[1].k() == 2);
    }
    SUBCASE("matches the oracle threshold on random data") {
        std::mt19937_64 rng(5);
        for (int round = 0; round < 20; ++round) {
            auto db = oracle::random_db(rng, 6, 5, 4);
            long long m = 1;
            while (m < static_cast<long long>(db.size()) && oracle::frequent_subsequences(db, m).size() > 15) ++m;
            auto want = oracle::frequent_subsequences(db, m);
            auto got = adaptive_mine(db, 15);
            if (want.size() <= 15) CHECK(as_map(got) == want);
            else CHECK(got.size() == 15);
        }
    }
}
