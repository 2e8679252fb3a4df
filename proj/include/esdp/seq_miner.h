#pragma once

#include "esdp/item.h"
#include "esdp/transactions.h"

#include <cstddef>
#include <vector>

namespace esdp {

struct SequentialPattern {
    std::vector<ItemKey> elements;
    long long support_count = 0;
    long long db_size = 0;
    long long prefix_support = 0; // support of the (k-1)-prefix; equals support_count for k = 1

    std::size_t k() const { return elements.size(); }
    Ratio support_ratio() const { return {support_count, db_size}; }
    Ratio confidence() const { return {support_count, prefix_support}; }
    Ratio ranking() const { return {static_cast<long long>(k()) * support_count, db_size}; }
};

struct MiningOptions {
    long long min_support = 2;
    std::size_t max_length = 0;            // 0 = unbounded
    std::size_t pattern_limit = 2'000'000; // MiningLimitExceeded beyond this
};

struct Score {
    Ratio support_ratio;
    Ratio confidence;
    Ratio ranking;
};

/// Number of records containing alpha as a (gapped) subsequence.
long long support(const std::vector<ItemKey>& alpha, const SequenceDatabase& db);

/// Complete set of sequential patterns with support >= min_support, sorted
/// by pattern_before.
std::vector<SequentialPattern> mine_prefixspan(const SequenceDatabase& db, long long min_support);
std::vector<SequentialPattern> mine_prefixspan(const SequenceDatabase& db, const MiningOptions& options);

/// Mines with the smallest min_support whose result has at most
/// max_patterns patterns; if none does, keeps the best max_patterns.
std::vector<SequentialPattern> adaptive_mine(const SequenceDatabase& db, std::size_t max_patterns = 50,
                                             std::size_t max_length = 0);

/// Recomputes the scores of p against db.
Score score(const SequentialPattern& p, const SequenceDatabase& db);

/// Ranking desc, support desc, then element names and kinds ascending.
bool pattern_before(const SequentialPattern& a, const SequentialPattern& b);
void sort_patterns(std::vector<SequentialPattern>& patterns);

} // namespace esdp
