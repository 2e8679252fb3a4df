#pragma once

#include "esdp/item.h"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace esdp {

struct RetrievalOutcome {
    std::vector<std::string> retrieved; // duplicate-free, rank order
    std::set<std::string> relevant;
    std::map<std::string, double> scores;
};

struct PrecisionRecall {
    Ratio precision;
    Ratio recall;
};

PrecisionRecall precision_recall(const RetrievalOutcome& o);

/// Precision and recall of an ordered recommendation, counting only items
/// that appear in gold order (longest common subsequence).
PrecisionRecall sequence_pr(const std::vector<ItemKey>& recommended, const std::vector<ItemKey>& gold);

std::size_t lcs_length(const std::vector<ItemKey>& a, const std::vector<ItemKey>& b);

struct ScoredLabel {
    double score = 0;
    bool positive = false;
};

struct RocPoint {
    Ratio fpr;
    Ratio tpr;
};

/// A case is predicted positive when its score is at least the threshold.
/// Points are sorted by FPR then TPR, deduplicated, and always include
/// (0,0) and (1,1).
std::vector<RocPoint> roc_points(const std::vector<ScoredLabel>& cases, const std::vector<double>& thresholds);

/// Thresholds at every distinct score plus one above the maximum.
std::vector<double> score_thresholds(const std::vector<ScoredLabel>& cases);

double auc(const std::vector<RocPoint>& points);

struct TopNAverage {
    std::size_t n = 0;
    double precision = 0;
    double recall = 0;
};

/// Mean per-query precision and recall when each query keeps its first n
/// retrieved entries; queries retrieving nothing count as zero precision.
std::vector<TopNAverage> top_n_average(const std::vector<RetrievalOutcome>& queries, const std::vector<std::size_t>& ns);

} // namespace esdp
