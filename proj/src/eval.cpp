#include "esdp/eval.h"

#include "esdp/errors.h"

#include <algorithm>

namespace esdp {

PrecisionRecall precision_recall(const RetrievalOutcome& o) {
    if (o.retrieved.empty()) throw UndefinedMetric("precision is undefined when nothing is retrieved");
    if (o.relevant.empty()) throw UndefinedMetric("recall is undefined when nothing is relevant");
    long long hits = 0;
    for (const auto& r : o.retrieved) hits += o.relevant.count(r) ? 1 : 0;
    return {Ratio{hits, static_cast<long long>(o.retrieved.size())},
            Ratio{hits, static_cast<long long>(o.relevant.size())}};
}

std::size_t lcs_length(const std::vector<ItemKey>& a, const std::vector<ItemKey>& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

PrecisionRecall sequence_pr(const std::vector<ItemKey>& recommended, const std::vector<ItemKey>& gold) {
    if (recommended.empty()) throw UndefinedMetric("sequence precision is undefined for an empty recommendation");
    if (gold.empty()) throw UndefinedMetric("sequence recall is undefined for an empty gold sequence");
    auto common = static_cast<long long>(lcs_length(recommended, gold));
    return {Ratio{common, static_cast<long long>(recommended.size())},
            Ratio{common, static_cast<long long>(gold.size())}};
}

std::vector<RocPoint> roc_points(const std::vector<ScoredLabel>& cases, const std::vector<double>& thresholds) {
    long long pos = 0, neg = 0;
    for (const auto& c : cases) (c.positive ? pos : neg) += 1;
    if (pos == 0 || neg == 0) throw DegenerateLabels("ROC needs at least one positive and one negative case");
    std::vector<RocPoint> pts{{Ratio{0, neg}, Ratio{0, pos}}, {Ratio{neg, neg}, Ratio{pos, pos}}};
    for (double t : thresholds) {
        long long tp = 0, fp = 0;
        for (const auto& c : cases) {
            if (c.score >= t) (c.positive ? tp : fp) += 1;
        }
        pts.push_back({Ratio{fp, neg}, Ratio{tp, pos}});
    }
    std::sort(pts.begin(), pts.end(), [](const RocPoint& a, const RocPoint& b) {
        if (auto c = a.fpr <=> b.fpr; c != 0) return c < 0;
        return a.tpr < b.tpr;
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const RocPoint& a, const RocPoint& b) { return a.fpr == b.fpr && a.tpr == b.tpr; }),
              pts.end());
    return pts;
}

std::vector<double> score_thresholds(const std::vector<ScoredLabel>& cases) {
    std::vector<double> t;
    for (const auto& c : cases) t.push_back(c.score);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    if (!t.empty()) t.push_back(t.back() + 1.0);
    return t;
}

double auc(const std::vector<RocPoint>& points) {
    double area = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        double dx = points[i].fpr.value() - points[i - 1].fpr.value();
        area += dx * (points[i].tpr.value() + points[i - 1].tpr.value()) / 2.0;
    }
    return area;
}

std::vector<TopNAverage> top_n_average(const std::vector<RetrievalOutcome>& queries, const std::vector<std::size_t>& ns) {
    std::vector<TopNAverage> out;
    for (std::size_t n : ns) {
        TopNAverage avg;
        avg.n = n;
        std::size_t counted = 0;
        for (const auto& q : queries) {
            if (q.relevant.empty()) continue;
            ++counted;
            RetrievalOutcome cut = q;
            if (cut.retrieved.size() > n) cut.retrieved.resize(n);
            if (cut.retrieved.empty()) continue;
            auto pr = precision_recall(cut);
            avg.precision += pr.precision.value();
            avg.recall += pr.recall.value();
        }
        if (counted) {
            avg.precision /= static_cast<double>(counted);
            avg.recall /= static_cast<double>(counted);
        }
        out.push_back(avg);
    }
    return out;
}

} // namespace esdp
