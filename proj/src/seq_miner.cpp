#include "esdp/seq_miner.h"

#include "esdp/errors.h"

#include <algorithm>
#include <map>

namespace esdp {

namespace {

bool contains_subsequence(const std::vector<ItemKey>& seq, const std::vector<ItemKey>& alpha) {
    std::size_t j = 0;
    for (std::size_t i = 0; i < seq.size() && j < alpha.size(); ++i) {
        if (seq[i] == alpha[j]) ++j;
    }
    return j == alpha.size();
}

struct LimitReached {};

class PrefixSpan {
public:
    PrefixSpan(const SequenceDatabase& db, long long min_support, std::size_t max_length, std::size_t limit,
               bool throw_on_limit)
        : min_support_(min_support), max_length_(max_length), limit_(limit), throw_on_limit_(throw_on_limit),
          db_size_(static_cast<long long>(db.size())) {
        std::map<ItemKey, int> ids;
        for (const auto& rec : db.records) {
            for (const auto& key : rec.items) ids.emplace(key, 0);
        }
        for (auto& [key, id] : ids) {
            id = static_cast<int>(alphabet_.size());
            alphabet_.push_back(key);
        }
        for (const auto& rec : db.records) {
            std::vector<int> seq;
            seq.reserve(rec.items.size());
            for (const auto& key : rec.items) seq.push_back(ids[key]);
            seqs_.push_back(std::move(seq));
        }
        counts_.assign(alphabet_.size(), 0);
        stamp_.assign(alphabet_.size(), -1);
    }

    // Returns false when the limit stopped mining early (non-throwing mode).
    bool run() {
        std::vector<std::pair<int, int>> proj;
        for (int s = 0; s < static_cast<int>(seqs_.size()); ++s) proj.emplace_back(s, 0);
        try {
            grow(proj, db_size_);
        } catch (const LimitReached&) {
            return false;
        }
        return true;
    }

    std::vector<SequentialPattern> take() {
        std::vector<SequentialPattern> out;
        out.reserve(found_.size());
        for (auto& f : found_) {
            SequentialPattern p;
            for (int id : f.ids) p.elements.push_back(alphabet_[static_cast<std::size_t>(id)]);
            p.support_count = f.support;
            p.prefix_support = f.prefix_support;
            p.db_size = db_size_;
            out.push_back(std::move(p));
        }
        return out;
    }

    std::size_t found() const { return found_.size(); }

private:
    struct Found {
        std::vector<int> ids;
        long long support;
        long long prefix_support;
    };

    void grow(const std::vector<std::pair<int, int>>& proj, long long parent_support) {
        // per-item count of projected sequences containing it
        for (const auto& [s, start] : proj) {
            const auto& seq = seqs_[static_cast<std::size_t>(s)];
            for (std::size_t i = static_cast<std::size_t>(start); i < seq.size(); ++i) {
                int id = seq[i];
                if (stamp_[static_cast<std::size_t>(id)] != s + epoch_) {
                    stamp_[static_cast<std::size_t>(id)] = s + epoch_;
                    if (counts_[static_cast<std::size_t>(id)]++ == 0) touched_.push_back(id);
                }
            }
        }
        epoch_ += static_cast<long long>(seqs_.size());
        std::vector<std::pair<int, long long>> next;
        for (int id : touched_) {
            long long c = counts_[static_cast<std::size_t>(id)];
            if (c >= min_support_) next.emplace_back(id, c);
            counts_[static_cast<std::size_t>(id)] = 0;
        }
        touched_.clear();
        std::sort(next.begin(), next.end());

        for (const auto& [id, count] : next) {
            prefix_.push_back(id);
            found_.push_back({prefix_, count, prefix_.size() == 1 ? count : parent_support});
            if (found_.size() > limit_) {
                if (throw_on_limit_) {
                    throw MiningLimitExceeded("more than " + std::to_string(limit_) +
                                              " patterns; raise min_support or set a maximum length");
                }
                throw LimitReached{};
            }
            if (max_length_ == 0 || prefix_.size() < max_length_) {
                std::vector<std::pair<int, int>> sub;
                for (const auto& [s, start] : proj) {
                    const auto& seq = seqs_[static_cast<std::size_t>(s)];
                    for (std::size_t i = static_cast<std::size_t>(start); i < seq.size(); ++i) {
                        if (seq[i] == id) {
                            sub.emplace_back(s, static_cast<int>(i) + 1);
                            break;
                        }
                    }
                }
                grow(sub, count);
            }
            prefix_.pop_back();
        }
    }

    long long min_support_;
    std::size_t max_length_;
    std::size_t limit_;
    bool throw_on_limit_;
    long long db_size_;
    std::vector<ItemKey> alphabet_;
    std::vector<std::vector<int>> seqs_;
    std::vector<long long> counts_;
    std::vector<long long> stamp_;
    long long epoch_ = 0;
    std::vector<int> touched_;
    std::vector<int> prefix_;
    std::vector<Found> found_;
};

} // namespace

long long support(const std::vector<ItemKey>& alpha, const SequenceDatabase& db) {
    long long n = 0;
    for (const auto& rec : db.records) {
        if (contains_subsequence(rec.items, alpha)) ++n;
    }
    return n;
}

bool pattern_before(const SequentialPattern& a, const SequentialPattern& b) {
    if (auto c = a.ranking() <=> b.ranking(); c != 0) return c > 0;
    if (auto c = a.support_ratio() <=> b.support_ratio(); c != 0) return c > 0;
    auto names = [](const SequentialPattern& p) {
        std::vector<const std::string*> v;
        for (const auto& e : p.elements) v.push_back(&e.name);
        return v;
    };
    auto na = names(a), nb = names(b);
    bool less = std::lexicographical_compare(na.begin(), na.end(), nb.begin(), nb.end(),
                                             [](const std::string* x, const std::string* y) { return *x < *y; });
    bool greater = std::lexicographical_compare(nb.begin(), nb.end(), na.begin(), na.end(),
                                                [](const std::string* x, const std::string* y) { return *x < *y; });
    if (less || greater) return less;
    return a.elements < b.elements;
}

void sort_patterns(std::vector<SequentialPattern>& patterns) {
    std::sort(patterns.begin(), patterns.end(), pattern_before);
}

std::vector<SequentialPattern> mine_prefixspan(const SequenceDatabase& db, const MiningOptions& options) {
    if (options.min_support < 1) {
        throw InvalidThreshold("min_support must be at least 1, got " + std::to_string(options.min_support));
    }
    if (db.records.empty()) return {};
    PrefixSpan miner(db, options.min_support, options.max_length, options.pattern_limit, true);
    miner.run();
    auto out = miner.take();
    sort_patterns(out);
    return out;
}

std::vector<SequentialPattern> mine_prefixspan(const SequenceDatabase& db, long long min_support) {
    MiningOptions options;
    options.min_support = min_support;
    return mine_prefixspan(db, options);
}

std::vector<SequentialPattern> adaptive_mine(const SequenceDatabase& db, std::size_t max_patterns,
                                             std::size_t max_length) {
    if (max_patterns < 1) throw InvalidThreshold("max_patterns must be at least 1");
    if (db.records.empty()) return {};
    auto fits = [&](long long m) {
        PrefixSpan miner(db, m, max_length, max_patterns, false);
        return miner.run();
    };
    long long n = static_cast<long long>(db.size());
    if (!fits(n)) {
        MiningOptions options;
        options.min_support = n;
        options.max_length = max_length;
        auto all = mine_prefixspan(db, options);
        all.resize(max_patterns);
        return all;
    }
    long long lo = 1, hi = n; // hi always fits
    while (lo < hi) {
        long long mid = lo + (hi - lo) / 2;
        if (fits(mid)) hi = mid;
        else lo = mid + 1;
    }
    MiningOptions options;
    options.min_support = hi;
    options.max_length = max_length;
    return mine_prefixspan(db, options);
}

Score score(const SequentialPattern& p, const SequenceDatabase& db) {
    long long n = static_cast<long long>(db.size());
    long long s = support(p.elements, db);
    long long prefix = s;
    if (p.k() > 1) {
        std::vector<ItemKey> head(p.elements.begin(), p.elements.end() - 1);
        prefix = support(head, db);
    }
    return {Ratio{s, n}, Ratio{s, prefix}, Ratio{static_cast<long long>(p.k()) * s, n}};
}

} // namespace esdp
