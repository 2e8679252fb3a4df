#include "esdp/transactions.h"

#include "esdp/xml.h"

#include <algorithm>
#include <map>
#include <set>

namespace esdp {

namespace {

bool joins_transactions(ItemKind kind) { return kind != ItemKind::PD && kind != ItemKind::ID; }

// Block paths alone can collide across files (same class in two roots), so
// grouping keys include the file; duplicates get a "#n" suffix afterwards.
template <typename Record>
void assign_unique_ids(std::vector<std::pair<std::string, Record>>& grouped) {
    std::map<std::string, int> seen;
    for (auto& [path, rec] : grouped) {
        int n = ++seen[path];
        if constexpr (requires { rec.sid; }) {
            rec.sid = n == 1 ? path : path + "#" + std::to_string(n);
        } else {
            rec.block_id = n == 1 ? path : path + "#" + std::to_string(n);
        }
    }
}

} // namespace

std::vector<TransactionRecord> build_transactions(const std::vector<SourceItem>& items, Granularity granularity) {
    std::map<std::pair<std::string, std::string>, std::set<ItemKey>> groups;
    for (const auto& it : items) {
        if (!joins_transactions(it.kind)) continue;
        const std::string& block = granularity == Granularity::Class ? it.class_block : it.method_block;
        if (block.empty()) continue;
        groups[{block, it.file}].insert(it.key());
    }
    std::vector<std::pair<std::string, TransactionRecord>> grouped;
    for (auto& [key, set] : groups) {
        TransactionRecord rec;
        rec.items.assign(set.begin(), set.end());
        grouped.emplace_back(key.first, std::move(rec));
    }
    assign_unique_ids(grouped);
    std::vector<TransactionRecord> out;
    for (auto& [path, rec] : grouped) out.push_back(std::move(rec));
    std::sort(out.begin(), out.end(),
              [](const TransactionRecord& a, const TransactionRecord& b) { return a.block_id < b.block_id; });
    return out;
}

SequenceDatabase build_sequence_db(const std::vector<SourceItem>& items, std::string corpus_label) {
    struct Pending {
        std::vector<const SourceItem*> items;
    };
    std::map<std::pair<std::string, std::string>, Pending> groups;
    for (const auto& it : items) {
        if (!joins_transactions(it.kind) || it.method_block.empty()) continue;
        groups[{it.method_block, it.file}].items.push_back(&it);
    }
    std::vector<std::pair<std::string, SequenceRecord>> grouped;
    for (auto& [key, pending] : groups) {
        auto& v = pending.items;
        std::stable_sort(v.begin(), v.end(), [](const SourceItem* a, const SourceItem* b) {
            // the declaration heads its own body
            bool ha = a->kind == ItemKind::MD, hb = b->kind == ItemKind::MD;
            if (ha != hb) return ha;
            return a->line != b->line ? a->line < b->line : a->column < b->column;
        });
        SequenceRecord rec;
        for (const auto* it : v) rec.items.push_back(it->key());
        grouped.emplace_back(key.first, std::move(rec));
    }
    assign_unique_ids(grouped);
    SequenceDatabase db;
    db.corpus_label = std::move(corpus_label);
    for (auto& [path, rec] : grouped) db.records.push_back(std::move(rec));
    std::sort(db.records.begin(), db.records.end(),
              [](const SequenceRecord& a, const SequenceRecord& b) { return a.sid < b.sid; });
    return db;
}

std::string transactions_to_xml(const std::vector<TransactionRecord>& records, const std::string& corpus_label) {
    XmlWriter w;
    w.declaration();
    w.open("esdp-transactions", {{"version", "1"}, {"corpus", corpus_label}});
    if (records.empty()) {
        w.empty("transactions");
    } else {
        w.open("transactions");
        for (const auto& rec : records) {
            w.open("transaction", {{"block", rec.block_id}});
            for (const auto& key : rec.items) w.text_element("item", {{"kind", std::string(to_string(key.kind))}}, key.name);
            w.close();
        }
        w.close();
    }
    w.close();
    return w.str();
}

} // namespace esdp
