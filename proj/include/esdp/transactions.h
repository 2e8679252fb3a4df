#pragma once

#include "esdp/item.h"

#include <string>
#include <vector>

namespace esdp {

enum class Granularity { Class, Method };

struct TransactionRecord {
    std::string block_id;
    std::vector<ItemKey> items; // sorted, duplicate-free
};

struct SequenceRecord {
    std::string sid;
    std::vector<ItemKey> items; // source order, duplicates kept
};

struct SequenceDatabase {
    std::vector<SequenceRecord> records;
    std::string corpus_label;

    std::size_t size() const { return records.size(); }
};

/// Unordered item sets per class or method block. Package and import items
/// never join a transaction.
std::vector<TransactionRecord> build_transactions(const std::vector<SourceItem>& items, Granularity granularity);

/// One ordered record per method block, headed by the method's MD item when
/// it has one. Records are sorted by sid.
SequenceDatabase build_sequence_db(const std::vector<SourceItem>& items, std::string corpus_label = {});

/// XML rendering of a transaction list (`esdp-transactions` document).
std::string transactions_to_xml(const std::vector<TransactionRecord>& records, const std::string& corpus_label);

} // namespace esdp
