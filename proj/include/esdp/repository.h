#pragma once

#include "esdp/seq_miner.h"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace esdp {

struct MinedRepository {
    std::vector<SequentialPattern> patterns; // sorted by pattern_before, element lists unique
    std::string corpus_label;
    std::string created_at; // ISO 8601 UTC, e.g. 2024-01-31T12:00:00Z
    long long min_support_used = 1;
};

enum class MergeMode { Incremental, Replace };

/// Sorts patterns and drops duplicate element lists (first occurrence wins).
void normalize_repository(MinedRepository& repo);

std::string serialize_repository(const MinedRepository& repo);

/// Strict reader for serialize_repository output. Anything outside the
/// schema raises SchemaViolation naming the offending element path.
MinedRepository parse_repository(std::string_view document);

MinedRepository load_repository(const std::filesystem::path& path);

/// Writes through a temporary file and renames it into place.
void save_repository(const MinedRepository& repo, const std::filesystem::path& path);

/// Fresh patterns replace existing ones with identical element lists and new
/// ones are added. Replace mode drops everything not in fresh.
MinedRepository merge_update(const MinedRepository& existing, const std::vector<SequentialPattern>& fresh,
                             MergeMode mode = MergeMode::Incremental);

std::string format_timestamp(long long unix_seconds);
bool is_valid_timestamp(std::string_view text);

} // namespace esdp
