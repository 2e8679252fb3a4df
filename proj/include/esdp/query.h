#pragma once

#include "esdp/extractor.h"
#include "esdp/repository.h"

#include <string>
#include <string_view>
#include <vector>

namespace esdp {

struct UserQuery {
    std::string raw_statement;
    ItemKey item;
    ScopeContext context; // includes variables the statement itself declares or binds
};

enum class MatchTier { Antecedent = 1, Contains = 2, Substring = 3 };

struct Recommendation {
    SequentialPattern pattern;
    std::size_t match_offset = 0;
    Ratio score;
    MatchTier tier = MatchTier::Antecedent;
};

/// Abstracts a typed statement into its query item.
UserQuery abstract_query(std::string_view statement, const ScopeContext& context);

/// Patterns starting with the query item, then patterns containing it, then
/// patterns with an element whose name contains the query name; each group
/// in repository order, truncated to top_n.
std::vector<Recommendation> search(const UserQuery& q, const MinedRepository& repo, std::size_t top_n);

struct Skeleton {
    std::vector<std::string> declarations; // variables the statements need but the context lacks
    std::vector<std::string> statements;   // one per element after the match

    std::string text() const;
};

Skeleton render_skeleton(const Recommendation& rec, const UserQuery& q);

/// Re-extracts the query statement followed by the skeleton statements and
/// compares the items after the query's own with the pattern's remaining
/// elements.
bool skeleton_round_trips(const Recommendation& rec, const UserQuery& q, const Skeleton& skeleton);

/// Java expression of the given type that introduces no items.
std::string placeholder_for(std::string_view type);

} // namespace esdp
