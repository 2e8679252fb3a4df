#pragma once

#include "esdp/extractor.h"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace esdp {

enum class NodeRole { Action, Control };

struct GroumNode {
    int id = 0;
    std::string label; // "Type.member", "Type.<init>", "IF" or "LOOP"
    NodeRole role = NodeRole::Action;
};

struct Groum {
    std::vector<GroumNode> nodes;          // node i has id i
    std::vector<std::pair<int, int>> edges; // sorted, unique, from < to
    std::string origin;

    std::size_t size() const { return nodes.size(); }
    bool has_edge(int from, int to) const;
};

/// Action nodes for CI/MI/FA/CTI/SCI items, control nodes for IF and loop
/// regions, ordered by position. Each node gets an edge from its predecessor
/// and from the nearest earlier node sharing one of its variables.
Groum build_groum(const std::vector<SourceItem>& items, const std::vector<ControlMarker>& markers,
                  std::string origin = {});

/// One groum per method block (blocks without action or control nodes are
/// skipped), ordered by block path.
std::vector<Groum> build_groums(const ExtractResult& extracted);

using ExasVector = std::map<std::vector<std::string>, int>;

/// Multiset of node labels and of label pairs along edges.
ExasVector exas_vector(const Groum& g);

bool label_isomorphic(const Groum& a, const Groum& b);

/// Order-independent text key; equal iff the graphs are label-isomorphic.
std::string canonical_form(const Groum& g);

/// Subgraph induced by the given node ids, renumbered in ascending id order.
Groum induced_subgraph(const Groum& g, const std::vector<int>& nodes);

/// Largest number of pairwise node-disjoint sets. Exact for up to 20 sets,
/// greedy beyond (then *exact is set to false).
long long independent_count(const std::vector<std::vector<int>>& occurrences, bool* exact = nullptr);

struct Occurrence {
    std::size_t graph = 0;  // index into the dataset
    std::vector<int> nodes; // sorted host node ids
};

struct GroumPattern {
    Groum representative;
    std::vector<Occurrence> occurrences; // every occurrence, overlapping ones included
    long long frequency = 0;             // sum over graphs of independent occurrences
    bool frequency_exact = true;

    std::size_t size() const { return representative.size(); }
};

struct ExplorerOptions {
    long long sigma = 2;
    std::size_t max_size = 0; // 0 = unbounded
};

/// Frequent connected induced subgraph patterns, one per isomorphism class,
/// ordered by size then canonical form.
std::vector<GroumPattern> patt_explorer(const std::vector<Groum>& dataset, const ExplorerOptions& options);

std::string format_groum(const Groum& g);

} // namespace esdp
