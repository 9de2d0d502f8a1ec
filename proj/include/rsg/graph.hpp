#ifndef RSG_GRAPH_HPP
#define RSG_GRAPH_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsg {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a fuel/state/memory budget runs out before an answer is known.
struct BudgetError : Error {
    using Error::Error;
};

// Finite directed graph with loops and parallel edges allowed.
// Node and edge ids are strings externally, dense indices internally.
class DirectedGraph {
public:
    DirectedGraph() = default;

    int add_node(const std::string& name);
    int add_edge(const std::string& name, int origin, int terminus);
    int add_edge(const std::string& name, const std::string& origin, const std::string& terminus);

    int node_count() const { return static_cast<int>(node_names_.size()); }
    int edge_count() const { return static_cast<int>(edge_names_.size()); }

    int origin(int e) const { return edge_origin_.at(e); }
    int terminus(int e) const { return edge_terminus_.at(e); }

    const std::string& node_name(int v) const { return node_names_.at(v); }
    const std::string& edge_name(int e) const { return edge_names_.at(e); }

    std::optional<int> node_id(const std::string& name) const;
    std::optional<int> edge_id(const std::string& name) const;

    // Edges with origin v, in insertion order.
    const std::vector<int>& out_edges(int v) const { return out_edges_.at(v); }
    int out_degree(int v) const { return static_cast<int>(out_edges_.at(v).size()); }

    bool operator==(const DirectedGraph& o) const {
        return node_names_ == o.node_names_ && edge_names_ == o.edge_names_ &&
               edge_origin_ == o.edge_origin_ && edge_terminus_ == o.edge_terminus_;
    }

private:
    std::vector<std::string> node_names_;
    std::vector<std::string> edge_names_;
    std::vector<int> edge_origin_;
    std::vector<int> edge_terminus_;
    std::vector<std::vector<int>> out_edges_;
};

using GraphPtr = std::shared_ptr<const DirectedGraph>;

// Convenience builder: one node, n loop edges named "0".."n-1".
GraphPtr full_shift_graph(int n);

struct SubshiftReport {
    bool no_empty_cones = false;      // every node has an outgoing edge
    bool no_isolated_points = false;  // every node reaches a node with >= 2 outgoing edges
};

SubshiftReport check_subshift(const DirectedGraph& g);

// Strongly connected and not a single directed cycle.
bool irreducible(const DirectedGraph& g);

// Tarjan SCCs, returned in reverse topological order of the condensation.
std::vector<std::vector<int>> strongly_connected_components(const DirectedGraph& g);

// Induced subgraph on the given nodes.  Keeps external names; returns the
// node map new->old alongside.
struct InducedSubgraph {
    GraphPtr graph;
    std::vector<int> to_parent;    // new node id -> old node id
    std::vector<int> from_parent;  // old node id -> new node id or -1
    std::vector<int> edge_to_parent;
};
InducedSubgraph induced_subgraph(const GraphPtr& g, const std::vector<int>& nodes);

// Irreducible core: the unique terminal SCC containing a cycle, if it exists,
// is successor-closed and absorbs every long path.  Requires check_subshift
// to pass both conditions.
struct CoreResult {
    InducedSubgraph core;
    std::vector<int> core_nodes;  // old ids, sorted
    int path_bound = 0;           // smallest N with every length-N path ending in the core
};
std::optional<CoreResult> irreducible_core(const GraphPtr& g);

std::string graph_to_dot(const DirectedGraph& g, const std::vector<int>* core_nodes = nullptr);

}  // namespace rsg

#endif
