#include "rsg/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace rsg {

int DirectedGraph::add_node(const std::string& name) {
    for (const auto& n : node_names_)
        if (n == name) throw Error("duplicate node id: " + name);
    node_names_.push_back(name);
    out_edges_.emplace_back();
    return node_count() - 1;
}

int DirectedGraph::add_edge(const std::string& name, int origin, int terminus) {
    if (origin < 0 || origin >= node_count() || terminus < 0 || terminus >= node_count())
        throw Error("edge endpoint out of range: " + name);
    for (const auto& n : edge_names_)
        if (n == name) throw Error("duplicate edge id: " + name);
    edge_names_.push_back(name);
    edge_origin_.push_back(origin);
    edge_terminus_.push_back(terminus);
    out_edges_[origin].push_back(edge_count() - 1);
    return edge_count() - 1;
}

int DirectedGraph::add_edge(const std::string& name, const std::string& origin,
                            const std::string& terminus) {
    auto o = node_id(origin), t = node_id(terminus);
    if (!o || !t) throw Error("unknown node in edge " + name);
    return add_edge(name, *o, *t);
}

std::optional<int> DirectedGraph::node_id(const std::string& name) const {
    for (int i = 0; i < node_count(); ++i)
        if (node_names_[i] == name) return i;
    return std::nullopt;
}

std::optional<int> DirectedGraph::edge_id(const std::string& name) const {
    for (int i = 0; i < edge_count(); ++i)
        if (edge_names_[i] == name) return i;
    return std::nullopt;
}

GraphPtr full_shift_graph(int n) {
    auto g = std::make_shared<DirectedGraph>();
    g->add_node("v");
    for (int i = 0; i < n; ++i) g->add_edge(std::to_string(i), 0, 0);
    return g;
}

SubshiftReport check_subshift(const DirectedGraph& g) {
    SubshiftReport r;
    r.no_empty_cones = true;
    for (int v = 0; v < g.node_count(); ++v)
        if (g.out_degree(v) == 0) r.no_empty_cones = false;

    // reverse reachability from branching nodes
    std::vector<char> good(g.node_count(), 0);
    std::deque<int> work;
    for (int v = 0; v < g.node_count(); ++v)
        if (g.out_degree(v) >= 2) {
            good[v] = 1;
            work.push_back(v);
        }
    std::vector<std::vector<int>> preds(g.node_count());
    for (int e = 0; e < g.edge_count(); ++e) preds[g.terminus(e)].push_back(g.origin(e));
    while (!work.empty()) {
        int v = work.front();
        work.pop_front();
        for (int u : preds[v])
            if (!good[u]) {
                good[u] = 1;
                work.push_back(u);
            }
    }
    r.no_isolated_points = std::all_of(good.begin(), good.end(), [](char c) { return c != 0; });
    return r;
}

std::vector<std::vector<int>> strongly_connected_components(const DirectedGraph& g) {
    int n = g.node_count();
    std::vector<int> num(n, -1), low(n, -1), stack_pos(n, -1);
    std::vector<int> stack;
    std::vector<std::vector<int>> sccs;
    int counter = 0;

    // iterative Tarjan
    struct Frame {
        int v;
        size_t edge_idx;
    };
    for (int root = 0; root < n; ++root) {
        if (num[root] != -1) continue;
        std::vector<Frame> frames{{root, 0}};
        num[root] = low[root] = counter++;
        stack_pos[root] = static_cast<int>(stack.size());
        stack.push_back(root);
        while (!frames.empty()) {
            int v = frames.back().v;
            const auto& outs = g.out_edges(v);
            if (frames.back().edge_idx < outs.size()) {
                int w = g.terminus(outs[frames.back().edge_idx++]);
                if (num[w] == -1) {
                    num[w] = low[w] = counter++;
                    stack_pos[w] = static_cast<int>(stack.size());
                    stack.push_back(w);
                    frames.push_back({w, 0});
                } else if (stack_pos[w] != -1) {
                    low[v] = std::min(low[v], num[w]);
                }
                continue;
            }
            if (low[v] == num[v]) {
                std::vector<int> scc;
                const int limit = stack_pos[v];
                while (static_cast<int>(stack.size()) > limit) {
                    scc.push_back(stack.back());
                    stack_pos[stack.back()] = -1;
                    stack.pop_back();
                }
                std::sort(scc.begin(), scc.end());
                sccs.push_back(std::move(scc));
            }
            frames.pop_back();
            if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        }
    }
    return sccs;
}

static bool scc_has_cycle(const DirectedGraph& g, const std::vector<int>& scc) {
    if (scc.size() > 1) return true;
    int v = scc[0];
    for (int e : g.out_edges(v))
        if (g.terminus(e) == v) return true;
    return false;
}

bool irreducible(const DirectedGraph& g) {
    if (g.node_count() == 0) return false;
    auto sccs = strongly_connected_components(g);
    if (sccs.size() != 1) return false;
    // not a single directed cycle: some node has out-degree >= 2,
    // unless the graph is a lone node with one loop (a cycle).
    for (int v = 0; v < g.node_count(); ++v)
        if (g.out_degree(v) >= 2) return true;
    return false;
}

InducedSubgraph induced_subgraph(const GraphPtr& g, const std::vector<int>& nodes) {
    InducedSubgraph out;
    auto sub = std::make_shared<DirectedGraph>();
    out.from_parent.assign(g->node_count(), -1);
    for (int v : nodes) {
        out.from_parent[v] = sub->add_node(g->node_name(v));
        out.to_parent.push_back(v);
    }
    for (int e = 0; e < g->edge_count(); ++e) {
        int o = out.from_parent[g->origin(e)], t = out.from_parent[g->terminus(e)];
        if (o != -1 && t != -1) {
            sub->add_edge(g->edge_name(e), o, t);
            out.edge_to_parent.push_back(e);
        }
    }
    out.graph = sub;
    return out;
}

std::optional<CoreResult> irreducible_core(const GraphPtr& g) {
    auto rep = check_subshift(*g);
    if (!rep.no_empty_cones) throw Error("subshift has empty cones");

    auto sccs = strongly_connected_components(*g);
    // exactly one SCC may contain a cycle, it must be terminal and branching
    int cyclic = -1;
    for (size_t i = 0; i < sccs.size(); ++i) {
        if (scc_has_cycle(*g, sccs[i])) {
            if (cyclic != -1) return std::nullopt;
            cyclic = static_cast<int>(i);
        }
    }
    if (cyclic == -1) return std::nullopt;  // cannot happen on a finite graph with no empty cones
    const auto& core_nodes = sccs[cyclic];
    std::vector<char> in_core(g->node_count(), 0);
    for (int v : core_nodes) in_core[v] = 1;
    for (int e = 0; e < g->edge_count(); ++e)
        if (in_core[g->origin(e)] && !in_core[g->terminus(e)]) return std::nullopt;  // not terminal

    CoreResult res;
    res.core_nodes = core_nodes;
    res.core = induced_subgraph(g, core_nodes);
    if (!irreducible(*res.core.graph)) return std::nullopt;

    // Longest edge-path staying outside the core; +1 gives the path bound.
    // The non-core part is a DAG because all cycles live in the core.
    std::vector<int> longest(g->node_count(), -1);
    std::function<int(int)> dfs = [&](int v) -> int {
        if (longest[v] != -1) return longest[v];
        longest[v] = 0;
        int best = 0;
        for (int e : g->out_edges(v))
            if (!in_core[g->terminus(e)]) best = std::max(best, 1 + dfs(g->terminus(e)));
        return longest[v] = best;
    };
    int n_bound = 0;
    for (int v = 0; v < g->node_count(); ++v)
        if (!in_core[v]) n_bound = std::max(n_bound, 1 + dfs(v));
    res.path_bound = n_bound;
    return res;
}

std::string graph_to_dot(const DirectedGraph& g, const std::vector<int>* core_nodes) {
    std::vector<char> in_core(g.node_count(), 0);
    if (core_nodes)
        for (int v : *core_nodes) in_core[v] = 1;
    std::ostringstream os;
    os << "digraph shift {\n";
    for (int v = 0; v < g.node_count(); ++v) {
        os << "  \"" << g.node_name(v) << "\"";
        if (in_core[v]) os << " [peripheries=2]";
        os << ";\n";
    }
    for (int e = 0; e < g.edge_count(); ++e)
        os << "  \"" << g.node_name(g.origin(e)) << "\" -> \"" << g.node_name(g.terminus(e))
           << "\" [label=\"" << g.edge_name(e) << "\"];\n";
    os << "}\n";
    return os.str();
}

}  // namespace rsg
