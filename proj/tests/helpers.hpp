#ifndef RSG_TEST_HELPERS_HPP
#define RSG_TEST_HELPERS_HPP

#include <random>
#include <set>
#include <vector>

#include "rsg/clopen.hpp"
#include "rsg/graph.hpp"

namespace rsgtest {

using namespace rsg;

// Houghton-style graph: nodes u, v1..vn, a loop at each node, an edge vi->u.
inline GraphPtr houghton_graph(int n) {
    auto g = std::make_shared<DirectedGraph>();
    int u = g->add_node("u");
    g->add_edge("lu", u, u);
    for (int i = 1; i <= n; ++i) {
        int v = g->add_node("v" + std::to_string(i));
        g->add_edge("l" + std::to_string(i), v, v);
        g->add_edge("x" + std::to_string(i), v, u);
    }
    return g;
}

// Type graph of a rank-2 free group: root plus one node per last letter,
// with edges to every letter that does not cancel.
inline GraphPtr f2_type_graph() {
    auto g = std::make_shared<DirectedGraph>();
    g->add_node("r");
    const char* letters[4] = {"a", "A", "b", "B"};
    for (auto* l : letters) g->add_node(l);
    for (auto* l : letters) g->add_edge(std::string("r") + l, "r", l);
    auto inverse = [](char c) { return std::string(1, c == 'a' ? 'A' : c == 'A' ? 'a' : c == 'b' ? 'B' : 'b'); };
    for (auto* from : letters)
        for (auto* to : letters)
            if (inverse(from[0]) != to) g->add_edge(std::string(from) + to, from, to);
    return g;
}

// Two nodes, two loops each, one edge each way.
inline GraphPtr two_node_graph() {
    auto g = std::make_shared<DirectedGraph>();
    g->add_node("v");
    g->add_node("w");
    g->add_edge("v1", "v", "v");
    g->add_edge("v2", "v", "v");
    g->add_edge("w1", "w", "w");
    g->add_edge("w2", "w", "w");
    g->add_edge("vw", "v", "w");
    g->add_edge("wv", "w", "v");
    return g;
}

// Node v with loop a, node w with loops b1 b2 b3, edge x from v to w.
inline GraphPtr odd_even_graph() {
    auto g = std::make_shared<DirectedGraph>();
    g->add_node("v");
    g->add_node("w");
    g->add_edge("a", "v", "v");
    g->add_edge("b1", "w", "w");
    g->add_edge("b2", "w", "w");
    g->add_edge("b3", "w", "w");
    g->add_edge("x", "v", "w");
    return g;
}

// 4 nodes, each with one edge to each of the other three.
inline GraphPtr all_to_others_graph() {
    auto g = std::make_shared<DirectedGraph>();
    for (int i = 0; i < 4; ++i) g->add_node("n" + std::to_string(i));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j)
                g->add_edge("e" + std::to_string(i) + std::to_string(j), i, j);
    return g;
}

inline Path word_path(const DirectedGraph& g, const std::string& names) {
    // edge names are single characters here (full shift graphs)
    std::vector<int> seq;
    for (char c : names) seq.push_back(*g.edge_id(std::string(1, c)));
    if (seq.empty()) return Path::node(0);
    return Path::edges(std::move(seq));
}

inline Path edge_path(const DirectedGraph& g, std::initializer_list<const char*> names) {
    std::vector<int> seq;
    for (auto* n : names) seq.push_back(*g.edge_id(n));
    return Path::edges(std::move(seq));
}

// All extensions of a path to absolute edge-length L (for brute-force cone
// comparisons).
inline void extensions_to_depth(const DirectedGraph& g, const Path& p, int L,
                                std::set<std::vector<int>>& out) {
    std::vector<Path> work{p};
    while (!work.empty()) {
        Path q = work.back();
        work.pop_back();
        if (q.length() >= L && !q.is_null() && !q.is_node()) {
            out.insert(q.edge_seq());
            continue;
        }
        for (auto& c : path_children(q, g)) work.push_back(std::move(c));
    }
}

// Brute-force: cones meet iff they share an extension of common length.
inline bool cones_meet_brute(const DirectedGraph& g, const Path& a, const Path& b, int slack) {
    int L = std::max(a.length(), b.length()) + slack;
    std::set<std::vector<int>> ea, eb;
    extensions_to_depth(g, a, L, ea);
    extensions_to_depth(g, b, L, eb);
    for (const auto& w : ea)
        if (eb.count(w)) return true;
    return false;
}

inline Path random_path(const DirectedGraph& g, std::mt19937& rng, int max_len) {
    std::uniform_int_distribution<int> len(0, max_len);
    int l = len(rng);
    std::uniform_int_distribution<int> node(0, g.node_count() - 1);
    int v = node(rng);
    if (l == 0) return Path::node(v);
    std::vector<int> seq;
    for (int i = 0; i < l; ++i) {
        const auto& outs = g.out_edges(v);
        if (outs.empty()) break;
        std::uniform_int_distribution<int> pick(0, static_cast<int>(outs.size()) - 1);
        int e = outs[pick(rng)];
        seq.push_back(e);
        v = g.terminus(e);
    }
    if (seq.empty()) return Path::node(v);
    return Path::edges(std::move(seq));
}

// Random refinement of a complete code: split random members repeatedly.
inline std::vector<Path> random_refinement(const DirectedGraph& g, std::vector<Path> code,
                                           std::mt19937& rng, int splits) {
    for (int s = 0; s < splits; ++s) {
        std::uniform_int_distribution<int> pick(0, static_cast<int>(code.size()) - 1);
        int i = pick(rng);
        Path p = code[i];
        code.erase(code.begin() + i);
        for (auto& c : path_children(p, g)) code.push_back(std::move(c));
    }
    return code;
}

}  // namespace rsgtest

#endif
