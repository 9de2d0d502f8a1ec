#ifndef RSG_PATH_HPP
#define RSG_PATH_HPP

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "rsg/graph.hpp"

namespace rsg {

// A finite directed path: the null path, a length-0 node path, or a
// nonempty edge sequence.  The null path is a prefix of everything and
// has terminus the null marker; a node path v is a prefix of every path
// with origin v.
class Path {
public:
    enum class Kind { Null, Node, Edges };

    Path() : kind_(Kind::Null) {}
    static Path null() { return Path(); }
    static Path node(int v);
    static Path edges(std::vector<int> seq);

    Kind kind() const { return kind_; }
    bool is_null() const { return kind_ == Kind::Null; }
    bool is_node() const { return kind_ == Kind::Node; }
    int length() const { return kind_ == Kind::Edges ? static_cast<int>(edges_.size()) : 0; }

    // -1 encodes the null marker.
    int origin(const DirectedGraph& g) const;
    int terminus(const DirectedGraph& g) const;

    int node() const { return node_; }
    const std::vector<int>& edge_seq() const { return edges_; }

    bool valid(const DirectedGraph& g) const;

    // True if this is a prefix of p (cone containment the other way around).
    bool is_prefix_of(const Path& p, const DirectedGraph& g) const;
    bool comparable(const Path& p, const DirectedGraph& g) const;

    // Concatenation; requires t(this) = o(p) under the usual conventions.
    Path concat(const Path& p, const DirectedGraph& g) const;

    // Suffix after removing the prefix `pre` (requires pre.is_prefix_of(*this)).
    Path strip_prefix(const Path& pre, const DirectedGraph& g) const;

    // The maximal common prefix of two paths (as paths in g).
    static Path common_prefix(const Path& a, const Path& b, const DirectedGraph& g);

    // Order: null < node paths (by id) < edge paths (length, then lex).
    std::strong_ordering operator<=>(const Path& o) const;
    bool operator==(const Path& o) const = default;

    std::string to_string(const DirectedGraph& g) const;

private:
    Kind kind_;
    int node_ = -1;
    std::vector<int> edges_;
};

// All one-edge extensions alpha.e of alpha (children of its cone).
std::vector<Path> path_children(const Path& alpha, const DirectedGraph& g);

}  // namespace rsg

#endif
