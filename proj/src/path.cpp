#include "rsg/path.hpp"

#include <algorithm>
#include <sstream>

namespace rsg {

Path Path::node(int v) {
    Path p;
    p.kind_ = Kind::Node;
    p.node_ = v;
    return p;
}

Path Path::edges(std::vector<int> seq) {
    if (seq.empty()) throw Error("edge path must be nonempty; use node() or null()");
    Path p;
    p.kind_ = Kind::Edges;
    p.edges_ = std::move(seq);
    return p;
}

int Path::origin(const DirectedGraph& g) const {
    switch (kind_) {
        case Kind::Null: return -1;
        case Kind::Node: return node_;
        case Kind::Edges: return g.origin(edges_.front());
    }
    return -1;
}

int Path::terminus(const DirectedGraph& g) const {
    switch (kind_) {
        case Kind::Null: return -1;
        case Kind::Node: return node_;
        case Kind::Edges: return g.terminus(edges_.back());
    }
    return -1;
}

bool Path::valid(const DirectedGraph& g) const {
    if (kind_ == Kind::Node) return node_ >= 0 && node_ < g.node_count();
    for (size_t i = 0; i < edges_.size(); ++i) {
        if (edges_[i] < 0 || edges_[i] >= g.edge_count()) return false;
        if (i + 1 < edges_.size() && g.terminus(edges_[i]) != g.origin(edges_[i + 1])) return false;
    }
    return true;
}

bool Path::is_prefix_of(const Path& p, const DirectedGraph& g) const {
    switch (kind_) {
        case Kind::Null: return true;
        case Kind::Node: return p.origin(g) == node_;
        case Kind::Edges:
            if (p.kind_ != Kind::Edges || p.edges_.size() < edges_.size()) return false;
            return std::equal(edges_.begin(), edges_.end(), p.edges_.begin());
    }
    return false;
}

bool Path::comparable(const Path& p, const DirectedGraph& g) const {
    return is_prefix_of(p, g) || p.is_prefix_of(*this, g);
}

Path Path::concat(const Path& p, const DirectedGraph& g) const {
    if (kind_ == Kind::Null) return p;
    if (p.kind_ == Kind::Null) {
        // alpha . null only makes sense when alpha itself is null
        throw Error("cannot append the null path to a non-null path");
    }
    if (p.kind_ == Kind::Node) {
        if (terminus(g) != p.node_) throw Error("path concat: terminus/origin mismatch");
        return *this;
    }
    if (terminus(g) != p.origin(g)) throw Error("path concat: terminus/origin mismatch");
    if (kind_ == Kind::Node) return p;
    std::vector<int> seq = edges_;
    seq.insert(seq.end(), p.edges_.begin(), p.edges_.end());
    return Path::edges(std::move(seq));
}

Path Path::strip_prefix(const Path& pre, const DirectedGraph& g) const {
    if (!pre.is_prefix_of(*this, g)) throw Error("strip_prefix: not a prefix");
    if (pre.kind_ == Kind::Null) return *this;
    if (pre.kind_ == Kind::Node) return *this;
    if (pre.edges_.size() == edges_.size()) return Path::node(terminus(g));
    return Path::edges(std::vector<int>(edges_.begin() + pre.edges_.size(), edges_.end()));
}

Path Path::common_prefix(const Path& a, const Path& b, const DirectedGraph& g) {
    if (a.kind_ == Kind::Null || b.kind_ == Kind::Null) return Path::null();
    if (a.origin(g) != b.origin(g)) return Path::null();
    if (a.kind_ == Kind::Node || b.kind_ == Kind::Node) return Path::node(a.origin(g));
    size_t i = 0;
    while (i < a.edges_.size() && i < b.edges_.size() && a.edges_[i] == b.edges_[i]) ++i;
    if (i == 0) return Path::node(a.origin(g));
    return Path::edges(std::vector<int>(a.edges_.begin(), a.edges_.begin() + i));
}

std::strong_ordering Path::operator<=>(const Path& o) const {
    auto rank = [](Kind k) { return k == Kind::Null ? 0 : (k == Kind::Node ? 1 : 2); };
    if (auto c = rank(kind_) <=> rank(o.kind_); c != 0) return c;
    if (kind_ == Kind::Node) return node_ <=> o.node_;
    if (kind_ == Kind::Edges) {
        if (auto c = edges_.size() <=> o.edges_.size(); c != 0) return c;
        return edges_ <=> o.edges_;
    }
    return std::strong_ordering::equal;
}

std::string Path::to_string(const DirectedGraph& g) const {
    switch (kind_) {
        case Kind::Null: return "<null>";
        case Kind::Node: return "<" + g.node_name(node_) + ">";
        case Kind::Edges: {
            std::ostringstream os;
            for (size_t i = 0; i < edges_.size(); ++i) {
                if (i) os << ".";
                os << g.edge_name(edges_[i]);
            }
            return os.str();
        }
    }
    return "";
}

std::vector<Path> path_children(const Path& alpha, const DirectedGraph& g) {
    std::vector<Path> out;
    if (alpha.is_null()) {
        for (int v = 0; v < g.node_count(); ++v) out.push_back(Path::node(v));
        return out;
    }
    int t = alpha.terminus(g);
    for (int e : g.out_edges(t)) {
        if (alpha.is_node()) {
            out.push_back(Path::edges({e}));
        } else {
            auto seq = alpha.edge_seq();
            seq.push_back(e);
            out.push_back(Path::edges(std::move(seq)));
        }
    }
    return out;
}

}  // namespace rsg
