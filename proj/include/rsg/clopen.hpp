#ifndef RSG_CLOPEN_HPP
#define RSG_CLOPEN_HPP

#include <functional>
#include <optional>
#include <vector>

#include "rsg/path.hpp"

namespace rsg {

// A clopen subset of the subshift, kept as its canonical minimal code:
// pairwise disjoint cones, every complete sibling family merged into the
// parent, sorted.  Canonical form makes equality a plain comparison.
class ClopenSet {
public:
    ClopenSet() = default;
    ClopenSet(GraphPtr g, std::vector<Path> paths);

    static ClopenSet whole(GraphPtr g);                 // all of Sigma_Gamma
    static ClopenSet cone(GraphPtr g, const Path& a);   // single cone
    static ClopenSet empty(GraphPtr g);

    const GraphPtr& graph() const { return graph_; }
    const std::vector<Path>& paths() const { return paths_; }
    bool is_empty() const { return paths_.empty(); }
    bool is_whole() const;

    bool contains_cone(const Path& a) const;
    bool contains(const ClopenSet& other) const;

    ClopenSet unite(const ClopenSet& other) const;
    ClopenSet intersect(const ClopenSet& other) const;
    ClopenSet subtract(const ClopenSet& other) const;

    bool operator==(const ClopenSet& o) const { return paths_ == o.paths_; }

    std::string to_string() const;

private:
    GraphPtr graph_;
    std::vector<Path> paths_;
};

// A finite set of pairwise disjoint cones inside an ambient clopen set.
// Unlike ClopenSet it is not canonicalized: refinements matter.
struct Code {
    ClopenSet ambient;
    std::vector<Path> paths;

    bool valid() const;              // pairwise disjoint, contained in ambient
    bool complete() const;           // union equals ambient
    ClopenSet union_set() const;
};

// Coarsest code refining both (pre: same ambient clopen set).
Code common_refinement(const Code& a, const Code& b);

// Splits path at position i of the code into its one-edge children.
Code elementary_refinement(const Code& c, int i);

// The minimal complete code of a clopen set is its canonical path list.
Code minimal_code(const ClopenSet& s);

// Refine a code until every path's terminus satisfies pred; depth-bounded.
std::optional<Code> refine_until(const Code& c, const std::function<bool(const Path&)>& keep,
                                 int depth_limit);

}  // namespace rsg

#endif
