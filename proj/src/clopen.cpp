#include "rsg/clopen.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace rsg {

namespace {

// Drop paths whose cone lies inside another's, dedupe, merge complete
// sibling families to fixpoint, sort.
std::vector<Path> canonicalize(const GraphPtr& g, std::vector<Path> paths) {
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());

    auto absorb = [&]() {
        std::vector<Path> kept;
        for (const auto& p : paths) {
            bool inside = false;
            for (const auto& q : paths)
                if (!(q == p) && q.is_prefix_of(p, *g)) {
                    inside = true;
                    break;
                }
            if (!inside) kept.push_back(p);
        }
        paths = std::move(kept);
    };

    absorb();
    bool changed = true;
    while (changed) {
        changed = false;
        // group edge paths by parent, node paths under the null path
        std::map<Path, int> present;
        for (const auto& p : paths) present[p] = 1;

        for (const auto& p : paths) {
            Path parent;
            if (p.is_node()) {
                parent = Path::null();
            } else if (!p.is_null()) {
                const auto& seq = p.edge_seq();
                parent = seq.size() == 1 ? Path::node(g->origin(seq[0]))
                                         : Path::edges(std::vector<int>(seq.begin(), seq.end() - 1));
            } else {
                continue;
            }
            auto siblings = path_children(parent, *g);
            if (siblings.empty()) continue;
            bool all = std::all_of(siblings.begin(), siblings.end(),
                                   [&](const Path& s) { return present.count(s) > 0; });
            if (all) {
                std::vector<Path> next;
                for (const auto& q : paths)
                    if (std::find(siblings.begin(), siblings.end(), q) == siblings.end())
                        next.push_back(q);
                next.push_back(parent);
                paths = std::move(next);
                std::sort(paths.begin(), paths.end());
                changed = true;
                break;
            }
        }
    }
    std::sort(paths.begin(), paths.end());
    return paths;
}

}  // namespace

ClopenSet::ClopenSet(GraphPtr g, std::vector<Path> paths) : graph_(std::move(g)) {
    for (const auto& p : paths)
        if (!p.is_null() && !p.valid(*graph_)) throw Error("invalid path in clopen set");
    paths_ = canonicalize(graph_, std::move(paths));
}

ClopenSet ClopenSet::whole(GraphPtr g) { return ClopenSet(std::move(g), {Path::null()}); }

ClopenSet ClopenSet::cone(GraphPtr g, const Path& a) { return ClopenSet(std::move(g), {a}); }

ClopenSet ClopenSet::empty(GraphPtr g) { return ClopenSet(std::move(g), {}); }

bool ClopenSet::is_whole() const { return paths_.size() == 1 && paths_[0].is_null(); }

bool ClopenSet::contains_cone(const Path& a) const {
    // canonical form: a cone is inside iff some listed path is its prefix
    for (const auto& p : paths_)
        if (p.is_prefix_of(a, *graph_)) return true;
    return false;
}

bool ClopenSet::contains(const ClopenSet& other) const {
    return std::all_of(other.paths_.begin(), other.paths_.end(),
                       [&](const Path& p) { return contains_cone(p); });
}

ClopenSet ClopenSet::unite(const ClopenSet& other) const {
    std::vector<Path> all = paths_;
    all.insert(all.end(), other.paths_.begin(), other.paths_.end());
    return ClopenSet(graph_, std::move(all));
}

ClopenSet ClopenSet::intersect(const ClopenSet& other) const {
    std::vector<Path> out;
    for (const auto& p : paths_)
        for (const auto& q : other.paths_) {
            if (p.is_prefix_of(q, *graph_))
                out.push_back(q);
            else if (q.is_prefix_of(p, *graph_))
                out.push_back(p);
        }
    return ClopenSet(graph_, std::move(out));
}

ClopenSet ClopenSet::subtract(const ClopenSet& other) const {
    std::vector<Path> out;
    std::vector<Path> work = paths_;
    while (!work.empty()) {
        Path p = work.back();
        work.pop_back();
        if (other.contains_cone(p)) continue;
        bool meets = false;
        for (const auto& q : other.paths_)
            if (p.comparable(q, *graph_)) {
                meets = true;
                break;
            }
        if (!meets) {
            out.push_back(p);
            continue;
        }
        for (auto& c : path_children(p, *graph_)) work.push_back(std::move(c));
    }
    return ClopenSet(graph_, std::move(out));
}

std::string ClopenSet::to_string() const {
    std::ostringstream os;
    os << "{";
    for (size_t i = 0; i < paths_.size(); ++i) {
        if (i) os << ", ";
        os << paths_[i].to_string(*graph_);
    }
    os << "}";
    return os.str();
}

bool Code::valid() const {
    const auto& g = *ambient.graph();
    for (size_t i = 0; i < paths.size(); ++i) {
        if (!paths[i].is_null() && !paths[i].valid(g)) return false;
        if (!ambient.contains_cone(paths[i])) return false;
        for (size_t j = i + 1; j < paths.size(); ++j)
            if (paths[i].comparable(paths[j], g)) return false;
    }
    return true;
}

ClopenSet Code::union_set() const { return ClopenSet(ambient.graph(), paths); }

bool Code::complete() const { return union_set() == ambient; }

Code common_refinement(const Code& a, const Code& b) {
    if (!(a.union_set() == b.union_set())) throw Error("common_refinement: ambient mismatch");
    const auto& g = *a.ambient.graph();
    Code out{a.ambient, {}};
    for (const auto& p : a.paths)
        for (const auto& q : b.paths) {
            if (p.is_prefix_of(q, g))
                out.paths.push_back(q);
            else if (q.is_prefix_of(p, g))
                out.paths.push_back(p);
        }
    std::sort(out.paths.begin(), out.paths.end());
    out.paths.erase(std::unique(out.paths.begin(), out.paths.end()), out.paths.end());
    return out;
}

Code elementary_refinement(const Code& c, int i) {
    Code out{c.ambient, {}};
    for (int j = 0; j < static_cast<int>(c.paths.size()); ++j) {
        if (j == i) {
            for (auto& ch : path_children(c.paths[j], *c.ambient.graph())) out.paths.push_back(ch);
        } else {
            out.paths.push_back(c.paths[j]);
        }
    }
    std::sort(out.paths.begin(), out.paths.end());
    return out;
}

Code minimal_code(const ClopenSet& s) { return Code{s, s.paths()}; }

std::optional<Code> refine_until(const Code& c, const std::function<bool(const Path&)>& keep,
                                 int depth_limit) {
    const auto& g = *c.ambient.graph();
    Code out{c.ambient, {}};
    std::vector<std::pair<Path, int>> work;
    for (const auto& p : c.paths) work.emplace_back(p, 0);
    while (!work.empty()) {
        auto [p, d] = work.back();
        work.pop_back();
        if (keep(p)) {
            out.paths.push_back(p);
            continue;
        }
        if (d >= depth_limit) return std::nullopt;
        for (auto& ch : path_children(p, g)) work.emplace_back(std::move(ch), d + 1);
    }
    std::sort(out.paths.begin(), out.paths.end());
    return out;
}

}  // namespace rsg
