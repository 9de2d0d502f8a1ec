#ifndef RSG_CLASSES_HPP
#define RSG_CLASSES_HPP

#include <gmpxx.h>

#include <string>
#include <vector>

#include "rsg/clopen.hpp"

namespace rsg {

using Int = mpz_class;
using IntMat = std::vector<std::vector<Int>>;

IntMat identity_matrix(int n);
IntMat mat_mul(const IntMat& a, const IntMat& b);

// Smith normal form L*M*R = D with L, R unimodular and the diagonal
// invariant factors d1 | d2 | ... nonnegative.
struct SmithForm {
    IntMat left, right, diag;
    std::vector<Int> invariants() const;
    bool verify(const IntMat& m) const;  // recompute L*M*R and compare
};
SmithForm smith_normal_form(const IntMat& m);

// The abelian group of clopen-set classes over an irreducible graph,
// presented by one relation [v] = [w1] + ... + [wn] per node.
class ClassesGroup {
public:
    static ClassesGroup from_graph(GraphPtr core);

    // Same presentation restricted to an arbitrary node subset that is
    // successor-closed for the purposes at hand (used for obstruction
    // tests on graphs without a core).
    static ClassesGroup from_graph_nodes(GraphPtr g, const std::vector<int>& nodes);

    const GraphPtr& graph() const { return graph_; }
    const std::vector<int>& generator_nodes() const { return gen_nodes_; }
    const IntMat& relation_matrix() const { return relations_; }
    const SmithForm& smith() const { return smith_; }

    // d_i per Smith position: 0 = free Z factor, 1 = trivial, d>1 = torsion.
    const std::vector<Int>& invariant_factors() const { return invariants_; }

    bool is_trivial() const;
    std::string describe() const;  // "Z/2", "Z + Z/3", "0", ...

    // Class of a formal sum of node generators (counts indexed like
    // generator_nodes()).
    std::vector<Int> reduce_vector(const std::vector<Int>& node_counts) const;

private:
    GraphPtr graph_;
    std::vector<int> gen_nodes_;       // node ids with a generator
    std::vector<int> gen_index_;       // node id -> generator position or -1
    IntMat relations_;
    SmithForm smith_;
    std::vector<Int> invariants_;

public:
    int generator_position(int node) const { return gen_index_.at(node); }
};

// An element of the classes group in Smith coordinates, torsion entries
// reduced into [0, d_i).
struct ClassElement {
    std::vector<Int> coords;
    bool operator==(const ClassElement& o) const = default;
    bool is_zero() const;
    std::string to_string() const;
};

ClassElement class_add(const ClassElement& a, const ClassElement& b, const ClassesGroup& g);
ClassElement class_neg(const ClassElement& a, const ClassesGroup& g);

// Class of a nonempty clopen set: sum of node classes over its minimal
// code, refining paths into the generator node set first when needed.
ClassElement class_of(const ClopenSet& s, const ClassesGroup& g);

// Class of a terminus multiset given as node counts.
ClassElement class_of_counts(const std::vector<Int>& node_counts, const ClassesGroup& g);

}  // namespace rsg

#endif
