#include "rsg/classes.hpp"

#include <algorithm>
#include <sstream>

namespace rsg {

IntMat identity_matrix(int n) {
    IntMat m(n, std::vector<Int>(n, 0));
    for (int i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

IntMat mat_mul(const IntMat& a, const IntMat& b) {
    size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    IntMat c(n, std::vector<Int>(m, 0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < k; ++j) {
            if (a[i][j] == 0) continue;
            for (size_t l = 0; l < m; ++l) c[i][l] += a[i][j] * b[j][l];
        }
    return c;
}

std::vector<Int> SmithForm::invariants() const {
    std::vector<Int> out;
    size_t n = std::min(diag.size(), diag.empty() ? 0 : diag[0].size());
    for (size_t i = 0; i < n; ++i) out.push_back(diag[i][i]);
    return out;
}

bool SmithForm::verify(const IntMat& m) const { return mat_mul(mat_mul(left, m), right) == diag; }

// Elementary row/column reduction with pivoting on the smallest nonzero
// absolute value; invariant factors fixed up by the divisibility pass.
SmithForm smith_normal_form(const IntMat& m) {
    int rows = static_cast<int>(m.size());
    int cols = rows ? static_cast<int>(m[0].size()) : 0;
    SmithForm f;
    f.diag = m;
    f.left = identity_matrix(rows);
    f.right = identity_matrix(cols);
    IntMat& d = f.diag;

    auto row_op = [&](int dst, int src, const Int& q) {  // row dst -= q*row src
        for (int j = 0; j < cols; ++j) d[dst][j] -= q * d[src][j];
        for (int j = 0; j < rows; ++j) f.left[dst][j] -= q * f.left[src][j];
    };
    auto col_op = [&](int dst, int src, const Int& q) {
        for (int i = 0; i < rows; ++i) d[i][dst] -= q * d[i][src];
        for (int i = 0; i < cols; ++i) f.right[i][dst] -= q * f.right[i][src];
    };
    auto swap_rows = [&](int a, int b) {
        std::swap(d[a], d[b]);
        std::swap(f.left[a], f.left[b]);
    };
    auto swap_cols = [&](int a, int b) {
        for (int i = 0; i < rows; ++i) std::swap(d[i][a], d[i][b]);
        for (int i = 0; i < cols; ++i) std::swap(f.right[i][a], f.right[i][b]);
    };
    auto negate_row = [&](int r) {
        for (int j = 0; j < cols; ++j) d[r][j] = -d[r][j];
        for (int j = 0; j < rows; ++j) f.left[r][j] = -f.left[r][j];
    };

    auto diagonalize = [&]() {
        int t = 0;
        while (t < rows && t < cols) {
            // pivot on the smallest nonzero absolute value in the block
            int pi = -1, pj = -1;
            for (int i = t; i < rows; ++i)
                for (int j = t; j < cols; ++j)
                    if (d[i][j] != 0 && (pi == -1 || abs(d[i][j]) < abs(d[pi][pj]))) {
                        pi = i;
                        pj = j;
                    }
            if (pi == -1) break;
            swap_rows(t, pi);
            swap_cols(t, pj);

            bool dirty = true;
            while (dirty) {
                dirty = false;
                for (int i = t + 1; i < rows; ++i) {
                    if (d[i][t] == 0) continue;
                    Int q = d[i][t] / d[t][t];
                    row_op(i, t, q);
                    if (d[i][t] != 0) {  // nonzero remainder is a smaller pivot
                        swap_rows(t, i);
                        dirty = true;
                    }
                }
                for (int j = t + 1; j < cols; ++j) {
                    if (d[t][j] == 0) continue;
                    Int q = d[t][j] / d[t][t];
                    col_op(j, t, q);
                    if (d[t][j] != 0) {
                        swap_cols(t, j);
                        dirty = true;
                    }
                }
            }
            if (d[t][t] < 0) negate_row(t);
            ++t;
        }
        return t;
    };

    int rank = diagonalize();

    // Enforce d1 | d2 | ...: fold column j into column i and run Euclid on
    // the 2x2 block, which replaces (d_i, d_j) by (gcd, lcm).
    auto fold = [&](int i, int j) {
        col_op(i, j, Int(-1));  // col i += col j
        while (d[i][j] != 0 || d[j][i] != 0) {
            if (d[i][i] == 0) {
                if (d[j][i] != 0)
                    swap_rows(i, j);
                else
                    swap_cols(i, j);
                continue;
            }
            if (d[j][i] != 0) {
                Int q = d[j][i] / d[i][i];
                row_op(j, i, q);
                if (d[j][i] != 0) swap_rows(i, j);
                continue;
            }
            Int q = d[i][j] / d[i][i];
            col_op(j, i, q);
            if (d[i][j] != 0) swap_cols(i, j);
        }
        if (d[i][i] < 0) negate_row(i);
        if (d[j][j] < 0) negate_row(j);
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (int i = 0; i + 1 < rank; ++i)
            for (int j = i + 1; j < rank; ++j)
                if (d[j][j] % d[i][i] != 0) {
                    fold(i, j);
                    changed = true;
                }
    }
    return f;
}

ClassesGroup ClassesGroup::from_graph(GraphPtr core) {
    if (!irreducible(*core)) throw Error("classes group requires an irreducible graph");
    std::vector<int> nodes(core->node_count());
    for (int i = 0; i < core->node_count(); ++i) nodes[i] = i;
    return from_graph_nodes(std::move(core), nodes);
}

ClassesGroup ClassesGroup::from_graph_nodes(GraphPtr g, const std::vector<int>& nodes) {
    ClassesGroup c;
    c.graph_ = std::move(g);
    c.gen_nodes_ = nodes;
    std::sort(c.gen_nodes_.begin(), c.gen_nodes_.end());
    c.gen_index_.assign(c.graph_->node_count(), -1);
    for (size_t i = 0; i < c.gen_nodes_.size(); ++i) c.gen_index_[c.gen_nodes_[i]] = static_cast<int>(i);

    int n = static_cast<int>(c.gen_nodes_.size());
    c.relations_.assign(n, std::vector<Int>(n, 0));
    for (int i = 0; i < n; ++i) {
        int v = c.gen_nodes_[i];
        c.relations_[i][i] += 1;
        for (int e : c.graph_->out_edges(v)) {
            int w = c.graph_->terminus(e);
            int j = c.gen_index_[w];
            if (j == -1) throw Error("relation leaves the generator node set");
            c.relations_[i][j] -= 1;
        }
    }
    c.smith_ = smith_normal_form(c.relations_);
    c.invariants_ = c.smith_.invariants();
    return c;
}

bool ClassesGroup::is_trivial() const {
    for (const auto& d : invariants_)
        if (d != 1) return false;
    return invariants_.size() == gen_nodes_.size();
}

std::string ClassesGroup::describe() const {
    std::vector<std::string> parts;
    size_t n = gen_nodes_.size();
    for (size_t i = 0; i < n; ++i) {
        Int d = i < invariants_.size() ? invariants_[i] : Int(0);
        if (d == 1) continue;
        if (d == 0)
            parts.push_back("Z");
        else
            parts.push_back("Z/" + d.get_str());
    }
    if (parts.empty()) return "0";
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += " + ";
        out += parts[i];
    }
    return out;
}

// Quotient coordinates: relations are rows of M, so the group is
// Z^n / rowspace(M); with L M R = D the map x -> R^T x diagonalizes it.
std::vector<Int> ClassesGroup::reduce_vector(const std::vector<Int>& node_counts) const {
    size_t n = gen_nodes_.size();
    if (node_counts.size() != n) throw Error("class vector has wrong length");
    std::vector<Int> y(n, 0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) y[i] += smith_.right[j][i] * node_counts[j];
    for (size_t i = 0; i < n; ++i) {
        Int d = i < invariants_.size() ? invariants_[i] : Int(0);
        if (d > 0) {
            y[i] %= d;
            if (y[i] < 0) y[i] += d;
        }
    }
    return y;
}

bool ClassElement::is_zero() const {
    return std::all_of(coords.begin(), coords.end(), [](const Int& c) { return c == 0; });
}

std::string ClassElement::to_string() const {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < coords.size(); ++i) {
        if (i) os << ",";
        os << coords[i].get_str();
    }
    os << ")";
    return os.str();
}

ClassElement class_add(const ClassElement& a, const ClassElement& b, const ClassesGroup& g) {
    std::vector<Int> sum(a.coords.size());
    for (size_t i = 0; i < sum.size(); ++i) sum[i] = a.coords[i] + b.coords[i];
    // re-reduce torsion coordinates
    const auto& inv = g.invariant_factors();
    for (size_t i = 0; i < sum.size(); ++i) {
        Int d = i < inv.size() ? inv[i] : Int(0);
        if (d > 0) {
            sum[i] %= d;
            if (sum[i] < 0) sum[i] += d;
        }
    }
    return ClassElement{std::move(sum)};
}

ClassElement class_neg(const ClassElement& a, const ClassesGroup& g) {
    std::vector<Int> out(a.coords.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = -a.coords[i];
    const auto& inv = g.invariant_factors();
    for (size_t i = 0; i < out.size(); ++i) {
        Int d = i < inv.size() ? inv[i] : Int(0);
        if (d > 0) {
            out[i] %= d;
            if (out[i] < 0) out[i] += d;
        }
    }
    return ClassElement{std::move(out)};
}

ClassElement class_of_counts(const std::vector<Int>& node_counts, const ClassesGroup& g) {
    return ClassElement{g.reduce_vector(node_counts)};
}

ClassElement class_of(const ClopenSet& s, const ClassesGroup& g) {
    if (s.is_empty()) throw Error("class_of: empty set");
    const auto& gr = *s.graph();
    std::vector<Int> counts(g.generator_nodes().size(), 0);
    // refine each minimal-code path until its terminus is a generator node
    auto code = refine_until(minimal_code(s),
                             [&](const Path& p) {
                                 int t = p.terminus(gr);
                                 return t >= 0 && g.generator_position(t) != -1;
                             },
                             gr.node_count() + 2);
    if (!code) throw Error("class_of: clopen set does not push into the generator nodes");
    for (const auto& p : code->paths) counts[g.generator_position(p.terminus(gr))] += 1;
    return class_of_counts(counts, g);
}

}  // namespace rsg
