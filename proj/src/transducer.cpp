#include "rsg/transducer.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace rsg {

namespace {

Path empty_out_at(int node) { return Path::node(node); }

// local edge position of e among out_edges(v)
int edge_slot(const DirectedGraph& g, int v, int e) {
    const auto& outs = g.out_edges(v);
    for (size_t i = 0; i < outs.size(); ++i)
        if (outs[i] == e) return static_cast<int>(i);
    throw Error("edge does not leave the expected node");
}

}  // namespace

RationalMap::RationalMap(GraphPtr g, ClopenSet domain, std::vector<InitialEntry> initial,
                         std::vector<MachineState> states)
    : graph_(std::move(g)),
      domain_(std::move(domain)),
      initial_(std::move(initial)),
      states_(std::move(states)) {
    validate();
}

void RationalMap::validate() const {
    const auto& g = *graph_;
    for (const auto& s : states_) {
        if (s.dom_node < 0 || s.dom_node >= g.node_count()) throw Error("bad state domain node");
        if (s.out_node < 0 || s.out_node >= g.node_count()) throw Error("bad state output node");
        const auto& outs = g.out_edges(s.dom_node);
        if (s.trans.size() != outs.size()) throw Error("state transition count mismatch");
        for (size_t i = 0; i < outs.size(); ++i) {
            const auto& t = s.trans[i];
            if (t.next < 0 || t.next >= static_cast<int>(states_.size()))
                throw Error("transition target out of range");
            if (t.out.is_null() || !t.out.valid(g)) throw Error("invalid transition output");
            if (t.out.origin(g) != s.out_node) throw Error("transition output starts off-position");
            if (states_[t.next].out_node != t.out.terminus(g))
                throw Error("transition output ends off the next state's position");
            if (states_[t.next].dom_node != g.terminus(outs[i]))
                throw Error("transition target reads the wrong node");
        }
    }
    std::vector<Path> cones;
    for (const auto& e : initial_) {
        if (e.state < 0 || e.state >= static_cast<int>(states_.size()))
            throw Error("initial state out of range");
        if (e.cone.is_null() || !e.cone.valid(g)) throw Error("invalid initial cone");
        if (e.out.is_null() || !e.out.valid(g)) throw Error("invalid initial output");
        if (e.out.terminus(g) != states_[e.state].out_node)
            throw Error("initial output ends off the state's position");
        if (e.cone.terminus(g) != states_[e.state].dom_node)
            throw Error("initial cone ends off the state's domain node");
        cones.push_back(e.cone);
    }
    Code code{domain_, cones};
    if (!code.valid() || !code.complete())
        throw Error("initial cones must form a complete code of the domain");
}

std::string RationalMap::to_string() const {
    const auto& g = *graph_;
    std::ostringstream os;
    os << "domain " << domain_.to_string() << "\n";
    for (const auto& e : initial_)
        os << "  " << e.cone.to_string(g) << " -> " << e.out.to_string(g) << " q" << e.state << "\n";
    for (size_t q = 0; q < states_.size(); ++q) {
        os << "q" << q << " [" << g.node_name(states_[q].dom_node) << "->"
           << g.node_name(states_[q].out_node) << "]:";
        const auto& outs = g.out_edges(states_[q].dom_node);
        for (size_t i = 0; i < outs.size(); ++i)
            os << " " << g.edge_name(outs[i]) << "/" << states_[q].trans[i].out.to_string(g) << ">q"
               << states_[q].trans[i].next;
        os << "\n";
    }
    return os.str();
}

RationalMap identity_map(GraphPtr g, const ClopenSet& domain) {
    std::vector<MachineState> states(g->node_count());
    for (int v = 0; v < g->node_count(); ++v) {
        states[v].dom_node = v;
        states[v].out_node = v;
        for (int e : g->out_edges(v)) states[v].trans.push_back({Path::edges({e}), g->terminus(e)});
    }
    std::vector<InitialEntry> init;
    for (const auto& p : domain.paths()) {
        if (p.is_null()) {
            for (int v = 0; v < g->node_count(); ++v)
                init.push_back({Path::node(v), Path::node(v), v});
        } else {
            init.push_back({p, p, p.terminus(*g)});
        }
    }
    return RationalMap(g, domain, std::move(init), std::move(states));
}

// ---------------------------------------------------------------------------
// normalize

namespace {

// Future-output common prefixes per state, computed as an increasing
// fixpoint; diverges only for degenerate (eventually constant) states.
std::vector<Path> future_gcps(const RationalMap& m, int fuel) {
    const auto& g = *m.graph();
    int n = static_cast<int>(m.states().size());
    std::vector<Path> gcp(n);
    for (int q = 0; q < n; ++q) gcp[q] = empty_out_at(m.states()[q].out_node);
    for (int round = 0; round < fuel; ++round) {
        std::vector<Path> next(n);
        bool changed = false;
        for (int q = 0; q < n; ++q) {
            const auto& st = m.states()[q];
            bool first = true;
            Path acc;
            for (const auto& t : st.trans) {
                Path ext = t.out.concat(gcp[t.next], g);
                acc = first ? ext : Path::common_prefix(acc, ext, g);
                first = false;
            }
            if (first) acc = gcp[q];
            next[q] = acc;
            if (!(acc == gcp[q])) changed = true;
        }
        gcp = std::move(next);
        if (!changed) return gcp;
    }
    throw BudgetError("normalize: future-output prefixes keep growing (degenerate state?)");
}

std::vector<char> reachable_states(const RationalMap& m) {
    std::vector<char> seen(m.states().size(), 0);
    std::deque<int> work;
    for (const auto& e : m.initial())
        if (!seen[e.state]) {
            seen[e.state] = 1;
            work.push_back(e.state);
        }
    while (!work.empty()) {
        int q = work.front();
        work.pop_front();
        for (const auto& t : m.states()[q].trans)
            if (!seen[t.next]) {
                seen[t.next] = 1;
                work.push_back(t.next);
            }
    }
    return seen;
}

// Coarsest bisimulation on reduced states = extensional equality.
std::vector<int> state_classes(const std::vector<MachineState>& states) {
    int n = static_cast<int>(states.size());
    std::vector<int> cls(n);
    {
        std::map<std::pair<int, int>, int> ids;
        for (int q = 0; q < n; ++q) {
            auto key = std::make_pair(states[q].dom_node, states[q].out_node);
            cls[q] = ids.emplace(key, static_cast<int>(ids.size())).first->second;
        }
    }
    for (;;) {
        std::map<std::vector<int>, int> sig_ids;
        std::vector<int> next(n);
        for (int q = 0; q < n; ++q) {
            std::vector<int> sig{cls[q]};
            for (const auto& t : states[q].trans) {
                sig.push_back(cls[t.next]);
                sig.push_back(t.out.is_node() ? -1 : t.out.length());
                if (!t.out.is_node())
                    for (int e : t.out.edge_seq()) sig.push_back(e);
                sig.push_back(-7);
            }
            next[q] = sig_ids.emplace(std::move(sig), static_cast<int>(sig_ids.size())).first->second;
        }
        if (next == cls) return cls;
        cls = std::move(next);
    }
}

}  // namespace

RationalMap normalize(const RationalMap& m, int fuel) {
    const auto& g = *m.graph();
    auto gcp = future_gcps(m, fuel);

    std::vector<MachineState> states = m.states();
    for (size_t q = 0; q < states.size(); ++q) {
        MachineState& st = states[q];
        st.out_node = gcp[q].terminus(g);
        for (auto& t : st.trans) {
            Path full = t.out.concat(gcp[t.next], g);
            t.out = full.strip_prefix(gcp[q], g);
        }
    }
    std::vector<InitialEntry> init = m.initial();
    for (auto& e : init) e.out = e.out.concat(gcp[e.state], g);

    RationalMap pushed(m.graph(), m.domain(), std::move(init), std::move(states));

    auto seen = reachable_states(pushed);
    auto cls = state_classes(pushed.states());

    std::vector<int> class_rep;  // class id -> new index
    std::map<int, int> class_to_new;
    std::vector<int> new_id(pushed.states().size(), -1);
    std::vector<MachineState> out_states;
    for (size_t q = 0; q < pushed.states().size(); ++q) {
        if (!seen[q]) continue;
        auto it = class_to_new.find(cls[q]);
        if (it == class_to_new.end()) {
            it = class_to_new.emplace(cls[q], static_cast<int>(out_states.size())).first;
            out_states.push_back(pushed.states()[q]);
        }
        new_id[q] = it->second;
    }
    for (auto& st : out_states)
        for (auto& t : st.trans) t.next = new_id[t.next];
    std::vector<InitialEntry> out_init = pushed.initial();
    for (auto& e : out_init) e.state = new_id[e.state];
    std::sort(out_init.begin(), out_init.end(),
              [](const InitialEntry& a, const InitialEntry& b) { return a.cone < b.cone; });
    (void)class_rep;
    return RationalMap(m.graph(), m.domain(), std::move(out_init), std::move(out_states));
}

// ---------------------------------------------------------------------------
// evaluation

EvalResult evaluate(const RationalMap& m, const Path& input, int fuel) {
    const auto& g = *m.graph();

    // deep case: the input extends a unique initial cone
    for (const auto& e : m.initial()) {
        if (!e.cone.is_prefix_of(input, g)) continue;
        Path rest = input.strip_prefix(e.cone, g);
        Path out = e.out;
        int q = e.state;
        if (!rest.is_node()) {
            for (int edge : rest.edge_seq()) {
                if (fuel-- <= 0) throw BudgetError("evaluate: fuel exhausted");
                const auto& t = m.states()[q].trans[edge_slot(g, m.states()[q].dom_node, edge)];
                out = out.concat(t.out, g);
                q = t.next;
            }
        }
        return {out, q};
    }

    // shallow case: the initial cones below the input must cover it
    std::vector<Path> covered;
    bool first = true;
    Path acc;
    for (const auto& e : m.initial()) {
        if (!input.is_prefix_of(e.cone, g)) continue;
        covered.push_back(e.cone);
        acc = first ? e.out : Path::common_prefix(acc, e.out, g);
        first = false;
    }
    if (first || !(ClopenSet(m.graph(), covered) == ClopenSet(m.graph(), {input})))
        throw Error("evaluate: input outside the domain");
    return {acc, std::nullopt};
}

LocalAction local_action(const RationalMap& m, const Path& alpha) {
    const auto& g = *m.graph();
    if (!m.domain().contains_cone(alpha)) throw Error("local_action: cone not in the domain");

    EvalResult ev = evaluate(m, alpha);
    if (ev.state) {
        int q = *ev.state;
        int tnode = m.states()[q].dom_node;
        std::vector<InitialEntry> init{{Path::node(tnode), empty_out_at(m.states()[q].out_node), q}};
        RationalMap r(m.graph(), ClopenSet::cone(m.graph(), Path::node(tnode)), std::move(init),
                      m.states());
        return {ev.out, normalize(r)};
    }

    // shallow: assemble the restriction from the entries below alpha
    std::vector<InitialEntry> init;
    for (const auto& e : m.initial()) {
        if (!alpha.is_prefix_of(e.cone, g)) continue;
        init.push_back({e.cone.strip_prefix(alpha, g), e.out.strip_prefix(ev.out, g), e.state});
    }
    ClopenSet dom = alpha.is_null() ? ClopenSet::whole(m.graph())
                                    : ClopenSet::cone(m.graph(), Path::node(alpha.terminus(g)));
    RationalMap r(m.graph(), dom, std::move(init), m.states());
    return {ev.out, normalize(r)};
}

RationalMap restrict_to_clopen(const RationalMap& m, const ClopenSet& sub) {
    const auto& g = *m.graph();
    if (!m.domain().contains(sub)) throw Error("restrict_to_clopen: not a subset of the domain");
    std::vector<InitialEntry> init;
    for (const auto& p : sub.paths()) {
        bool deep = false;
        for (const auto& e : m.initial())
            if (e.cone.is_prefix_of(p, g)) deep = true;
        if (deep) {
            auto evr = evaluate(m, p);
            init.push_back({p, evr.out, *evr.state});
        } else {
            for (const auto& e : m.initial())
                if (p.is_prefix_of(e.cone, g)) init.push_back(e);
        }
    }
    return normalize(RationalMap(m.graph(), sub, std::move(init), m.states()));
}

// ---------------------------------------------------------------------------
// equality

namespace {

// Zero-lag product walk between reduced machines; returns a distinguishing
// word on failure.
std::optional<Path> walk_states(const RationalMap& a, int qa, const RationalMap& b, int qb) {
    const auto& g = *a.graph();
    if (a.states()[qa].dom_node != b.states()[qb].dom_node)
        return Path::node(a.states()[qa].dom_node);
    std::set<std::pair<int, int>> seen;
    std::deque<std::tuple<int, int, Path>> work;
    work.emplace_back(qa, qb, Path::node(a.states()[qa].dom_node));
    seen.insert({qa, qb});
    while (!work.empty()) {
        auto [x, y, pref] = work.front();
        work.pop_front();
        const auto& sx = a.states()[x];
        const auto& sy = b.states()[y];
        if (sx.out_node != sy.out_node || sx.dom_node != sy.dom_node) return pref;
        const auto& outs = g.out_edges(sx.dom_node);
        for (size_t i = 0; i < outs.size(); ++i) {
            Path word = pref.concat(Path::edges({outs[i]}), g);
            if (!(sx.trans[i].out == sy.trans[i].out)) return word;
            auto key = std::make_pair(sx.trans[i].next, sy.trans[i].next);
            if (seen.insert(key).second) work.emplace_back(key.first, key.second, word);
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<Path> distinguishing_word(const RationalMap& a, int qa, const RationalMap& b,
                                        int qb) {
    return walk_states(a, qa, b, qb);
}

bool states_equal(const RationalMap& a, int qa, const RationalMap& b, int qb) {
    return !walk_states(a, qa, b, qb).has_value();
}

bool machine_equal(const RationalMap& a0, const RationalMap& b0) {
    if (!(a0.domain() == b0.domain())) return false;
    RationalMap a = normalize(a0), b = normalize(b0);
    std::vector<Path> cones;
    for (const auto& e : a.initial()) cones.push_back(e.cone);
    Code ca{a.domain(), cones};
    cones.clear();
    for (const auto& e : b.initial()) cones.push_back(e.cone);
    Code cb{b.domain(), cones};
    for (const auto& p : common_refinement(ca, cb).paths) {
        auto ea = evaluate(a, p), eb = evaluate(b, p);
        if (!(ea.out == eb.out)) return false;
        if (!states_equal(a, *ea.state, b, *eb.state)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// composition

RationalMap compose(const RationalMap& f0, const RationalMap& g0, int state_budget) {
    RationalMap f = normalize(f0), m = normalize(g0);
    const auto& g = *f.graph();

    auto feed = [&](int qf, const Path& word, Path& emitted) -> int {
        if (word.is_node()) return qf;
        for (int edge : word.edge_seq()) {
            const auto& t = f.states()[qf].trans[edge_slot(g, f.states()[qf].dom_node, edge)];
            emitted = emitted.concat(t.out, g);
            qf = t.next;
        }
        return qf;
    };

    struct Pending {
        Path cone;  // refined input cone of the inner map
        Path gout;  // its forced output
        int qg;
    };
    std::deque<Pending> work;
    for (const auto& e : m.initial()) work.push_back({e.cone, e.out, e.state});

    std::map<std::pair<int, int>, int> prod_ids;
    std::vector<MachineState> prod_states;
    std::vector<std::pair<int, int>> prod_pairs;
    auto prod_id = [&](int qf, int qg) {
        auto [it, fresh] =
            prod_ids.emplace(std::make_pair(qf, qg), static_cast<int>(prod_ids.size()));
        if (fresh) {
            prod_states.emplace_back();
            prod_pairs.emplace_back(qf, qg);
        }
        return it->second;
    };

    std::vector<InitialEntry> init;
    int spent = 0;
    while (!work.empty()) {
        if (++spent > state_budget) throw BudgetError("compose: initial refinement budget exceeded");
        Pending p = work.front();
        work.pop_front();

        const InitialEntry* deep = nullptr;
        bool shallow = false;
        for (const auto& fe : f.initial()) {
            if (fe.cone.is_prefix_of(p.gout, g))
                deep = &fe;
            else if (p.gout.is_prefix_of(fe.cone, g))
                shallow = true;
        }
        if (deep) {
            Path emitted = deep->out;
            int qf = feed(deep->state, p.gout.strip_prefix(deep->cone, g), emitted);
            init.push_back({p.cone, emitted, prod_id(qf, p.qg)});
            continue;
        }
        if (!shallow) throw Error("compose: image of the inner map leaves the outer domain");
        const auto& outs = g.out_edges(m.states()[p.qg].dom_node);
        for (size_t i = 0; i < outs.size(); ++i) {
            const auto& t = m.states()[p.qg].trans[i];
            work.push_back(
                {p.cone.concat(Path::edges({outs[i]}), g), p.gout.concat(t.out, g), t.next});
        }
    }

    for (size_t id = 0; id < prod_states.size(); ++id) {
        if (static_cast<int>(prod_states.size()) > state_budget)
            throw BudgetError("compose: product state budget exceeded");
        auto [qf, qg] = prod_pairs[id];
        MachineState st;
        st.dom_node = m.states()[qg].dom_node;
        st.out_node = f.states()[qf].out_node;
        for (const auto& t : m.states()[qg].trans) {
            Path emitted = empty_out_at(f.states()[qf].out_node);
            int qf2 = feed(qf, t.out, emitted);
            st.trans.push_back({emitted, prod_id(qf2, t.next)});
        }
        prod_states[id] = std::move(st);
    }

    return normalize(RationalMap(f.graph(), m.domain(), std::move(init), std::move(prod_states)));
}

// ---------------------------------------------------------------------------
// injectivity

namespace {

// Relative output offset between two runs over a common comparable output.
struct Offset {
    int ahead = 0;  // -1: run1 behind, 0: even, +1: run1 ahead
    Path diff;      // ahead side's surplus; node path marks the position when even
    auto operator<=>(const Offset& o) const = default;
};

std::optional<Offset> initial_offset(const Path& o1, const Path& o2, const DirectedGraph& g) {
    if (o1.is_prefix_of(o2, g)) {
        Path d = o2.strip_prefix(o1, g);
        return Offset{d.length() > 0 ? -1 : 0, d};
    }
    if (o2.is_prefix_of(o1, g)) {
        Path d = o1.strip_prefix(o2, g);
        return Offset{d.length() > 0 ? 1 : 0, d};
    }
    return std::nullopt;
}

// Offset after the given side emits w.
std::optional<Offset> advance_offset(const Offset& cur, int side, const Path& w,
                                     const DirectedGraph& g) {
    int rel = side == 1 ? cur.ahead : -cur.ahead;
    if (rel >= 0) {
        Path d = cur.diff.concat(w, g);
        return Offset{d.length() > 0 ? (side == 1 ? 1 : -1) : 0, d};
    }
    if (w.is_prefix_of(cur.diff, g)) {
        Path rest = cur.diff.strip_prefix(w, g);
        return Offset{rest.length() > 0 ? cur.ahead : 0, rest};
    }
    if (cur.diff.is_prefix_of(w, g)) {
        Path rest = w.strip_prefix(cur.diff, g);
        return Offset{rest.length() > 0 ? -cur.ahead : 0, rest};
    }
    return std::nullopt;
}

}  // namespace

InjectivityReport check_injective(const RationalMap& m0, int config_budget) {
    RationalMap m = normalize(m0);
    const auto& g = *m.graph();

    struct Config {
        int q1, q2;
        Offset off;
        auto operator<=>(const Config& o) const = default;
    };

    int maxout = 1;
    for (const auto& st : m.states())
        for (const auto& t : st.trans) maxout = std::max(maxout, t.out.length());
    for (const auto& e : m.initial()) maxout = std::max(maxout, e.out.length());
    const int lag_bound = 2 * maxout + 2;

    std::deque<Config> work;
    std::set<Config> seen;
    bool truncated = false;
    auto push = [&](const Config& c) {
        if (c.off.diff.length() > lag_bound) {
            truncated = true;
            return false;
        }
        if (seen.insert(c).second) work.push_back(c);
        return true;
    };

    for (const auto& e1 : m.initial())
        for (const auto& e2 : m.initial()) {
            if (e1.cone == e2.cone) continue;
            auto off = initial_offset(e1.out, e2.out, g);
            if (off) push({e1.state, e2.state, *off});
        }
    auto reach = reachable_states(m);
    for (size_t q = 0; q < m.states().size(); ++q) {
        if (!reach[q]) continue;
        const auto& st = m.states()[q];
        for (size_t i = 0; i < st.trans.size(); ++i)
            for (size_t j = 0; j < st.trans.size(); ++j) {
                if (i == j) continue;
                auto off = initial_offset(st.trans[i].out, st.trans[j].out, g);
                if (off) push({static_cast<int>(st.trans[i].next), st.trans[j].next, *off});
            }
    }

    std::map<Config, std::vector<std::pair<Config, int>>> succ;
    std::vector<Config> order;
    while (!work.empty()) {
        if (static_cast<int>(seen.size()) > config_budget)
            return {Verdict::Inconclusive, "config budget exceeded"};
        Config c = work.front();
        work.pop_front();
        order.push_back(c);
        auto step = [&](int side) {
            int q = side == 1 ? c.q1 : c.q2;
            for (const auto& t : m.states()[q].trans) {
                auto off = advance_offset(c.off, side, t.out, g);
                if (!off) continue;
                Config nxt{side == 1 ? t.next : c.q1, side == 1 ? c.q2 : t.next, *off};
                if (nxt.off.diff.length() > lag_bound) {
                    truncated = true;
                    continue;
                }
                succ[c].emplace_back(nxt, side);
                push(nxt);
            }
        };
        // fair scheduling: advance the behind side, either side when even
        if (c.off.ahead <= 0) step(1);
        if (c.off.ahead >= 0) step(2);
    }

    // a collision is a reachable SCC whose internal edges advance both runs
    std::map<Config, int> idx;
    for (size_t i = 0; i < order.size(); ++i) idx[order[i]] = static_cast<int>(i);
    int n = static_cast<int>(order.size());
    std::vector<int> num(n, -1), low(n, 0), comp(n, -1), stk_pos(n, -1);
    std::vector<int> stk;
    int counter = 0, ncomp = 0;
    std::function<void(int)> dfs = [&](int v) {
        num[v] = low[v] = counter++;
        stk_pos[v] = static_cast<int>(stk.size());
        stk.push_back(v);
        for (const auto& [s, side] : succ[order[v]]) {
            int w = idx[s];
            if (num[w] == -1) {
                dfs(w);
                low[v] = std::min(low[v], low[w]);
            } else if (stk_pos[w] != -1) {
                low[v] = std::min(low[v], num[w]);
            }
        }
        if (low[v] == num[v]) {
            const int limit = stk_pos[v];
            while (static_cast<int>(stk.size()) > limit) {
                comp[stk.back()] = ncomp;
                stk_pos[stk.back()] = -1;
                stk.pop_back();
            }
            ++ncomp;
        }
    };
    for (int v = 0; v < n; ++v)
        if (num[v] == -1) dfs(v);

    std::vector<char> has1(ncomp, 0), has2(ncomp, 0);
    for (int v = 0; v < n; ++v)
        for (const auto& [s, side] : succ[order[v]])
            if (comp[v] == comp[idx[s]]) (side == 1 ? has1 : has2)[comp[v]] = 1;
    for (int c = 0; c < ncomp; ++c)
        if (has1[c] && has2[c])
            return {Verdict::Refuted, "two distinct inputs share an output (looping run pair)"};

    if (truncated) return {Verdict::Inconclusive, "lag bound reached"};
    return {Verdict::Certified, ""};
}

// ---------------------------------------------------------------------------
// image

namespace {

ClopenSet prepend(const Path& prefix, const ClopenSet& s, const GraphPtr& gp) {
    std::vector<Path> out;
    for (const auto& p : s.paths()) out.push_back(p.is_null() ? prefix : prefix.concat(p, *gp));
    return ClopenSet(gp, std::move(out));
}

}  // namespace

ClopenSet image(const RationalMap& m0, int fuel) {
    RationalMap m = normalize(m0);
    const auto& gp = m.graph();
    int n = static_cast<int>(m.states().size());
    std::vector<ClopenSet> x(n);
    for (int q = 0; q < n; ++q) x[q] = ClopenSet::cone(gp, Path::node(m.states()[q].out_node));
    for (int round = 0; round < fuel; ++round) {
        std::vector<ClopenSet> nxt(n);
        bool changed = false;
        for (int q = 0; q < n; ++q) {
            ClopenSet acc = ClopenSet::empty(gp);
            for (const auto& t : m.states()[q].trans) acc = acc.unite(prepend(t.out, x[t.next], gp));
            nxt[q] = acc;
            if (!(acc == x[q])) changed = true;
        }
        x = std::move(nxt);
        if (!changed) {
            ClopenSet im = ClopenSet::empty(gp);
            for (const auto& e : m.initial()) im = im.unite(prepend(e.out, x[e.state], gp));
            return im;
        }
    }
    throw BudgetError("image: no clopen fixpoint within fuel (image may not be clopen)");
}

// ---------------------------------------------------------------------------
// inversion

namespace {

struct Preimage {
    std::vector<Path> cones;
    Path gcp;  // null when empty
};

Preimage preimage_of(const RationalMap& m, const Path& beta, int fuel) {
    const auto& g = *m.graph();
    Preimage out;
    struct Item {
        Path cone, emitted;
        int q;
    };
    std::deque<Item> work;
    for (const auto& e : m.initial()) work.push_back({e.cone, e.out, e.state});
    int steps = 0;
    bool first = true;
    while (!work.empty()) {
        if (++steps > fuel) throw BudgetError("invert: preimage search fuel exhausted");
        Item it = work.front();
        work.pop_front();
        if (beta.is_prefix_of(it.emitted, g)) {
            out.gcp = first ? it.cone : Path::common_prefix(out.gcp, it.cone, g);
            first = false;
            out.cones.push_back(std::move(it.cone));
            continue;
        }
        if (!it.emitted.is_prefix_of(beta, g)) continue;
        const auto& st = m.states()[it.q];
        const auto& outs = g.out_edges(st.dom_node);
        for (size_t i = 0; i < outs.size(); ++i)
            work.push_back({it.cone.concat(Path::edges({outs[i]}), g),
                            it.emitted.concat(st.trans[i].out, g), st.trans[i].next});
    }
    return out;
}

}  // namespace

RationalMap invert(const RationalMap& m0, int budget) {
    RationalMap m = normalize(m0);
    const auto& gp = m.graph();
    const auto& g = *gp;

    auto inj = check_injective(m, budget);
    if (inj.verdict == Verdict::Refuted) throw Error("invert: map is not injective: " + inj.witness);

    ClopenSet im = image(m, budget);

    std::map<Path, Path> obar_cache;
    auto obar = [&](const Path& beta) -> Path {
        auto it = obar_cache.find(beta);
        if (it != obar_cache.end()) return it->second;
        auto pre = preimage_of(m, beta, budget);
        if (pre.cones.empty()) throw Error("invert: cone outside the image");
        obar_cache.emplace(beta, pre.gcp);
        return pre.gcp;
    };

    const int state_cap = std::max(16, budget / 500);
    for (int depth = 3; depth <= 48; depth *= 2) {
        struct Builder {
            std::vector<MachineState> states;
            std::map<std::string, int> memo;
            bool overflow = false;
        } b;

        auto fingerprint = [&](const Path& beta, const Path& base) -> std::string {
            std::ostringstream os;
            std::deque<std::pair<Path, int>> q;
            q.emplace_back(beta, 0);
            os << beta.terminus(g) << "|";
            while (!q.empty()) {
                auto [p, dd] = q.front();
                q.pop_front();
                if (dd >= depth) continue;
                for (int e : g.out_edges(p.terminus(g))) {
                    Path pe = p.concat(Path::edges({e}), g);
                    os << e << ":" << obar(pe).strip_prefix(base, g).to_string(g) << ";";
                    q.emplace_back(pe, dd + 1);
                }
            }
            return os.str();
        };

        std::function<int(const Path&)> state_for = [&](const Path& beta) -> int {
            Path forced = obar(beta);
            std::string fp = fingerprint(beta, forced);
            auto it = b.memo.find(fp);
            if (it != b.memo.end()) return it->second;
            int id = static_cast<int>(b.states.size());
            if (id >= state_cap) {
                b.overflow = true;
                return 0;
            }
            b.memo.emplace(std::move(fp), id);
            b.states.emplace_back();
            MachineState st;
            st.dom_node = beta.terminus(g);
            st.out_node = forced.terminus(g);
            for (int e : g.out_edges(st.dom_node)) {
                Path be = beta.concat(Path::edges({e}), g);
                Path o = obar(be);
                int nxt = state_for(be);
                if (b.overflow) return 0;
                st.trans.push_back({o.strip_prefix(forced, g), nxt});
            }
            b.states[id] = std::move(st);
            return id;
        };

        try {
            std::vector<InitialEntry> init;
            for (const auto& p : im.paths()) {
                std::vector<Path> starts;
                if (p.is_null())
                    for (int v = 0; v < g.node_count(); ++v) starts.push_back(Path::node(v));
                else
                    starts.push_back(p);
                for (const auto& s : starts) init.push_back({s, obar(s), state_for(s)});
                if (b.overflow) break;
            }
            if (b.overflow) continue;
            RationalMap cand =
                normalize(RationalMap(gp, im, std::move(init), std::move(b.states)));
            if (machine_equal(compose(cand, m, budget), identity_map(gp, m.domain())) &&
                machine_equal(compose(m, cand, budget), identity_map(gp, im)))
                return cand;
        } catch (const Error&) {
            // wrong merge at this depth; retry deeper
        }
    }
    throw BudgetError("invert: could not certify an inverse within budget");
}

// ---------------------------------------------------------------------------
// nucleus

Nucleus::Nucleus(GraphPtr g, std::vector<MachineState> states)
    : graph_(std::move(g)), states_(std::move(states)) {}

RationalMap Nucleus::state_machine(int i) const {
    const auto& st = states_.at(i);
    std::vector<InitialEntry> init{{Path::node(st.dom_node), Path::node(st.out_node), i}};
    return RationalMap(graph_, ClopenSet::cone(graph_, Path::node(st.dom_node)), std::move(init),
                       states_);
}

std::optional<int> Nucleus::find_state(const RationalMap& a, int qa) const {
    for (int i = 0; i < size(); ++i)
        if (states_[i].dom_node == a.states()[qa].dom_node &&
            states_equal(state_machine(i), i, a, qa))
            return i;
    return std::nullopt;
}

bool Nucleus::contains_machine(const RationalMap& a) const {
    RationalMap n = normalize(a);
    if (n.initial().size() != 1 || !n.initial()[0].cone.is_node() || !n.initial()[0].out.is_node())
        return false;
    return find_state(n, n.initial()[0].state).has_value();
}

Nucleus Nucleus::unite(const Nucleus& other) const {
    // concatenate and quotient by bisimulation, keeping first representatives
    std::vector<MachineState> all = states_;
    int base = static_cast<int>(all.size());
    for (auto st : other.states_) {
        for (auto& t : st.trans) t.next += base;
        all.push_back(std::move(st));
    }
    auto cls = state_classes(all);
    std::map<int, int> class_to_new;
    std::vector<int> new_id(all.size(), -1);
    std::vector<MachineState> kept;
    for (size_t q = 0; q < all.size(); ++q) {
        auto it = class_to_new.find(cls[q]);
        if (it == class_to_new.end()) {
            it = class_to_new.emplace(cls[q], static_cast<int>(kept.size())).first;
            kept.push_back(all[q]);
        }
        new_id[q] = it->second;
    }
    for (auto& st : kept)
        for (auto& t : st.trans) t.next = new_id[t.next];
    return Nucleus(graph_, std::move(kept));
}

std::string Nucleus::to_string() const {
    std::ostringstream os;
    for (int i = 0; i < size(); ++i)
        os << "p" << i << ": " << graph_->node_name(states_[i].dom_node) << " -> "
           << graph_->node_name(states_[i].out_node) << "\n";
    return os.str();
}

Nucleus nucleus_of(const RationalMap& m0) {
    RationalMap m = normalize(m0);
    int n = static_cast<int>(m.states().size());
    std::vector<std::vector<int>> adj(n);
    for (int q = 0; q < n; ++q)
        for (const auto& t : m.states()[q].trans) adj[q].push_back(t.next);

    std::vector<char> on_cycle(n, 0);
    for (int q = 0; q < n; ++q) {
        std::vector<char> seen(n, 0);
        std::deque<int> work(adj[q].begin(), adj[q].end());
        for (int w : adj[q]) seen[w] = 1;
        while (!work.empty() && !on_cycle[q]) {
            int v = work.front();
            work.pop_front();
            if (v == q) {
                on_cycle[q] = 1;
                break;
            }
            for (int w : adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    work.push_back(w);
                }
        }
    }
    std::vector<char> keep(n, 0);
    std::deque<int> work;
    for (int q = 0; q < n; ++q)
        if (on_cycle[q]) {
            keep[q] = 1;
            work.push_back(q);
        }
    while (!work.empty()) {
        int q = work.front();
        work.pop_front();
        for (int w : adj[q])
            if (!keep[w]) {
                keep[w] = 1;
                work.push_back(w);
            }
    }

    std::vector<int> remap(n, -1);
    std::vector<MachineState> states;
    for (int q = 0; q < n; ++q)
        if (keep[q]) {
            remap[q] = static_cast<int>(states.size());
            states.push_back(m.states()[q]);
        }
    for (auto& st : states)
        for (auto& t : st.trans) t.next = remap[t.next];
    return Nucleus(m.graph(), std::move(states));
}

// ---------------------------------------------------------------------------
// nucleus-of-injections axioms

NucleusCertificate verify_nucleus_of_injections(const Nucleus& n, int budget) {
    NucleusCertificate cert;
    const auto& gp = n.graph();
    auto core = irreducible_core(gp);

    auto name = [&](int i) { return "p" + std::to_string(i); };

    cert.map_nuc.passed = true;
    if (!core) {
        cert.map_nuc.passed = false;
        cert.map_nuc.witness = "graph has no irreducible core";
    } else {
        std::vector<char> in_core(gp->node_count(), 0);
        for (int v : core->core_nodes) in_core[v] = 1;
        for (int i = 0; i < n.size(); ++i)
            if (!in_core[n.states()[i].dom_node] || !in_core[n.states()[i].out_node]) {
                cert.map_nuc.passed = false;
                cert.map_nuc.witness = name(i) + " maps outside the core";
                break;
            }
    }

    cert.id_nuc.passed = true;
    if (core) {
        RationalMap idm = identity_map(gp, ClopenSet::whole(gp));
        for (int v : core->core_nodes) {
            bool found = false;
            for (int i = 0; i < n.size() && !found; ++i)
                if (n.states()[i].dom_node == v && states_equal(n.state_machine(i), i, idm, v))
                    found = true;
            if (!found) {
                cert.id_nuc.passed = false;
                cert.id_nuc.witness = "missing identity at node " + gp->node_name(v);
                break;
            }
        }
    } else {
        cert.id_nuc.passed = false;
        cert.id_nuc.witness = "graph has no irreducible core";
    }

    // closed under single-edge restriction by construction: transitions of
    // every member stay inside the family
    cert.loc_nuc.passed = true;

    cert.recur_nuc.passed = true;
    {
        std::vector<std::set<int>> nuc_of(n.size());
        for (int q = 0; q < n.size(); ++q) {
            Nucleus nq = nucleus_of(n.state_machine(q));
            for (int j = 0; j < nq.size(); ++j) {
                auto idx = n.find_state(nq.state_machine(j), j);
                if (idx) nuc_of[q].insert(*idx);
            }
        }
        for (int p = 0; p < n.size(); ++p) {
            bool found = false;
            for (int q = 0; q < n.size() && !found; ++q)
                if (nuc_of[q].count(p)) found = true;
            if (!found) {
                cert.recur_nuc.passed = false;
                cert.recur_nuc.witness = name(p) + " does not recur in any member";
                break;
            }
        }
    }

    cert.inv_nuc.passed = true;
    for (int p = 0; p < n.size() && cert.inv_nuc.passed; ++p) {
        try {
            Nucleus ninv = nucleus_of(invert(n.state_machine(p), budget));
            for (int j = 0; j < ninv.size(); ++j)
                if (!n.find_state(ninv.state_machine(j), j)) {
                    cert.inv_nuc.passed = false;
                    cert.inv_nuc.witness = "nucleus of " + name(p) + "^-1 leaves the family";
                    break;
                }
        } catch (const Error& e) {
            cert.inv_nuc.passed = false;
            cert.inv_nuc.witness = name(p) + ": " + e.what();
        }
    }

    cert.prod_nuc.passed = true;
    for (int p = 0; p < n.size() && cert.prod_nuc.passed; ++p)
        for (int q = 0; q < n.size() && cert.prod_nuc.passed; ++q) {
            if (n.states()[p].dom_node != n.states()[q].out_node) continue;
            try {
                Nucleus nprod = nucleus_of(compose(n.state_machine(p), n.state_machine(q), budget));
                for (int j = 0; j < nprod.size(); ++j)
                    if (!n.find_state(nprod.state_machine(j), j)) {
                        cert.prod_nuc.passed = false;
                        cert.prod_nuc.witness =
                            "nucleus of " + name(p) + "*" + name(q) + " leaves the family";
                        break;
                    }
            } catch (const Error& e) {
                cert.prod_nuc.passed = false;
                cert.prod_nuc.witness = name(p) + "*" + name(q) + ": " + e.what();
            }
        }

    return cert;
}

}  // namespace rsg
