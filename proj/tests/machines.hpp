#ifndef RSG_TEST_MACHINES_HPP
#define RSG_TEST_MACHINES_HPP

#include <random>

#include "helpers.hpp"
#include "rsg/transducer.hpp"

namespace rsgtest {

using namespace rsg;

// The ternary-shift injection with f(0w)=0f(w), f(1w)=02w, f(2w)=1w.
inline RationalMap ternary_shift_injection(const GraphPtr& g3) {
    std::vector<MachineState> states(2);
    auto p = [&](const char* w) { return word_path(*g3, w); };
    states[0] = {0, 0, {{p("0"), 0}, {p("02"), 1}, {p("1"), 1}}};
    states[1] = {0, 0, {{p("0"), 1}, {p("1"), 1}, {p("2"), 1}}};
    return RationalMap(g3, ClopenSet::whole(g3),
                       {{Path::node(0), Path::node(0), 0}}, std::move(states));
}

// The binary-shift injection with f(0w)=0f(w), f(10w)=011w, f(11w)=10w.
inline RationalMap binary_shift_injection(const GraphPtr& g2) {
    std::vector<MachineState> states(3);
    auto p = [&](const char* w) { return word_path(*g2, w); };
    states[0] = {0, 0, {{p("0"), 0}, {Path::node(0), 1}}};   // f
    states[1] = {0, 0, {{p("011"), 2}, {p("10"), 2}}};       // selector after reading 1
    states[2] = {0, 0, {{p("0"), 2}, {p("1"), 2}}};          // identity
    return RationalMap(g2, ClopenSet::whole(g2),
                       {{Path::node(0), Path::node(0), 0}}, std::move(states));
}

// Wreath-recursion pair g = (0 1)(h,h), h = (g,g) over the binary shift,
// packaged with an identity state as a three-element nucleus {1, g, h}.
inline Nucleus wreath_pair_nucleus(const GraphPtr& g2) {
    auto p = [&](const char* w) { return word_path(*g2, w); };
    std::vector<MachineState> states(3);
    states[0] = {0, 0, {{p("0"), 0}, {p("1"), 0}}};  // identity
    states[1] = {0, 0, {{p("1"), 2}, {p("0"), 2}}};  // g
    states[2] = {0, 0, {{p("0"), 1}, {p("1"), 1}}};  // h
    return Nucleus(g2, std::move(states));
}

// Seeded random machine over a full shift; silent-cycle-free so every run
// emits infinitely.
inline RationalMap random_machine(const GraphPtr& g, std::mt19937& rng, int max_states = 4,
                                  int max_out = 2) {
    int alphabet = g->edge_count();
    for (;;) {
        int n = 1 + static_cast<int>(rng() % max_states);
        std::vector<MachineState> states(n);
        for (int q = 0; q < n; ++q) {
            states[q].dom_node = 0;
            states[q].out_node = 0;
            for (int e = 0; e < alphabet; ++e) {
                int len = static_cast<int>(rng() % (max_out + 1));
                Path out = Path::node(0);
                for (int i = 0; i < len; ++i) {
                    std::vector<int> seq = out.is_node() ? std::vector<int>{} : out.edge_seq();
                    seq.push_back(static_cast<int>(rng() % alphabet));
                    out = Path::edges(std::move(seq));
                }
                states[q].trans.push_back({out, static_cast<int>(rng() % n)});
            }
        }
        // reject machines with a silent cycle (they starve the output)
        std::vector<int> color(n, 0);
        bool silent_cycle = false;
        std::function<void(int)> dfs = [&](int q) {
            color[q] = 1;
            for (const auto& t : states[q].trans) {
                if (t.out.length() > 0) continue;
                if (color[t.next] == 1) silent_cycle = true;
                if (color[t.next] == 0 && !silent_cycle) dfs(t.next);
            }
            color[q] = 2;
        };
        for (int q = 0; q < n && !silent_cycle; ++q)
            if (color[q] == 0) dfs(q);
        if (silent_cycle) continue;
        try {
            return normalize(RationalMap(g, ClopenSet::whole(g),
                                         {{Path::node(0), Path::node(0),
                                           static_cast<int>(rng() % n)}},
                                         std::move(states)));
        } catch (const Error&) {
            continue;  // degenerate draw
        }
    }
}

}  // namespace rsgtest

#endif
