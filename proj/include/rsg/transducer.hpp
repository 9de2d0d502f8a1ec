#ifndef RSG_TRANSDUCER_HPP
#define RSG_TRANSDUCER_HPP

#include <optional>
#include <string>
#include <vector>

#include "rsg/clopen.hpp"

namespace rsg {

// One transition of an asynchronous transducer state: consume an input
// edge, emit a (possibly length-0) output path, move on.
struct Transition {
    Path out;  // origin = state's out_node; node path = emit nothing
    int next = -1;
};

// A state is a map C_v -> C_w given by its transitions, one per edge with
// origin v, aligned with graph.out_edges(v).
struct MachineState {
    int dom_node = -1;
    int out_node = -1;
    std::vector<Transition> trans;
};

struct InitialEntry {
    Path cone;  // element of a complete code of the domain; never null
    Path out;   // t(out) = out_node(state); never null
    int state = -1;
};

// A nondegenerate rational map on a clopen subset of the subshift,
// represented as a reduced finite-state transducer.  "Reduced" means the
// common prefix of each state's future output is empty, so the emitted
// output after consuming alpha is exactly the greatest common prefix of
// f(C_alpha).
class RationalMap {
public:
    RationalMap() = default;
    RationalMap(GraphPtr g, ClopenSet domain, std::vector<InitialEntry> initial,
                std::vector<MachineState> states);

    const GraphPtr& graph() const { return graph_; }
    const ClopenSet& domain() const { return domain_; }
    const std::vector<InitialEntry>& initial() const { return initial_; }
    const std::vector<MachineState>& states() const { return states_; }

    void validate() const;  // structural checks; throws on malformed machines
    std::string to_string() const;

private:
    GraphPtr graph_;
    ClopenSet domain_;
    std::vector<InitialEntry> initial_;
    std::vector<MachineState> states_;
};

RationalMap identity_map(GraphPtr g, const ClopenSet& domain);

// Push output prefixes toward the initial table until every state has
// empty future common prefix, drop unreachable states, and merge
// extensionally equal states.  Throws BudgetError on machines with a
// degenerate (eventually constant) state.
RationalMap normalize(const RationalMap& m, int fuel = 1000);

struct EvalResult {
    Path out;                  // the longest output prefix forced by the input
    std::optional<int> state;  // residual state when the input reaches one
};

// Output prefix forced by a finite input: exactly gcp f(C_input).
EvalResult evaluate(const RationalMap& m, const Path& input, int fuel = 100000);

struct LocalAction {
    Path out_prefix;         // gcp of f(C_alpha)
    RationalMap restriction; // the map f|_alpha on C_{t(alpha)}
};
LocalAction local_action(const RationalMap& m, const Path& alpha);

// Restriction of m to a clopen subset of its domain.
RationalMap restrict_to_clopen(const RationalMap& m, const ClopenSet& sub);

// Extensional equality of whole machines / of individual states.
bool machine_equal(const RationalMap& a, const RationalMap& b);
bool states_equal(const RationalMap& a, int qa, const RationalMap& b, int qb);

// Distinguishing input for unequal states, for diagnostics.
std::optional<Path> distinguishing_word(const RationalMap& a, int qa, const RationalMap& b, int qb);

// f after g; requires image(g) inside domain(f).  state_budget bounds the
// initial-phase refinement and the product construction.
RationalMap compose(const RationalMap& f, const RationalMap& g, int state_budget = 100000);

enum class Verdict { Certified, Refuted, Inconclusive };

struct InjectivityReport {
    Verdict verdict = Verdict::Inconclusive;
    std::string witness;  // description of a collision for refutations
};
InjectivityReport check_injective(const RationalMap& m, int config_budget = 200000);

// Exact clopen image (the fixpoint terminates precisely when the image is
// clopen, which holds for injective open maps).
ClopenSet image(const RationalMap& m, int fuel = 10000);

// Inverse of an injective map with clopen image.  The synthesized machine
// is verified by composing both ways against the identity, so the result
// is exact whenever it is returned.
RationalMap invert(const RationalMap& m, int budget = 200000);

// The states that occur as local actions infinitely often, as a standalone
// closed family of state machines.
class Nucleus {
public:
    Nucleus() = default;
    Nucleus(GraphPtr g, std::vector<MachineState> states);

    const GraphPtr& graph() const { return graph_; }
    const std::vector<MachineState>& states() const { return states_; }
    int size() const { return static_cast<int>(states_.size()); }

    RationalMap state_machine(int i) const;

    // Index of the element extensionally equal to state qa of a, if any.
    std::optional<int> find_state(const RationalMap& a, int qa) const;
    bool contains_machine(const RationalMap& a) const;  // a is C_v -> Sigma given by one state

    // Union with dedup by extensional equality.
    Nucleus unite(const Nucleus& other) const;

    std::string to_string() const;

private:
    GraphPtr graph_;
    std::vector<MachineState> states_;
};

Nucleus nucleus_of(const RationalMap& m);

// Certificate for the six closure axioms of a nucleus of injections.
struct AxiomResult {
    bool passed = false;
    std::string witness;
};
struct NucleusCertificate {
    AxiomResult map_nuc, id_nuc, loc_nuc, recur_nuc, inv_nuc, prod_nuc;
    bool all_passed() const {
        return map_nuc.passed && id_nuc.passed && loc_nuc.passed && recur_nuc.passed &&
               inv_nuc.passed && prod_nuc.passed;
    }
};
NucleusCertificate verify_nucleus_of_injections(const Nucleus& n, int budget = 200000);

}  // namespace rsg

#endif
