#ifndef TWG_CNF2DNF_HPP
#define TWG_CNF2DNF_HPP

#include <vector>

#include "twg/common.hpp"
#include "twg/formula.hpp"
#include "twg/treedec.hpp"

namespace twg {

// Treewidth-preserving CNF -> DNF conversion: psi' is a tautology exactly on
// the conditionings under which psi is satisfied. Fresh variables f_C (one
// per clause) and f_{<=t} (one per node) assert satisfaction bottom-up; the
// emitted terms are the negated directions of those definitions, so any
// assignment of the fresh variables that lies about a definition satisfies
// psi' trivially.
struct CnfToDnfResult {
    DnfFormula formula;
    TreeDecomposition td;
    std::vector<int> fresh_vars;
    int width_in = 0;
    int width_out = 0;
};

inline CnfToDnfResult cnf_to_dnf(const CnfFormula& f, const LabeledTreeDecomposition& ltd) {
    CnfToDnfResult res;
    const TreeDecomposition& td = ltd.td;
    res.width_in = td.width();
    // A tautological clause can never be falsified, which breaks the
    // equivalence for partial assignments that leave its variable open.
    // Encoders never emit such clauses.
    for (const Clause& c : f.clauses)
        check(!is_tautological(c), "cnf_to_dnf requires tautology-free input");

    int next = f.num_vars + 1;
    std::vector<int> f_clause(f.clauses.size());
    for (std::size_t i = 0; i < f.clauses.size(); ++i) f_clause[i] = next++;
    std::vector<int> f_node(td.size());
    for (int t = 0; t < td.size(); ++t) f_node[t] = next++;
    res.fresh_vars.insert(res.fresh_vars.end(), f_clause.begin(), f_clause.end());
    res.fresh_vars.insert(res.fresh_vars.end(), f_node.begin(), f_node.end());

    res.formula.num_vars = next - 1;
    auto add = [&](std::vector<Lit> lits) { res.formula.add_term(std::move(lits)); };

    // !(f_C <-> c1 | ... | cm)
    for (std::size_t i = 0; i < f.clauses.size(); ++i) {
        const Clause& c = f.clauses[i];
        std::vector<Lit> all{f_clause[i]};
        for (Lit l : c) all.push_back(neg(l));
        add(all);
        for (Lit l : c) add({-f_clause[i], l});
    }
    // !(f_{<=t} <-> f_C & children)
    for (int t = 0; t < td.size(); ++t) {
        std::vector<Lit> parts;
        if (ltd.clause_of_node[t] >= 0) parts.push_back(f_clause[ltd.clause_of_node[t]]);
        for (int c : td.children[t]) parts.push_back(f_node[c]);
        std::vector<Lit> fwd{-f_node[t]};
        fwd.insert(fwd.end(), parts.begin(), parts.end());
        add(fwd);
        for (Lit p : parts) add({f_node[t], -p});
    }
    add({f_node[td.root]});

    // certificate: own f-variables plus the children's
    res.td = td;
    for (int t = 0; t < td.size(); ++t) {
        std::vector<int> bag = td.bags[t];
        if (ltd.clause_of_node[t] >= 0) bag.push_back(f_clause[ltd.clause_of_node[t]]);
        bag.push_back(f_node[t]);
        for (int c : td.children[t]) bag.push_back(f_node[c]);
        std::sort(bag.begin(), bag.end());
        res.td.bags[t] = std::move(bag);
    }
    res.width_out = res.td.width();
    if (res.width_out > res.width_in + 4) throw bound_error("cnf-to-dnf width bound k + 4 violated");
    return res;
}

inline CnfToDnfResult cnf_to_dnf(const CnfFormula& f, const TreeDecomposition& td) {
    return cnf_to_dnf(f, label(normalize(td), f));
}

} // namespace twg

#endif
