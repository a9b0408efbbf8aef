#ifndef TWG_PMC_HPP
#define TWG_PMC_HPP

#include <vector>

#include "twg/common.hpp"
#include "twg/formula.hpp"
#include "twg/qelim.hpp"
#include "twg/treedec.hpp"

namespace twg {

// Projected model counting to #SAT. The variables outside the projection set
// are summed out exactly like an innermost existential block, but the
// constraints stay positive: they are pure propagations that pin every
// auxiliary variable given the projection variables, so the model count of
// the output equals the projected count of the input.
struct PmcResult {
    CnfFormula formula;
    TreeDecomposition td;
    std::map<int, int> var_map; // projection variable -> output variable
    RoundLog log;
};

inline PmcResult pmc_to_sharpsat(const CnfFormula& f, const std::vector<int>& show,
                                 const LabeledTreeDecomposition& ltd, const Limits& limits = {}) {
    std::vector<char> is_show(f.num_vars + 1, 0);
    for (int v : show) {
        check(v >= 1 && v <= f.num_vars, "projection variable out of range");
        is_show[v] = 1;
    }
    std::vector<int> projected_away;
    for (int v = 1; v <= f.num_vars; ++v)
        if (!is_show[v]) projected_away.push_back(v);

    qdetail::Builder b(f.num_vars, projected_away, f.clauses.size(), ltd, limits);
    const TreeDecomposition& td = ltd.td;

    PmcResult res;
    res.log.kind = "pmc_to_sharpsat";
    res.log.width_in = td.width();
    res.formula.num_vars = static_cast<int>(b.next_var);
    auto add = [&](std::vector<Lit> lits) {
        res.formula.clauses.push_back(make_clause(std::move(lits)));
        if (static_cast<long long>(res.formula.clauses.size()) > limits.max_clauses)
            throw resource_limit("pmc encoding exceeds clause budget");
    };

    // (1)/(2): sat_c^a <-> disjunction of the residual projection literals;
    // positive unit when alpha satisfies the clause outright
    for (std::size_t ci = 0; ci < f.clauses.size(); ++ci) {
        int t = ltd.node_of_clause[ci];
        for (long long alpha = 0; alpha < b.local[t].count(); ++alpha) {
            Lit s = b.sat_row(ci, alpha);
            auto cond = qdetail::condition_row(f.clauses[ci], b.local[t], alpha, true);
            if (cond.state == qdetail::RowState::Gone) {
                add({s});
                continue;
            }
            std::vector<Lit> fwd{-s};
            for (Lit l : cond.residual) {
                Lit m = b.survivor(l);
                fwd.push_back(m);
                add({s, -m});
            }
            add(std::move(fwd));
        }
    }
    // (3): sat_{<=t}^a <-> big-and of local clauses and child propagations
    for (int t = 0; t < td.size(); ++t) {
        for (long long alpha = 0; alpha < b.local[t].count(); ++alpha) {
            Lit a = b.sat_le(t, alpha);
            std::vector<Lit> parts;
            if (ltd.clause_of_node[t] >= 0) parts.push_back(b.sat_row(ltd.clause_of_node[t], alpha));
            for (std::size_t k = 0; k < td.children[t].size(); ++k)
                parts.push_back(b.sat_lt(t, k, alpha));
            std::vector<Lit> back{a};
            for (Lit p : parts) {
                add({-a, p});
                back.push_back(-p);
            }
            add(std::move(back));
        }
    }
    // (4): sat_{<t,t'}^a <-> big-or over compatible child assignments
    for (int t = 0; t < td.size(); ++t) {
        for (std::size_t k = 0; k < td.children[t].size(); ++k) {
            int c = td.children[t][k];
            qdetail::Compat compat(b.local[t], b.local[c]);
            for (long long alpha = 0; alpha < b.local[t].count(); ++alpha) {
                Lit a = b.sat_lt(t, k, alpha);
                std::vector<Lit> fwd{-a};
                for (long long fm = 0; fm < compat.free_count(); ++fm) {
                    Lit s = b.sat_le(c, compat.beta(alpha, fm));
                    fwd.push_back(s);
                    add({a, -s});
                }
                add(std::move(fwd));
            }
        }
    }
    // (5): one wide clause over the root's sat variables
    {
        std::vector<Lit> root_clause;
        for (long long alpha = 0; alpha < b.local[td.root].count(); ++alpha)
            root_clause.push_back(b.sat_le(td.root, alpha));
        add(std::move(root_clause));
    }

    res.td = b.build_td();
    qdetail::cover_isolated(res.td, res.formula.num_vars);
    res.var_map = b.var_map;
    res.log.width_out = res.td.width();
    res.log.width_bound = 12LL << std::max(0, res.log.width_in);
    res.log.bound_holds = res.log.width_out <= res.log.width_bound;
    res.log.vars_out = b.next_var;
    res.log.clauses_out = static_cast<long long>(res.formula.clauses.size());
    if (!res.log.bound_holds) throw bound_error("pmc width bound 12*2^k violated");
    return res;
}

inline PmcResult pmc_to_sharpsat(const CnfFormula& f, const std::vector<int>& show,
                                 const Limits& limits = {}) {
    TreeDecomposition td = normalize(min_fill(primal_graph(f)));
    return pmc_to_sharpsat(f, show, label(td, f), limits);
}

} // namespace twg

#endif
