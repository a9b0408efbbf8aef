#ifndef TWG_SOLVER_HPP
#define TWG_SOLVER_HPP

#include <map>
#include <optional>
#include <vector>

#include "twg/bigint.hpp"
#include "twg/brute.hpp"
#include "twg/common.hpp"
#include "twg/formula.hpp"
#include "twg/rational.hpp"
#include "twg/treedec.hpp"

namespace twg {

// Dynamic programming over a labeled tree decomposition (SAT / #SAT /
// MaxSAT). No nice-decomposition pass: introduce/forget/join all fall out of
// comparing a bag with its children's bags. Tables hold one entry per
// assignment of the bag, so they are exact and sized 2^|bag|.

struct hard_unsat : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace soldetail {

struct BagContext {
    std::vector<int> vars;            // sorted bag
    std::vector<int> clause_indices;  // labeled clauses (into combined list)
};

inline bool clause_satisfied(const Clause& c, const std::vector<int>& bag, unsigned long long mask) {
    for (Lit l : c) {
        auto it = std::lower_bound(bag.begin(), bag.end(), var_of(l));
        // labeled clause's variables are inside the bag by construction
        std::size_t idx = static_cast<std::size_t>(it - bag.begin());
        bool val = (mask >> idx) & 1ULL;
        if (val == (l > 0)) return true;
    }
    return false;
}

// Positions of shared variables and the projection of a mask onto them.
inline std::vector<std::pair<int, int>> shared_positions(const std::vector<int>& a,
                                                         const std::vector<int>& b) {
    std::vector<std::pair<int, int>> pos; // (index in a, index in b)
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) pos.emplace_back(static_cast<int>(i), static_cast<int>(j));
        if (a[i] <= b[j]) ++i;
        else ++j;
    }
    return pos;
}

inline unsigned long long project(unsigned long long mask,
                                  const std::vector<std::pair<int, int>>& pos, bool first) {
    unsigned long long p = 0;
    for (std::size_t k = 0; k < pos.size(); ++k) {
        int idx = first ? pos[k].first : pos[k].second;
        if ((mask >> idx) & 1ULL) p |= 1ULL << k;
    }
    return p;
}

inline void guard_bag(std::size_t bag_size) {
    if (bag_size > 25) throw too_large("solver bag with " + std::to_string(bag_size) + " variables");
}

} // namespace soldetail

// ------------------------------------------------------------------- #SAT

inline BigUint td_count(const CnfFormula& f, const LabeledTreeDecomposition& ltd) {
    const TreeDecomposition& td = ltd.td;
    std::vector<std::vector<BigUint>> table(td.size());
    for (int t : td.post_order()) {
        const auto& bag = td.bags[t];
        soldetail::guard_bag(bag.size());
        std::size_t entries = 1ULL << bag.size();
        table[t].assign(entries, BigUint(0));
        // group child tables by shared-variable pattern
        std::vector<std::map<unsigned long long, BigUint>> grouped;
        std::vector<std::vector<std::pair<int, int>>> positions;
        for (int c : td.children[t]) {
            auto pp = soldetail::shared_positions(bag, td.bags[c]);
            std::map<unsigned long long, BigUint> g;
            for (unsigned long long beta = 0; beta < (1ULL << td.bags[c].size()); ++beta) {
                if (table[c][beta].is_zero()) continue;
                unsigned long long pat = soldetail::project(beta, pp, false);
                auto [it, fresh] = g.emplace(pat, table[c][beta]);
                if (!fresh) it->second += table[c][beta];
            }
            positions.push_back(std::move(pp));
            grouped.push_back(std::move(g));
            table[c].clear();
        }
        for (unsigned long long alpha = 0; alpha < entries; ++alpha) {
            if (ltd.clause_of_node[t] >= 0 &&
                !soldetail::clause_satisfied(f.clauses[ltd.clause_of_node[t]], bag, alpha))
                continue;
            BigUint val = 1;
            bool dead = false;
            for (std::size_t k = 0; k < grouped.size() && !dead; ++k) {
                unsigned long long pat = soldetail::project(alpha, positions[k], true);
                auto it = grouped[k].find(pat);
                if (it == grouped[k].end()) dead = true;
                else val *= it->second;
            }
            if (!dead) table[t][alpha] = std::move(val);
        }
    }
    BigUint total = 0;
    for (const auto& v : table[td.root]) total += v;
    return total;
}

inline bool td_sat(const CnfFormula& f, const LabeledTreeDecomposition& ltd) {
    // Same sweep with booleans.
    const TreeDecomposition& td = ltd.td;
    std::vector<std::vector<char>> table(td.size());
    for (int t : td.post_order()) {
        const auto& bag = td.bags[t];
        soldetail::guard_bag(bag.size());
        std::size_t entries = 1ULL << bag.size();
        table[t].assign(entries, 0);
        std::vector<std::vector<std::pair<int, int>>> positions;
        std::vector<std::map<unsigned long long, char>> grouped;
        for (int c : td.children[t]) {
            auto pp = soldetail::shared_positions(bag, td.bags[c]);
            std::map<unsigned long long, char> g;
            for (unsigned long long beta = 0; beta < (1ULL << td.bags[c].size()); ++beta)
                if (table[c][beta]) g[soldetail::project(beta, pp, false)] = 1;
            positions.push_back(std::move(pp));
            grouped.push_back(std::move(g));
            table[c].clear();
        }
        for (unsigned long long alpha = 0; alpha < entries; ++alpha) {
            if (ltd.clause_of_node[t] >= 0 &&
                !soldetail::clause_satisfied(f.clauses[ltd.clause_of_node[t]], bag, alpha))
                continue;
            bool ok = true;
            for (std::size_t k = 0; k < grouped.size() && ok; ++k)
                ok = grouped[k].count(soldetail::project(alpha, positions[k], true)) != 0;
            table[t][alpha] = ok;
        }
    }
    for (char v : table[td.root])
        if (v) return true;
    return false;
}

// ------------------------------------------------------------------ MaxSAT

struct MaxSatResult {
    Rational optimum;
    Assignment witness;
};

// The labeling covers hard and soft clauses in one combined list:
// indices [0, |hard|) are hard, the rest soft.
inline MaxSatResult td_maxsat(const WcnfFormula& f, const LabeledTreeDecomposition& ltd) {
    const TreeDecomposition& td = ltd.td;
    auto clause_at = [&](int idx) -> const Clause& {
        if (idx < static_cast<int>(f.hard.size())) return f.hard[idx];
        return f.soft[idx - f.hard.size()].first;
    };
    struct Entry {
        bool feasible = false;
        Rational value;
    };
    std::vector<std::vector<Entry>> table(td.size());
    // For witness reconstruction: best child pattern choice per (node, alpha).
    std::vector<std::vector<std::vector<unsigned long long>>> choice(td.size());

    std::vector<int> order = td.post_order();
    for (int t : order) {
        const auto& bag = td.bags[t];
        soldetail::guard_bag(bag.size());
        std::size_t entries = 1ULL << bag.size();
        table[t].assign(entries, {});
        choice[t].assign(entries, {});
        std::vector<std::vector<std::pair<int, int>>> positions;
        // per child: pattern -> (best value, best beta)
        std::vector<std::map<unsigned long long, std::pair<Rational, unsigned long long>>> grouped;
        for (int c : td.children[t]) {
            auto pp = soldetail::shared_positions(bag, td.bags[c]);
            std::map<unsigned long long, std::pair<Rational, unsigned long long>> g;
            for (unsigned long long beta = 0; beta < (1ULL << td.bags[c].size()); ++beta) {
                if (!table[c][beta].feasible) continue;
                unsigned long long pat = soldetail::project(beta, pp, false);
                auto it = g.find(pat);
                if (it == g.end() || table[c][beta].value > it->second.first)
                    g[pat] = {table[c][beta].value, beta};
            }
            positions.push_back(std::move(pp));
            grouped.push_back(std::move(g));
        }
        for (unsigned long long alpha = 0; alpha < entries; ++alpha) {
            Rational val(0);
            int ci = ltd.clause_of_node[t];
            if (ci >= 0) {
                bool sat = soldetail::clause_satisfied(clause_at(ci), bag, alpha);
                if (ci < static_cast<int>(f.hard.size())) {
                    if (!sat) continue; // hard clause violated
                } else if (sat) {
                    val += f.soft[ci - f.hard.size()].second;
                }
            }
            bool dead = false;
            std::vector<unsigned long long> picks;
            for (std::size_t k = 0; k < grouped.size() && !dead; ++k) {
                auto it = grouped[k].find(soldetail::project(alpha, positions[k], true));
                if (it == grouped[k].end()) { dead = true; break; }
                val += it->second.first;
                picks.push_back(it->second.second);
            }
            if (dead) continue;
            table[t][alpha] = {true, val};
            choice[t][alpha] = std::move(picks);
        }
    }

    int root = td.root;
    std::optional<unsigned long long> best_alpha;
    for (unsigned long long alpha = 0; alpha < table[root].size(); ++alpha) {
        if (!table[root][alpha].feasible) continue;
        if (!best_alpha || table[root][alpha].value > table[root][*best_alpha].value)
            best_alpha = alpha;
    }
    if (!best_alpha) throw hard_unsat("hard clauses are unsatisfiable");

    // Walk back down collecting the witness; unassigned variables (possible
    // only if some variable occurs in no bag) default to false.
    MaxSatResult res;
    res.optimum = table[root][*best_alpha].value;
    std::vector<std::pair<int, unsigned long long>> stack{{root, *best_alpha}};
    std::map<int, bool> assig;
    while (!stack.empty()) {
        auto [t, alpha] = stack.back();
        stack.pop_back();
        for (std::size_t i = 0; i < td.bags[t].size(); ++i)
            assig[td.bags[t][i]] = (alpha >> i) & 1ULL;
        for (std::size_t k = 0; k < td.children[t].size(); ++k)
            stack.emplace_back(td.children[t][k], choice[t][alpha][k]);
    }
    for (int v = 1; v <= f.num_vars; ++v) {
        auto it = assig.find(v);
        res.witness.set(it != assig.end() && it->second ? v : -v);
    }
    return res;
}

// Convenience wrappers that build the labeled decomposition themselves.

inline LabeledTreeDecomposition label_for(const CnfFormula& f) {
    TreeDecomposition td = normalize(min_fill(primal_graph(f)));
    return label(td, f);
}

inline LabeledTreeDecomposition label_for(const WcnfFormula& f) {
    TreeDecomposition td = normalize(min_fill(primal_graph(f)));
    std::vector<Clause> combined = f.hard;
    for (const auto& [c, w] : f.soft) {
        (void)w;
        combined.push_back(c);
    }
    return label(td, combined);
}

} // namespace twg

#endif
