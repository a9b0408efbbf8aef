#ifndef TWG_TESTS_GEN_HPP
#define TWG_TESTS_GEN_HPP

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "twg/formula.hpp"
#include "twg/graph.hpp"

// Deterministic instance generators for the property tests. Everything is
// seeded, so failures reproduce.
namespace gen {

using Rng = std::mt19937;

inline int pick(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Clauses are drawn over distinct variables (set-of-sets convention), so
// generated formulas are tautology-free.
inline twg::CnfFormula random_cnf(Rng& rng, int max_vars, int max_clauses, int max_len = 3) {
    twg::CnfFormula f;
    f.num_vars = pick(rng, 1, max_vars);
    int m = pick(rng, 0, max_clauses);
    for (int i = 0; i < m; ++i) {
        int len = std::min(pick(rng, 1, max_len), f.num_vars);
        std::vector<int> vars(f.num_vars);
        for (int v = 1; v <= f.num_vars; ++v) vars[v - 1] = v;
        std::shuffle(vars.begin(), vars.end(), rng);
        std::vector<twg::Lit> lits;
        for (int j = 0; j < len; ++j) lits.push_back(pick(rng, 0, 1) ? vars[j] : -vars[j]);
        f.add_clause(lits);
    }
    return f;
}

// Random CNF whose primal graph stays path-like (all clause variables within
// a sliding window), which keeps min-fill widths small.
inline twg::CnfFormula random_local_cnf(Rng& rng, int num_vars, int num_clauses, int window) {
    twg::CnfFormula f;
    f.num_vars = num_vars;
    for (int i = 0; i < num_clauses; ++i) {
        int len = pick(rng, 1, 3);
        int base = pick(rng, 1, std::max(1, num_vars - window + 1));
        std::set<int> vars;
        for (int j = 0; j < len; ++j) vars.insert(std::min(num_vars, base + pick(rng, 0, window - 1)));
        std::vector<twg::Lit> lits;
        for (int v : vars) lits.push_back(pick(rng, 0, 1) ? v : -v);
        f.add_clause(lits);
    }
    return f;
}

inline twg::Graph random_graph(Rng& rng, int n, double density) {
    twg::Graph g(n);
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v)
            if (std::uniform_real_distribution<double>(0, 1)(rng) < density) g.add_edge(u, v);
    return g;
}

// All CNFs over <= max_vars variables with <= max_clauses clauses drawn from
// the full clause universe (used exhaustively for tiny corpora).
inline std::vector<twg::Clause> all_clauses(int num_vars, int max_len) {
    std::vector<twg::Clause> out;
    // enumerate nonempty subsets of variables and polarity patterns
    for (int mask = 1; mask < (1 << num_vars); ++mask) {
        std::vector<int> vars;
        for (int v = 1; v <= num_vars; ++v)
            if (mask & (1 << (v - 1))) vars.push_back(v);
        if (static_cast<int>(vars.size()) > max_len) continue;
        for (int pol = 0; pol < (1 << vars.size()); ++pol) {
            std::vector<twg::Lit> lits;
            for (std::size_t i = 0; i < vars.size(); ++i)
                lits.push_back(pol & (1 << i) ? -vars[i] : vars[i]);
            out.push_back(twg::make_clause(lits));
        }
    }
    return out;
}

} // namespace gen

#endif
