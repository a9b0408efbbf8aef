#ifndef TWG_GRAPH_HPP
#define TWG_GRAPH_HPP

#include <set>
#include <utility>
#include <vector>

#include "twg/common.hpp"
#include "twg/formula.hpp"

namespace twg {

// Simple undirected graph on vertices 1..n.
struct Graph {
    int n = 0;
    std::vector<std::set<int>> adj; // 1-based; adj[0] unused

    Graph() = default;
    explicit Graph(int n_) : n(n_), adj(n_ + 1) {}

    void add_edge(int u, int v) {
        check(u >= 1 && u <= n && v >= 1 && v <= n, "edge endpoint out of range");
        if (u == v) return; // irreflexive
        adj[u].insert(v);
        adj[v].insert(u);
    }

    bool has_edge(int u, int v) const { return u != v && adj[u].count(v) != 0; }

    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> es;
        for (int u = 1; u <= n; ++u)
            for (int v : adj[u])
                if (u < v) es.emplace_back(u, v);
        return es;
    }

    std::size_t edge_count() const { return edges().size(); }
};

// Primal graph: one vertex per variable, an edge whenever two variables
// share a clause (or term). Duplicate clauses change nothing.
inline Graph primal_graph_of(int num_vars, const std::vector<Clause>& clauses) {
    Graph g(num_vars);
    for (const Clause& c : clauses)
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = i + 1; j < c.size(); ++j)
                if (var_of(c[i]) != var_of(c[j])) g.add_edge(var_of(c[i]), var_of(c[j]));
    return g;
}

inline Graph primal_graph(const CnfFormula& f) { return primal_graph_of(f.num_vars, f.clauses); }
inline Graph primal_graph(const DnfFormula& f) { return primal_graph_of(f.num_vars, f.terms); }

inline Graph primal_graph(const WcnfFormula& f) {
    Graph g = primal_graph_of(f.num_vars, f.hard);
    for (const auto& [c, w] : f.soft) {
        (void)w;
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = i + 1; j < c.size(); ++j)
                if (var_of(c[i]) != var_of(c[j])) g.add_edge(var_of(c[i]), var_of(c[j]));
    }
    return g;
}

inline Graph primal_graph(const QbfFormula& q) {
    return q.matrix_is_cnf ? primal_graph(q.cnf) : primal_graph(q.dnf);
}

} // namespace twg

#endif
