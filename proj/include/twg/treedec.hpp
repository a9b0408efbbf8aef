#ifndef TWG_TREEDEC_HPP
#define TWG_TREEDEC_HPP

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "twg/common.hpp"
#include "twg/graph.hpp"

namespace twg {

// Rooted tree decomposition. Bags are sorted vertex lists; node ids are
// dense 0..size()-1 and every transformation appends nodes, so outputs are
// reproducible.
struct TreeDecomposition {
    std::vector<std::vector<int>> bags;
    std::vector<int> parent; // -1 at the root
    std::vector<std::vector<int>> children;
    int root = -1;

    int size() const { return static_cast<int>(bags.size()); }

    int add_node(std::vector<int> bag, int par) {
        std::sort(bag.begin(), bag.end());
        bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
        int id = size();
        bags.push_back(std::move(bag));
        parent.push_back(par);
        children.emplace_back();
        if (par >= 0) children[par].push_back(id);
        else if (root < 0) root = id;
        return id;
    }

    bool bag_contains(int node, int v) const {
        const auto& b = bags[node];
        return std::binary_search(b.begin(), b.end(), v);
    }

    bool bag_covers(int node, const std::vector<int>& vs) const {
        for (int v : vs)
            if (!bag_contains(node, v)) return false;
        return true;
    }

    // max bag size - 1; a single empty bag has width -1
    int width() const {
        int w = -1;
        for (const auto& b : bags) w = std::max(w, static_cast<int>(b.size()) - 1);
        return w;
    }

    // Vertices introduced at `node`: bag minus the parent's bag.
    std::vector<int> introduced(int node) const {
        if (parent[node] < 0) return bags[node];
        std::vector<int> out;
        const auto& p = bags[parent[node]];
        for (int v : bags[node])
            if (!std::binary_search(p.begin(), p.end(), v)) out.push_back(v);
        return out;
    }

    // Re-root the tree at `new_root`, flipping parent pointers along the way.
    void reroot(int new_root) {
        std::vector<int> new_parent(size(), -1);
        std::vector<char> seen(size(), 0);
        std::queue<int> q;
        q.push(new_root);
        seen[new_root] = 1;
        auto neighbors = [&](int t) {
            std::vector<int> ns = children[t];
            if (parent[t] >= 0) ns.push_back(parent[t]);
            return ns;
        };
        while (!q.empty()) {
            int t = q.front();
            q.pop();
            for (int u : neighbors(t))
                if (!seen[u]) {
                    seen[u] = 1;
                    new_parent[u] = t;
                    q.push(u);
                }
        }
        parent = std::move(new_parent);
        root = new_root;
        for (auto& ch : children) ch.clear();
        for (int t = 0; t < size(); ++t)
            if (parent[t] >= 0) children[parent[t]].push_back(t);
        for (auto& ch : children) std::sort(ch.begin(), ch.end());
    }

    // Nodes in post order (children before parents).
    std::vector<int> post_order() const {
        std::vector<int> order;
        std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
        while (!stack.empty()) {
            auto& [t, i] = stack.back();
            if (i < children[t].size()) {
                int c = children[t][i++];
                stack.emplace_back(c, 0);
            } else {
                order.push_back(t);
                stack.pop_back();
            }
        }
        return order;
    }
};

struct ValidationReport {
    std::vector<int> bad_vertices;               // in no bag, or occurrence set disconnected
    std::vector<std::pair<int, int>> bad_edges;  // covered by no bag
    int width = -1;
    bool valid() const { return bad_vertices.empty() && bad_edges.empty(); }
};

inline ValidationReport validate(const Graph& g, const TreeDecomposition& td) {
    ValidationReport rep;
    rep.width = td.width();
    std::map<int, std::vector<int>> occ; // vertex -> nodes, ascending
    for (int t = 0; t < td.size(); ++t)
        for (int v : td.bags[t]) occ[v].push_back(t);
    for (int v = 1; v <= g.n; ++v) {
        auto it = occ.find(v);
        if (it == occ.end()) { rep.bad_vertices.push_back(v); continue; }
        // The occurrence set induces a connected subtree iff exactly one of
        // its nodes has a parent outside the set.
        const std::vector<int>& nodes = it->second;
        int roots = 0;
        for (int t : nodes) {
            int p = td.parent[t];
            if (p < 0 || !std::binary_search(nodes.begin(), nodes.end(), p)) ++roots;
        }
        if (roots != 1) rep.bad_vertices.push_back(v);
    }
    for (auto [u, v] : g.edges()) {
        auto iu = occ.find(u), iv = occ.find(v);
        bool covered = false;
        if (iu != occ.end() && iv != occ.end()) {
            const auto &a = iu->second, &b = iv->second;
            std::size_t i = 0, j = 0;
            while (i < a.size() && j < b.size()) {
                if (a[i] == b[j]) { covered = true; break; }
                if (a[i] < b[j]) ++i;
                else ++j;
            }
        }
        if (!covered) rep.bad_edges.emplace_back(u, v);
    }
    return rep;
}

// Min-fill elimination-ordering heuristic. No optimality guarantee; ties are
// broken towards the smallest vertex id so the output is deterministic.
inline TreeDecomposition min_fill(const Graph& g) {
    TreeDecomposition td;
    if (g.n == 0) {
        td.add_node({}, -1);
        return td;
    }
    std::vector<std::set<int>> adj = g.adj;
    std::vector<char> eliminated(g.n + 1, 0);
    std::vector<int> order;
    std::vector<std::vector<int>> elim_bag(g.n + 1);

    for (int round = 0; round < g.n; ++round) {
        int best = -1;
        long best_fill = -1;
        for (int v = 1; v <= g.n; ++v) {
            if (eliminated[v]) continue;
            long fill = 0;
            std::vector<int> nb(adj[v].begin(), adj[v].end());
            for (std::size_t i = 0; i < nb.size(); ++i)
                for (std::size_t j = i + 1; j < nb.size(); ++j)
                    if (!adj[nb[i]].count(nb[j])) ++fill;
            if (best < 0 || fill < best_fill) { best = v; best_fill = fill; }
        }
        std::vector<int> nb(adj[best].begin(), adj[best].end());
        elim_bag[best] = nb;
        elim_bag[best].push_back(best);
        for (std::size_t i = 0; i < nb.size(); ++i)
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                adj[nb[i]].insert(nb[j]);
                adj[nb[j]].insert(nb[i]);
            }
        for (int u : nb) adj[u].erase(best);
        adj[best].clear();
        eliminated[best] = 1;
        order.push_back(best);
    }

    // One bag per eliminated vertex; the parent is the bag of the earliest
    // later-eliminated neighbor. Component roots get chained so the result
    // is a single tree even on disconnected graphs.
    std::vector<int> pos(g.n + 1);
    for (int i = 0; i < g.n; ++i) pos[order[i]] = i;
    std::vector<int> par(g.n, -1);
    for (int i = 0; i < g.n; ++i) {
        int v = order[i];
        int best_pos = g.n;
        for (int u : elim_bag[v])
            if (u != v && pos[u] > i) best_pos = std::min(best_pos, pos[u]);
        if (best_pos < g.n) par[i] = best_pos;
    }
    int prev_root = -1;
    for (int i = 0; i < g.n; ++i)
        if (par[i] < 0) {
            if (prev_root >= 0) par[prev_root] = i;
            prev_root = i;
        }
    for (int i = 0; i < g.n; ++i) td.add_node(elim_bag[order[i]], -1);
    for (int i = 0; i < g.n; ++i) {
        td.parent[i] = par[i];
        if (par[i] >= 0) td.children[par[i]].push_back(i);
    }
    td.root = prev_root;
    for (auto& ch : td.children) std::sort(ch.begin(), ch.end());
    td.reroot(0); // smallest node id is the root
    return td;
}

namespace detail {
inline void check_tree(const TreeDecomposition& td) {
    check(td.root >= 0 && td.root < td.size(), "decomposition has no root");
    int seen = 0;
    for (int t = 0; t < td.size(); ++t) {
        if (t == td.root) check(td.parent[t] < 0, "root has a parent");
        else check(td.parent[t] >= 0 && td.parent[t] < td.size(), "orphan node");
        ++seen;
    }
    check(seen == td.size(), "node bookkeeping broken");
}
} // namespace detail

// Binarize: nodes with more than two children are split by duplicating their
// bag, which changes neither validity nor width.
inline TreeDecomposition normalize(const TreeDecomposition& in) {
    detail::check_tree(in);
    TreeDecomposition out;
    // clone node `t` under parent `par`, returns new id
    std::vector<std::pair<int, int>> stack; // (old node, new parent)
    int new_root = out.add_node(in.bags[in.root], -1);
    stack.emplace_back(in.root, new_root);
    while (!stack.empty()) {
        auto [t, nt] = stack.back();
        stack.pop_back();
        const auto& ch = in.children[t];
        if (ch.size() <= 2) {
            for (int c : ch) stack.emplace_back(c, out.add_node(in.bags[c], nt));
        } else {
            int attach = nt;
            for (std::size_t i = 0; i + 2 < ch.size(); ++i) {
                stack.emplace_back(ch[i], out.add_node(in.bags[ch[i]], attach));
                attach = out.add_node(in.bags[t], attach); // duplicate bag
            }
            stack.emplace_back(ch[ch.size() - 2], out.add_node(in.bags[ch[ch.size() - 2]], attach));
            stack.emplace_back(ch[ch.size() - 1], out.add_node(in.bags[ch[ch.size() - 1]], attach));
        }
    }
    return out;
}

// Limit the number of vertices introduced per node to `max_intro` by
// inserting subset bags above offending nodes. Width is unchanged.
inline TreeDecomposition slim(const TreeDecomposition& in, int max_intro) {
    detail::check_tree(in);
    TreeDecomposition out;
    std::vector<std::pair<int, int>> stack;
    auto expand = [&](int t, int par) {
        std::vector<int> intro = in.introduced(t);
        if (static_cast<int>(intro.size()) <= max_intro) return out.add_node(in.bags[t], par);
        std::vector<int> shared;
        for (int v : in.bags[t]) {
            bool is_intro = std::binary_search(intro.begin(), intro.end(), v);
            if (!is_intro) shared.push_back(v);
        }
        std::vector<int> cur = shared;
        int attach = par;
        for (std::size_t i = 0; i + max_intro < intro.size(); i += max_intro) {
            cur.insert(cur.end(), intro.begin() + i,
                       intro.begin() + std::min(intro.size(), i + max_intro));
            attach = out.add_node(cur, attach);
        }
        return out.add_node(in.bags[t], attach);
    };
    int new_root = expand(in.root, -1);
    if (out.root < 0) out.root = 0;
    stack.emplace_back(in.root, new_root);
    while (!stack.empty()) {
        auto [t, nt] = stack.back();
        stack.pop_back();
        for (int c : in.children[t]) stack.emplace_back(c, expand(c, nt));
    }
    return out;
}

// Append an empty bag below every leaf. Encoders whose base case assumes
// empty leaf bags call this first.
inline TreeDecomposition append_empty_leaves(const TreeDecomposition& in) {
    TreeDecomposition out = in;
    int sz = out.size();
    for (int t = 0; t < sz; ++t)
        if (out.children[t].empty()) out.add_node({}, t);
    return out;
}

// Tree decomposition plus a clause labeling: every clause sits at exactly one
// node whose bag covers its variables, and no node carries more than one
// clause (bags get duplicated to make room).
struct LabeledTreeDecomposition {
    TreeDecomposition td;
    std::vector<int> clause_of_node; // -1 if unlabeled
    std::vector<int> node_of_clause;

    int label_of(int node) const { return clause_of_node[node]; }
};

inline std::vector<int> clause_vars(const Clause& c) {
    std::vector<int> vs;
    for (Lit l : c) vs.push_back(var_of(l));
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
}

// Assign each clause to the first node covering it; occupied nodes get a
// duplicate bag inserted as an only-child above the original, which keeps
// the tree binary and the width unchanged. The candidate search goes through
// the occurrence list of the clause's rarest variable.
inline LabeledTreeDecomposition label(const TreeDecomposition& in,
                                      const std::vector<Clause>& clauses) {
    LabeledTreeDecomposition out;
    out.td = in;
    out.clause_of_node.assign(out.td.size(), -1);
    std::map<int, std::vector<int>> occ; // variable -> nodes (ascending)
    for (int t = 0; t < out.td.size(); ++t)
        for (int v : out.td.bags[t]) occ[v].push_back(t);
    for (std::size_t ci = 0; ci < clauses.size(); ++ci) {
        std::vector<int> vs = clause_vars(clauses[ci]);
        int host = -1;
        if (vs.empty()) {
            host = 0;
        } else {
            const std::vector<int>* candidates = nullptr;
            for (int v : vs) {
                auto it = occ.find(v);
                if (it == occ.end()) { candidates = nullptr; break; }
                if (!candidates || it->second.size() < candidates->size()) candidates = &it->second;
            }
            if (candidates)
                for (int t : *candidates)
                    if (out.td.bag_covers(t, vs)) { host = t; break; }
        }
        if (host < 0) throw invalid_input("clause has no covering bag (decomposition invalid for formula)");
        if (out.clause_of_node[host] >= 0) {
            // duplicate above `host`
            int par = out.td.parent[host];
            int dup = out.td.add_node(out.td.bags[host], -1);
            out.clause_of_node.push_back(-1);
            out.td.parent[dup] = par;
            if (par >= 0) {
                auto& ch = out.td.children[par];
                *std::find(ch.begin(), ch.end(), host) = dup;
            } else {
                out.td.root = dup;
            }
            out.td.parent[host] = dup;
            out.td.children[dup] = {host};
            for (int v : out.td.bags[dup]) occ[v].push_back(dup);
            host = dup;
        }
        out.clause_of_node[host] = static_cast<int>(ci);
        out.node_of_clause.push_back(host);
    }
    return out;
}

inline LabeledTreeDecomposition label(const TreeDecomposition& in, const CnfFormula& f) {
    return label(in, f.clauses);
}
inline LabeledTreeDecomposition label(const TreeDecomposition& in, const DnfFormula& f) {
    return label(in, f.terms);
}

} // namespace twg

#endif
