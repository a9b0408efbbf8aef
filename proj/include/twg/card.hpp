#ifndef TWG_CARD_HPP
#define TWG_CARD_HPP

#include <map>
#include <vector>

#include "twg/common.hpp"
#include "twg/formula.hpp"
#include "twg/treedec.hpp"

namespace twg {

// card_{cmp c}(X) as a sequential unary counter distributed along a tree
// decomposition. The counter saturates at c+1, so width grows by at most
// 3(c+1) no matter how large X is.

enum class CardCmp { Le, Eq, Ge };

struct WatchMapping {
    std::vector<Lit> watched; // per node; 0 = watches nothing
};

struct WatchResult {
    TreeDecomposition td; // input extended by duplicated bags
    WatchMapping watch;
};

// Build a watch mapping satisfying:
//   1. only one-child nodes watch,
//   2. every literal of X is watched exactly once,
//   3. the watched variable lies in the node's bag.
// Bags are copied where needed; leaf bags are emptied first so the counter
// base case holds.
inline WatchResult build_watch(const TreeDecomposition& td_in, const std::vector<Lit>& X) {
    WatchResult res;
    res.td = append_empty_leaves(td_in);
    res.watch.watched.assign(res.td.size(), 0);

    std::vector<Lit> lits = X;
    std::sort(lits.begin(), lits.end(), lit_less);
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());

    for (Lit l : lits) {
        int v = var_of(l);
        int host = -1;
        for (int t = 0; t < res.td.size(); ++t)
            if (res.td.children[t].size() == 1 && res.watch.watched[t] == 0 &&
                res.td.bag_contains(t, v)) {
                host = t;
                break;
            }
        if (host < 0) {
            // copy some bag containing v and insert the copy above it
            int orig = -1;
            for (int t = 0; t < res.td.size(); ++t)
                if (res.td.bag_contains(t, v)) { orig = t; break; }
            if (orig < 0) throw invalid_input("cardinality literal variable occurs in no bag");
            int par = res.td.parent[orig];
            int dup = res.td.add_node(res.td.bags[orig], -1);
            res.watch.watched.push_back(0);
            res.td.parent[dup] = par;
            if (par >= 0) {
                auto& ch = res.td.children[par];
                *std::find(ch.begin(), ch.end(), orig) = dup;
            } else {
                res.td.root = dup;
            }
            res.td.parent[orig] = dup;
            res.td.children[dup] = {orig};
            host = dup;
        }
        res.watch.watched[host] = l;
    }
    return res;
}

struct CardEncoding {
    CnfFormula formula;     // input clauses followed by the counter clauses
    TreeDecomposition td;   // width certificate
    int width_in = 0;
    int width_out = 0;
    int counter_base = 0;   // first counter variable id
    int cells = 0;          // c+1
    std::vector<int> node_counter; // node -> first cell variable id
};

// counter[t][i] (1-based cell i) is true iff at least i watched literals are
// true in the subtree rooted at t, capped at c+1. The two-child addition is
// clausified against that thermometer reading; the counter definitions force
// the thermometer shape in every model, so this is equivalent to the plain
// biconditional with totalized zero-contributions.
inline CardEncoding encode_cardinality(const CnfFormula& f, const std::vector<Lit>& X, int c,
                                       CardCmp cmp, const TreeDecomposition& td_in) {
    check(c >= 0, "cardinality bound must be nonnegative");
    CardEncoding enc;
    enc.width_in = td_in.width();

    TreeDecomposition base = normalize(td_in);
    WatchResult wr = build_watch(base, X);
    const TreeDecomposition& td = wr.td;

    enc.cells = c + 1;
    enc.counter_base = f.num_vars + 1;
    enc.node_counter.assign(td.size(), 0);
    for (int t = 0; t < td.size(); ++t) enc.node_counter[t] = enc.counter_base + t * enc.cells;

    enc.formula.num_vars = f.num_vars + td.size() * enc.cells;
    enc.formula.clauses = f.clauses;
    auto ctr = [&](int t, int i) -> Lit { return enc.node_counter[t] + (i - 1); };
    auto add = [&](std::vector<Lit> lits) { enc.formula.add_clause(std::move(lits)); };

    for (int t = 0; t < td.size(); ++t) {
        const auto& ch = td.children[t];
        if (ch.empty()) {
            for (int i = 1; i <= enc.cells; ++i) add({-ctr(t, i)});
        } else if (ch.size() == 1) {
            int u = ch[0];
            Lit w = wr.watch.watched[t];
            for (int i = 1; i <= enc.cells; ++i) {
                Lit a = ctr(t, i), b = ctr(u, i);
                if (w == 0) {
                    add({-a, b});
                    add({a, -b});
                } else if (i == 1) { // a <-> b | w
                    add({-a, b, w});
                    add({a, -b});
                    add({a, -w});
                } else { // a <-> b_i | (b_{i-1} & w)
                    Lit bp = ctr(u, i - 1);
                    add({-a, b, bp});
                    add({-a, b, w});
                    add({a, -b});
                    add({a, -bp, -w});
                }
            }
        } else {
            check(ch.size() == 2, "decomposition not binary");
            int u = ch[0], v = ch[1];
            for (int i = 1; i <= enc.cells; ++i) {
                Lit a = ctr(t, i);
                // forward: count(u) + count(v) >= i
                for (int j = 1; j <= i; ++j) add({-a, ctr(u, j), ctr(v, i - j + 1)});
                // backward: any witnessing split forces the cell
                add({a, -ctr(u, i)});
                add({a, -ctr(v, i)});
                for (int j = 1; j < i; ++j) add({a, -ctr(u, j), -ctr(v, i - j)});
            }
        }
    }

    int root = td.root;
    switch (cmp) {
        case CardCmp::Le:
            add({-ctr(root, c + 1)});
            break;
        case CardCmp::Eq:
            if (c >= 1) add({ctr(root, c)});
            add({-ctr(root, c + 1)});
            break;
        case CardCmp::Ge:
            if (c >= 1) add({ctr(root, c)});
            break;
    }

    // width certificate: each bag absorbs its own counter cells plus the
    // cells of its children
    enc.td = td;
    for (int t = 0; t < td.size(); ++t) {
        std::vector<int> bag = td.bags[t];
        for (int i = 1; i <= enc.cells; ++i) bag.push_back(ctr(t, i));
        for (int chld : td.children[t])
            for (int i = 1; i <= enc.cells; ++i) bag.push_back(ctr(chld, i));
        std::sort(bag.begin(), bag.end());
        enc.td.bags[t] = std::move(bag);
    }
    enc.width_out = enc.td.width();
    if (enc.width_out > enc.width_in + 3 * c + 3)
        throw bound_error("cardinality width bound k + 3c + 3 violated");
    return enc;
}

} // namespace twg

#endif
