#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "support/gen.hpp"
#include "twg/brute.hpp"
#include "twg/card.hpp"
#include "twg/dpll.hpp"
#include "twg/solver.hpp"

using namespace twg;

namespace {

// Expected count: assignments of f's variables that satisfy f and whose
// number of true X-literals compares as requested.
long long popcount_oracle(const CnfFormula& f, const std::vector<Lit>& X, int c, CardCmp cmp) {
    long long count = 0;
    for (long long m = 0; m < (1LL << f.num_vars); ++m) {
        std::vector<Lit> lits;
        for (int v = 1; v <= f.num_vars; ++v) lits.push_back(m & (1LL << (v - 1)) ? v : -v);
        Assignment beta(lits);
        if (!evaluate(f, beta)) continue;
        int pop = 0;
        for (Lit l : X) pop += beta.contains(l) ? 1 : 0;
        bool ok = cmp == CardCmp::Le ? pop <= c : cmp == CardCmp::Eq ? pop == c : pop >= c;
        if (ok) ++count;
    }
    return count;
}

// Projected model count of the encoding on f's variables, via the DPLL
// oracle: one satisfiability probe per original assignment.
long long projected_count(const CardEncoding& enc, int orig_vars) {
    DpllSolver solver(enc.formula);
    long long count = 0;
    for (long long m = 0; m < (1LL << orig_vars); ++m) {
        std::vector<Lit> assume;
        for (int v = 1; v <= orig_vars; ++v) assume.push_back(m & (1LL << (v - 1)) ? v : -v);
        if (solver.solve(assume)) ++count;
    }
    return count;
}

} // namespace

TEST_CASE("cardinality over an empty formula") {
    CnfFormula f;
    f.num_vars = 3;
    TreeDecomposition td = min_fill(primal_graph(f));
    CardEncoding enc = encode_cardinality(f, {1, 2, 3}, 1, CardCmp::Eq, td);
    CHECK(projected_count(enc, 3) == 3); // exactly-one over three free vars

    CHECK(validate(primal_graph(enc.formula), enc.td).valid());
    CHECK(enc.width_out <= enc.width_in + 3 * 1 + 3);
}

TEST_CASE("cardinality le zero forces the literal false") {
    CnfFormula f;
    f.num_vars = 1;
    TreeDecomposition td = min_fill(primal_graph(f));
    CardEncoding enc = encode_cardinality(f, {1}, 0, CardCmp::Le, td);
    DpllSolver s(enc.formula);
    CHECK_FALSE(s.solve({1}));
    CHECK(s.solve({-1}));
}

TEST_CASE("cardinality on a path decomposition") {
    CnfFormula f;
    f.num_vars = 6;
    TreeDecomposition td;
    int prev = td.add_node({1, 2}, -1);
    prev = td.add_node({2, 3}, prev);
    prev = td.add_node({3, 4}, prev);
    prev = td.add_node({4, 5}, prev);
    td.add_node({5, 6}, prev);
    CardEncoding enc = encode_cardinality(f, {1, 2, 3, 4, 5, 6}, 2, CardCmp::Le, td);
    CHECK(projected_count(enc, 6) == 22); // C(6,0)+C(6,1)+C(6,2)
    CHECK(enc.width_out <= enc.width_in + 3 * 2 + 3);
}

TEST_CASE("watch mapping invariants") {
    TreeDecomposition td;
    int a = td.add_node({1, 2}, -1);
    int b = td.add_node({2, 3}, a);
    td.add_node({2, 4}, a);
    (void)b;
    WatchResult wr = build_watch(td, {1, 2, -3, 4});
    std::map<Lit, int> hits;
    for (int t = 0; t < wr.td.size(); ++t) {
        Lit w = wr.watch.watched[t];
        if (w == 0) continue;
        CHECK(wr.td.children[t].size() == 1);
        CHECK(wr.td.bag_contains(t, var_of(w)));
        hits[w]++;
    }
    for (Lit l : {1, 2, -3, 4}) CHECK(hits[l] == 1);
    CHECK(wr.td.width() == td.width());

    // empty X: nothing watched, leaves appended only
    WatchResult none = build_watch(td, {});
    for (Lit w : none.watch.watched) CHECK(w == 0);

    CHECK_THROWS_AS(build_watch(td, {9}), invalid_input);
}

TEST_CASE("cardinality encoding is exact on random instances") {
    gen::Rng rng(41);
    for (int it = 0; it < 120; ++it) {
        CnfFormula f = gen::random_cnf(rng, 7, 6);
        std::vector<Lit> X;
        for (int v = 1; v <= f.num_vars; ++v) {
            int r = gen::pick(rng, 0, 2);
            if (r == 0) X.push_back(v);
            else if (r == 1) X.push_back(-v);
        }
        int c = gen::pick(rng, 0, 3);
        CardCmp cmp = static_cast<CardCmp>(gen::pick(rng, 0, 2));
        TreeDecomposition td = min_fill(primal_graph(f));
        CardEncoding enc = encode_cardinality(f, X, c, cmp, td);

        CHECK(projected_count(enc, f.num_vars) == popcount_oracle(f, X, c, cmp));
        CHECK(enc.width_out <= enc.width_in + 3 * c + 3);
        CHECK(validate(primal_graph(enc.formula), enc.td).valid());

        // the auxiliary extension is unique, so the unprojected count agrees
        auto ltd = label(enc.td, enc.formula);
        CHECK(td_count(enc.formula, ltd).str() ==
              std::to_string(popcount_oracle(f, X, c, cmp)));
    }
}

TEST_CASE("counter cells are monotone in every model") {
    gen::Rng rng(43);
    for (int it = 0; it < 30; ++it) {
        CnfFormula f = gen::random_cnf(rng, 4, 3);
        std::vector<Lit> X;
        for (int v = 1; v <= f.num_vars; ++v)
            if (gen::pick(rng, 0, 1)) X.push_back(v);
        int c = gen::pick(rng, 1, 3);
        TreeDecomposition td = min_fill(primal_graph(f));
        CardEncoding enc = encode_cardinality(f, X, c, CardCmp::Le, td);
        DpllSolver solver(enc.formula);
        for (long long m = 0; m < (1LL << f.num_vars); ++m) {
            std::vector<Lit> assume;
            for (int v = 1; v <= f.num_vars; ++v) assume.push_back(m & (1LL << (v - 1)) ? v : -v);
            if (!solver.solve(assume)) continue;
            std::vector<Lit> model = solver.model();
            std::set<Lit> true_lits(model.begin(), model.end());
            for (int t = 0; t < enc.td.size(); ++t)
                for (int i = 2; i <= enc.cells; ++i) {
                    Lit hi = enc.node_counter[t] + (i - 1);
                    Lit lo = enc.node_counter[t] + (i - 2);
                    if (true_lits.count(hi)) CHECK(true_lits.count(lo));
                }
        }
    }
}
