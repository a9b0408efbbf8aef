#include <catch2/catch_amalgamated.hpp>

#include "support/gen.hpp"
#include "twg/brute.hpp"
#include "twg/dpll.hpp"
#include "twg/qelim.hpp"

using namespace twg;

namespace {

// random closed QBF; innermost block kind decides the matrix kind
QbfFormula random_qbf(gen::Rng& rng, int max_vars, int max_blocks, int max_rows) {
    QbfFormula q;
    int n = gen::pick(rng, 1, max_vars);
    int blocks = std::min(gen::pick(rng, 1, max_blocks), n);
    std::vector<int> cut;
    for (int i = 0; i < blocks - 1; ++i) cut.push_back(gen::pick(rng, 1, n - 1));
    cut.push_back(n);
    std::sort(cut.begin(), cut.end());
    cut.erase(std::unique(cut.begin(), cut.end()), cut.end());
    Quant kind = gen::pick(rng, 0, 1) ? Quant::Exists : Quant::Forall;
    int start = 1;
    for (int c : cut) {
        QuantBlock b;
        b.kind = kind;
        for (int v = start; v <= c; ++v) b.vars.push_back(v);
        q.prefix.push_back(b);
        start = c + 1;
        kind = kind == Quant::Exists ? Quant::Forall : Quant::Exists;
    }
    q.normalize_prefix();
    bool cnf = q.prefix.back().kind == Quant::Exists;
    q.matrix_is_cnf = cnf;
    std::vector<Clause> rows;
    int m = gen::pick(rng, 1, max_rows);
    for (int i = 0; i < m; ++i) {
        int len = std::min(gen::pick(rng, 1, 3), n);
        std::vector<int> vars(n);
        for (int v = 1; v <= n; ++v) vars[v - 1] = v;
        std::shuffle(vars.begin(), vars.end(), rng);
        std::vector<Lit> lits;
        for (int j = 0; j < len; ++j) lits.push_back(gen::pick(rng, 0, 1) ? vars[j] : -vars[j]);
        rows.push_back(make_clause(lits));
    }
    if (cnf) {
        q.cnf.num_vars = n;
        q.cnf.clauses = rows;
    } else {
        q.dnf.num_vars = n;
        q.dnf.terms = rows;
    }
    return q;
}

LabeledTreeDecomposition labeled_for(const QbfFormula& q) {
    TreeDecomposition td = normalize(min_fill(primal_graph(q)));
    return q.matrix_is_cnf ? label(td, q.cnf) : label(td, q.dnf);
}

bool output_valid(const QbfFormula& q) { return brute_qbf_eval(q, 40); }

} // namespace

TEST_CASE("eliminate_forall on one-variable tautology and contradiction") {
    QbfFormula taut; // forall x . (x) | (!x)
    taut.matrix_is_cnf = false;
    taut.dnf.num_vars = 1;
    taut.dnf.add_term({1});
    taut.dnf.add_term({-1});
    taut.prefix.push_back({Quant::Forall, {1}});
    EliminationResult res = eliminate_forall(taut, labeled_for(taut));
    CHECK(res.q.matrix_is_cnf);
    CHECK(res.q.prefix.size() == 1);
    CHECK(res.q.prefix[0].kind == Quant::Exists);
    CHECK(dpll_sat(res.q.cnf));
    CHECK(res.log.bound_holds);
    CHECK(validate(primal_graph(res.q.cnf), res.td).valid());

    QbfFormula bad; // forall x . (x)
    bad.matrix_is_cnf = false;
    bad.dnf.num_vars = 1;
    bad.dnf.add_term({1});
    bad.prefix.push_back({Quant::Forall, {1}});
    EliminationResult r2 = eliminate_forall(bad, labeled_for(bad));
    CHECK_FALSE(dpll_sat(r2.q.cnf));
}

TEST_CASE("eliminate_exists on one-variable instances") {
    QbfFormula good; // exists x . (x)
    good.cnf.num_vars = 1;
    good.cnf.add_clause({1});
    good.prefix.push_back({Quant::Exists, {1}});
    EliminationResult res = eliminate_exists(good, labeled_for(good));
    CHECK_FALSE(res.q.matrix_is_cnf);
    REQUIRE(res.q.prefix.size() == 1);
    CHECK(res.q.prefix[0].kind == Quant::Forall);
    CHECK(output_valid(res.q));

    QbfFormula contra;
    contra.cnf.num_vars = 1;
    contra.cnf.add_clause({1});
    contra.cnf.add_clause({-1});
    contra.prefix.push_back({Quant::Exists, {1}});
    EliminationResult r2 = eliminate_exists(contra, labeled_for(contra));
    CHECK_FALSE(output_valid(r2.q));
}

TEST_CASE("wrong shapes are rejected") {
    QbfFormula q;
    q.cnf.num_vars = 1;
    q.cnf.add_clause({1});
    q.prefix.push_back({Quant::Exists, {1}});
    CHECK_THROWS_AS(eliminate_forall(q, labeled_for(q)), invalid_input);
}

TEST_CASE("single elimination preserves validity and certifies width") {
    gen::Rng rng(61);
    for (int it = 0; it < 400; ++it) {
        QbfFormula q = random_qbf(rng, 8, 3, 4);
        LabeledTreeDecomposition ltd = labeled_for(q);
        int k = ltd.td.width();
        EliminationResult res = q.matrix_is_cnf ? eliminate_exists(q, ltd, {})
                                                : eliminate_forall(q, ltd, {});
        CHECK(res.q.block_count() <= q.block_count());
        CHECK(res.q.matrix_is_cnf != q.matrix_is_cnf);
        CHECK(res.log.width_out <= 12LL << k);

        const Graph g = primal_graph(res.q);
        CHECK(validate(g, res.td).valid());

        CHECK(brute_qbf_eval(q) == output_valid(res.q));
    }
}

TEST_CASE("projected model counts biject across eliminate_forall") {
    gen::Rng rng(67);
    int done = 0;
    while (done < 150) {
        QbfFormula q = random_qbf(rng, 6, 2, 3);
        if (q.block_count() != 2 || q.matrix_is_cnf) continue;
        if (q.prefix[0].kind != Quant::Exists) continue;
        ++done;
        const auto& outer = q.prefix[0].vars;
        EliminationResult res = eliminate_forall(q, labeled_for(q));

        // outer assignments under which the input is valid
        long long expect = 0;
        for (long long m = 0; m < (1LL << outer.size()); ++m) {
            std::vector<Lit> fixed;
            for (std::size_t i = 0; i < outer.size(); ++i)
                fixed.push_back((m >> i) & 1 ? outer[i] : -outer[i]);
            QbfFormula sub = q;
            sub.prefix.erase(sub.prefix.begin());
            sub.free_vars = outer;
            if (BruteQbfEval(sub, 40).valid(fixed)) ++expect;
        }
        // outer assignments extendable to a model of the output
        long long got = 0;
        DpllSolver solver(res.q.cnf);
        for (long long m = 0; m < (1LL << outer.size()); ++m) {
            std::vector<Lit> fixed;
            for (std::size_t i = 0; i < outer.size(); ++i) {
                int v = res.var_map.at(outer[i]);
                fixed.push_back((m >> i) & 1 ? v : -v);
            }
            if (solver.solve(fixed)) ++got;
        }
        CHECK(expect == got);
    }
}

TEST_CASE("qsat_to_sat round trips against the brute evaluator") {
    QbfFormula q; // forall x exists y . y <-> x
    q.cnf.num_vars = 2;
    q.cnf.add_clause({-1, 2});
    q.cnf.add_clause({1, -2});
    q.prefix.push_back({Quant::Forall, {1}});
    q.prefix.push_back({Quant::Exists, {2}});
    QsatToSatResult res = qsat_to_sat(q, min_fill(primal_graph(q)));
    CHECK(dpll_sat(res.cnf));
    CHECK(res.rounds.size() == 2); // one per eliminated block

    QbfFormula invalid; // exists x forall y . (x & y)
    invalid.matrix_is_cnf = false;
    invalid.dnf.num_vars = 2;
    invalid.dnf.add_term({1, 2});
    invalid.prefix.push_back({Quant::Exists, {1}});
    invalid.prefix.push_back({Quant::Forall, {2}});
    QsatToSatResult r2 = qsat_to_sat(invalid, min_fill(primal_graph(invalid)));
    CHECK_FALSE(dpll_sat(r2.cnf));
}

TEST_CASE("qsat_to_sat on random multi-block instances") {
    gen::Rng rng(71);
    int completed = 0, capped = 0;
    for (int it = 0; it < 200; ++it) {
        QbfFormula q = random_qbf(rng, 6, 3, 3);
        QsatToSatResult res;
        Limits lim;
        lim.max_clauses = 1 << 17; // unit-test budget: cut towers early
        try {
            res = qsat_to_sat(q, min_fill(primal_graph(q)), lim);
        } catch (const resource_limit&) {
            ++capped; // inherent tower growth on deep prefixes
            continue;
        }
        ++completed;
        for (const auto& log : res.rounds) CHECK(log.bound_holds);
        CHECK(validate(primal_graph(res.cnf), res.td).valid());
        CHECK(dpll_sat(res.cnf) == brute_qbf_eval(q));
    }
    CHECK(completed >= 150); // the corpus is sized so most instances finish
}

TEST_CASE("qsat_to_sat handles an innermost universal block over a CNF") {
    // forall x forall y . (x | y) — QDIMACS-style input, matrix stays CNF
    QbfFormula q;
    q.cnf.num_vars = 2;
    q.cnf.add_clause({1, 2});
    q.prefix.push_back({Quant::Forall, {1, 2}});
    QsatToSatResult res = qsat_to_sat(q, min_fill(primal_graph(q)));
    REQUIRE(res.rounds.size() == 2); // matrix_to_dnf + eliminate_forall
    CHECK(res.rounds[0].kind == "matrix_to_dnf");
    CHECK_FALSE(dpll_sat(res.cnf));

    QbfFormula taut; // forall x . (x | !x) as DNF input
    taut.matrix_is_cnf = false;
    taut.dnf.num_vars = 1;
    taut.dnf.add_term({1});
    taut.dnf.add_term({-1});
    taut.prefix.push_back({Quant::Forall, {1}});
    QsatToSatResult r2 = qsat_to_sat(taut, min_fill(primal_graph(taut)));
    CHECK(dpll_sat(r2.cnf));
}

TEST_CASE("resource caps raise resource_limit") {
    QbfFormula q; // forall x exists y . y <-> x (guaranteed elimination work)
    q.cnf.num_vars = 2;
    q.cnf.add_clause({-1, 2});
    q.cnf.add_clause({1, -2});
    q.prefix.push_back({Quant::Forall, {1}});
    q.prefix.push_back({Quant::Exists, {2}});
    Limits tiny;
    tiny.max_clauses = 2;
    bool threw = false;
    try {
        qsat_to_sat(q, min_fill(primal_graph(q)), tiny);
    } catch (const resource_limit&) {
        threw = true;
    }
    CHECK(threw);
}
