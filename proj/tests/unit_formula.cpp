#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "support/gen.hpp"
#include "twg/brute.hpp"
#include "twg/formula.hpp"
#include "twg/graph.hpp"
#include "twg/io.hpp"

using namespace twg;

TEST_CASE("conditioning a CNF") {
    CnfFormula f;
    f.num_vars = 2;
    f.add_clause({1, -2});

    CnfFormula sat = condition(f, Assignment({1}));
    CHECK(sat.clauses.empty()); // satisfied clause vanishes

    CnfFormula rest = condition(f, Assignment({2}));
    REQUIRE(rest.clauses.size() == 1);
    CHECK(rest.clauses[0] == Clause{1}); // falsified literal removed
}

TEST_CASE("conditioning a DNF") {
    DnfFormula f;
    f.num_vars = 2;
    f.add_term({1, 2});
    DnfFormula out = condition(f, Assignment({-1}));
    CHECK(out.terms.empty()); // empty DNF = contradiction
}

TEST_CASE("evaluate") {
    CnfFormula contradiction;
    contradiction.num_vars = 1;
    contradiction.add_clause({1});
    contradiction.add_clause({-1});
    CHECK_FALSE(evaluate(contradiction, Assignment({1})));
    CHECK_FALSE(evaluate(contradiction, Assignment({-1})));

    CnfFormula empty_cnf; // no vars, no clauses
    CHECK(evaluate(empty_cnf, Assignment{}));

    DnfFormula empty_dnf;
    CHECK_FALSE(evaluate(empty_dnf, Assignment{}));

    CnfFormula f;
    f.num_vars = 2;
    f.add_clause({1, 2});
    CHECK_THROWS_AS(evaluate(f, Assignment({1})), invalid_input); // partial
}

TEST_CASE("conditioning composes over disjoint assignments") {
    gen::Rng rng(7);
    for (int it = 0; it < 200; ++it) {
        CnfFormula f = gen::random_cnf(rng, 6, 6);
        std::vector<Lit> a, b;
        for (int v = 1; v <= f.num_vars; ++v) {
            int r = gen::pick(rng, 0, 5);
            if (r == 0) a.push_back(v);
            else if (r == 1) a.push_back(-v);
            else if (r == 2) b.push_back(v);
            else if (r == 3) b.push_back(-v);
        }
        std::vector<Lit> both = a;
        both.insert(both.end(), b.begin(), b.end());
        CnfFormula lhs = condition(condition(f, Assignment(a)), Assignment(b));
        CnfFormula rhs = condition(f, Assignment(both));
        CHECK(lhs.clauses == rhs.clauses);
    }
}

TEST_CASE("evaluate matches truth-table semantics exhaustively") {
    // all CNFs over <= 3 vars with <= 3 clauses (clauses of length <= 3)
    auto universe = gen::all_clauses(3, 3);
    gen::Rng rng(13);
    // full exhaustion over 3 clauses from the universe is large; sweep all
    // singletons and pairs exhaustively plus a random slice of triples
    auto check_formula = [&](const std::vector<Clause>& cls) {
        CnfFormula f;
        f.num_vars = 3;
        f.clauses = cls;
        for (int m = 0; m < 8; ++m) {
            std::vector<Lit> lits;
            for (int v = 1; v <= 3; ++v) lits.push_back(m & (1 << (v - 1)) ? v : -v);
            Assignment beta(lits);
            bool expected = true;
            for (const auto& c : cls) {
                bool sat = false;
                for (Lit l : c) sat = sat || beta.contains(l);
                expected = expected && sat;
            }
            CHECK(evaluate(f, beta) == expected);
        }
    };
    for (const auto& c1 : universe) check_formula({c1});
    for (std::size_t i = 0; i < universe.size(); i += 7)
        for (std::size_t j = i; j < universe.size(); j += 11) check_formula({universe[i], universe[j]});
    for (int it = 0; it < 300; ++it) {
        std::vector<Clause> cls;
        for (int k = 0; k < 3; ++k) cls.push_back(universe[gen::pick(rng, 0, (int)universe.size() - 1)]);
        check_formula(cls);
    }
}

TEST_CASE("primal graph") {
    CnfFormula f;
    f.num_vars = 5;
    f.add_clause({1, 2, -5});
    f.add_clause({-2, 3, 4, 5});
    f.add_clause({1, 2, -4, -5});
    Graph g = primal_graph(f);
    std::vector<std::pair<int, int>> expect = {{1, 2}, {1, 4}, {1, 5}, {2, 3}, {2, 4},
                                               {2, 5}, {3, 4}, {3, 5}, {4, 5}};
    CHECK(g.edges() == expect);

    CnfFormula unit;
    unit.num_vars = 1;
    unit.add_clause({1});
    CHECK(primal_graph(unit).edges().empty());

    CnfFormula path;
    path.num_vars = 3;
    path.add_clause({1, 2});
    path.add_clause({2, 3});
    CHECK(primal_graph(path).edges() == std::vector<std::pair<int, int>>{{1, 2}, {2, 3}});

    // duplicate clause changes nothing
    CnfFormula dup = path;
    dup.add_clause({1, 2});
    CHECK(primal_graph(dup).edges() == primal_graph(path).edges());
}

TEST_CASE("quantifier prefix statistics") {
    QbfFormula q;
    q.cnf.num_vars = 5;
    q.prefix.push_back({Quant::Exists, {1, 2, 3}});
    q.prefix.push_back({Quant::Forall, {4, 5}});
    q.normalize_prefix();
    CHECK(q.qa() == 1);
    CHECK(q.block_count() == 2);
    CHECK(q.block_sizes() == std::vector<int>{3, 2});

    QbfFormula single;
    single.cnf.num_vars = 1;
    single.prefix.push_back({Quant::Exists, {1}});
    CHECK(single.qa() == 0);

    QbfFormula three;
    three.cnf.num_vars = 3;
    three.prefix.push_back({Quant::Exists, {1}});
    three.prefix.push_back({Quant::Forall, {2}});
    three.prefix.push_back({Quant::Exists, {3}});
    CHECK(three.qa() == 2);

    QbfFormula merged;
    merged.cnf.num_vars = 3;
    merged.prefix.push_back({Quant::Exists, {1}});
    merged.prefix.push_back({Quant::Exists, {2}});
    merged.prefix.push_back({Quant::Forall, {3}});
    merged.normalize_prefix();
    CHECK(merged.block_count() == 2);
}

TEST_CASE("dimacs round trip") {
    CnfFormula f;
    f.num_vars = 4;
    f.add_clause({1, -3});
    f.add_clause({-2, 4});
    f.add_clause({});
    std::ostringstream out;
    write_dimacs_cnf(out, f, {"example"});
    std::istringstream in(out.str());
    CnfFormula g = read_dimacs_cnf(in);
    CHECK(g.num_vars == f.num_vars);
    CHECK(g.clauses == f.clauses);

    std::istringstream bad("p cnf 1 1\n2 0\n");
    CHECK_THROWS_AS(read_dimacs_cnf(bad), parse_error);
}

TEST_CASE("qdimacs round trip") {
    QbfFormula q;
    q.cnf.num_vars = 3;
    q.cnf.add_clause({1, -2});
    q.cnf.add_clause({2, 3});
    q.prefix.push_back({Quant::Forall, {1}});
    q.prefix.push_back({Quant::Exists, {2, 3}});
    std::ostringstream out;
    write_qdimacs(out, q);
    std::istringstream in(out.str());
    QbfFormula r = read_qdimacs(in);
    CHECK(r.matrix_is_cnf);
    CHECK(r.prefix.size() == 2);
    CHECK(r.prefix[0].kind == Quant::Forall);
    CHECK(r.cnf.clauses == q.cnf.clauses);
    validate_qbf(r);
}

TEST_CASE("wcnf round trip with rational weights") {
    WcnfFormula f;
    f.num_vars = 3;
    f.hard.push_back(make_clause({1, 2}));
    f.soft.emplace_back(make_clause({-1}), Rational(1, 2));
    f.soft.emplace_back(make_clause({3}), Rational(-2, 3));
    std::ostringstream out;
    write_wcnf(out, f);
    std::istringstream in(out.str());
    WcnfFormula g = read_wcnf(in);
    REQUIRE(g.soft.size() == 2);
    CHECK(g.hard == f.hard);
    CHECK(g.soft[0].second == Rational(1, 2));
    CHECK(g.soft[1].second == Rational(-2, 3));
}

TEST_CASE("rational arithmetic stays exact") {
    Rational a(1, 3), b(1, 6);
    CHECK(a + b == Rational(1, 2));
    CHECK((a - b).str() == "1/6");
    CHECK(Rational::parse("-4/6") == Rational(-2, 3));
    CHECK(Rational(3) > Rational(5, 2));
}

TEST_CASE("big integers") {
    BigUint a = 1;
    for (int i = 0; i < 70; ++i) a = a * 2;
    CHECK(a.str() == "1180591620717411303424"); // 2^70
    BigUint b = a + a;
    CHECK(b.str() == "2361183241434822606848");
    CHECK(BigUint(0).str() == "0");
    CHECK(a < b);
}

TEST_CASE("tautological input clauses survive conditioning untouched") {
    CnfFormula f;
    f.num_vars = 2;
    f.add_clause({1, -1, 2});
    CnfFormula c = condition(f, Assignment({-2}));
    REQUIRE(c.clauses.size() == 1);
    CHECK(c.clauses[0] == make_clause({1, -1}));
    CHECK(evaluate(f, Assignment({1, -2})));
    CHECK(evaluate(f, Assignment({-1, -2})));
}
