#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "support/gen.hpp"
#include "twg/brute.hpp"
#include "twg/io.hpp"
#include "twg/treedec.hpp"

using namespace twg;

namespace {

Graph cycle(int n) {
    Graph g(n);
    for (int v = 1; v <= n; ++v) g.add_edge(v, v % n + 1);
    return g;
}

Graph clique(int n) {
    Graph g(n);
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v) g.add_edge(u, v);
    return g;
}

} // namespace

TEST_CASE("validate accepts the Big Dipper decomposition") {
    // seven stars a..g = 1..7, path a-b-c-d-e-f-g-d
    Graph g(7);
    g.add_edge(1, 2);
    g.add_edge(2, 3);
    g.add_edge(3, 4);
    g.add_edge(4, 5);
    g.add_edge(5, 6);
    g.add_edge(6, 7);
    g.add_edge(7, 4);
    TreeDecomposition td;
    int b1 = td.add_node({1, 2}, -1);
    int b2 = td.add_node({2, 3}, b1);
    int b3 = td.add_node({3, 4}, b2);
    int b4 = td.add_node({4, 6}, b3);
    td.add_node({4, 6, 5}, b4);
    td.add_node({4, 6, 7}, b4);
    auto rep = validate(g, td);
    CHECK(rep.valid());
    CHECK(rep.width == 2);
}

TEST_CASE("validate flags failures") {
    Graph path(3);
    path.add_edge(1, 2);
    path.add_edge(2, 3);
    TreeDecomposition one_bag;
    one_bag.add_node({1, 2, 3}, -1);
    auto rep = validate(path, one_bag);
    CHECK(rep.valid());
    CHECK(rep.width == 2);

    Graph edge(2);
    edge.add_edge(1, 2);
    TreeDecomposition split;
    int a = split.add_node({1}, -1);
    split.add_node({2}, a);
    auto bad = validate(edge, split);
    CHECK_FALSE(bad.valid());
    REQUIRE(bad.bad_edges.size() == 1);
    CHECK(bad.bad_edges[0] == std::pair<int, int>(1, 2));

    // disconnected occurrence of vertex 1
    TreeDecomposition disc;
    int r = disc.add_node({1}, -1);
    int m = disc.add_node({2}, r);
    disc.add_node({1, 2}, m);
    auto bad2 = validate(edge, disc);
    CHECK_FALSE(bad2.valid());
    CHECK(bad2.bad_vertices == std::vector<int>{1});
}

TEST_CASE("min_fill on standard graphs") {
    auto c4 = cycle(4);
    TreeDecomposition td = min_fill(c4);
    CHECK(validate(c4, td).valid());
    CHECK(td.width() == 2); // brute-force optimum for C4 is 2 and min-fill hits it
    CHECK(brute_treewidth(c4) == 2);

    Graph tree(5);
    tree.add_edge(1, 2);
    tree.add_edge(1, 3);
    tree.add_edge(3, 4);
    tree.add_edge(3, 5);
    TreeDecomposition tt = min_fill(tree);
    CHECK(validate(tree, tt).valid());
    CHECK(tt.width() == 1);

    auto k4 = clique(4);
    TreeDecomposition kt = min_fill(k4);
    CHECK(validate(k4, kt).valid());
    CHECK(kt.width() == 3);

    TreeDecomposition empty = min_fill(Graph(0));
    CHECK(empty.width() == -1);
    CHECK(empty.size() == 1);
}

TEST_CASE("min_fill is valid on random graphs") {
    gen::Rng rng(21);
    for (int it = 0; it < 80; ++it) {
        Graph g = gen::random_graph(rng, gen::pick(rng, 1, 8), 0.4);
        TreeDecomposition td = min_fill(g);
        CHECK(validate(g, td).valid());
        CHECK(td.root == 0);
    }
}

TEST_CASE("min_fill width is never below the true treewidth (<=5 vertices, exhaustive)") {
    for (int n = 1; n <= 5; ++n) {
        int maxm = n * (n - 1) / 2;
        for (int mask = 0; mask < (1 << maxm); ++mask) {
            Graph g(n);
            int bit = 0;
            for (int u = 1; u <= n; ++u)
                for (int v = u + 1; v <= n; ++v, ++bit)
                    if (mask & (1 << bit)) g.add_edge(u, v);
            TreeDecomposition td = min_fill(g);
            REQUIRE(validate(g, td).valid());
            REQUIRE(td.width() >= brute_treewidth(g));
        }
    }
}

TEST_CASE("normalize binarizes without changing width") {
    TreeDecomposition star;
    int r = star.add_node({1, 2}, -1);
    star.add_node({1, 3}, r);
    star.add_node({1, 4}, r);
    star.add_node({1, 5}, r);
    TreeDecomposition out = normalize(star);
    CHECK(out.width() == star.width());
    for (int t = 0; t < out.size(); ++t) CHECK(out.children[t].size() <= 2);

    // already-binary stays structurally identical in size
    TreeDecomposition bin;
    int a = bin.add_node({1}, -1);
    bin.add_node({1, 2}, a);
    bin.add_node({1, 3}, a);
    CHECK(normalize(bin).size() == bin.size());

    TreeDecomposition single;
    single.add_node({1}, -1);
    CHECK(normalize(single).size() == 1);
}

TEST_CASE("labeling assigns each clause to one covering bag") {
    // running example: three clauses on five variables
    CnfFormula f;
    f.num_vars = 5;
    f.add_clause({1, 2, -5});
    f.add_clause({-2, 3, 4, 5});
    f.add_clause({1, 2, -4, -5});
    TreeDecomposition td;
    int t1 = td.add_node({1, 2, 5}, -1);
    int t2 = td.add_node({1, 2, 4, 5}, t1);
    int t3 = td.add_node({2, 3, 4, 5}, t2);
    LabeledTreeDecomposition ltd = label(td, f);
    CHECK(ltd.node_of_clause[0] == t1);
    CHECK(ltd.node_of_clause[1] == t3);
    CHECK(ltd.node_of_clause[2] == t2);
    CHECK(ltd.td.width() == td.width());

    // two clauses covered only by the same bag: it gets duplicated
    CnfFormula g;
    g.num_vars = 2;
    g.add_clause({1, 2});
    g.add_clause({-1, -2});
    TreeDecomposition small;
    small.add_node({1, 2}, -1);
    LabeledTreeDecomposition l2 = label(small, g);
    CHECK(l2.td.size() == 2);
    CHECK(l2.node_of_clause[0] != l2.node_of_clause[1]);
    CHECK(l2.td.width() == 1);
    auto rep = validate(primal_graph(g), l2.td);
    CHECK(rep.valid());

    // empty formula: nothing labeled
    CnfFormula none;
    none.num_vars = 2;
    LabeledTreeDecomposition l3 = label(small, none);
    CHECK(l3.node_of_clause.empty());

    // uncoverable clause
    CnfFormula wide;
    wide.num_vars = 3;
    wide.add_clause({1, 2, 3});
    CHECK_THROWS_AS(label(small, wide), invalid_input);
}

TEST_CASE("width conventions") {
    TreeDecomposition td;
    td.add_node({}, -1);
    CHECK(td.width() == -1);
    TreeDecomposition td2;
    int a = td2.add_node({1, 2, 3}, -1);
    int b = td2.add_node({2, 3, 4, 5}, a);
    td2.add_node({4, 5, 6}, b);
    CHECK(td2.width() == 3);
}

TEST_CASE("slim limits introduced vertices") {
    TreeDecomposition td;
    td.add_node({1, 2, 3, 4, 5}, -1);
    TreeDecomposition out = slim(td, 2);
    Graph g(5); // no edges; coverage of vertices is what matters here
    CHECK(validate(g, out).valid());
    for (int t = 0; t < out.size(); ++t) CHECK(out.introduced(t).size() <= 2);
    CHECK(out.width() == td.width());
}

TEST_CASE("append_empty_leaves") {
    TreeDecomposition td;
    int r = td.add_node({1}, -1);
    td.add_node({1, 2}, r);
    TreeDecomposition out = append_empty_leaves(td);
    int leaves = 0;
    for (int t = 0; t < out.size(); ++t)
        if (out.children[t].empty()) {
            ++leaves;
            CHECK(out.bags[t].empty());
        }
    CHECK(leaves == 1);
}

TEST_CASE("pace td file round trip with labels") {
    TreeDecomposition td;
    int a = td.add_node({1, 2}, -1);
    td.add_node({2, 3}, a);
    std::vector<int> labels = {-1, 0};
    std::ostringstream out;
    write_td(out, td, 3, &labels);
    std::istringstream in(out.str());
    TdFile file = read_td(in);
    CHECK(file.declared_vertices == 3);
    CHECK(file.td.bags == td.bags);
    CHECK(file.td.root == td.root);
    CHECK(file.clause_of_node == labels);
}

TEST_CASE("pace gr file round trip") {
    Graph g(4);
    g.add_edge(1, 2);
    g.add_edge(3, 4);
    std::ostringstream out;
    write_gr(out, g);
    std::istringstream in(out.str());
    Graph h = read_gr(in);
    CHECK(h.n == 4);
    CHECK(h.edges() == g.edges());
}
