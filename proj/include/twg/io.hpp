#ifndef TWG_IO_HPP
#define TWG_IO_HPP

#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "twg/common.hpp"
#include "twg/formula.hpp"
#include "twg/graph.hpp"
#include "twg/rational.hpp"
#include "twg/treedec.hpp"

namespace twg {

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

inline int to_int(const std::string& s, int lineno) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw parse_error("expected integer, got '" + s + "'", lineno);
    }
}

} // namespace detail

// ---------------------------------------------------------------- DIMACS CNF

inline CnfFormula read_dimacs_cnf(std::istream& in) {
    CnfFormula f;
    bool header = false;
    std::string line;
    int lineno = 0;
    std::vector<Lit> cur;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = detail::split_ws(line);
        if (toks.empty() || toks[0] == "c") continue;
        if (toks[0] == "p") {
            if (toks.size() != 4 || toks[1] != "cnf") throw parse_error("bad 'p cnf' header", lineno);
            f.num_vars = detail::to_int(toks[2], lineno);
            header = true;
            continue;
        }
        if (!header) throw parse_error("clause before 'p cnf' header", lineno);
        for (const auto& t : toks) {
            int l = detail::to_int(t, lineno);
            if (l == 0) {
                f.add_clause(cur);
                cur.clear();
            } else {
                if (var_of(l) > f.num_vars) throw parse_error("literal exceeds declared variables", lineno);
                cur.push_back(l);
            }
        }
    }
    if (!header) throw parse_error("missing 'p cnf' header");
    if (!cur.empty()) throw parse_error("unterminated clause at end of file");
    return f;
}

inline void write_dimacs_cnf(std::ostream& out, const CnfFormula& f,
                             const std::vector<std::string>& comments = {}) {
    for (const auto& c : comments) out << "c " << c << "\n";
    out << "p cnf " << f.num_vars << " " << f.clauses.size() << "\n";
    for (const auto& c : f.clauses) {
        for (Lit l : c) out << l << " ";
        out << "0\n";
    }
}

// ------------------------------------------------- internal "p dnf" format
// Same shape as DIMACS with a `p dnf` header; lines are terms. Non-standard,
// used for the DNF side of the toolchain.

inline DnfFormula read_dnf(std::istream& in) {
    DnfFormula f;
    bool header = false;
    std::string line;
    int lineno = 0;
    std::vector<Lit> cur;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = detail::split_ws(line);
        if (toks.empty() || toks[0] == "c") continue;
        if (toks[0] == "p") {
            if (toks.size() != 4 || toks[1] != "dnf") throw parse_error("bad 'p dnf' header", lineno);
            f.num_vars = detail::to_int(toks[2], lineno);
            header = true;
            continue;
        }
        if (!header) throw parse_error("term before 'p dnf' header", lineno);
        for (const auto& t : toks) {
            int l = detail::to_int(t, lineno);
            if (l == 0) {
                f.add_term(cur);
                cur.clear();
            } else {
                cur.push_back(l);
            }
        }
    }
    if (!header) throw parse_error("missing 'p dnf' header");
    return f;
}

inline void write_dnf(std::ostream& out, const DnfFormula& f,
                      const std::vector<std::string>& comments = {}) {
    for (const auto& c : comments) out << "c " << c << "\n";
    out << "p dnf " << f.num_vars << " " << f.terms.size() << "\n";
    for (const auto& t : f.terms) {
        for (Lit l : t) out << l << " ";
        out << "0\n";
    }
}

// ------------------------------------------------------------------ QDIMACS
// Standard QDIMACS for CNF matrices. QBFs with a DNF matrix use the sibling
// header `p qdnf` with the same a/e prefix lines (non-standard, documented).

inline QbfFormula read_qdimacs(std::istream& in) {
    QbfFormula q;
    bool header = false;
    bool is_cnf = true;
    std::string line;
    int lineno = 0;
    std::vector<Lit> cur;
    int num_vars = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = detail::split_ws(line);
        if (toks.empty() || toks[0] == "c") continue;
        if (toks[0] == "p") {
            if (toks.size() != 4 || (toks[1] != "cnf" && toks[1] != "qdnf"))
                throw parse_error("bad QDIMACS header", lineno);
            is_cnf = toks[1] == "cnf";
            num_vars = detail::to_int(toks[2], lineno);
            q.matrix_is_cnf = is_cnf;
            q.cnf.num_vars = num_vars;
            q.dnf.num_vars = num_vars;
            header = true;
            continue;
        }
        if (!header) throw parse_error("content before header", lineno);
        if (toks[0] == "a" || toks[0] == "e") {
            QuantBlock b;
            b.kind = toks[0] == "a" ? Quant::Forall : Quant::Exists;
            for (std::size_t i = 1; i < toks.size(); ++i) {
                int v = detail::to_int(toks[i], lineno);
                if (v == 0) break;
                if (v < 0 || v > num_vars) throw parse_error("quantified variable out of range", lineno);
                b.vars.push_back(v);
            }
            q.prefix.push_back(std::move(b));
            continue;
        }
        for (const auto& t : toks) {
            int l = detail::to_int(t, lineno);
            if (l == 0) {
                if (is_cnf) q.cnf.add_clause(cur);
                else q.dnf.add_term(cur);
                cur.clear();
            } else {
                cur.push_back(l);
            }
        }
    }
    if (!header) throw parse_error("missing header");
    q.normalize_prefix();
    // Unquantified variables default to an innermost existential block for
    // CNF inputs (QDIMACS convention).
    std::set<int> bound(q.free_vars.begin(), q.free_vars.end());
    for (const auto& b : q.prefix) bound.insert(b.vars.begin(), b.vars.end());
    std::vector<int> missing;
    for (int v = 1; v <= num_vars; ++v)
        if (!bound.count(v)) missing.push_back(v);
    if (!missing.empty()) {
        if (!q.prefix.empty() && q.prefix.back().kind == Quant::Exists)
            q.prefix.back().vars.insert(q.prefix.back().vars.end(), missing.begin(), missing.end());
        else
            q.prefix.push_back({Quant::Exists, std::move(missing)});
        q.normalize_prefix();
    }
    return q;
}

inline void write_qdimacs(std::ostream& out, const QbfFormula& q,
                          const std::vector<std::string>& comments = {}) {
    for (const auto& c : comments) out << "c " << c << "\n";
    if (q.matrix_is_cnf)
        out << "p cnf " << q.cnf.num_vars << " " << q.cnf.clauses.size() << "\n";
    else
        out << "p qdnf " << q.dnf.num_vars << " " << q.dnf.terms.size() << "\n";
    for (const auto& b : q.prefix) {
        out << (b.kind == Quant::Forall ? "a" : "e");
        for (int v : b.vars) out << " " << v;
        out << " 0\n";
    }
    const auto& rows = q.matrix_is_cnf ? q.cnf.clauses : q.dnf.terms;
    for (const auto& c : rows) {
        for (Lit l : c) out << l << " ";
        out << "0\n";
    }
}

// -------------------------------------------------------------------- WCNF
// Post-2022 MaxSAT-Evaluation style: `h <lits> 0` for hard clauses, integer
// weight prefix for soft ones. Rational weights are scaled to a common
// denominator; the scale is recorded in a comment so reading restores them.

inline void write_wcnf(std::ostream& out, const WcnfFormula& f,
                       const std::vector<std::string>& comments = {}) {
    for (const auto& c : comments) out << "c " << c << "\n";
    long long scale = 1;
    for (const auto& [c, w] : f.soft) {
        (void)c;
        scale = std::lcm(scale, w.den());
    }
    out << "c scale " << scale << "\n";
    out << "c vars " << f.num_vars << "\n";
    for (const auto& c : f.hard) {
        out << "h ";
        for (Lit l : c) out << l << " ";
        out << "0\n";
    }
    for (const auto& [c, w] : f.soft) {
        out << (w.num() * (scale / w.den())) << " ";
        for (Lit l : c) out << l << " ";
        out << "0\n";
    }
}

inline WcnfFormula read_wcnf(std::istream& in) {
    WcnfFormula f;
    long long scale = 1;
    std::string line;
    int lineno = 0;
    int max_var = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = detail::split_ws(line);
        if (toks.empty()) continue;
        if (toks[0] == "c") {
            if (toks.size() == 3 && toks[1] == "scale") scale = std::stoll(toks[2]);
            if (toks.size() == 3 && toks[1] == "vars") f.num_vars = detail::to_int(toks[2], lineno);
            continue;
        }
        if (toks[0] == "p") continue; // tolerate legacy headers
        bool is_hard = toks[0] == "h";
        long long weight_num = 0;
        if (!is_hard) {
            try {
                weight_num = std::stoll(toks[0]);
            } catch (const std::exception&) {
                throw parse_error("bad clause line", lineno);
            }
        }
        std::vector<Lit> lits;
        for (std::size_t i = 1; i < toks.size(); ++i) {
            int l = detail::to_int(toks[i], lineno);
            if (l == 0) break;
            lits.push_back(l);
            max_var = std::max(max_var, var_of(l));
        }
        if (is_hard) f.hard.push_back(make_clause(lits));
        else f.soft.emplace_back(make_clause(lits), Rational(weight_num, scale));
    }
    f.num_vars = std::max(f.num_vars, max_var);
    return f;
}

// ------------------------------------------------------------- PACE formats

// `p tw <n> <m>` followed by edge lines.
inline Graph read_gr(std::istream& in) {
    Graph g;
    bool header = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = detail::split_ws(line);
        if (toks.empty() || toks[0] == "c") continue;
        if (toks[0] == "p") {
            if (toks.size() != 4 || toks[1] != "tw") throw parse_error("bad 'p tw' header", lineno);
            g = Graph(detail::to_int(toks[2], lineno));
            header = true;
            continue;
        }
        if (!header) throw parse_error("edge before header", lineno);
        if (toks.size() != 2) throw parse_error("edge line needs two endpoints", lineno);
        g.add_edge(detail::to_int(toks[0], lineno), detail::to_int(toks[1], lineno));
    }
    if (!header) throw parse_error("missing 'p tw' header");
    return g;
}

inline void write_gr(std::ostream& out, const Graph& g) {
    auto es = g.edges();
    out << "p tw " << g.n << " " << es.size() << "\n";
    for (auto [u, v] : es) out << u << " " << v << "\n";
}

// `s td <bags> <maxbagsize> <vertices>`, `b <id> <v...>` bag lines and edge
// lines between bag ids. Labeled decompositions add `c label <node> <clause>`
// comments (1-based node ids on disk, 0-based in memory).
inline void write_td(std::ostream& out, const TreeDecomposition& td, int num_vertices,
                     const std::vector<int>* clause_of_node = nullptr) {
    std::size_t maxbag = 0;
    for (const auto& b : td.bags) maxbag = std::max(maxbag, b.size());
    out << "s td " << td.size() << " " << maxbag << " " << num_vertices << "\n";
    out << "c root " << td.root + 1 << "\n";
    if (clause_of_node)
        for (int t = 0; t < td.size(); ++t)
            if ((*clause_of_node)[t] >= 0) out << "c label " << t + 1 << " " << (*clause_of_node)[t] << "\n";
    for (int t = 0; t < td.size(); ++t) {
        out << "b " << t + 1;
        for (int v : td.bags[t]) out << " " << v;
        out << "\n";
    }
    for (int t = 0; t < td.size(); ++t)
        if (td.parent[t] >= 0) out << td.parent[t] + 1 << " " << t + 1 << "\n";
}

struct TdFile {
    TreeDecomposition td;
    int declared_vertices = 0;
    std::vector<int> clause_of_node; // empty if the file carries no labels
};

inline TdFile read_td(std::istream& in) {
    TdFile out;
    std::string line;
    int lineno = 0;
    int nbags = -1;
    int root_hint = -1;
    std::vector<std::pair<int, int>> tree_edges;
    std::vector<std::pair<int, int>> labels;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = detail::split_ws(line);
        if (toks.empty()) continue;
        if (toks[0] == "c") {
            if (toks.size() == 3 && toks[1] == "root") root_hint = detail::to_int(toks[2], lineno) - 1;
            if (toks.size() == 4 && toks[1] == "label")
                labels.emplace_back(detail::to_int(toks[2], lineno) - 1, detail::to_int(toks[3], lineno));
            continue;
        }
        if (toks[0] == "s") {
            if (toks.size() != 5 || toks[1] != "td") throw parse_error("bad 's td' line", lineno);
            nbags = detail::to_int(toks[2], lineno);
            out.declared_vertices = detail::to_int(toks[4], lineno);
            out.td.bags.assign(nbags, {});
            out.td.parent.assign(nbags, -1);
            out.td.children.assign(nbags, {});
            continue;
        }
        if (nbags < 0) throw parse_error("content before 's td' line", lineno);
        if (toks[0] == "b") {
            int id = detail::to_int(toks[1], lineno) - 1;
            if (id < 0 || id >= nbags) throw parse_error("bag id out of range", lineno);
            std::vector<int> bag;
            for (std::size_t i = 2; i < toks.size(); ++i) bag.push_back(detail::to_int(toks[i], lineno));
            std::sort(bag.begin(), bag.end());
            bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
            out.td.bags[id] = std::move(bag);
            continue;
        }
        if (toks.size() != 2) throw parse_error("bad tree edge line", lineno);
        tree_edges.emplace_back(detail::to_int(toks[0], lineno) - 1, detail::to_int(toks[1], lineno) - 1);
    }
    if (nbags < 0) throw parse_error("missing 's td' line");
    if (nbags == 0) throw parse_error("decomposition needs at least one bag");
    // Orient the tree from the root (declared or node 0).
    std::vector<std::vector<int>> nb(nbags);
    for (auto [a, b] : tree_edges) {
        if (a < 0 || a >= nbags || b < 0 || b >= nbags) throw parse_error("tree edge out of range");
        nb[a].push_back(b);
        nb[b].push_back(a);
    }
    int root = root_hint >= 0 ? root_hint : 0;
    std::vector<char> seen(nbags, 0);
    std::queue<int> q;
    q.push(root);
    seen[root] = 1;
    out.td.root = root;
    while (!q.empty()) {
        int t = q.front();
        q.pop();
        for (int u : nb[t])
            if (!seen[u]) {
                seen[u] = 1;
                out.td.parent[u] = t;
                out.td.children[t].push_back(u);
                q.push(u);
            }
    }
    for (char s : seen)
        if (!s) throw parse_error("decomposition tree is not connected");
    for (auto& ch : out.td.children) std::sort(ch.begin(), ch.end());
    if (!labels.empty()) {
        out.clause_of_node.assign(nbags, -1);
        for (auto [node, clause] : labels) {
            if (node < 0 || node >= nbags) throw parse_error("label node out of range");
            out.clause_of_node[node] = clause;
        }
    }
    return out;
}

// Convenience file wrappers.
template <typename T, typename Reader>
inline T read_file(const std::string& path, Reader reader) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");
    return reader(in);
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace twg

#endif
