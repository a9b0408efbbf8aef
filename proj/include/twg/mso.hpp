#ifndef TWG_MSO_HPP
#define TWG_MSO_HPP

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "twg/common.hpp"
#include "twg/graph.hpp"

namespace twg {

// ------------------------------------------------------------- structures

struct Vocabulary {
    // name -> arity (>= 1); insertion order kept for reproducible output
    std::vector<std::pair<std::string, int>> symbols;

    int arity_of(const std::string& name) const {
        for (const auto& [n, a] : symbols)
            if (n == name) return a;
        return -1;
    }
    void declare(const std::string& name, int arity) {
        check(arity >= 1, "relation arity must be at least 1");
        check(arity_of(name) < 0, "relation declared twice");
        symbols.emplace_back(name, arity);
    }
};

// Finite relational structure with universe {1..n}.
struct RelationalStructure {
    int universe_size = 0;
    Vocabulary vocab;
    std::map<std::string, std::set<std::vector<int>>> relations;

    void add_tuple(const std::string& rel, const std::vector<int>& tuple) {
        int a = vocab.arity_of(rel);
        check(a >= 0, "tuple for undeclared relation");
        check(static_cast<int>(tuple.size()) == a, "tuple arity mismatch");
        for (int e : tuple) check(e >= 1 && e <= universe_size, "tuple element outside universe");
        relations[rel].insert(tuple);
    }

    const std::set<std::vector<int>>& tuples(const std::string& rel) const {
        static const std::set<std::vector<int>> empty;
        auto it = relations.find(rel);
        return it == relations.end() ? empty : it->second;
    }
};

// Gaifman (primal) graph: elements are adjacent iff they share a tuple.
inline Graph gaifman_graph(const RelationalStructure& s) {
    Graph g(s.universe_size);
    for (const auto& [name, tuples] : s.relations) {
        (void)name;
        for (const auto& t : tuples)
            for (std::size_t i = 0; i < t.size(); ++i)
                for (std::size_t j = i + 1; j < t.size(); ++j)
                    if (t[i] != t[j]) g.add_edge(t[i], t[j]);
    }
    return g;
}

// ---------------------------------------------------------------- formulas

enum class VarOrder { First, Second };

struct MsoQuant {
    Quant kind = Quant::Exists;
    VarOrder order = VarOrder::First;
    std::string name;
};

struct Atom {
    enum Kind { Relation, Member, Equals } kind = Equals;
    std::string rel;               // Relation: symbol name; Member: SO variable
    std::vector<std::string> args; // FO variable names (1 for Member, 2 for Equals)

    friend bool operator<(const Atom& a, const Atom& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        if (a.rel != b.rel) return a.rel < b.rel;
        return a.args < b.args;
    }
    friend bool operator==(const Atom& a, const Atom& b) {
        return a.kind == b.kind && a.rel == b.rel && a.args == b.args;
    }

    std::string str() const {
        if (kind == Equals) return args[0] + " = " + args[1];
        std::string s = rel + "(";
        for (std::size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + args[i];
        return s + ")";
    }
};

struct MsoLiteral {
    bool negated = false;
    Atom atom;
};

using MsoClause = std::vector<MsoLiteral>;

// Prenex MSO formula with a CNF-of-atoms matrix. Free second-order variables
// (Fagin problems) are listed separately in declaration order.
struct MsoFormula {
    std::vector<std::string> free_set_vars;
    std::vector<MsoQuant> prefix;
    std::vector<MsoClause> matrix;

    bool is_closed() const { return free_set_vars.empty(); }

    std::vector<std::string> fo_vars() const {
        std::vector<std::string> out;
        for (const auto& q : prefix)
            if (q.order == VarOrder::First) out.push_back(q.name);
        return out;
    }
    std::vector<std::string> so_vars() const {
        std::vector<std::string> out;
        for (const auto& q : prefix)
            if (q.order == VarOrder::Second) out.push_back(q.name);
        return out;
    }

    // Distinct atoms in order of first occurrence. Repeated occurrences of an
    // atom always evaluate identically in a prenex formula, so the set view
    // is what the encoders consume.
    std::vector<Atom> atoms() const {
        std::vector<Atom> out;
        for (const auto& cl : matrix)
            for (const auto& lit : cl) {
                bool seen = false;
                for (const auto& a : out)
                    if (a == lit.atom) { seen = true; break; }
                if (!seen) out.push_back(lit.atom);
            }
        return out;
    }

    // Alternations in the bound prefix.
    int qa() const {
        int alt = 0;
        for (std::size_t i = 1; i < prefix.size(); ++i)
            if (prefix[i].kind != prefix[i - 1].kind) ++alt;
        return alt;
    }

    // Longest run of equally-quantified consecutive variables.
    int bs() const {
        int best = 0, run = 0;
        for (std::size_t i = 0; i < prefix.size(); ++i) {
            run = (i > 0 && prefix[i].kind == prefix[i - 1].kind) ? run + 1 : 1;
            best = std::max(best, run);
        }
        return best;
    }

    // Formula size: quantifiers + distinct atoms + connectives, where the
    // connectives are the |, & and ! occurrences of the matrix.
    int size() const {
        int connectives = 0;
        for (const auto& cl : matrix) {
            if (!cl.empty()) connectives += static_cast<int>(cl.size()) - 1;
            for (const auto& lit : cl) connectives += lit.negated ? 1 : 0;
        }
        if (!matrix.empty()) connectives += static_cast<int>(matrix.size()) - 1;
        return static_cast<int>(prefix.size() + free_set_vars.size()) +
               static_cast<int>(atoms().size()) + connectives;
    }

    std::string str() const {
        std::ostringstream os;
        for (const auto& v : free_set_vars) os << "free2 " << v << " ";
        for (const auto& q : prefix) {
            os << (q.kind == Quant::Exists ? "exists" : "forall")
               << (q.order == VarOrder::Second ? "2 " : " ") << q.name << " ";
        }
        os << ".";
        for (std::size_t i = 0; i < matrix.size(); ++i) {
            os << (i ? " & (" : " (");
            for (std::size_t j = 0; j < matrix[i].size(); ++j) {
                os << (j ? " | " : "") << (matrix[i][j].negated ? "!" : "")
                   << matrix[i][j].atom.str();
            }
            os << ")";
        }
        return os.str();
    }
};

// ----------------------------------------------------------------- parsing

// Structure file format:
//   p struct <universe-size>
//   r <name> <arity>
//   t <name> <e1> ... <ea>
// with 'c'-comments; elements are 1-based.
inline RelationalStructure parse_structure(std::istream& in) {
    RelationalStructure s;
    bool header = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream iss(line);
        std::string tag;
        if (!(iss >> tag) || tag == "c") continue;
        if (tag == "p") {
            std::string kind;
            int n = -1;
            if (!(iss >> kind >> n) || kind != "struct" || n < 0)
                throw parse_error("bad 'p struct' header", lineno);
            s.universe_size = n;
            header = true;
        } else if (tag == "r") {
            if (!header) throw parse_error("'r' before header", lineno);
            std::string name;
            int arity = 0;
            if (!(iss >> name >> arity)) throw parse_error("bad 'r' line", lineno);
            try {
                s.vocab.declare(name, arity);
            } catch (const std::exception& e) {
                throw parse_error(e.what(), lineno);
            }
        } else if (tag == "t") {
            if (!header) throw parse_error("'t' before header", lineno);
            std::string name;
            if (!(iss >> name)) throw parse_error("bad 't' line", lineno);
            std::vector<int> tuple;
            int e;
            while (iss >> e) tuple.push_back(e);
            try {
                s.add_tuple(name, tuple);
            } catch (const std::exception& e2) {
                throw parse_error(e2.what(), lineno);
            }
        } else {
            throw parse_error("unknown line tag '" + tag + "'", lineno);
        }
    }
    if (!header) throw parse_error("missing 'p struct' header");
    return s;
}

inline void write_structure(std::ostream& out, const RelationalStructure& s) {
    out << "p struct " << s.universe_size << "\n";
    for (const auto& [name, arity] : s.vocab.symbols) out << "r " << name << " " << arity << "\n";
    for (const auto& [name, arity] : s.vocab.symbols) {
        (void)arity;
        for (const auto& t : s.tuples(name)) {
            out << "t " << name;
            for (int e : t) out << " " << e;
            out << "\n";
        }
    }
}

namespace detail {

struct MsoTokenizer {
    std::string text;
    std::size_t pos = 0;
    int line = 1;

    explicit MsoTokenizer(std::string t) : text(std::move(t)) {}

    void skip_ws() {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == '#') {
                while (pos < text.size() && text[pos] != '\n') ++pos;
            } else if (c == '\n') {
                ++line;
                ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                ++pos;
            } else {
                break;
            }
        }
    }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool accept(char c) {
        if (peek() == c) { ++pos; return true; }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) throw parse_error(std::string("expected '") + c + "'", line);
    }

    static bool name_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    }

    std::string name() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && name_char(text[pos])) ++pos;
        if (pos == start) throw parse_error("expected a name", line);
        return text.substr(start, pos - start);
    }
};

inline void check_rebind(const std::string& v, const std::set<std::string>& fo,
                         const std::set<std::string>& so, const std::set<std::string>& free_so,
                         int line) {
    if (fo.count(v) || so.count(v) || free_so.count(v))
        throw parse_error("variable '" + v + "' bound twice", line);
}

} // namespace detail

// MSO text format (grammar also documented in the README):
//   formula := { "free2" NAME } { quant } "." matrix
//   quant   := ("exists2"|"forall2"|"exists"|"forall") NAME
//   matrix  := clause { "&" clause }
//   clause  := [ "(" ] unit { "|" unit } [ ")" ]
//   unit    := lit | "(" lit { "&" lit } ")"      (conjunction is distributed)
//   lit     := [ "!" ] atom
//   atom    := NAME "(" name { "," name } ")" | name "=" name | "(" atom ")"
// A one-argument application whose name is not in the vocabulary is read as
// set membership in the second-order variable of that name.
inline MsoFormula parse_mso(const std::string& text, const Vocabulary& vocab) {
    detail::MsoTokenizer tk(text);
    MsoFormula f;
    std::set<std::string> bound_fo, bound_so, free_so;

    // prefix and declarations
    while (true) {
        tk.skip_ws();
        std::size_t save = tk.pos;
        if (tk.eof()) throw parse_error("formula has no matrix", tk.line);
        if (tk.peek() == '.') { tk.expect('.'); break; }
        std::string kw = tk.name();
        auto bind = [&](Quant q, VarOrder ord) {
            std::string v = tk.name();
            detail::check_rebind(v, bound_fo, bound_so, free_so, tk.line);
            f.prefix.push_back({q, ord, v});
            (ord == VarOrder::First ? bound_fo : bound_so).insert(v);
        };
        if (kw == "free2") {
            std::string v = tk.name();
            detail::check_rebind(v, bound_fo, bound_so, free_so, tk.line);
            f.free_set_vars.push_back(v);
            free_so.insert(v);
        } else if (kw == "exists2") {
            bind(Quant::Exists, VarOrder::Second);
        } else if (kw == "forall2") {
            bind(Quant::Forall, VarOrder::Second);
        } else if (kw == "exists") {
            bind(Quant::Exists, VarOrder::First);
        } else if (kw == "forall") {
            bind(Quant::Forall, VarOrder::First);
        } else {
            tk.pos = save;
            throw parse_error("expected quantifier or '.', got '" + kw + "'", tk.line);
        }
    }

    auto parse_atom = [&](auto&& self) -> Atom {
        if (tk.accept('(')) {
            Atom a = self(self);
            tk.expect(')');
            return a;
        }
        std::string n = tk.name();
        if (tk.accept('(')) {
            std::vector<std::string> args;
            args.push_back(tk.name());
            while (tk.accept(',')) args.push_back(tk.name());
            tk.expect(')');
            for (const auto& a : args)
                if (!bound_fo.count(a))
                    throw parse_error("unbound first-order variable '" + a + "'", tk.line);
            int arity = vocab.arity_of(n);
            if (arity >= 0) {
                if (static_cast<int>(args.size()) != arity)
                    throw parse_error("relation '" + n + "' expects " + std::to_string(arity) +
                                          " arguments",
                                      tk.line);
                return Atom{Atom::Relation, n, args};
            }
            if (args.size() != 1)
                throw parse_error("set membership '" + n + "' takes one argument", tk.line);
            if (!bound_so.count(n) && !free_so.count(n))
                throw parse_error("unbound set variable '" + n + "'", tk.line);
            return Atom{Atom::Member, n, args};
        }
        tk.expect('=');
        std::string rhs = tk.name();
        if (!bound_fo.count(n) || !bound_fo.count(rhs))
            throw parse_error("equality over unbound first-order variable", tk.line);
        return Atom{Atom::Equals, "", {n, rhs}};
    };

    auto parse_lit = [&]() -> MsoLiteral {
        MsoLiteral lit;
        while (tk.accept('!')) lit.negated = !lit.negated;
        lit.atom = parse_atom(parse_atom);
        return lit;
    };

    // A unit is a literal or a parenthesized conjunction of literals;
    // conjunctions inside a clause are distributed into CNF afterwards.
    // Parentheses are ambiguous between grouping an atom and grouping a
    // conjunction, so '(' is resolved by look-ahead on the following token.
    auto parse_unit = [&]() -> std::vector<MsoLiteral> {
        tk.skip_ws();
        std::size_t save = tk.pos;
        int save_line = tk.line;
        if (tk.accept('(')) {
            std::vector<MsoLiteral> conj;
            conj.push_back(parse_lit());
            if (tk.accept(')')) return conj;          // parenthesized literal
            while (tk.accept('&')) conj.push_back(parse_lit());
            if (tk.accept(')')) return conj;
            tk.pos = save;
            tk.line = save_line;
        }
        return {parse_lit()};
    };

    // matrix
    while (true) {
        bool wrapped = tk.accept('(');
        std::vector<std::vector<MsoLiteral>> units;
        units.push_back(parse_unit());
        while (tk.accept('|')) units.push_back(parse_unit());
        if (wrapped) tk.expect(')');
        // distribute: one clause per choice of literal from each conjunction
        std::vector<MsoClause> clauses{{}};
        for (const auto& unit : units) {
            if (unit.size() == 1) {
                for (auto& cl : clauses) cl.push_back(unit[0]);
            } else {
                std::vector<MsoClause> next;
                for (const auto& cl : clauses)
                    for (const auto& lit : unit) {
                        MsoClause c = cl;
                        c.push_back(lit);
                        next.push_back(std::move(c));
                    }
                clauses = std::move(next);
            }
        }
        for (auto& cl : clauses) f.matrix.push_back(std::move(cl));
        if (!tk.accept('&')) break;
    }
    if (!tk.eof()) throw parse_error("trailing input after matrix", tk.line);
    return f;
}

} // namespace twg

#endif
