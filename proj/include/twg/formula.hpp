#ifndef TWG_FORMULA_HPP
#define TWG_FORMULA_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "twg/common.hpp"
#include "twg/rational.hpp"

namespace twg {

// Literals are DIMACS-style signed integers: variable ids are >= 1, negation
// is sign flip. neg(neg(l)) == l holds trivially.
using Lit = int;

inline int var_of(Lit l) { return l < 0 ? -l : l; }
inline Lit neg(Lit l) { return -l; }
inline bool positive(Lit l) { return l > 0; }

// A clause (or DNF term — structurally identical) is a set of literals kept
// as a sorted, duplicate-free vector. Order: by variable id, positive first.
using Clause = std::vector<Lit>;
using Term = Clause;

inline bool lit_less(Lit a, Lit b) {
    if (var_of(a) != var_of(b)) return var_of(a) < var_of(b);
    return a > b; // positive before negative
}

inline Clause make_clause(std::vector<Lit> lits) {
    std::sort(lits.begin(), lits.end(), lit_less);
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    return lits;
}

inline bool is_tautological(const Clause& c) {
    for (std::size_t i = 0; i + 1 < c.size(); ++i)
        if (var_of(c[i]) == var_of(c[i + 1])) return true;
    return false;
}

struct CnfFormula {
    int num_vars = 0;
    std::vector<Clause> clauses; // insertion order is part of the value

    void add_clause(std::vector<Lit> lits) {
        Clause c = make_clause(std::move(lits));
        for (Lit l : c) check(var_of(l) >= 1 && var_of(l) <= num_vars, "literal out of range");
        clauses.push_back(std::move(c));
    }
};

struct DnfFormula {
    int num_vars = 0;
    std::vector<Term> terms;

    void add_term(std::vector<Lit> lits) {
        Term t = make_clause(std::move(lits));
        for (Lit l : t) check(var_of(l) >= 1 && var_of(l) <= num_vars, "literal out of range");
        terms.push_back(std::move(t));
    }
};

struct WcnfFormula {
    int num_vars = 0;
    std::vector<Clause> hard;
    std::vector<std::pair<Clause, Rational>> soft;
};

// Partial assignment: at most one polarity per variable.
class Assignment {
  public:
    Assignment() = default;
    explicit Assignment(const std::vector<Lit>& lits) {
        for (Lit l : lits) set(l);
    }

    void set(Lit l) {
        auto it = val_.find(var_of(l));
        if (it != val_.end()) {
            check(it->second == positive(l), "assignment contains both polarities");
            return;
        }
        val_[var_of(l)] = positive(l);
    }

    // true / false / unassigned
    std::optional<bool> value(int var) const {
        auto it = val_.find(var);
        if (it == val_.end()) return std::nullopt;
        return it->second;
    }

    bool contains(Lit l) const {
        auto v = value(var_of(l));
        return v && *v == positive(l);
    }
    bool contradicts(Lit l) const {
        auto v = value(var_of(l));
        return v && *v != positive(l);
    }

    std::size_t size() const { return val_.size(); }
    const std::map<int, bool>& values() const { return val_; }

  private:
    std::map<int, bool> val_;
};

// psi | beta for CNF: drop clauses containing a literal of beta, strip
// literals falsified by beta from the rest. Clause order is preserved.
inline CnfFormula condition(const CnfFormula& f, const Assignment& beta) {
    CnfFormula out;
    out.num_vars = f.num_vars;
    for (const Clause& c : f.clauses) {
        bool satisfied = false;
        Clause rest;
        for (Lit l : c) {
            if (beta.contains(l)) { satisfied = true; break; }
            if (!beta.contradicts(l)) rest.push_back(l);
        }
        if (!satisfied) out.clauses.push_back(std::move(rest));
    }
    return out;
}

// psi | beta for DNF: drop terms containing a literal falsified by beta,
// strip beta's literals from the rest.
inline DnfFormula condition(const DnfFormula& f, const Assignment& beta) {
    DnfFormula out;
    out.num_vars = f.num_vars;
    for (const Term& t : f.terms) {
        bool contradicted = false;
        Term rest;
        for (Lit l : t) {
            if (beta.contradicts(l)) { contradicted = true; break; }
            if (!beta.contains(l)) rest.push_back(l);
        }
        if (!contradicted) out.terms.push_back(std::move(rest));
    }
    return out;
}

inline bool assigns_all(const Assignment& beta, int num_vars) {
    for (int v = 1; v <= num_vars; ++v)
        if (!beta.value(v)) return false;
    return true;
}

// Satisfying iff psi|beta = {} for CNF, iff {} in psi|beta for DNF.
inline bool evaluate(const CnfFormula& f, const Assignment& beta) {
    check(assigns_all(beta, f.num_vars), "evaluate requires a total assignment");
    return condition(f, beta).clauses.empty();
}

inline bool evaluate(const DnfFormula& f, const Assignment& beta) {
    check(assigns_all(beta, f.num_vars), "evaluate requires a total assignment");
    for (const Term& t : condition(f, beta).terms)
        if (t.empty()) return true;
    return false;
}

enum class Quant { Exists, Forall };

struct QuantBlock {
    Quant kind = Quant::Exists;
    std::vector<int> vars; // ordered, duplicate-free
};

// Prenex QBF. The matrix is a CNF iff the innermost block is existential,
// a DNF iff it is universal. free_vars holds variables deliberately left
// unquantified (projection targets of the Fagin pipelines); a closed QBF
// has none.
struct QbfFormula {
    std::vector<QuantBlock> prefix;
    bool matrix_is_cnf = true;
    CnfFormula cnf;
    DnfFormula dnf;
    std::vector<int> free_vars;

    int num_vars() const { return matrix_is_cnf ? cnf.num_vars : dnf.num_vars; }

    // Merge adjacent blocks of the same kind and drop empty ones.
    void normalize_prefix() {
        std::vector<QuantBlock> merged;
        for (auto& b : prefix) {
            if (b.vars.empty()) continue;
            if (!merged.empty() && merged.back().kind == b.kind)
                merged.back().vars.insert(merged.back().vars.end(), b.vars.begin(), b.vars.end());
            else
                merged.push_back(std::move(b));
        }
        prefix = std::move(merged);
    }

    // Number of alternations between adjacent blocks.
    int qa() const { return prefix.empty() ? 0 : static_cast<int>(prefix.size()) - 1; }
    int block_count() const { return static_cast<int>(prefix.size()); }
    std::vector<int> block_sizes() const {
        std::vector<int> s;
        for (const auto& b : prefix) s.push_back(static_cast<int>(b.vars.size()));
        return s;
    }
};

// Checks the structural invariants of a closed, normalized QBF.
inline void validate_qbf(const QbfFormula& q) {
    std::set<int> seen(q.free_vars.begin(), q.free_vars.end());
    for (std::size_t i = 0; i < q.prefix.size(); ++i) {
        check(!q.prefix[i].vars.empty(), "empty quantifier block");
        if (i > 0) check(q.prefix[i].kind != q.prefix[i - 1].kind, "prefix not alternation-normalized");
        for (int v : q.prefix[i].vars) check(seen.insert(v).second, "variable quantified twice");
    }
    if (!q.prefix.empty()) {
        bool inner_exists = q.prefix.back().kind == Quant::Exists;
        check(inner_exists == q.matrix_is_cnf, "matrix kind must match innermost quantifier");
    }
    auto check_vars = [&](const std::vector<Clause>& cls) {
        for (const auto& c : cls)
            for (Lit l : c) check(seen.count(var_of(l)) != 0, "matrix variable not quantified");
    };
    if (q.matrix_is_cnf) check_vars(q.cnf.clauses);
    else check_vars(q.dnf.terms);
}

} // namespace twg

#endif
