#ifndef TWG_BRUTE_HPP
#define TWG_BRUTE_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "twg/bigint.hpp"
#include "twg/common.hpp"
#include "twg/dpll.hpp"
#include "twg/formula.hpp"
#include "twg/graph.hpp"
#include "twg/mso.hpp"

namespace twg {

// Exhaustive-enumeration oracles. Every encoder in this library is tested
// against these, so they stay deliberately naive and share no code with the
// TD-guided solvers. The guard keeps accidental exponential blowups loud.
struct too_large : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void guard_dims(long long dims, long long limit = 24) {
    if (dims > limit) throw too_large("brute-force oracle over " + std::to_string(dims) + " dimensions");
}

namespace detail {
inline bool cnf_holds(const CnfFormula& f, const std::vector<signed char>& val) {
    for (const auto& c : f.clauses) {
        bool sat = false;
        for (Lit l : c)
            if ((val[var_of(l)] == 1) == (l > 0)) { sat = true; break; }
        if (!sat) return false;
    }
    return true;
}
inline bool dnf_holds(const DnfFormula& f, const std::vector<signed char>& val) {
    for (const auto& t : f.terms) {
        bool sat = true;
        for (Lit l : t)
            if ((val[var_of(l)] == 1) != (l > 0)) { sat = false; break; }
        if (sat) return true;
    }
    return false;
}
} // namespace detail

inline bool brute_sat(const CnfFormula& f) {
    guard_dims(f.num_vars);
    std::vector<signed char> val(f.num_vars + 1, -1);
    for (long long m = 0; m < (1LL << f.num_vars); ++m) {
        for (int v = 1; v <= f.num_vars; ++v) val[v] = (m >> (v - 1)) & 1 ? 1 : -1;
        if (detail::cnf_holds(f, val)) return true;
    }
    return false;
}

inline BigUint brute_count(const CnfFormula& f) {
    guard_dims(f.num_vars);
    BigUint count = 0;
    std::vector<signed char> val(f.num_vars + 1, -1);
    for (long long m = 0; m < (1LL << f.num_vars); ++m) {
        for (int v = 1; v <= f.num_vars; ++v) val[v] = (m >> (v - 1)) & 1 ? 1 : -1;
        if (detail::cnf_holds(f, val)) count += 1;
    }
    return count;
}

// Projected model count: distinct X-restrictions of models.
inline BigUint brute_pmc(const CnfFormula& f, const std::vector<int>& show) {
    guard_dims(f.num_vars);
    std::set<std::vector<signed char>> projections;
    std::vector<signed char> val(f.num_vars + 1, -1);
    for (long long m = 0; m < (1LL << f.num_vars); ++m) {
        for (int v = 1; v <= f.num_vars; ++v) val[v] = (m >> (v - 1)) & 1 ? 1 : -1;
        if (!detail::cnf_holds(f, val)) continue;
        std::vector<signed char> proj;
        for (int v : show) proj.push_back(val[v]);
        projections.insert(std::move(proj));
    }
    BigUint c = 0;
    for (std::size_t i = 0; i < projections.size(); ++i) c += 1;
    return c;
}

// Recursive QBF evaluation by quantifier expansion. The innermost block is
// decided by DPLL (CNF matrix) or by DPLL on the term-wise negation (DNF
// matrix), which keeps groundings with large auxiliary blocks tractable.
class BruteQbfEval {
  public:
    explicit BruteQbfEval(const QbfFormula& q, long long outer_guard = 24) : q_(q) {
        long long dims = 0;
        for (std::size_t i = 0; i + 1 < q.prefix.size(); ++i) dims += q.prefix[i].vars.size();
        guard_dims(dims, outer_guard);
    }

    // `fixed` pins free variables (and is empty for closed QBFs).
    bool valid(const std::vector<Lit>& fixed = {}) {
        assumptions_ = fixed;
        return eval(0);
    }

  private:
    const QbfFormula& q_;
    std::vector<Lit> assumptions_;

    bool decide_matrix() {
        if (q_.matrix_is_cnf) return dpll_sat(q_.cnf, assumptions_);
        // A DNF under assumptions holds for every completion iff no completion
        // falsifies all terms; falsifying every term is a CNF.
        CnfFormula neg;
        neg.num_vars = q_.dnf.num_vars;
        for (const auto& t : q_.dnf.terms) {
            std::vector<Lit> cl;
            for (Lit l : t) cl.push_back(twg::neg(l));
            neg.add_clause(cl);
        }
        return !dpll_sat(neg, assumptions_);
    }

    bool eval(std::size_t block) {
        if (block + 1 >= q_.prefix.size()) {
            // Remaining block (if any) matches the matrix kind; DPLL decides.
            return decide_matrix();
        }
        const QuantBlock& b = q_.prefix[block];
        std::size_t mark = assumptions_.size();
        long long combos = 1LL << b.vars.size();
        for (long long m = 0; m < combos; ++m) {
            assumptions_.resize(mark);
            for (std::size_t i = 0; i < b.vars.size(); ++i)
                assumptions_.push_back((m >> i) & 1 ? b.vars[i] : -b.vars[i]);
            bool sub = eval(block + 1);
            if (b.kind == Quant::Exists && sub) { assumptions_.resize(mark); return true; }
            if (b.kind == Quant::Forall && !sub) { assumptions_.resize(mark); return false; }
        }
        assumptions_.resize(mark);
        return b.kind == Quant::Forall;
    }
};

inline bool brute_qbf_eval(const QbfFormula& q, long long outer_guard = 24) {
    return BruteQbfEval(q, outer_guard).valid();
}

// ------------------------------------------------------------ MSO checking

// SO assignment: variable name -> element bitmask; FO: name -> element.
struct MsoEnv {
    std::map<std::string, unsigned long long> sets;
    std::map<std::string, int> elems;
};

inline bool eval_atom(const Atom& a, const RelationalStructure& s, const MsoEnv& env) {
    switch (a.kind) {
        case Atom::Equals:
            return env.elems.at(a.args[0]) == env.elems.at(a.args[1]);
        case Atom::Member: {
            int u = env.elems.at(a.args[0]);
            return (env.sets.at(a.rel) >> (u - 1)) & 1ULL;
        }
        case Atom::Relation: {
            std::vector<int> tuple;
            for (const auto& v : a.args) tuple.push_back(env.elems.at(v));
            return s.tuples(a.rel).count(tuple) != 0;
        }
    }
    return false;
}

inline bool eval_matrix(const MsoFormula& f, const RelationalStructure& s, const MsoEnv& env) {
    for (const auto& cl : f.matrix) {
        bool sat = false;
        for (const auto& lit : cl)
            if (eval_atom(lit.atom, s, env) != lit.negated) { sat = true; break; }
        if (!sat) return false;
    }
    return true;
}

// Model checking by enumerating set assignments and element assignments.
// `free_sets` instantiates the free second-order variables.
inline bool brute_mc_mso(const MsoFormula& f, const RelationalStructure& s,
                         const std::map<std::string, unsigned long long>& free_sets = {}) {
    check(s.universe_size <= 62, "universe too large for bitmask sets");
    long long dims = 0;
    for (const auto& q : f.prefix)
        dims += q.order == VarOrder::Second ? s.universe_size : 5; // ~log of universe
    guard_dims(dims, 40);
    for (const auto& v : f.free_set_vars)
        check(free_sets.count(v) != 0, "free set variable not instantiated");

    MsoEnv env;
    for (const auto& [k, v] : free_sets) env.sets[k] = v;

    struct Rec {
        const MsoFormula& f;
        const RelationalStructure& s;
        MsoEnv& env;
        bool run(std::size_t i) {
            if (i == f.prefix.size()) return eval_matrix(f, s, env);
            const auto& q = f.prefix[i];
            bool exists = q.kind == Quant::Exists;
            if (s.universe_size == 0 && q.order == VarOrder::First) return !exists;
            if (q.order == VarOrder::Second) {
                for (unsigned long long m = 0; m < (1ULL << s.universe_size); ++m) {
                    env.sets[q.name] = m;
                    bool sub = run(i + 1);
                    if (exists && sub) return true;
                    if (!exists && !sub) return false;
                }
                env.sets.erase(q.name);
            } else {
                for (int u = 1; u <= s.universe_size; ++u) {
                    env.elems[q.name] = u;
                    bool sub = run(i + 1);
                    if (exists && sub) return true;
                    if (!exists && !sub) return false;
                }
                env.elems.erase(q.name);
            }
            return !exists;
        }
    } rec{f, s, env};
    return rec.run(0);
}

// Exact treewidth via dynamic programming over elimination orders:
// tw(G) = min over orders of the max back-degree when eliminating. Only for
// tiny test graphs.
inline int brute_treewidth(const Graph& g) {
    int n = g.n;
    if (n == 0) return -1;
    guard_dims(n, 16);
    // back_degree(S, v): neighbors of v outside S when S is already gone,
    // where elimination makes neighborhoods transitive through S.
    auto back_degree = [&](unsigned S, int v) {
        // vertices reachable from v through eliminated vertices
        unsigned seen = 1u << (v - 1);
        std::vector<int> stack{v};
        int deg = 0;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (int y : g.adj[x]) {
                unsigned bit = 1u << (y - 1);
                if (seen & bit) continue;
                seen |= bit;
                if (S & bit) stack.push_back(y); // eliminated: pass through
                else ++deg;
            }
        }
        return deg;
    };
    std::vector<int> best(1u << n, 0);
    for (unsigned S = 1; S < (1u << n); ++S) {
        int val = n;
        for (int v = 1; v <= n; ++v) {
            unsigned bit = 1u << (v - 1);
            if (!(S & bit)) continue;
            int d = back_degree(S & ~bit, v);
            int sub = best[S & ~bit];
            val = std::min(val, std::max(d, sub));
        }
        best[S] = val;
    }
    return best[(1u << n) - 1];
}

} // namespace twg

#endif
