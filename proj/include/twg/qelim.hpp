#ifndef TWG_QELIM_HPP
#define TWG_QELIM_HPP

#include <map>
#include <string>
#include <vector>

#include "twg/cnf2dnf.hpp"
#include "twg/common.hpp"
#include "twg/formula.hpp"
#include "twg/graph.hpp"
#include "twg/treedec.hpp"

namespace twg {

// Innermost-quantifier-block elimination along a labeled tree decomposition.
// One round trades the innermost block for auxiliary sat-variables indexed by
// node-local assignments of the eliminated variables, growing the certified
// width to at most 12 * 2^k. Iterating rounds is the QSAT -> SAT reduction;
// the tower growth is inherent and guarded by size caps.

struct Limits {
    long long max_clauses = 1LL << 22;
    long long max_width = 1LL << 20;
};

struct RoundLog {
    std::string kind; // "eliminate_forall" / "eliminate_exists" / "matrix_to_dnf"
    int width_in = 0;
    int width_out = 0;
    long long width_bound = 0;
    long long vars_out = 0;
    long long clauses_out = 0;
    bool bound_holds = true;
};

struct EliminationResult {
    QbfFormula q;
    TreeDecomposition td;
    std::map<int, int> var_map; // surviving input variable -> output variable
    RoundLog log;
    // Auxiliary variables are propagation-determined given the surviving
    // variables exactly for forall-rounds (the CNF output defines them by
    // biconditionals). Exists-rounds leave them universally quantified.
    bool aux_determined = false;
};

namespace qdetail {

// Enumeration of assignments of bag(t) ∩ S: bit i of the index is the value
// of the i-th smallest variable (false < true), so indices are a fixed,
// documented order.
struct LocalIndex {
    std::vector<int> vars; // sorted
    long long count() const { return 1LL << vars.size(); }
    bool value(long long alpha, std::size_t i) const { return (alpha >> i) & 1; }
};

enum class RowState { Gone, Residual };

struct RowCond {
    RowState state = RowState::Residual;
    std::vector<Lit> residual; // literals over surviving variables
};

// Conditioning a single row under a local assignment. For a DNF term the row
// is gone when some literal is falsified (term contradicted); for a CNF
// clause it is gone when some literal holds (clause satisfied). Literals of
// the other polarity simply fall away.
inline RowCond condition_row(const Clause& row, const LocalIndex& loc, long long alpha,
                             bool is_clause) {
    RowCond out;
    for (Lit l : row) {
        auto it = std::lower_bound(loc.vars.begin(), loc.vars.end(), var_of(l));
        if (it != loc.vars.end() && *it == var_of(l)) {
            bool lit_true =
                loc.value(alpha, static_cast<std::size_t>(it - loc.vars.begin())) == (l > 0);
            if (lit_true == is_clause) {
                out.state = RowState::Gone;
                out.residual.clear();
                return out;
            }
        } else {
            out.residual.push_back(l);
        }
    }
    return out;
}

// Compatibility: beta agrees with alpha on the shared variables.
struct Compat {
    std::vector<std::pair<std::size_t, std::size_t>> shared; // (pos in t, pos in t')
    std::vector<std::size_t> free_positions;                 // positions in t' not shared

    Compat(const LocalIndex& a, const LocalIndex& b) {
        std::size_t i = 0, j = 0;
        std::vector<char> is_shared(b.vars.size(), 0);
        while (i < a.vars.size() && j < b.vars.size()) {
            if (a.vars[i] == b.vars[j]) {
                shared.emplace_back(i, j);
                is_shared[j] = 1;
                ++i, ++j;
            } else if (a.vars[i] < b.vars[j]) {
                ++i;
            } else {
                ++j;
            }
        }
        for (std::size_t k = 0; k < b.vars.size(); ++k)
            if (!is_shared[k]) free_positions.push_back(k);
    }

    long long free_count() const { return 1LL << free_positions.size(); }

    long long beta(long long alpha, long long free_mask) const {
        long long b = 0;
        for (auto [pa, pb] : shared)
            if ((alpha >> pa) & 1) b |= 1LL << pb;
        for (std::size_t k = 0; k < free_positions.size(); ++k)
            if ((free_mask >> k) & 1) b |= 1LL << free_positions[k];
        return b;
    }
};

struct Builder {
    const LabeledTreeDecomposition& ltd;
    std::vector<char> in_block;  // variable id -> eliminated?
    std::vector<LocalIndex> local;
    std::vector<long long> sat_le_base;                 // node -> first sat_{<=t} id
    std::vector<std::vector<long long>> sat_lt_base;    // node x child-slot
    std::vector<long long> sat_row_base;                // labeled clause -> first sat_d id
    std::map<int, int> var_map;                         // surviving old var -> new id
    long long next_var = 0;
    const Limits& limits;
    long long clause_budget = 0;

    Builder(int num_vars, const std::vector<int>& block_vars, std::size_t num_rows,
            const LabeledTreeDecomposition& l, const Limits& lim)
        : ltd(l), limits(lim) {
        in_block.assign(num_vars + 1, 0);
        for (int v : block_vars) in_block[v] = 1;

        const TreeDecomposition& td = ltd.td;
        local.resize(td.size());
        for (int t = 0; t < td.size(); ++t) {
            for (int v : td.bags[t])
                if (in_block[v]) local[t].vars.push_back(v);
            if (local[t].vars.size() > 30)
                throw resource_limit("local assignment space exceeds 2^30 (tower growth)");
        }

        // surviving variables keep their relative order, compacted to 1..m
        for (int v = 1; v <= num_vars; ++v)
            if (!in_block[v]) var_map[v] = static_cast<int>(var_map.size()) + 1;
        next_var = static_cast<long long>(var_map.size());

        // fresh ids: sat_d (clause order), then sat_{<=t}, then sat_{<t,t'}
        sat_row_base.assign(num_rows, 0);
        for (std::size_t ci = 0; ci < num_rows; ++ci) {
            int t = ltd.node_of_clause[ci];
            sat_row_base[ci] = next_var + 1;
            next_var += local[t].count();
            guard();
        }
        sat_le_base.assign(td.size(), 0);
        for (int t = 0; t < td.size(); ++t) {
            sat_le_base[t] = next_var + 1;
            next_var += local[t].count();
            guard();
        }
        sat_lt_base.assign(td.size(), {});
        for (int t = 0; t < td.size(); ++t)
            for (std::size_t k = 0; k < td.children[t].size(); ++k) {
                sat_lt_base[t].push_back(next_var + 1);
                next_var += local[t].count();
                guard();
            }
    }

    void guard() const {
        if (next_var > (limits.max_clauses << 2))
            throw resource_limit("elimination exceeds variable budget (tower growth)");
    }

    Lit sat_row(std::size_t ci, long long alpha) const {
        return static_cast<Lit>(sat_row_base[ci] + alpha);
    }
    Lit sat_le(int t, long long alpha) const { return static_cast<Lit>(sat_le_base[t] + alpha); }
    Lit sat_lt(int t, std::size_t child_slot, long long alpha) const {
        return static_cast<Lit>(sat_lt_base[t][child_slot] + alpha);
    }
    Lit survivor(Lit l) const {
        auto it = var_map.find(var_of(l));
        return l > 0 ? it->second : -it->second;
    }

    // Output tree decomposition: one chain of bags per node, one bag per
    // local assignment. Every bag of the chain carries the surviving
    // original bag variables, the node's full sat_{<=} interface and the
    // children's interfaces, which keeps all occurrence sets connected. Bag
    // sizes stay within 6 * 2^{k+1}, i.e. width <= 12 * 2^k.
    TreeDecomposition build_td() const {
        const TreeDecomposition& td = ltd.td;
        TreeDecomposition out;
        std::vector<int> chain_head(td.size(), -1), chain_tail(td.size(), -1);
        std::vector<int> order; // parents before children
        {
            std::vector<int> stack{td.root};
            while (!stack.empty()) {
                int t = stack.back();
                stack.pop_back();
                order.push_back(t);
                for (int c : td.children[t]) stack.push_back(c);
            }
        }
        for (int t : order) {
            std::vector<int> common;
            for (int v : td.bags[t])
                if (!in_block[v]) common.push_back(var_map.at(v));
            for (long long b = 0; b < local[t].count(); ++b)
                common.push_back(static_cast<int>(sat_le(t, b)));
            int attach = t == td.root ? -1 : chain_tail[td.parent[t]];
            for (long long alpha = 0; alpha < local[t].count(); ++alpha) {
                std::vector<int> bag = common;
                if (ltd.clause_of_node[t] >= 0)
                    bag.push_back(static_cast<int>(sat_row(ltd.clause_of_node[t], alpha)));
                for (std::size_t k = 0; k < td.children[t].size(); ++k) {
                    bag.push_back(static_cast<int>(sat_lt(t, k, alpha)));
                    int c = td.children[t][k];
                    for (long long b = 0; b < local[c].count(); ++b)
                        bag.push_back(static_cast<int>(sat_le(c, b)));
                }
                int id = out.add_node(bag, attach);
                if (alpha == 0) chain_head[t] = id;
                attach = id;
            }
            chain_tail[t] = attach;
        }
        return out;
    }
};

} // namespace qdetail

// Eliminate an innermost universal block over a DNF matrix, producing a CNF
// whose fresh variables join the (existential) block before it.
inline EliminationResult eliminate_forall(const QbfFormula& q, const LabeledTreeDecomposition& ltd,
                                          const Limits& limits = {}) {
    check(!q.prefix.empty() && q.prefix.back().kind == Quant::Forall,
          "eliminate_forall needs an innermost universal block");
    check(!q.matrix_is_cnf, "eliminate_forall needs a DNF matrix");

    qdetail::Builder b(q.num_vars(), q.prefix.back().vars, q.dnf.terms.size(), ltd, limits);
    const TreeDecomposition& td = ltd.td;

    EliminationResult res;
    res.aux_determined = true;
    res.log.kind = "eliminate_forall";
    res.log.width_in = td.width();
    res.q.matrix_is_cnf = true;
    res.q.cnf.num_vars = static_cast<int>(b.next_var);
    auto add = [&](std::vector<Lit> lits) {
        res.q.cnf.clauses.push_back(make_clause(std::move(lits)));
        if (static_cast<long long>(res.q.cnf.clauses.size()) > limits.max_clauses)
            throw resource_limit("elimination exceeds clause budget (tower growth)");
    };

    // (1)/(2): sat_d^a <-> conjunction of the residual literals; negative
    // unit when alpha contradicts the term
    for (std::size_t ci = 0; ci < q.dnf.terms.size(); ++ci) {
        int t = ltd.node_of_clause[ci];
        for (long long alpha = 0; alpha < b.local[t].count(); ++alpha) {
            Lit s = b.sat_row(ci, alpha);
            auto cond = qdetail::condition_row(q.dnf.terms[ci], b.local[t], alpha, false);
            if (cond.state == qdetail::RowState::Gone) { // alpha falsifies the term
                add({-s});
                continue;
            }
            std::vector<Lit> back{s};
            for (Lit l : cond.residual) {
                Lit m = b.survivor(l);
                add({-s, m});
                back.push_back(-m);
            }
            add(std::move(back));
        }
    }
    // (3): sat_{<=t}^a <-> big-or of local terms and child propagations
    for (int t = 0; t < td.size(); ++t) {
        for (long long alpha = 0; alpha < b.local[t].count(); ++alpha) {
            Lit a = b.sat_le(t, alpha);
            std::vector<Lit> ors;
            if (ltd.clause_of_node[t] >= 0) ors.push_back(b.sat_row(ltd.clause_of_node[t], alpha));
            for (std::size_t k = 0; k < td.children[t].size(); ++k)
                ors.push_back(b.sat_lt(t, k, alpha));
            std::vector<Lit> fwd{-a};
            for (Lit o : ors) {
                fwd.push_back(o);
                add({a, -o});
            }
            add(std::move(fwd));
        }
    }
    // (4): sat_{<t,t'}^a <-> big-and over compatible child assignments
    for (int t = 0; t < td.size(); ++t) {
        for (std::size_t k = 0; k < td.children[t].size(); ++k) {
            int c = td.children[t][k];
            qdetail::Compat compat(b.local[t], b.local[c]);
            for (long long alpha = 0; alpha < b.local[t].count(); ++alpha) {
                Lit a = b.sat_lt(t, k, alpha);
                std::vector<Lit> back{a};
                for (long long fm = 0; fm < compat.free_count(); ++fm) {
                    Lit s = b.sat_le(c, compat.beta(alpha, fm));
                    add({-a, s});
                    back.push_back(-s);
                }
                add(std::move(back));
            }
        }
    }
    // (5): all root assignments must be winning
    for (long long alpha = 0; alpha < b.local[td.root].count(); ++alpha)
        add({b.sat_le(td.root, alpha)});

    // prefix: drop the universal block, append fresh variables to the
    // existential block before it (or a new one)
    std::vector<int> fresh;
    for (long long v = static_cast<long long>(b.var_map.size()) + 1; v <= b.next_var; ++v)
        fresh.push_back(static_cast<int>(v));
    for (std::size_t i = 0; i + 1 < q.prefix.size(); ++i) {
        QuantBlock blk;
        blk.kind = q.prefix[i].kind;
        for (int v : q.prefix[i].vars)
            if (b.var_map.count(v)) blk.vars.push_back(b.var_map.at(v));
        res.q.prefix.push_back(std::move(blk));
    }
    if (!res.q.prefix.empty() && res.q.prefix.back().kind == Quant::Exists)
        res.q.prefix.back().vars.insert(res.q.prefix.back().vars.end(), fresh.begin(), fresh.end());
    else
        res.q.prefix.push_back({Quant::Exists, fresh});
    for (int v : q.free_vars) res.q.free_vars.push_back(b.var_map.at(v));
    res.q.normalize_prefix();

    res.td = b.build_td();
    res.var_map = b.var_map;
    res.log.width_out = res.td.width();
    res.log.width_bound = 12LL << std::max(0, res.log.width_in);
    res.log.bound_holds = res.log.width_out <= res.log.width_bound;
    res.log.vars_out = b.next_var;
    res.log.clauses_out = static_cast<long long>(res.q.cnf.clauses.size());
    if (!res.log.bound_holds) throw bound_error("elimination width bound 12*2^k violated");
    if (res.log.width_out > limits.max_width)
        throw resource_limit("intermediate width exceeds the configured cap");
    return res;
}

// Dual round: eliminate an innermost existential block over a CNF matrix.
// All constraints appear negated (the auxiliary variables become universal),
// so the output matrix is a DNF.
inline EliminationResult eliminate_exists(const QbfFormula& q, const LabeledTreeDecomposition& ltd,
                                          const Limits& limits = {}) {
    check(!q.prefix.empty() && q.prefix.back().kind == Quant::Exists,
          "eliminate_exists needs an innermost existential block");
    check(q.matrix_is_cnf, "eliminate_exists needs a CNF matrix");

    qdetail::Builder b(q.num_vars(), q.prefix.back().vars, q.cnf.clauses.size(), ltd, limits);
    const TreeDecomposition& td = ltd.td;

    EliminationResult res;
    res.aux_determined = false;
    res.log.kind = "eliminate_exists";
    res.log.width_in = td.width();
    res.q.matrix_is_cnf = false;
    res.q.dnf.num_vars = static_cast<int>(b.next_var);
    auto add = [&](std::vector<Lit> lits) {
        res.q.dnf.terms.push_back(make_clause(std::move(lits)));
        if (static_cast<long long>(res.q.dnf.terms.size()) > limits.max_clauses)
            throw resource_limit("elimination exceeds term budget (tower growth)");
    };

    // (6)/(7): negated definitions of sat_c^a; {c}|alpha = {} means alpha
    // satisfies the clause, whose only violation is a false sat variable
    for (std::size_t ci = 0; ci < q.cnf.clauses.size(); ++ci) {
        int t = ltd.node_of_clause[ci];
        for (long long alpha = 0; alpha < b.local[t].count(); ++alpha) {
            Lit s = b.sat_row(ci, alpha);
            auto cond = qdetail::condition_row(q.cnf.clauses[ci], b.local[t], alpha, true);
            if (cond.state == qdetail::RowState::Gone) { // alpha satisfies the clause
                add({-s});
                continue;
            }
            std::vector<Lit> when_all_false{s};
            for (Lit l : cond.residual) {
                Lit m = b.survivor(l);
                add({-s, m});
                when_all_false.push_back(-m);
            }
            add(std::move(when_all_false));
        }
    }
    // (8): negated sat_{<=t}^a <-> big-and
    for (int t = 0; t < td.size(); ++t) {
        for (long long alpha = 0; alpha < b.local[t].count(); ++alpha) {
            Lit a = b.sat_le(t, alpha);
            std::vector<Lit> parts;
            if (ltd.clause_of_node[t] >= 0) parts.push_back(b.sat_row(ltd.clause_of_node[t], alpha));
            for (std::size_t k = 0; k < td.children[t].size(); ++k)
                parts.push_back(b.sat_lt(t, k, alpha));
            std::vector<Lit> whole{-a};
            for (Lit p : parts) {
                whole.push_back(p);
                add({a, -p});
            }
            add(std::move(whole));
        }
    }
    // (9): negated sat_{<t,t'}^a <-> big-or over compatible assignments
    for (int t = 0; t < td.size(); ++t) {
        for (std::size_t k = 0; k < td.children[t].size(); ++k) {
            int c = td.children[t][k];
            qdetail::Compat compat(b.local[t], b.local[c]);
            for (long long alpha = 0; alpha < b.local[t].count(); ++alpha) {
                Lit a = b.sat_lt(t, k, alpha);
                std::vector<Lit> none{a};
                for (long long fm = 0; fm < compat.free_count(); ++fm) {
                    Lit s = b.sat_le(c, compat.beta(alpha, fm));
                    add({-a, s});
                    none.push_back(-s);
                }
                add(std::move(none));
            }
        }
    }
    // (10): some root assignment wins (not negated)
    for (long long alpha = 0; alpha < b.local[td.root].count(); ++alpha)
        add({b.sat_le(td.root, alpha)});

    std::vector<int> fresh;
    for (long long v = static_cast<long long>(b.var_map.size()) + 1; v <= b.next_var; ++v)
        fresh.push_back(static_cast<int>(v));
    for (std::size_t i = 0; i + 1 < q.prefix.size(); ++i) {
        QuantBlock blk;
        blk.kind = q.prefix[i].kind;
        for (int v : q.prefix[i].vars)
            if (b.var_map.count(v)) blk.vars.push_back(b.var_map.at(v));
        res.q.prefix.push_back(std::move(blk));
    }
    if (!res.q.prefix.empty() && res.q.prefix.back().kind == Quant::Forall)
        res.q.prefix.back().vars.insert(res.q.prefix.back().vars.end(), fresh.begin(), fresh.end());
    else
        res.q.prefix.push_back({Quant::Forall, fresh});
    for (int v : q.free_vars) res.q.free_vars.push_back(b.var_map.at(v));
    res.q.normalize_prefix();

    res.td = b.build_td();
    res.var_map = b.var_map;
    res.log.width_out = res.td.width();
    res.log.width_bound = 12LL << std::max(0, res.log.width_in);
    res.log.bound_holds = res.log.width_out <= res.log.width_bound;
    res.log.vars_out = b.next_var;
    res.log.clauses_out = static_cast<long long>(res.q.dnf.terms.size());
    if (!res.log.bound_holds) throw bound_error("elimination width bound 12*2^k violated");
    if (res.log.width_out > limits.max_width)
        throw resource_limit("intermediate width exceeds the configured cap");
    return res;
}

struct QsatToSatResult {
    CnfFormula cnf;
    TreeDecomposition td;
    std::vector<RoundLog> rounds;
    // maps an original free variable to its id in the final formula
    std::map<int, int> free_map;
};

namespace qdetail {

// Append singleton bags for universe variables that occur in no bag, so the
// certificate also covers isolated primal vertices.
inline void cover_isolated(TreeDecomposition& td, int num_vars) {
    std::vector<char> seen(num_vars + 1, 0);
    for (const auto& bag : td.bags)
        for (int v : bag)
            if (v <= num_vars) seen[v] = 1;
    for (int v = 1; v <= num_vars; ++v)
        if (!seen[v]) td.add_node({v}, td.root);
}

} // namespace qdetail

// Exhaustive elimination until a plain CNF remains. A final lone existential
// block is the identity (the formula is already a SAT instance); a lone
// universal block over a CNF is first rewritten through cnf_to_dnf, whose
// fresh variables are universally quantified.
inline QsatToSatResult qsat_to_sat(const QbfFormula& q_in, const TreeDecomposition& td_in,
                                   const Limits& limits = {}) {
    QbfFormula q = q_in;
    q.normalize_prefix();
    QsatToSatResult out;
    for (int v : q.free_vars) out.free_map[v] = v;

    TreeDecomposition td = normalize(td_in);

    while (true) {
        bool innermost_forall = !q.prefix.empty() && q.prefix.back().kind == Quant::Forall;
        // a lone existential block over a CNF is already a SAT instance
        if (q.matrix_is_cnf && !innermost_forall && q.prefix.size() <= 1) break;

        if (innermost_forall && q.matrix_is_cnf) {
            // rewrite the matrix as a DNF; fresh variables join the block
            LabeledTreeDecomposition ltd = label(td, q.cnf);
            CnfToDnfResult conv = cnf_to_dnf(q.cnf, ltd);
            QbfFormula next;
            next.matrix_is_cnf = false;
            next.dnf = conv.formula;
            next.prefix = q.prefix;
            next.prefix.back().vars.insert(next.prefix.back().vars.end(), conv.fresh_vars.begin(),
                                           conv.fresh_vars.end());
            next.free_vars = q.free_vars;
            q = std::move(next);
            td = conv.td;
            RoundLog log;
            log.kind = "matrix_to_dnf";
            log.width_in = conv.width_in;
            log.width_out = conv.width_out;
            log.width_bound = conv.width_in + 4;
            log.bound_holds = conv.width_out <= conv.width_in + 4;
            log.vars_out = conv.formula.num_vars;
            log.clauses_out = static_cast<long long>(conv.formula.terms.size());
            out.rounds.push_back(log);
            continue;
        }

        LabeledTreeDecomposition ltd =
            q.matrix_is_cnf ? label(td, q.cnf) : label(td, q.dnf);
        EliminationResult res = q.matrix_is_cnf ? eliminate_exists(q, ltd, limits)
                                                : eliminate_forall(q, ltd, limits);
        for (auto& [orig, cur] : out.free_map) cur = res.var_map.at(cur);
        q = std::move(res.q);
        td = std::move(res.td);
        out.rounds.push_back(res.log);
    }

    out.cnf = q.cnf;
    out.td = td;
    qdetail::cover_isolated(out.td, out.cnf.num_vars);
    return out;
}

} // namespace twg

#endif
