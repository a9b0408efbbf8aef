#ifndef TWG_GROUND_HPP
#define TWG_GROUND_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "twg/cnf2dnf.hpp"
#include "twg/common.hpp"
#include "twg/formula.hpp"
#include "twg/mso.hpp"
#include "twg/qelim.hpp"
#include "twg/treedec.hpp"

namespace twg {

// Grounding of a prenex MSO formula over a finite structure into a QBF whose
// treewidth is bounded by (9 + k) * |phi|.
//
// Indicator variables: X_u per set variable and element, x_u per first-order
// variable and element. First-order selection is encoded with guide
// variables c^x_{<=t} ("x was chosen below t") that realize an exactly-one
// constraint along the decomposition. Atoms get witness variables p^i_t and
// p^i_{<=t} plus one variable per distinct atom that the matrix is stated
// over.
//
// Universally quantified first-order indicators range over all bit patterns,
// so assignments that pick zero or two elements must satisfy the formula
// vacuously. A violation detector (v^x_{<=t} chains feeding one `viol`
// variable) recognizes such patterns; the matrix clauses and the atom
// definitions carry `viol` as an escape literal, while the exactly-one
// constraints are emitted as hard clauses only for existential variables.
// The detector also fires on ill-formed existential choices, which keeps the
// definitional part total — the alternation-preservation rewrite depends on
// that.

struct GroundingResult {
    QbfFormula q;
    TreeDecomposition td;
    std::map<std::string, std::vector<int>> indicators; // variable -> ids by element
    std::vector<Atom> atom_list;                        // distinct atoms
    std::vector<int> atom_vars;                         // their indicator ids
    std::vector<int> def_part;                          // clause indices defining E'
    std::vector<int> eprime;                            // auxiliary variable ids
    bool innermost_forall = false;                      // E' kept as a trailing block
    int width_in = 0;
    int width_out = 0;
    long long width_bound = 0;
    int phi_size = 0;
};

namespace grdetail {

struct Vars {
    // per variable name: element -> id (index 0 unused)
    std::map<std::string, std::vector<int>> ind;
    // guides per fo var: node -> id
    std::map<std::string, std::vector<int>> c_guide;
    std::map<std::string, std::vector<int>> v_guide;
    int viol = 0;
    // per atom index: node -> id
    std::vector<std::vector<int>> p_here;
    std::vector<std::vector<int>> p_below;
    std::vector<int> atom_var;
    int count = 0;
};

} // namespace grdetail

inline GroundingResult ground_to_qbf(const MsoFormula& phi, const RelationalStructure& s,
                                     const TreeDecomposition& td_in, const Limits& limits = {}) {
    for (const auto& cl : phi.matrix)
        for (const auto& lit : cl)
            if (lit.atom.kind == Atom::Relation)
                check(s.vocab.arity_of(lit.atom.rel) ==
                          static_cast<int>(lit.atom.args.size()),
                      "formula vocabulary does not match the structure");
    {
        ValidationReport rep = validate(gaifman_graph(s), td_in);
        check(rep.valid(), "decomposition invalid for the structure");
    }

    GroundingResult res;
    res.width_in = td_in.width();
    res.phi_size = phi.size();

    const TreeDecomposition td = slim(normalize(td_in), 1);
    const int n = s.universe_size;
    const int m = td.size();

    std::vector<std::string> fo = phi.fo_vars();
    std::set<std::string> forall_fo;
    for (const auto& qu : phi.prefix)
        if (qu.order == VarOrder::First && qu.kind == Quant::Forall) forall_fo.insert(qu.name);
    res.atom_list = phi.atoms();
    const int A = static_cast<int>(res.atom_list.size());
    const bool has_fo = !fo.empty();

    // ---------------------------------------------------------- variables
    grdetail::Vars V;
    auto fresh = [&V]() { return ++V.count; };
    for (const auto& name : phi.free_set_vars) {
        auto& ids = V.ind[name];
        ids.assign(n + 1, 0);
        for (int u = 1; u <= n; ++u) ids[u] = fresh();
    }
    for (const auto& qu : phi.prefix) {
        auto& ids = V.ind[qu.name];
        ids.assign(n + 1, 0);
        for (int u = 1; u <= n; ++u) ids[u] = fresh();
    }
    const int primary = V.count;
    for (const auto& x : fo) {
        auto& c = V.c_guide[x];
        c.assign(m, 0);
        for (int t = 0; t < m; ++t) c[t] = fresh();
    }
    if (has_fo) {
        for (const auto& x : fo) {
            auto& v = V.v_guide[x];
            v.assign(m, 0);
            for (int t = 0; t < m; ++t) v[t] = fresh();
        }
        V.viol = fresh();
    }
    V.p_here.assign(A, {});
    V.p_below.assign(A, {});
    for (int a = 0; a < A; ++a) {
        V.p_here[a].assign(m, 0);
        V.p_below[a].assign(m, 0);
        for (int t = 0; t < m; ++t) V.p_here[a][t] = fresh();
        for (int t = 0; t < m; ++t) V.p_below[a][t] = fresh();
    }
    V.atom_var.assign(A, 0);
    for (int a = 0; a < A; ++a) V.atom_var[a] = fresh();

    res.indicators = V.ind;
    res.atom_vars = V.atom_var;
    for (int v = primary + 1; v <= V.count; ++v) res.eprime.push_back(v);

    // ---------------------------------------------------------- constraints
    CnfFormula psi;
    psi.num_vars = V.count;
    auto add = [&](std::vector<Lit> lits, bool is_def) {
        Clause c = make_clause(std::move(lits));
        if (is_tautological(c)) return; // vacuous, never emitted
        if (is_def) res.def_part.push_back(static_cast<int>(psi.clauses.size()));
        psi.clauses.push_back(std::move(c));
        if (static_cast<long long>(psi.clauses.size()) > limits.max_clauses)
            throw resource_limit("grounding exceeds clause budget");
    };
    auto guard = [&](std::vector<Lit> lits) {
        if (V.viol) lits.push_back(V.viol);
        return lits;
    };

    // (cardinality propagation, definitional): c^x_{<=t} <-> introduced
    // indicator or some child guide
    for (const auto& x : fo) {
        const auto& ids = V.ind[x];
        const auto& c = V.c_guide[x];
        for (int t = 0; t < m; ++t) {
            std::vector<Lit> ors;
            for (int u : td.introduced(t)) ors.push_back(ids[u]);
            for (int ch : td.children[t]) ors.push_back(c[ch]);
            std::vector<Lit> fwd{-c[t]};
            for (Lit o : ors) {
                fwd.push_back(o);
                add({c[t], -o}, true);
            }
            add(std::move(fwd), true);
        }
    }
    // exactly-one constraints, hard for existential first-order variables
    for (const auto& qu : phi.prefix) {
        if (qu.order != VarOrder::First || qu.kind != Quant::Exists) continue;
        const auto& ids = V.ind[qu.name];
        const auto& c = V.c_guide[qu.name];
        add({c[td.root]}, false); // at least one
        std::set<std::pair<int, int>> seen;
        for (int t = 0; t < m; ++t) {
            const auto& bag = td.bags[t];
            for (std::size_t i = 0; i < bag.size(); ++i)
                for (std::size_t j = i + 1; j < bag.size(); ++j)
                    if (seen.insert({bag[i], bag[j]}).second)
                        add({-ids[bag[i]], -ids[bag[j]]}, false);
        }
        for (int t = 0; t < m; ++t)
            for (int ch : td.children[t])
                for (int u : td.introduced(t)) add({-ids[u], -c[ch]}, false);
        for (int t = 0; t < m; ++t)
            if (td.children[t].size() == 2)
                add({-c[td.children[t][0]], -c[td.children[t][1]]}, false);
    }
    // violation detector (definitional): second selections and dead roots
    if (has_fo) {
        for (const auto& x : fo) {
            const auto& ids = V.ind[x];
            const auto& c = V.c_guide[x];
            const auto& v = V.v_guide[x];
            for (int t = 0; t < m; ++t) {
                // disjuncts: pairs of simultaneous selections visible at t
                std::vector<std::vector<Lit>> disjuncts;
                std::vector<int> intro = td.introduced(t);
                for (std::size_t i = 0; i < intro.size(); ++i)
                    for (std::size_t j = i + 1; j < intro.size(); ++j)
                        disjuncts.push_back({ids[intro[i]], ids[intro[j]]});
                for (int u : intro)
                    for (int ch : td.children[t]) disjuncts.push_back({ids[u], c[ch]});
                if (td.children[t].size() == 2)
                    disjuncts.push_back({c[td.children[t][0]], c[td.children[t][1]]});
                for (int ch : td.children[t]) disjuncts.push_back({v[ch]});
                // backward direction
                for (const auto& d : disjuncts) {
                    std::vector<Lit> cl{v[t]};
                    for (Lit l : d) cl.push_back(-l);
                    add(std::move(cl), true);
                }
                // forward: distribute over the (tiny) conjunction disjuncts
                std::vector<std::vector<Lit>> product{{-v[t]}};
                for (const auto& d : disjuncts) {
                    std::vector<std::vector<Lit>> next;
                    for (const auto& base : product)
                        for (Lit l : d) {
                            auto cl = base;
                            cl.push_back(l);
                            next.push_back(std::move(cl));
                        }
                    product = std::move(next);
                    check(product.size() <= 64, "violation distribution exploded");
                }
                for (auto& cl : product) add(std::move(cl), true);
            }
        }
        std::vector<Lit> any{-V.viol};
        for (const auto& x : fo) {
            any.push_back(V.v_guide[x][td.root]);
            any.push_back(-V.c_guide[x][td.root]);
            add({V.viol, -V.v_guide[x][td.root]}, true);
            add({V.viol, V.c_guide[x][td.root]}, true);
        }
        add(std::move(any), true);
    }
    // atom witnesses (definitional, escape-guarded)
    for (int a = 0; a < A; ++a) {
        const Atom& atom = res.atom_list[a];
        for (int t = 0; t < m; ++t) {
            Lit p = V.p_here[a][t];
            const auto& bag = td.bags[t];
            if (atom.kind == Atom::Equals && atom.args[0] == atom.args[1]) {
                const auto& xs = V.ind[atom.args[0]];
                std::vector<Lit> fwd{-p};
                for (int u : bag) {
                    fwd.push_back(xs[u]);
                    add(guard({p, -xs[u]}), true);
                }
                add(guard(std::move(fwd)), true);
            } else if (atom.kind == Atom::Equals || atom.kind == Atom::Member) {
                // p <-> exists u in bag: first_u && second_u
                const auto& first = V.ind[atom.kind == Atom::Equals ? atom.args[0] : atom.args[1]];
                const auto& second = V.ind[atom.kind == Atom::Equals ? atom.args[1] : atom.rel];
                std::vector<Lit> fwd{-p};
                for (int u : bag) {
                    add(guard({p, -first[u], -second[u]}), true);
                    add(guard({-p, -first[u], second[u]}), true);
                    fwd.push_back(first[u]);
                }
                add(guard(std::move(fwd)), true);
            } else {
                // relation atom: witnesses are the tuples inside the bag
                std::vector<std::vector<int>> tuples;
                for (const auto& tup : s.tuples(atom.rel)) {
                    bool inside = true;
                    for (int e : tup) inside = inside && td.bag_contains(t, e);
                    if (inside) tuples.push_back(tup);
                }
                const std::size_t arity = atom.args.size();
                for (const auto& tup : tuples) {
                    std::vector<Lit> cl{p};
                    for (std::size_t i = 0; i < arity; ++i) cl.push_back(-V.ind[atom.args[i]][tup[i]]);
                    add(guard(std::move(cl)), true);
                }
                // forward trie over tuple prefixes
                std::set<std::vector<int>> prefixes{{}};
                for (std::size_t depth = 0; depth < arity; ++depth) {
                    std::set<std::vector<int>> next;
                    for (const auto& pre : prefixes) {
                        std::set<int> completions;
                        for (const auto& tup : tuples) {
                            bool match = true;
                            for (std::size_t i = 0; i < pre.size(); ++i) match = match && tup[i] == pre[i];
                            if (match) completions.insert(tup[depth]);
                        }
                        std::vector<Lit> cl{-p};
                        for (std::size_t i = 0; i < pre.size(); ++i)
                            cl.push_back(-V.ind[atom.args[i]][pre[i]]);
                        for (int e : completions) {
                            cl.push_back(V.ind[atom.args[depth]][e]);
                            auto longer = pre;
                            longer.push_back(e);
                            next.insert(std::move(longer));
                        }
                        add(guard(std::move(cl)), true);
                    }
                    prefixes = std::move(next);
                }
            }
        }
        // propagation p_{<=t} <-> p_t | children (definitional, total)
        for (int t = 0; t < m; ++t) {
            Lit below = V.p_below[a][t];
            std::vector<Lit> fwd{-below, V.p_here[a][t]};
            add({below, -V.p_here[a][t]}, true);
            for (int ch : td.children[t]) {
                fwd.push_back(V.p_below[a][ch]);
                add({below, -V.p_below[a][ch]}, true);
            }
            add(std::move(fwd), true);
        }
        // deriving the atom requires a witness somewhere
        add({-V.atom_var[a], V.p_below[a][td.root]}, true);
        add({V.atom_var[a], -V.p_below[a][td.root]}, true);
    }
    // verify the formula matrix over the atom indicators (escape-guarded)
    for (const auto& cl : phi.matrix) {
        std::vector<Lit> lits;
        for (const auto& lit : cl) {
            int a = 0;
            while (!(res.atom_list[a] == lit.atom)) ++a;
            lits.push_back(lit.negated ? -V.atom_var[a] : V.atom_var[a]);
        }
        add(guard(std::move(lits)), false);
    }

    // -------------------------------------------------------------- prefix
    res.q.matrix_is_cnf = true;
    res.q.cnf = std::move(psi);
    for (const auto& name : phi.free_set_vars)
        for (int u = 1; u <= n; ++u) res.q.free_vars.push_back(V.ind[name][u]);
    for (const auto& qu : phi.prefix) {
        QuantBlock blk;
        blk.kind = qu.kind;
        for (int u = 1; u <= n; ++u) blk.vars.push_back(V.ind[qu.name][u]);
        res.q.prefix.push_back(std::move(blk));
    }
    res.q.normalize_prefix();
    res.innermost_forall = !res.q.prefix.empty() && res.q.prefix.back().kind == Quant::Forall;
    if (!res.eprime.empty()) {
        if (!res.innermost_forall && !res.q.prefix.empty())
            res.q.prefix.back().vars.insert(res.q.prefix.back().vars.end(), res.eprime.begin(),
                                            res.eprime.end());
        else
            res.q.prefix.push_back({Quant::Exists, res.eprime});
    }
    res.q.normalize_prefix();

    // ------------------------------------------------- width certificate
    // One chain of bags per decomposition node. Every chain bag carries the
    // indicator slice of the bag plus viol; guide/witness groups are laid
    // out along the chain with their interface variables routed head-wards
    // (towards the parent) and the children's interfaces tail-wards.
    {
        TreeDecomposition out;
        std::vector<int> chain_head(m, -1), chain_tail(m, -1);
        std::vector<int> order;
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
            std::vector<int> slice;
            for (const auto& [name, ids] : V.ind) {
                (void)name;
                for (int u : td.bags[t]) slice.push_back(ids[u]);
            }
            if (V.viol) slice.push_back(V.viol);

            // group g: own variables; outbound = parent-facing interface
            struct Group {
                std::vector<int> own;
                std::vector<int> outbound;
                std::vector<int> inbound; // children interface
            };
            std::vector<Group> groups;
            for (const auto& x : fo) {
                Group g;
                g.own = {V.c_guide[x][t]};
                g.outbound = {V.c_guide[x][t]};
                if (has_fo) {
                    g.own.push_back(V.v_guide[x][t]);
                    g.outbound.push_back(V.v_guide[x][t]);
                }
                for (int ch : td.children[t]) {
                    g.inbound.push_back(V.c_guide[x][ch]);
                    if (has_fo) g.inbound.push_back(V.v_guide[x][ch]);
                }
                groups.push_back(std::move(g));
            }
            for (int a = 0; a < A; ++a) {
                Group g;
                g.own = {V.p_here[a][t], V.p_below[a][t]};
                g.outbound = {V.p_below[a][t]};
                for (int ch : td.children[t]) g.inbound.push_back(V.p_below[a][ch]);
                groups.push_back(std::move(g));
            }

            int attach = t == td.root ? -1 : chain_tail[td.parent[t]];
            if (t == td.root) {
                // head bag hosting viol/atom definitions and the matrix
                std::vector<int> bag = slice;
                for (const auto& g : groups) bag.insert(bag.end(), g.outbound.begin(), g.outbound.end());
                for (int a = 0; a < A; ++a) bag.push_back(V.atom_var[a]);
                attach = out.add_node(bag, attach);
                chain_head[t] = attach;
            }
            for (std::size_t l = 0; l < groups.size(); ++l) {
                std::vector<int> bag = slice;
                bag.insert(bag.end(), groups[l].own.begin(), groups[l].own.end());
                bag.insert(bag.end(), groups[l].inbound.begin(), groups[l].inbound.end());
                for (std::size_t j = l + 1; j < groups.size(); ++j)
                    bag.insert(bag.end(), groups[j].outbound.begin(), groups[j].outbound.end());
                for (std::size_t j = 0; j < l; ++j)
                    bag.insert(bag.end(), groups[j].inbound.begin(), groups[j].inbound.end());
                int id = out.add_node(bag, attach);
                if (chain_head[t] < 0) chain_head[t] = id;
                attach = id;
            }
            if (groups.empty() && chain_head[t] < 0) {
                attach = out.add_node(slice, attach);
                chain_head[t] = attach;
            }
            chain_tail[t] = attach;
        }
        res.td = std::move(out);
        qdetail::cover_isolated(res.td, res.q.cnf.num_vars);
    }

    res.width_out = res.td.width();
    res.width_bound = static_cast<long long>(9 + std::max(0, res.width_in)) * res.phi_size;
    if (res.width_out > res.width_bound)
        throw bound_error("grounding width bound (9+k)|phi| violated");
    return res;
}

// When the innermost quantifier is universal, projecting the auxiliary
// variables existentially would add a block. Since the definitional clauses
// pin them uniquely, they can be universally quantified instead: the matrix
// becomes (not psi_def) | psi_dnf with psi_dnf from the CNF -> DNF
// conversion, and the alternation of the input formula is preserved.
struct PreservationResult {
    QbfFormula q;
    TreeDecomposition td;
    RoundLog log;
    bool applied = false;
};

inline PreservationResult preserve_alternation(const GroundingResult& gr,
                                               const Limits& limits = {}) {
    PreservationResult out;
    if (!gr.innermost_forall || gr.eprime.empty()) {
        out.q = gr.q;
        out.td = gr.td;
        out.log.kind = "preserve_alternation(identity)";
        out.log.width_in = out.log.width_out = gr.td.width();
        out.log.width_bound = gr.td.width() + 4;
        out.log.vars_out = gr.q.num_vars();
        out.log.clauses_out = static_cast<long long>(gr.q.cnf.clauses.size());
        return out;
    }
    out.applied = true;

    std::set<int> defs(gr.def_part.begin(), gr.def_part.end());
    CnfFormula psi_cnf;
    psi_cnf.num_vars = gr.q.cnf.num_vars;
    std::vector<Clause> psi_def;
    for (std::size_t i = 0; i < gr.q.cnf.clauses.size(); ++i) {
        if (defs.count(static_cast<int>(i))) psi_def.push_back(gr.q.cnf.clauses[i]);
        else psi_cnf.clauses.push_back(gr.q.cnf.clauses[i]);
    }

    LabeledTreeDecomposition ltd = label(gr.td, psi_cnf);
    CnfToDnfResult conv = cnf_to_dnf(psi_cnf, ltd);
    (void)limits;

    out.q.matrix_is_cnf = false;
    out.q.dnf.num_vars = conv.formula.num_vars;
    // not psi_def: one term per violated definition
    for (const Clause& c : psi_def) {
        std::vector<Lit> term;
        for (Lit l : c) term.push_back(neg(l));
        out.q.dnf.add_term(term);
    }
    for (const Term& t : conv.formula.terms) out.q.dnf.terms.push_back(t);

    out.q.prefix = gr.q.prefix;
    check(out.q.prefix.back().kind == Quant::Forall, "preservation expects a universal tail");
    out.q.prefix.back().vars.insert(out.q.prefix.back().vars.end(), gr.eprime.begin(),
                                    gr.eprime.end());
    out.q.prefix.back().vars.insert(out.q.prefix.back().vars.end(), conv.fresh_vars.begin(),
                                    conv.fresh_vars.end());
    out.q.free_vars = gr.q.free_vars;
    out.q.normalize_prefix();

    out.td = conv.td;
    qdetail::cover_isolated(out.td, out.q.dnf.num_vars);
    out.log.kind = "preserve_alternation";
    out.log.width_in = gr.td.width();
    out.log.width_out = out.td.width();
    out.log.width_bound = gr.td.width() + 4;
    out.log.bound_holds = out.log.width_out <= out.log.width_bound;
    out.log.vars_out = out.q.dnf.num_vars;
    out.log.clauses_out = static_cast<long long>(out.q.dnf.terms.size());
    if (!out.log.bound_holds) throw bound_error("alternation preservation width bound violated");
    return out;
}

// Full model-checking pipeline: ground, preserve the alternation if the
// innermost quantifier is universal, then eliminate blocks until a plain CNF
// remains. The structure models the sentence iff the output is satisfiable.
struct McToSatResult {
    CnfFormula cnf;
    TreeDecomposition td;
    std::vector<RoundLog> stages;
    GroundingResult grounding;
};

inline McToSatResult mc_to_sat(const MsoFormula& phi, const RelationalStructure& s,
                               const TreeDecomposition& td, const Limits& limits = {}) {
    check(phi.is_closed(), "model checking needs a closed sentence");
    McToSatResult out;
    out.grounding = ground_to_qbf(phi, s, td, limits);
    RoundLog glog;
    glog.kind = "ground_to_qbf";
    glog.width_in = out.grounding.width_in;
    glog.width_out = out.grounding.width_out;
    glog.width_bound = out.grounding.width_bound;
    glog.bound_holds = out.grounding.width_out <= out.grounding.width_bound;
    glog.vars_out = out.grounding.q.num_vars();
    glog.clauses_out = static_cast<long long>(out.grounding.q.cnf.clauses.size());
    out.stages.push_back(glog);

    PreservationResult pres = preserve_alternation(out.grounding, limits);
    if (pres.applied) out.stages.push_back(pres.log);

    QsatToSatResult fin = qsat_to_sat(pres.q, pres.td, limits);
    for (const auto& r : fin.rounds) out.stages.push_back(r);
    out.cnf = std::move(fin.cnf);
    out.td = std::move(fin.td);
    return out;
}

} // namespace twg

#endif
