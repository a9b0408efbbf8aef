#ifndef TWG_DPLL_HPP
#define TWG_DPLL_HPP

#include <optional>
#include <vector>

#include "twg/formula.hpp"

namespace twg {

// Plain DPLL with counter-based unit propagation. This is deliberately not
// the TD-guided solver: it serves as a second, independent satisfiability
// route for cross-checking and for deciding large propagation-heavy
// encodings where exhaustive enumeration is out of reach.
class DpllSolver {
  public:
    explicit DpllSolver(const CnfFormula& f) : nvars_(f.num_vars) {
        clauses_.reserve(f.clauses.size());
        occ_.assign(2 * nvars_ + 2, {});
        for (const auto& c : f.clauses) {
            if (is_tautological(c)) continue;
            clauses_.push_back(c);
        }
        for (std::size_t i = 0; i < clauses_.size(); ++i)
            for (Lit l : clauses_[i]) occ_[lit_index(l)].push_back(i);
        unassigned_.assign(clauses_.size(), 0);
        satisfied_by_.assign(clauses_.size(), 0);
        for (std::size_t i = 0; i < clauses_.size(); ++i)
            unassigned_[i] = static_cast<int>(clauses_[i].size());
        value_.assign(nvars_ + 1, 0);
    }

    // Satisfiability under optional assumptions; assumptions may not clash.
    bool solve(const std::vector<Lit>& assumptions = {}) {
        trail_.clear();
        for (std::size_t i = 0; i < clauses_.size(); ++i) {
            unassigned_[i] = static_cast<int>(clauses_[i].size());
            satisfied_by_[i] = 0;
            if (clauses_[i].empty()) return false;
        }
        std::fill(value_.begin(), value_.end(), 0);
        std::size_t mark = 0;
        for (Lit a : assumptions) {
            if (value_of(a) == 1) continue;
            if (value_of(a) == -1) return false;
            if (!assign(a)) return false;
        }
        if (!propagate(mark)) return false;
        return search();
    }

    // Model of the last successful solve, as positive/negative literals.
    std::vector<Lit> model() const {
        std::vector<Lit> m;
        for (int v = 1; v <= nvars_; ++v) m.push_back(value_[v] >= 0 ? v : -v);
        return m;
    }

  private:
    int nvars_;
    std::vector<Clause> clauses_;
    std::vector<std::vector<std::size_t>> occ_;
    std::vector<int> unassigned_;
    std::vector<int> satisfied_by_; // count of satisfying assigned literals
    std::vector<signed char> value_; // 0 unassigned, 1 true, -1 false
    std::vector<Lit> trail_;

    static std::size_t lit_index(Lit l) { return 2 * var_of(l) + (l < 0 ? 1 : 0); }

    int value_of(Lit l) const {
        signed char v = value_[var_of(l)];
        if (v == 0) return 0;
        return (v == 1) == (l > 0) ? 1 : -1;
    }

    // Applies the assignment completely even on conflict, so unassign_to()
    // can always undo a full update.
    bool assign(Lit l) {
        value_[var_of(l)] = l > 0 ? 1 : -1;
        trail_.push_back(l);
        bool conflict = false;
        for (std::size_t ci : occ_[lit_index(l)]) ++satisfied_by_[ci];
        for (std::size_t ci : occ_[lit_index(neg(l))])
            if (--unassigned_[ci] == 0 && satisfied_by_[ci] == 0) conflict = true;
        for (std::size_t ci : occ_[lit_index(l)]) --unassigned_[ci];
        return !conflict;
    }

    void unassign_to(std::size_t mark) {
        while (trail_.size() > mark) {
            Lit l = trail_.back();
            trail_.pop_back();
            value_[var_of(l)] = 0;
            for (std::size_t ci : occ_[lit_index(l)]) {
                --satisfied_by_[ci];
                ++unassigned_[ci];
            }
            for (std::size_t ci : occ_[lit_index(neg(l))]) ++unassigned_[ci];
        }
    }

    // Repeatedly assigns forced literals starting from trail position `from`.
    bool propagate(std::size_t& from) {
        while (from < trail_.size()) {
            Lit l = trail_[from++];
            for (std::size_t ci : occ_[lit_index(neg(l))]) {
                if (satisfied_by_[ci] > 0 || unassigned_[ci] != 1) continue;
                Lit unit = 0;
                for (Lit cand : clauses_[ci])
                    if (value_of(cand) == 0) { unit = cand; break; }
                if (unit == 0) continue; // became satisfied meanwhile
                if (!assign(unit)) return false;
            }
        }
        return true;
    }

    bool search() {
        // initial units
        std::size_t pos = 0;
        for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
            if (satisfied_by_[ci] > 0 || unassigned_[ci] != 1) continue;
            Lit unit = 0;
            for (Lit cand : clauses_[ci])
                if (value_of(cand) == 0) { unit = cand; break; }
            if (unit != 0 && value_of(unit) != 1)
                if (!assign(unit)) return false;
        }
        if (!propagate(pos)) return false;
        return branch();
    }

    bool branch() {
        int pick = 0;
        for (int v = 1; v <= nvars_; ++v)
            if (value_[v] == 0) { pick = v; break; }
        if (pick == 0) return true;
        for (Lit l : {pick, -pick}) {
            std::size_t mark = trail_.size();
            std::size_t pos = trail_.size();
            if (assign(l) && propagate(pos) && branch()) return true;
            unassign_to(mark);
        }
        return false;
    }
};

inline bool dpll_sat(const CnfFormula& f, const std::vector<Lit>& assumptions = {}) {
    return DpllSolver(f).solve(assumptions);
}

} // namespace twg

#endif
