#pragma once

#include <cstdint>
#include <optional>

#include "flsat/structure.hpp"

namespace flsat {

enum class SearchMode { AtMost, Exactly };

struct OracleOptions {
    int size_bound = 6;
    uint64_t node_budget = 0;  // 0 = unbounded
};

namespace detail {

constexpr int8_t kUnknown = 2;

// Backtracking model search over one cardinality. Element 1-types are
// assigned in non-decreasing mask order (isomorphism pruning), binary and
// ternary cells frame by frame, with transitive closure propagated eagerly on
// every accepted T-edge and a three-valued evaluation of the goal pruning
// each branch.
class ModelSearch {
  public:
    static void collect(const FormulaPtr& f, std::set<PredId>& out) {
        if (f->kind == FKind::Atom) out.insert(f->pred);
        for (auto& k : f->kids) collect(k, out);
    }

    ModelSearch(const Signature& sig, FormulaPtr goal, int n)
        : sig_(sig), goal_(std::move(goal)), n_(n) {
        // predicates outside the goal stay empty; their cells are never
        // enumerated (That and its T travel together so the diagonal tie
        // stays checkable)
        std::set<PredId> used;
        collect(goal_, used);
        PredId th = sig_.that_id();
        if (th >= 0 && !sig_.transitive_ids().empty()) {
            PredId t0 = sig_.transitive_ids()[0];
            if (used.count(th) || used.count(t0)) {
                used.insert(th);
                used.insert(t0);
            }
        }
        for (PredId p = 0; p < sig_.size(); ++p) {
            const Pred& pr = sig_.at(p);
            if (pr.kind == PredKind::Equality) continue;
            if (!used.count(p) && pr.kind != PredKind::Transitive) continue;
            if (pr.kind == PredKind::Transitive && !used.count(p)) continue;
            if (pr.arity == 0) nullary_.push_back(p);
            else if (pr.arity == 1) unary_.push_back(p);
            else if (pr.arity == 2) binary_.push_back(p);
            else if (pr.arity == 3) ternary_.push_back(p);
            else fail("BoundExceeded", "oracle supports arity <= 3");
        }
        if (unary_.size() > 16) fail("BoundExceeded", "too many unary predicates for the oracle");
        that_bit_ = -1;
        for (size_t i = 0; i < unary_.size(); ++i)
            if (sig_.at(unary_[i]).kind == PredKind::THat) that_bit_ = static_cast<int>(i);
        null_val_.assign(nullary_.size(), kUnknown);
        mask_.assign(static_cast<size_t>(n_), -1);
        cell2_.assign(binary_.size(), std::vector<int8_t>(static_cast<size_t>(n_) * n_, kUnknown));
        cell3_.assign(ternary_.size(),
                      std::vector<int8_t>(static_cast<size_t>(n_) * n_ * n_, kUnknown));
        for (size_t i = 0; i < binary_.size(); ++i)
            if (sig_.at(binary_[i]).kind == PredKind::Transitive) trans_slots_.push_back(static_cast<int>(i));
    }

    std::optional<Structure> run(uint64_t budget) {
        budget_ = budget;
        if (!search_nullary(0)) return std::nullopt;
        return found_;
    }

    uint64_t nodes() const { return nodes_; }

  private:
    const Signature& sig_;
    FormulaPtr goal_;
    int n_;
    std::vector<PredId> nullary_, unary_, binary_, ternary_;
    int that_bit_;
    std::vector<int8_t> null_val_;
    std::vector<int> mask_;                     // per element, -1 while unassigned
    std::vector<std::vector<int8_t>> cell2_;    // per binary slot, n*n
    std::vector<std::vector<int8_t>> cell3_;    // per ternary slot, n*n*n
    std::vector<int> trans_slots_;
    std::vector<std::pair<int, size_t>> trail_;  // (binary slot, cell) set to true/false
    std::optional<Structure> found_;
    uint64_t nodes_ = 0, budget_ = 0;

    bool budget_ok() {
        ++nodes_;
        if (budget_ && nodes_ > budget_) fail("BoundExceeded", "oracle node budget exhausted");
        return true;
    }

    // ---- three-valued evaluation ----------------------------------------

    int8_t atom_val(PredId p, const std::vector<int>& ctx) const {
        const Pred& pr = sig_.at(p);
        if (pr.kind == PredKind::Equality)
            return ctx[ctx.size() - 2] == ctx[ctx.size() - 1] ? 1 : 0;
        if (pr.arity == 0) {
            for (size_t i = 0; i < nullary_.size(); ++i)
                if (nullary_[i] == p) return null_val_[i];
            return kUnknown;
        }
        if (pr.arity == 1) {
            int e = ctx.back();
            if (mask_[static_cast<size_t>(e)] < 0) return kUnknown;
            for (size_t i = 0; i < unary_.size(); ++i)
                if (unary_[i] == p) return (mask_[static_cast<size_t>(e)] >> i) & 1;
            return kUnknown;
        }
        if (pr.arity == 2) {
            int a = ctx[ctx.size() - 2], b = ctx[ctx.size() - 1];
            for (size_t i = 0; i < binary_.size(); ++i)
                if (binary_[i] == p) return cell2_[i][static_cast<size_t>(a) * n_ + b];
            return kUnknown;
        }
        int a = ctx[ctx.size() - 3], b = ctx[ctx.size() - 2], c = ctx[ctx.size() - 1];
        for (size_t i = 0; i < ternary_.size(); ++i)
            if (ternary_[i] == p)
                return cell3_[i][(static_cast<size_t>(a) * n_ + b) * n_ + c];
        return kUnknown;
    }

    int8_t tri(const FormulaPtr& f, std::vector<int>& ctx) const {
        switch (f->kind) {
            case FKind::True: return 1;
            case FKind::False: return 0;
            case FKind::Atom: return atom_val(f->pred, ctx);
            case FKind::Not: {
                int8_t v = tri(f->kids[0], ctx);
                return v == kUnknown ? kUnknown : static_cast<int8_t>(1 - v);
            }
            case FKind::And: {
                int8_t acc = 1;
                for (auto& k : f->kids) {
                    int8_t v = tri(k, ctx);
                    if (v == 0) return 0;
                    if (v == kUnknown) acc = kUnknown;
                }
                return acc;
            }
            case FKind::Or: {
                int8_t acc = 0;
                for (auto& k : f->kids) {
                    int8_t v = tri(k, ctx);
                    if (v == 1) return 1;
                    if (v == kUnknown) acc = kUnknown;
                }
                return acc;
            }
            case FKind::Xor: {
                int trues = 0, unknowns = 0;
                for (auto& k : f->kids) {
                    int8_t v = tri(k, ctx);
                    if (v == 1) ++trues;
                    else if (v == kUnknown) ++unknowns;
                }
                if (trues > 1) return 0;
                if (unknowns == 0) return trues == 1 ? 1 : 0;
                return kUnknown;
            }
            case FKind::Implies: {
                int8_t a = tri(f->kids[0], ctx);
                if (a == 0) return 1;
                int8_t b = tri(f->kids[1], ctx);
                if (b == 1) return 1;
                if (a == 1 && b == 0) return 0;
                return kUnknown;
            }
            case FKind::Forall: {
                int8_t acc = 1;
                for (int e = 0; e < n_; ++e) {
                    ctx.push_back(e);
                    int8_t v = tri(f->kids[0], ctx);
                    ctx.pop_back();
                    if (v == 0) return 0;
                    if (v == kUnknown) acc = kUnknown;
                }
                return acc;
            }
            case FKind::Exists: {
                int8_t acc = 0;
                for (int e = 0; e < n_; ++e) {
                    ctx.push_back(e);
                    int8_t v = tri(f->kids[0], ctx);
                    ctx.pop_back();
                    if (v == 1) return 1;
                    if (v == kUnknown) acc = kUnknown;
                }
                return acc;
            }
        }
        return kUnknown;
    }

    bool goal_possible() const {
        std::vector<int> ctx;
        return tri(goal_, ctx) != 0;
    }

    // ---- transitive closure maintenance ----------------------------------

    bool set_edge_true(int slot, int a, int b) {
        auto& m = cell2_[static_cast<size_t>(slot)];
        size_t idx = static_cast<size_t>(a) * n_ + b;
        if (m[idx] == 1) return true;
        if (m[idx] == 0) return false;
        m[idx] = 1;
        trail_.push_back({slot, idx});
        bool transitive = false;
        for (int t : trans_slots_)
            if (t == slot) transitive = true;
        if (!transitive) return true;
        // propagate: x -> a -> b and a -> b -> y, plus the combination
        for (int x = 0; x < n_; ++x) {
            if (m[static_cast<size_t>(x) * n_ + a] == 1)
                if (!set_edge_true(slot, x, b)) return false;
        }
        for (int y = 0; y < n_; ++y) {
            if (m[static_cast<size_t>(b) * n_ + y] == 1)
                if (!set_edge_true(slot, a, y)) return false;
        }
        return true;
    }

    bool set_edge_false(int slot, int a, int b) {
        auto& m = cell2_[static_cast<size_t>(slot)];
        size_t idx = static_cast<size_t>(a) * n_ + b;
        if (m[idx] == 0) return true;
        if (m[idx] == 1) return false;
        m[idx] = 0;
        trail_.push_back({slot, idx});
        return true;
    }

    void rollback(size_t mark) {
        while (trail_.size() > mark) {
            auto [slot, idx] = trail_.back();
            trail_.pop_back();
            cell2_[static_cast<size_t>(slot)][idx] = kUnknown;
        }
    }

    // ---- search phases ----------------------------------------------------

    bool search_nullary(size_t i) {
        if (i == nullary_.size()) return search_element(0);
        for (int8_t v : {1, 0}) {
            null_val_[i] = v;
            if (goal_possible() && search_nullary(i + 1)) return true;
        }
        null_val_[i] = kUnknown;
        return false;
    }

    bool search_element(int d) {
        if (d == n_) {
            if (!goal_possible()) return false;
            return emit();
        }
        budget_ok();
        int lo = d == 0 ? 0 : mask_[static_cast<size_t>(d) - 1];
        int hi = (1 << unary_.size()) - 1;
        for (int mask = lo; mask <= hi; ++mask) {
            mask_[static_cast<size_t>(d)] = mask;
            size_t mark = trail_.size();
            bool ok = true;
            if (that_bit_ >= 0 && !trans_slots_.empty()) {
                bool self = (mask >> that_bit_) & 1;
                ok = self ? set_edge_true(trans_slots_[0], d, d)
                          : set_edge_false(trans_slots_[0], d, d);
            }
            if (ok && goal_possible() && search_cells(d, 0, 0)) return true;
            rollback(mark);
        }
        mask_[static_cast<size_t>(d)] = -1;
        return false;
    }

    // Cells whose maximum element index is d, ordered binary-then-ternary.
    struct Cell {
        int kind;  // 2 or 3
        int slot;
        size_t idx;
    };

    std::vector<Cell> frame_cells(int d) const {
        std::vector<Cell> out;
        for (size_t s = 0; s < binary_.size(); ++s)
            for (int a = 0; a <= d; ++a)
                for (int b = 0; b <= d; ++b) {
                    if (std::max(a, b) != d) continue;
                    size_t idx = static_cast<size_t>(a) * n_ + b;
                    if (cell2_[s][idx] == kUnknown)
                        out.push_back({2, static_cast<int>(s), idx});
                }
        for (size_t s = 0; s < ternary_.size(); ++s)
            for (int a = 0; a <= d; ++a)
                for (int b = 0; b <= d; ++b)
                    for (int c = 0; c <= d; ++c) {
                        if (std::max({a, b, c}) != d) continue;
                        out.push_back({3, static_cast<int>(s),
                                       (static_cast<size_t>(a) * n_ + b) * n_ + c});
                    }
        return out;
    }

    bool search_cells(int d, size_t ci, int unused) {
        (void)unused;
        std::vector<Cell> cells = frame_cells(d);
        return assign_cells(d, cells, 0);
    }

    bool assign_cells(int d, const std::vector<Cell>& cells, size_t ci) {
        while (ci < cells.size() && cells[ci].kind == 2 &&
               cell2_[static_cast<size_t>(cells[ci].slot)][cells[ci].idx] != kUnknown)
            ++ci;  // closure may have filled it
        if (ci == cells.size()) return search_element(d + 1);
        budget_ok();
        const Cell& c = cells[ci];
        if (c.kind == 2) {
            int a = static_cast<int>(c.idx) / n_, b = static_cast<int>(c.idx) % n_;
            for (int v : {1, 0}) {
                size_t mark = trail_.size();
                bool ok = v ? set_edge_true(c.slot, a, b) : set_edge_false(c.slot, a, b);
                if (ok && goal_possible() && assign_cells(d, cells, ci + 1)) return true;
                rollback(mark);
            }
            return false;
        }
        for (int8_t v : {1, 0}) {
            cell3_[static_cast<size_t>(c.slot)][c.idx] = v;
            if (goal_possible() && assign_cells(d, cells, ci + 1)) return true;
        }
        cell3_[static_cast<size_t>(c.slot)][c.idx] = kUnknown;
        return false;
    }

    bool emit() {
        Structure s(sig_, n_);
        for (size_t i = 0; i < nullary_.size(); ++i)
            s.interp[static_cast<size_t>(nullary_[i])][0] = null_val_[i] == 1;
        for (int e = 0; e < n_; ++e)
            for (size_t i = 0; i < unary_.size(); ++i)
                s.set1(unary_[i], e, (mask_[static_cast<size_t>(e)] >> i) & 1);
        for (size_t i = 0; i < binary_.size(); ++i)
            for (size_t idx = 0; idx < cell2_[i].size(); ++idx)
                s.interp[static_cast<size_t>(binary_[i])][idx] = cell2_[i][idx] == 1;
        for (size_t i = 0; i < ternary_.size(); ++i)
            for (size_t idx = 0; idx < cell3_[i].size(); ++idx)
                s.interp[static_cast<size_t>(ternary_[i])][idx] = cell3_[i][idx] == 1;
        if (!check_wellformed(s).ok()) return false;
        if (!eval(s, goal_)) return false;
        found_ = s;
        return true;
    }
};

}  // namespace detail

inline bool check_model(const Structure& s, const FormulaPtr& f) {
    return check_wellformed(s).ok() && eval(s, f);
}

// Exhaustive bounded model search (up to isomorphic relabelings of equal
// 1-type masks). Transitivity is maintained incrementally, never post hoc.
inline std::optional<Structure> find_model(const Signature& sig, const FormulaPtr& f, int size,
                                           SearchMode mode = SearchMode::AtMost,
                                           const OracleOptions& opts = {}) {
    if (size > opts.size_bound) fail("BoundExceeded", "size exceeds the oracle bound");
    validate(sig, f, 0);
    int lo = mode == SearchMode::Exactly ? size : 1;
    for (int n = lo; n <= size; ++n) {
        detail::ModelSearch ms(sig, f, n);
        auto r = ms.run(opts.node_budget);
        if (r) return r;
    }
    return std::nullopt;
}

}  // namespace flsat
