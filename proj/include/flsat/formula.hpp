#pragma once

#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "flsat/sig.hpp"

namespace flsat {

// Variable-free fluted AST. An atom of arity k read in context depth d refers
// to the last k context elements; quantifiers extend the context by one.
enum class FKind { True, False, Atom, Not, And, Or, Xor, Implies, Forall, Exists };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    FKind kind;
    PredId pred = -1;             // Atom only
    std::vector<FormulaPtr> kids; // Not:1, Implies:2, And/Or/Xor:n, Forall/Exists:1
};

inline FormulaPtr mk(FKind k, std::vector<FormulaPtr> kids = {}, PredId p = -1) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->pred = p;
    f->kids = std::move(kids);
    return f;
}

inline FormulaPtr f_true() { return mk(FKind::True); }
inline FormulaPtr f_false() { return mk(FKind::False); }
inline FormulaPtr f_atom(PredId p) { return mk(FKind::Atom, {}, p); }
inline FormulaPtr f_not(FormulaPtr a) { return mk(FKind::Not, {std::move(a)}); }
inline FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) { return mk(FKind::Implies, {std::move(a), std::move(b)}); }
inline FormulaPtr f_forall(FormulaPtr a) { return mk(FKind::Forall, {std::move(a)}); }
inline FormulaPtr f_exists(FormulaPtr a) { return mk(FKind::Exists, {std::move(a)}); }

inline FormulaPtr f_and(std::vector<FormulaPtr> kids) {
    if (kids.empty()) return f_true();
    if (kids.size() == 1) return kids[0];
    return mk(FKind::And, std::move(kids));
}

inline FormulaPtr f_or(std::vector<FormulaPtr> kids) {
    if (kids.empty()) return f_false();
    if (kids.size() == 1) return kids[0];
    return mk(FKind::Or, std::move(kids));
}

// n-ary exclusive disjunction: exactly one disjunct holds.
inline FormulaPtr f_xor(std::vector<FormulaPtr> kids) {
    if (kids.empty()) return f_false();
    if (kids.size() == 1) return kids[0];
    return mk(FKind::Xor, std::move(kids));
}

inline bool struct_equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a->kind != b->kind || a->pred != b->pred || a->kids.size() != b->kids.size()) return false;
    for (size_t i = 0; i < a->kids.size(); ++i)
        if (!struct_equal(a->kids[i], b->kids[i])) return false;
    return true;
}

struct ValidationInfo {
    int quantifier_depth = 0;
    int max_arity = 0;
    int variable_bound = 0;  // free_prefix + quantifier_depth
};

namespace detail {
inline void validate_rec(const Signature& sig, const FormulaPtr& f, int depth, int base,
                         ValidationInfo& info) {
    switch (f->kind) {
        case FKind::True:
        case FKind::False:
            return;
        case FKind::Atom: {
            const Pred& p = sig.at(f->pred);
            if (p.arity > depth)
                fail("ArityExceedsContext",
                     p.name + "/" + std::to_string(p.arity) + " at depth " + std::to_string(depth));
            info.max_arity = std::max(info.max_arity, p.arity);
            return;
        }
        case FKind::Not:
        case FKind::And:
        case FKind::Or:
        case FKind::Xor:
        case FKind::Implies:
            for (auto& k : f->kids) validate_rec(sig, k, depth, base, info);
            return;
        case FKind::Forall:
        case FKind::Exists:
            info.quantifier_depth = std::max(info.quantifier_depth, depth + 1 - base);
            validate_rec(sig, f->kids[0], depth + 1, base, info);
            return;
    }
}
}  // namespace detail

// Membership check for the variable-free fragment at a given free prefix.
inline ValidationInfo validate(const Signature& sig, const FormulaPtr& f, int free_prefix) {
    ValidationInfo info;
    detail::validate_rec(sig, f, free_prefix, free_prefix, info);
    info.variable_bound = free_prefix + info.quantifier_depth;
    return info;
}

namespace detail {
inline void print_rec(const Signature& sig, const FormulaPtr& f, std::ostream& os) {
    switch (f->kind) {
        case FKind::True: os << "true"; return;
        case FKind::False: os << "false"; return;
        case FKind::Atom: os << sig.at(f->pred).name; return;
        case FKind::Not:
            os << "!";
            print_rec(sig, f->kids[0], os);
            return;
        case FKind::And:
        case FKind::Or:
        case FKind::Xor: {
            const char* op = f->kind == FKind::And ? " & " : f->kind == FKind::Or ? " | " : " ^ ";
            os << "(";
            for (size_t i = 0; i < f->kids.size(); ++i) {
                if (i) os << op;
                print_rec(sig, f->kids[i], os);
            }
            os << ")";
            return;
        }
        case FKind::Implies:
            os << "(";
            print_rec(sig, f->kids[0], os);
            os << " -> ";
            print_rec(sig, f->kids[1], os);
            os << ")";
            return;
        case FKind::Forall:
        case FKind::Exists:
            os << (f->kind == FKind::Forall ? "forall " : "exists ");
            print_rec(sig, f->kids[0], os);
            return;
    }
}
}  // namespace detail

inline std::string print(const Signature& sig, const FormulaPtr& f) {
    std::ostringstream os;
    detail::print_rec(sig, f, os);
    return os.str();
}

namespace detail {

inline std::string var(int i) { return "x" + std::to_string(i); }

inline void render_args(int arity, int depth, std::ostream& os) {
    os << "(";
    for (int k = 0; k < arity; ++k) {
        if (k) os << ",";
        os << var(depth - arity + k + 1);
    }
    os << ")";
}

inline void render_rec(const Signature& sig, const FormulaPtr& f, int depth, std::ostream& os);

// Exactly-one expansion keeps the rendering classical first-order.
inline void render_xor(const Signature& sig, const FormulaPtr& f, int depth, std::ostream& os) {
    os << "(";
    for (size_t i = 0; i < f->kids.size(); ++i) {
        if (i) os << " | ";
        os << "(";
        for (size_t j = 0; j < f->kids.size(); ++j) {
            if (j) os << " & ";
            if (j != i) os << "!";
            render_rec(sig, f->kids[j], depth, os);
        }
        os << ")";
    }
    os << ")";
}

inline void render_rec(const Signature& sig, const FormulaPtr& f, int depth, std::ostream& os) {
    switch (f->kind) {
        case FKind::True: os << "true"; return;
        case FKind::False: os << "false"; return;
        case FKind::Atom: {
            const Pred& p = sig.at(f->pred);
            if (p.kind == PredKind::Equality) {
                os << "(" << var(depth - 1) << " = " << var(depth) << ")";
            } else {
                os << p.name;
                if (p.arity > 0) render_args(p.arity, depth, os);
            }
            return;
        }
        case FKind::Not:
            os << "!";
            render_rec(sig, f->kids[0], depth, os);
            return;
        case FKind::And:
        case FKind::Or: {
            const char* op = f->kind == FKind::And ? " & " : " | ";
            os << "(";
            for (size_t i = 0; i < f->kids.size(); ++i) {
                if (i) os << op;
                render_rec(sig, f->kids[i], depth, os);
            }
            os << ")";
            return;
        }
        case FKind::Xor:
            render_xor(sig, f, depth, os);
            return;
        case FKind::Implies:
            os << "(";
            render_rec(sig, f->kids[0], depth, os);
            os << " -> ";
            render_rec(sig, f->kids[1], depth, os);
            os << ")";
            return;
        case FKind::Forall:
        case FKind::Exists:
            os << (f->kind == FKind::Forall ? "forall " : "exists ") << var(depth + 1) << " ";
            render_rec(sig, f->kids[0], depth + 1, os);
            return;
    }
}

}  // namespace detail

// Classical rendering with explicit variables x1, x2, ...; arguments are the
// suffix of the quantifier prefix, as flutedness dictates.
inline std::string render_with_variables(const Signature& sig, const FormulaPtr& f, int start) {
    validate(sig, f, start);
    std::ostringstream os;
    detail::render_rec(sig, f, start, os);
    return os.str();
}

}  // namespace flsat
