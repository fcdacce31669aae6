#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace flsat {

// Error codes mirror the failure modes named throughout the public surface.
struct FlError : std::runtime_error {
    std::string code;
    FlError(std::string c, const std::string& msg)
        : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

[[noreturn]] inline void fail(const std::string& code, const std::string& msg) {
    throw FlError(code, msg);
}

enum class PredKind { Ordinary, Transitive, Equality, THat };

using PredId = int;

struct Pred {
    std::string name;
    int arity = 0;
    PredKind kind = PredKind::Ordinary;
};

// Purely relational signature. Equality, when enabled, is a real entry so
// atoms can reference it uniformly; it is never materialized in structures.
struct Signature {
    std::vector<Pred> preds;

    PredId find(const std::string& name) const {
        for (size_t i = 0; i < preds.size(); ++i)
            if (preds[i].name == name) return static_cast<PredId>(i);
        return -1;
    }

    PredId add(const std::string& name, int arity, PredKind kind = PredKind::Ordinary) {
        if (find(name) >= 0) fail("DuplicatePredicate", name);
        if (kind == PredKind::Equality && arity != 2) fail("BadArity", "equality must be binary");
        if (kind == PredKind::Transitive && arity != 2) fail("BadArity", "transitive predicates must be binary");
        if (kind == PredKind::THat && arity != 1) fail("BadArity", "That must be unary");
        if (kind == PredKind::Equality && has_equality()) fail("DuplicatePredicate", "second equality symbol");
        if (kind == PredKind::THat && that_id() >= 0) fail("DuplicatePredicate", "second That symbol");
        preds.push_back({name, arity, kind});
        return static_cast<PredId>(preds.size() - 1);
    }

    PredId add_fresh(const std::string& stem, int arity, PredKind kind = PredKind::Ordinary) {
        std::string name = stem;
        int k = 0;
        while (find(name) >= 0) name = stem + "_" + std::to_string(k++);
        return add(name, arity, kind);
    }

    const Pred& at(PredId id) const { return preds.at(static_cast<size_t>(id)); }
    int size() const { return static_cast<int>(preds.size()); }

    bool has_equality() const { return equality_id() >= 0; }

    PredId equality_id() const {
        for (size_t i = 0; i < preds.size(); ++i)
            if (preds[i].kind == PredKind::Equality) return static_cast<PredId>(i);
        return -1;
    }

    PredId that_id() const {
        for (size_t i = 0; i < preds.size(); ++i)
            if (preds[i].kind == PredKind::THat) return static_cast<PredId>(i);
        return -1;
    }

    std::vector<PredId> transitive_ids() const {
        std::vector<PredId> out;
        for (size_t i = 0; i < preds.size(); ++i)
            if (preds[i].kind == PredKind::Transitive) out.push_back(static_cast<PredId>(i));
        return out;
    }

    int transitive_count() const { return static_cast<int>(transitive_ids().size()); }

    // Ordinary + That predicates of arity exactly 1, in id order. This is the
    // type alphabet for all the 1-type machinery.
    std::vector<PredId> unary_ids() const {
        std::vector<PredId> out;
        for (size_t i = 0; i < preds.size(); ++i)
            if (preds[i].arity == 1) out.push_back(static_cast<PredId>(i));
        return out;
    }

    std::vector<PredId> nullary_ids() const {
        std::vector<PredId> out;
        for (size_t i = 0; i < preds.size(); ++i)
            if (preds[i].arity == 0) out.push_back(static_cast<PredId>(i));
        return out;
    }

    std::vector<PredId> ordinary_ids_of_arity(int arity) const {
        std::vector<PredId> out;
        for (size_t i = 0; i < preds.size(); ++i)
            if (preds[i].kind == PredKind::Ordinary && preds[i].arity == arity)
                out.push_back(static_cast<PredId>(i));
        return out;
    }

    int max_arity() const {
        int m = 0;
        for (auto& p : preds) m = std::max(m, p.arity);
        return m;
    }
};

}  // namespace flsat
