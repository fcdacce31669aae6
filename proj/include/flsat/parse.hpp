#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "flsat/formula.hpp"

namespace flsat {

namespace detail {

struct Token {
    std::string text;
    size_t pos = 0;
};

inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

inline std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        if (c == '#') {
            while (i < s.size() && s[i] != '\n') ++i;
            continue;
        }
        size_t start = i;
        if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
            out.push_back({"->", start});
            i += 2;
        } else if (std::string("(){},/&|^!=").find(c) != std::string::npos) {
            out.push_back({std::string(1, c), start});
            ++i;
        } else if (ident_char(c)) {
            while (i < s.size() && ident_char(s[i])) ++i;
            out.push_back({s.substr(start, i - start), start});
        } else {
            fail("SyntaxError", "unexpected character '" + std::string(1, c) + "' at offset " +
                                    std::to_string(start));
        }
    }
    return out;
}

struct Parser {
    const std::vector<Token>& toks;
    size_t i = 0;
    Signature* sig;  // may gain "That" on demand

    const Token& peek() const {
        static Token eof{"", 0};
        return i < toks.size() ? toks[i] : eof;
    }
    bool at_end() const { return i >= toks.size(); }
    Token next() {
        if (at_end()) fail("SyntaxError", "unexpected end of input");
        return toks[i++];
    }
    void expect(const std::string& t) {
        Token tok = next();
        if (tok.text != t)
            fail("SyntaxError", "expected '" + t + "' but found '" + tok.text + "' at offset " +
                                    std::to_string(tok.pos));
    }

    PredId atom_id(const Token& tok) {
        if (tok.text == "=") {
            PredId id = sig->equality_id();
            if (id < 0) fail("UnknownPredicate", "'=' used but equality not declared");
            return id;
        }
        PredId id = sig->find(tok.text);
        if (id < 0) {
            if (tok.text == "That") {
                if (sig->transitive_count() != 1)
                    fail("UnknownPredicate", "'That' requires exactly one transitive relation");
                return sig->add("That", 1, PredKind::THat);
            }
            fail("UnknownPredicate", tok.text + " at offset " + std::to_string(tok.pos));
        }
        return id;
    }

    FormulaPtr formula() {
        Token tok = next();
        if (tok.text == "true") return f_true();
        if (tok.text == "false") return f_false();
        if (tok.text == "forall") return f_forall(formula());
        if (tok.text == "exists") return f_exists(formula());
        if (tok.text == "!") return f_not(formula());
        if (tok.text == "(") {
            FormulaPtr first = formula();
            if (peek().text == ")") {
                next();
                return first;
            }
            Token op = next();
            if (op.text == "->") {
                FormulaPtr rhs = formula();
                expect(")");
                return f_implies(first, rhs);
            }
            if (op.text != "&" && op.text != "|" && op.text != "^")
                fail("SyntaxError", "expected operator, found '" + op.text + "' at offset " +
                                        std::to_string(op.pos));
            std::vector<FormulaPtr> kids{first, formula()};
            while (peek().text == op.text) {
                next();
                kids.push_back(formula());
            }
            expect(")");
            if (op.text == "&") return mk(FKind::And, std::move(kids));
            if (op.text == "|") return mk(FKind::Or, std::move(kids));
            return mk(FKind::Xor, std::move(kids));
        }
        if (tok.text == "=" || ident_char(tok.text[0])) return f_atom(atom_id(tok));
        fail("SyntaxError", "unexpected token '" + tok.text + "' at offset " + std::to_string(tok.pos));
    }
};

}  // namespace detail

// Parses a bare formula against an existing signature ("That" may be added on
// first use). parse(print(f)) is the identity up to whitespace.
inline FormulaPtr parse(const std::string& text, Signature& sig) {
    auto toks = detail::tokenize(text);
    detail::Parser p{toks, 0, &sig};
    FormulaPtr f = p.formula();
    if (!p.at_end())
        fail("SyntaxError", "trailing input at offset " + std::to_string(p.peek().pos));
    return f;
}

struct FormulaFile {
    Signature sig;
    FormulaPtr formula;
};

// Formula file: `sig { name/arity, ... } [trans { T, ... }] [eq]` then one sentence.
inline FormulaFile parse_file(const std::string& text) {
    auto toks = detail::tokenize(text);
    FormulaFile out;
    detail::Parser p{toks, 0, &out.sig};
    p.expect("sig");
    p.expect("{");
    if (p.peek().text != "}") {
        while (true) {
            detail::Token name = p.next();
            p.expect("/");
            detail::Token ar = p.next();
            int arity = 0;
            try {
                arity = std::stoi(ar.text);
            } catch (...) {
                fail("SyntaxError", "bad arity '" + ar.text + "'");
            }
            out.sig.add(name.text, arity);
            if (p.peek().text != ",") break;
            p.next();
        }
    }
    p.expect("}");
    if (p.peek().text == "trans") {
        p.next();
        p.expect("{");
        while (true) {
            detail::Token name = p.next();
            out.sig.add(name.text, 2, PredKind::Transitive);
            if (p.peek().text != ",") break;
            p.next();
        }
        p.expect("}");
    }
    if (p.peek().text == "eq") {
        p.next();
        out.sig.add("=", 2, PredKind::Equality);
    }
    out.formula = p.formula();
    if (!p.at_end())
        fail("SyntaxError", "trailing input at offset " + std::to_string(p.peek().pos));
    return out;
}

inline std::string print_file(const Signature& sig, const FormulaPtr& f) {
    std::string s = "sig { ";
    bool first = true;
    for (PredId i = 0; i < sig.size(); ++i) {
        const Pred& p = sig.at(i);
        if (p.kind != PredKind::Ordinary) continue;
        if (!first) s += ", ";
        s += p.name + "/" + std::to_string(p.arity);
        first = false;
    }
    s += " }";
    auto trans = sig.transitive_ids();
    if (!trans.empty()) {
        s += " trans { ";
        for (size_t i = 0; i < trans.size(); ++i) {
            if (i) s += ", ";
            s += sig.at(trans[i]).name;
        }
        s += " }";
    }
    if (sig.has_equality()) s += " eq";
    s += "\n" + print(sig, f) + "\n";
    return s;
}

}  // namespace flsat
