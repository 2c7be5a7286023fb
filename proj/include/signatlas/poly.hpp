#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "signatlas/box.hpp"
#include "signatlas/interval.hpp"
#include "signatlas/numeric.hpp"

namespace signatlas {

using Exponents = std::vector<std::uint32_t>;

/* Sparse integer-coefficient polynomial in n variables. The term map is
 * canonical: no zero coefficients, every exponent vector has length n. */
class MultiPoly {
public:
    explicit MultiPoly(std::size_t num_vars) : n_(num_vars) {}

    static MultiPoly constant(std::size_t n, Int c) {
        MultiPoly p(n);
        p.add_term(Exponents(n, 0), std::move(c));
        return p;
    }

    static MultiPoly from_terms(std::size_t n,
                                std::initializer_list<std::pair<Exponents, Int>> terms) {
        MultiPoly p(n);
        for (const auto& [e, c] : terms)
            p.add_term(e, c);
        return p;
    }

    std::size_t num_vars() const { return n_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const std::map<Exponents, Int>& terms() const { return terms_; }

    /* Merges into an existing term; a cancelled term is removed. */
    void add_term(Exponents e, Int c) {
        if (e.size() != n_)
            throw DomainError("term exponent vector of wrong length");
        if (c == 0)
            return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(std::move(e), std::move(c));
            return;
        }
        it->second += c;
        if (it->second == 0)
            terms_.erase(it);
    }

    unsigned total_degree() const {
        unsigned d = 0;
        for (const auto& [e, c] : terms_) {
            unsigned td = std::accumulate(e.begin(), e.end(), 0u);
            d = std::max(d, td);
        }
        return d;
    }

    unsigned log_height() const {
        unsigned h = 0;
        for (const auto& [e, c] : terms_)
            h = std::max(h, signatlas::log_height(c));
        return h;
    }

    /* Largest absolute coefficient (the non-logarithmic height H). */
    Int max_abs_coeff() const {
        Int m = 0;
        for (const auto& [e, c] : terms_)
            m = std::max(m, Int(boost::multiprecision::abs(c)));
        return m;
    }

    unsigned max_exponent(std::size_t var) const {
        unsigned m = 0;
        for (const auto& [e, c] : terms_)
            m = std::max(m, unsigned(e[var]));
        return m;
    }

    Rat eval(std::span<const Rat> x, std::size_t* ops = nullptr) const {
        if (x.size() != n_)
            throw DomainError("evaluation point of wrong dimension");
        Rat acc(0);
        std::size_t count = 0;
        bool first = true;
        for (const auto& [e, c] : terms_) {
            Rat tv(c);
            for (std::size_t i = 0; i < n_; ++i)
                for (std::uint32_t t = 0; t < e[i]; ++t) {
                    tv *= x[i];
                    ++count;
                }
            if (first) {
                acc = std::move(tv);
                first = false;
            } else {
                acc += tv;
                ++count;
            }
        }
        if (ops)
            *ops += count;
        return acc;
    }

    int sign_at(std::span<const Rat> x) const { return eval(x).sign(); }

    /* Term-wise interval image over per-axis ranges: exact interval powers
     * multiplied into the coefficient, then summed. Coarse but containing. */
    IVal eval_interval(std::span<const IVal> ranges) const {
        if (ranges.size() != n_)
            throw DomainError("interval evaluation of wrong dimension");
        IVal acc(0);
        for (const auto& [e, c] : terms_) {
            IVal tv{Rat(c)};
            for (std::size_t i = 0; i < n_; ++i)
                if (e[i] > 0)
                    tv = tv * ival_pow(ranges[i], e[i]);
            acc = acc + tv;
        }
        return acc;
    }

    IVal eval_interval(const Box& b) const { return eval_interval(b.axes()); }

    bool operator==(const MultiPoly&) const = default;

private:
    std::size_t n_;
    std::map<Exponents, Int> terms_;
};

inline std::pair<unsigned, unsigned> degree_and_height(const MultiPoly& p) {
    return {p.total_degree(), p.log_height()};
}

/* 1/(H+1) with H the largest absolute coefficient: every real root mu of a
 * univariate integer polynomial with nonzero constant term has |mu| above it. */
inline Rat cauchy_lower_bound(const MultiPoly& p) {
    if (p.num_vars() != 1)
        throw DomainError("cauchy_lower_bound needs a univariate polynomial");
    if (p.is_zero())
        throw DomainError("cauchy_lower_bound needs a nonzero polynomial");
    if (p.terms().find(Exponents{0}) == p.terms().end())
        throw ZeroRootPresent("constant term is zero, 0 is a root");
    return make_rat(Int(1), p.max_abs_coeff() + 1);
}

/* log2 of the family-size bound: h * (d+1)^n. */
inline Int family_cardinality_bound(unsigned n, unsigned d, unsigned h) {
    if (n < 1 || d < 1 || h < 1)
        throw DomainError("family_cardinality_bound needs n, d, h >= 1");
    return Int(h) * boost::multiprecision::pow(Int(d) + 1, n);
}

inline Json poly_to_json(const MultiPoly& p) {
    Json terms = Json::array();
    for (const auto& [e, c] : p.terms()) {
        Json ev = Json::array();
        for (auto x : e)
            ev.push_back(x);
        terms.push_back(Json{{"e", ev}, {"c", c.str()}});
    }
    return Json{{"n", p.num_vars()}, {"terms", terms}};
}

inline MultiPoly poly_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("terms"))
        throw SchemaError("polynomial: expected {n, terms}");
    MultiPoly p(j.at("n").get<std::size_t>());
    for (const auto& t : j.at("terms")) {
        Exponents e;
        for (const auto& v : t.at("e"))
            e.push_back(v.get<std::uint32_t>());
        const Json& cj = t.at("c");
        Int c = cj.is_string() ? Int(cj.get<std::string>()) : Int(cj.get<std::int64_t>());
        p.add_term(std::move(e), std::move(c));
    }
    return p;
}

} // namespace signatlas
