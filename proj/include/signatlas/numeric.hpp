#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "signatlas/errors.hpp"

namespace signatlas {

/* Exact arithmetic substrate. Every quantity in the library is an
 * arbitrary-precision integer or a canonical rational (coprime parts,
 * positive denominator, zero represented as 0/1). */
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

using Point = std::vector<Rat>;

/* Builds p/q in canonical form. The backend normalizes gcd and keeps the
 * denominator positive once we hand it a positive q. */
inline Rat make_rat(Int p, Int q) {
    if (q == 0)
        throw DomainError("rational with zero denominator");
    if (q < 0) {
        p = -p;
        q = -q;
    }
    return Rat(std::move(p), std::move(q));
}

inline int sign_of(const Rat& r) { return r.sign(); }
inline int sign_of(const Int& a) { return a.sign(); }

/* Bit length of |a|; 0 and +-1 map to 0 and 1 by convention. */
inline unsigned log_height(const Int& a) {
    if (a == 0)
        return 0;
    return static_cast<unsigned>(boost::multiprecision::msb(boost::multiprecision::abs(a))) + 1u;
}

/* max of the numerator/denominator bit lengths, on the canonical form. */
inline unsigned log_height(const Rat& r) {
    unsigned hp = log_height(numerator(r));
    unsigned hq = log_height(denominator(r));
    return hp > hq ? hp : hq;
}

/* x^e through integer powers of the coprime parts. */
inline Rat rat_pow(const Rat& x, unsigned e) {
    if (e == 0)
        return Rat(1);
    if (e == 1)
        return x;
    return make_rat(boost::multiprecision::pow(numerator(x), e),
                    boost::multiprecision::pow(denominator(x), e));
}

inline Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

/* "p/q" with q omitted when it is 1; base 10, optional leading minus. */
inline std::string to_string(const Rat& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) {
        s += '/';
        s += denominator(r).str();
    }
    return s;
}

namespace detail {
inline bool all_digits(std::string_view s) {
    if (s.empty())
        return false;
    for (char c : s)
        if (c < '0' || c > '9')
            return false;
    return true;
}
} // namespace detail

/* Accepts exactly the serialized shape: [-]digits[/digits], q > 0. */
inline Rat parse_rat(std::string_view text) {
    std::string_view s = text;
    bool neg = false;
    if (!s.empty() && s.front() == '-') {
        neg = true;
        s.remove_prefix(1);
    }
    std::string_view ps = s, qs = "1";
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        ps = s.substr(0, slash);
        qs = s.substr(slash + 1);
    }
    if (!detail::all_digits(ps) || !detail::all_digits(qs))
        throw ParseError("bad rational literal: '" + std::string(text) + "'");
    Int p{std::string(ps)};
    Int q{std::string(qs)};
    if (q == 0)
        throw ParseError("bad rational literal (zero denominator): '" + std::string(text) + "'");
    if (neg)
        p = -p;
    return make_rat(std::move(p), std::move(q));
}

/* Comma-separated rationals, the CLI point syntax. */
inline Point parse_point(std::string_view text) {
    Point out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = text.find(',', start);
        std::string_view piece = comma == std::string_view::npos
                                     ? text.substr(start)
                                     : text.substr(start, comma - start);
        out.push_back(parse_rat(piece));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

inline std::string to_string(std::span<const Rat> x) {
    std::string s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i)
            s += ',';
        s += to_string(x[i]);
    }
    return s;
}

/* base^exp by squaring, refusing results wider than max_bits. */
inline Int checked_pow(const Int& base, std::uint64_t exp, std::uint64_t max_bits) {
    Int result(1), acc = base;
    const Int cap = Int(1) << max_bits;
    while (exp > 0) {
        if (exp & 1) {
            result *= acc;
            if (boost::multiprecision::abs(result) >= cap)
                throw BoundTooLarge("power exceeds configured digit budget");
        }
        exp >>= 1;
        if (exp) {
            acc *= acc;
            if (boost::multiprecision::abs(acc) >= cap)
                throw BoundTooLarge("power exceeds configured digit budget");
        }
    }
    return result;
}

} // namespace signatlas
