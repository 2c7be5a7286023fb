#pragma once

#include <algorithm>
#include <initializer_list>

#include "signatlas/numeric.hpp"

namespace signatlas {

/* Closed interval with exact rational endpoints. Arithmetic returns
 * intervals containing the exact image set, so any conclusive statement
 * derived from one (sign excluded, threshold cleared) is a certificate. */
struct IVal {
    Rat lo, hi;

    IVal() : lo(0), hi(0) {}
    IVal(int v) : lo(v), hi(v) {}
    IVal(Rat v) : lo(v), hi(std::move(v)) {}
    IVal(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo > hi)
            throw DomainError("interval with lo > hi");
    }

    bool contains(const Rat& x) const { return lo <= x && x <= hi; }
    bool contains_zero() const { return lo <= 0 && 0 <= hi; }
    bool is_point() const { return lo == hi; }

    /* Sign certified over the whole interval, 2 when 0 is interior. */
    int certified_sign() const {
        if (lo > 0)
            return 1;
        if (hi < 0)
            return -1;
        if (lo == 0 && hi == 0)
            return 0;
        return 2;
    }

    bool operator==(const IVal&) const = default;
};

inline IVal operator+(const IVal& a, const IVal& b) { return IVal(a.lo + b.lo, a.hi + b.hi); }
inline IVal operator-(const IVal& a, const IVal& b) { return IVal(a.lo - b.hi, a.hi - b.lo); }

inline IVal operator*(const IVal& a, const IVal& b) {
    Rat p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    Rat lo = std::min(std::min(p1, p2), std::min(p3, p4));
    Rat hi = std::max(std::max(p1, p2), std::max(p3, p4));
    return IVal(std::move(lo), std::move(hi));
}

inline IVal operator-(const IVal& a) { return IVal(-a.hi, -a.lo); }

/* Exact range of x^e over the interval (monotone pieces split at 0). */
inline IVal ival_pow(const IVal& a, unsigned e) {
    if (e == 0)
        return IVal(1);
    if (e == 1)
        return a;
    Rat plo = rat_pow(a.lo, e), phi = rat_pow(a.hi, e);
    if (e % 2 == 1)
        return IVal(std::move(plo), std::move(phi));
    if (a.lo >= 0)
        return IVal(std::move(plo), std::move(phi));
    if (a.hi <= 0)
        return IVal(std::move(phi), std::move(plo));
    return IVal(Rat(0), std::max(plo, phi));
}

} // namespace signatlas
