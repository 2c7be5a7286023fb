#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "signatlas/box.hpp"
#include "signatlas/fn.hpp"
#include "signatlas/numeric.hpp"
#include "signatlas/poly.hpp"

namespace signatlas {

/* A box together with the Delta restriction: the region is
 * {x in box : delta(x) >= 1}. */
struct RegionSpec {
    Box box;
    FnPtr delta;

    RegionSpec(Box b, FnPtr d) : box(std::move(b)), delta(std::move(d)) {
        if (!delta || delta->arity() != box.dim())
            throw DomainError("region: delta arity must match box dimension");
    }
};

enum class CutKind { Cuts, ConstSign, EmptyRegion, Undecided };

/* Cuts carries two exact witnesses inside the region with distinct signs;
 * ConstSign carries an interval certificate covering the region. */
struct CutStatus {
    CutKind kind;
    int sign = 0;
    Point witness_a, witness_b;
    int sign_a = 0, sign_b = 0;

    static CutStatus cuts(Point a, int sa, Point b, int sb) {
        return {CutKind::Cuts, 0, std::move(a), std::move(b), sa, sb};
    }
    static CutStatus const_sign(int s) { return {CutKind::ConstSign, s}; }
    static CutStatus empty_region() { return {CutKind::EmptyRegion}; }
    static CutStatus undecided() { return {CutKind::Undecided}; }
};

constexpr unsigned kDefaultDepthLimit = 10;

namespace detail {

/* Outcome of one subcell during the certificate search; cut discovery is
 * tracked globally through the witness list. */
enum class SubCell { Empty, Const, Undecided, Cut };

class CutSearch {
public:
    CutSearch(const RealFn& p, const RegionSpec& region, unsigned depth_limit)
        : p_(p), region_(region), depth_limit_(depth_limit) {}

    CutStatus run() {
        int const_sign = 0;
        SubCell st = visit(region_.box, 0, const_sign);
        if (st == SubCell::Cut)
            return CutStatus::cuts(witnesses_[0].second, witnesses_[0].first,
                                   witnesses_[1].second, witnesses_[1].first);
        switch (st) {
        case SubCell::Empty: return CutStatus::empty_region();
        case SubCell::Const: return CutStatus::const_sign(const_sign);
        default: return CutStatus::undecided();
        }
    }

private:
    /* On Const, out_sign is the certified sign of p_ on the subregion. */
    SubCell visit(const Box& box, unsigned depth, int& out_sign) {
        if (region_.delta->over(box).hi < 1)
            return SubCell::Empty;
        int s = p_.over(box).certified_sign();
        if (s != 2) {
            sample(box.center());
            if (witnesses_.size() >= 2)
                return SubCell::Cut;
            out_sign = s;
            return SubCell::Const;
        }
        std::uint64_t corners = std::uint64_t(1) << box.dim();
        for (std::uint64_t mask = 0; mask < corners; ++mask) {
            sample(box.corner(mask));
            if (witnesses_.size() >= 2)
                return SubCell::Cut;
        }
        sample(box.center());
        if (witnesses_.size() >= 2)
            return SubCell::Cut;
        if (depth >= depth_limit_)
            return SubCell::Undecided;

        bool all_empty = true;
        bool any_undecided = false;
        std::optional<int> seen_sign;
        bool sign_clash = false;
        for (const Box& child : box_subdivide(box)) {
            int cs = 0;
            SubCell st = visit(child, depth + 1, cs);
            if (st == SubCell::Cut)
                return SubCell::Cut;
            if (st != SubCell::Empty)
                all_empty = false;
            if (st == SubCell::Undecided)
                any_undecided = true;
            if (st == SubCell::Const) {
                if (seen_sign && *seen_sign != cs)
                    sign_clash = true;
                seen_sign = cs;
            }
        }
        if (all_empty)
            return SubCell::Empty;
        /* Distinct certified signs without two exact witnesses: a cut exists
         * but cannot be reported without points, so stay undecided. */
        if (any_undecided || sign_clash || !seen_sign)
            return SubCell::Undecided;
        out_sign = *seen_sign;
        return SubCell::Const;
    }

    void sample(Point x) {
        if (witnesses_.size() >= 2 || !visited_.insert(x).second)
            return;
        if (region_.delta->at(x) < 1)
            return;
        int s = p_.sign_at(x);
        for (const auto& [ws, wp] : witnesses_)
            if (ws == s)
                return;
        witnesses_.emplace_back(s, std::move(x));
    }

    const RealFn& p_;
    const RegionSpec& region_;
    unsigned depth_limit_;
    std::set<Point> visited_;
    std::vector<std::pair<int, Point>> witnesses_;
};

} // namespace detail

/* Certified cut decision by recursive subdivision. Conclusive answers carry
 * certificates (interval signs per subcell, exact witnesses, or exclusion of
 * every subcell); Undecided is returned when depth_limit runs out. */
inline CutStatus decide_cut(const RealFn& p, const RegionSpec& region,
                            unsigned depth_limit = kDefaultDepthLimit) {
    if (p.arity() != region.box.dim())
        throw DomainError("decide_cut: dimension mismatch");
    return detail::CutSearch(p, region, depth_limit).run();
}

inline CutStatus decide_cut(const MultiPoly& p, const RegionSpec& region,
                            unsigned depth_limit = kDefaultDepthLimit) {
    return decide_cut(PolyFn(p), region, depth_limit);
}

namespace detail {

/* Evaluates a polynomial exactly on the grid {lower + t*side/2^g} using one
 * integer scaling per axis: with x_i = a_i(t)/D_i and e_i <= dmax_i,
 * P(x) * prod D_i^{dmax_i} = sum_c c * prod a_i^{e_i} * D_i^{dmax_i - e_i}
 * is an integer of the same sign as P(x). */
class ScaledGridEval {
public:
    ScaledGridEval(const MultiPoly& p, const Box& box, unsigned g)
        : p_(p), n_(box.dim()) {
        std::size_t points = (std::size_t(1) << g) + 1;
        apow_.resize(n_);
        dpow_.resize(n_);
        scale_ = 1;
        for (std::size_t i = 0; i < n_; ++i) {
            unsigned dmax = p_.max_exponent(i);
            Int dlo = denominator(box.lower[i]);
            Int dsd = denominator(box.side) << g;
            Int di = dlo * dsd;
            Int base = numerator(box.lower[i]) * dsd;
            Int step = numerator(box.side) * dlo;
            apow_[i].resize(points);
            for (std::size_t t = 0; t < points; ++t) {
                Int a = base + Int(t) * step;
                auto& pw = apow_[i][t];
                pw.resize(dmax + 1);
                pw[0] = 1;
                for (unsigned e = 1; e <= dmax; ++e)
                    pw[e] = pw[e - 1] * a;
            }
            dpow_[i].resize(dmax + 1);
            dpow_[i][0] = 1;
            for (unsigned e = 1; e <= dmax; ++e)
                dpow_[i][e] = dpow_[i][e - 1] * di;
            scale_ *= dpow_[i][dmax];
        }
    }

    /* The positive constant with scaled_at(t) = P(x(t)) * scale(). */
    const Int& scale() const { return scale_; }

    Int scaled_at(std::span<const std::size_t> t) const {
        Int acc = 0;
        for (const auto& [e, c] : p_.terms()) {
            Int term = c;
            for (std::size_t i = 0; i < n_; ++i) {
                unsigned dmax = unsigned(dpow_[i].size() - 1);
                term *= apow_[i][t[i]][e[i]];
                term *= dpow_[i][dmax - e[i]];
            }
            acc += term;
        }
        return acc;
    }

private:
    const MultiPoly& p_;
    std::size_t n_;
    std::vector<std::vector<std::vector<Int>>> apow_;
    std::vector<std::vector<Int>> dpow_;
    Int scale_;
};

template <typename Visit>
void grid_scan(std::size_t n, std::size_t points_per_axis, Visit&& visit) {
    std::vector<std::size_t> t(n, 0);
    for (;;) {
        visit(std::span<const std::size_t>(t));
        std::size_t i = 0;
        while (i < n && ++t[i] == points_per_axis) {
            t[i] = 0;
            ++i;
        }
        if (i == n)
            return;
    }
}

} // namespace detail

/* Brute-force sampling oracle: exact signs of p at every grid point of
 * spacing side/2^g whose Delta value is >= 1. Sound for detecting cuts and
 * for refuting emptiness, never a certificate of constancy. */
inline std::set<int> oracle_cut_sample(const MultiPoly& p, const RegionSpec& region,
                                       unsigned g) {
    if (g < 1)
        throw DomainError("oracle_cut_sample: g must be >= 1");
    if (p.num_vars() != region.box.dim())
        throw DomainError("oracle_cut_sample: dimension mismatch");
    std::size_t n = region.box.dim();
    std::size_t points = (std::size_t(1) << g) + 1;
    detail::ScaledGridEval pev(p, region.box, g);

    const auto* dpoly = dynamic_cast<const PolyFn*>(region.delta.get());
    bool delta_one = region.delta->kind() == "one";
    std::optional<detail::ScaledGridEval> dev;
    if (dpoly)
        dev.emplace(dpoly->poly(), region.box, g);

    std::set<int> signs;
    detail::grid_scan(n, points, [&](std::span<const std::size_t> t) {
        if (!delta_one) {
            if (dev) {
                if (dev->scaled_at(t) < dev->scale())
                    return;
            } else {
                Point x;
                x.reserve(n);
                for (std::size_t i = 0; i < n; ++i)
                    x.push_back(region.box.lower[i] +
                                make_rat(Int(Int(t[i]) * numerator(region.box.side)),
                                         Int(denominator(region.box.side) << g)));
                if (region.delta->at(x) < 1)
                    return;
            }
        }
        signs.insert(sign_of(pev.scaled_at(t)));
    });
    return signs;
}

} // namespace signatlas
