#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "signatlas/atlas.hpp"
#include "signatlas/fn.hpp"
#include "signatlas/numeric.hpp"

namespace signatlas {

struct QueryStats {
    std::size_t comparisons = 0;
    std::size_t arith_ops = 0;

    bool operator==(const QueryStats&) const = default;
};

inline Json stats_to_json(const QueryStats& st) {
    return Json{{"comparisons", st.comparisons}, {"arith_ops", st.arith_ops}};
}

/* Sign vector over {-1, 0, +1}, one entry per family member. */
using SignCondition = std::vector<int>;

struct LocateResult {
    std::size_t cell_id = 0;
    const CellRecord* record = nullptr;
    QueryStats stats;
};

namespace detail {

inline void check_point(const SignDatabase& db, std::span<const Rat> x) {
    if (x.size() != db.meta.n)
        throw OutOfDomain("query point has wrong dimension");
    for (const Rat& xi : x)
        if (xi < 0 || xi > 1)
            throw OutOfDomain("query point outside the unit box");
}

} // namespace detail

/* Exact comparisons against dyadic midpoints; a point on a shared face goes
 * to the lower cell. Location performs no counted arithmetic. Uniform ids
 * are linear grid indices (axis 0 least significant); adaptive ids encode
 * the root-to-leaf child path behind a leading 1 bit. */
inline LocateResult locate(const SignDatabase& db, std::span<const Rat> x) {
    detail::check_point(db, x);
    LocateResult out;
    std::size_t n = db.meta.n;
    if (db.meta.mode == "uniform") {
        unsigned mu = db.meta.grid_log2;
        std::size_t cell = 0;
        for (std::size_t j = n; j-- > 0;) {
            Rat lo(0), w(1);
            std::size_t ij = 0;
            for (unsigned level = 0; level < mu; ++level) {
                w /= 2;
                Rat mid = lo + w;
                ++out.stats.comparisons;
                ij <<= 1;
                if (x[j] > mid) {
                    ij |= 1;
                    lo = mid;
                }
            }
            cell = (cell << mu) | ij;
        }
        out.cell_id = cell;
        out.record = &db.cells[cell];
        return out;
    }
    const TreeNode* node = &db.root;
    std::vector<Rat> lo(n, Rat(0));
    Rat w(1);
    std::size_t id = 1;
    while (!node->is_leaf()) {
        w /= 2;
        std::size_t mask = 0;
        for (std::size_t j = 0; j < n; ++j) {
            Rat mid = lo[j] + w;
            ++out.stats.comparisons;
            if (x[j] > mid) {
                mask |= std::size_t(1) << j;
                lo[j] = mid;
            }
        }
        node = &node->children[mask];
        id = (id << n) | mask;
    }
    out.cell_id = id;
    out.record = &node->record;
    return out;
}

struct QueryResult {
    SignCondition signs;
    QueryStats stats;
};

/* Query-time evaluation programs: the straight-line form of each family
 * member (members already in program form are used as-is). */
inline std::vector<FnPtr> default_programs(const SignDatabase& db) {
    std::vector<FnPtr> out;
    out.reserve(db.meta.family.size());
    for (const FnPtr& f : db.meta.family) {
        FnPtr p = f->program_form();
        out.push_back(p ? p : f);
    }
    return out;
}

/* Signs of all family members at x: fixed signs are copied from the cell
 * record, cutting members are evaluated. On an empty-region cell without
 * Delta verification every member is evaluated directly (the record carries
 * no sign information there). */
inline QueryResult sign_query(const SignDatabase& db, const std::vector<FnPtr>& programs,
                              std::span<const Rat> x, bool verify_delta = false) {
    if (programs.size() != db.meta.s)
        throw DomainError("sign_query: one program per family member required");
    LocateResult loc = locate(db, x);
    QueryResult out;
    out.stats = loc.stats;
    if (verify_delta) {
        Rat dv = db.meta.delta->at(x, &out.stats.arith_ops);
        if (dv < 1)
            throw OutsideRegion("sign_query: Delta(x) < 1");
        if (loc.record->empty_region)
            throw InvariantError("sign_query: verified point in an empty-region cell");
    }
    out.signs.assign(db.meta.s, 0);
    if (loc.record->empty_region) {
        for (std::size_t i = 0; i < db.meta.s; ++i)
            out.signs[i] = programs[i]->sign_at(x, &out.stats.arith_ops);
        return out;
    }
    for (const auto& [i, s] : loc.record->fixed_signs)
        out.signs[i] = s;
    for (std::uint32_t i : loc.record->cutting)
        out.signs[i] = programs[i]->sign_at(x, &out.stats.arith_ops);
    return out;
}

struct BenchReport {
    std::vector<QueryStats> per_query;
    QueryStats total;
    std::size_t naive_per_query = 0;
    std::size_t naive_total = 0;
};

/* Aggregate query costs next to the no-database baseline of evaluating every
 * program at every point. */
inline BenchReport bench(const SignDatabase& db, const std::vector<FnPtr>& programs,
                         const std::vector<Point>& points, bool verify_delta = false) {
    BenchReport rep;
    for (const FnPtr& p : programs)
        rep.naive_per_query += p->length();
    rep.naive_total = rep.naive_per_query * points.size();
    for (const Point& x : points) {
        QueryResult r = sign_query(db, programs, x, verify_delta);
        rep.total.comparisons += r.stats.comparisons;
        rep.total.arith_ops += r.stats.arith_ops;
        rep.per_query.push_back(r.stats);
    }
    return rep;
}

} // namespace signatlas
