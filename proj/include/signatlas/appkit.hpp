#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "signatlas/atlas.hpp"
#include "signatlas/engine.hpp"
#include "signatlas/fn.hpp"
#include "signatlas/numeric.hpp"
#include "signatlas/region.hpp"
#include "signatlas/slp.hpp"

namespace signatlas {

/* Distinct integer points, all of one dimension. */
class ZeroList {
public:
    explicit ZeroList(std::vector<std::vector<Int>> zeros) : zeros_(std::move(zeros)) {
        std::set<std::vector<Int>> seen;
        for (const auto& z : zeros_) {
            if (z.size() != zeros_[0].size())
                throw DomainError("zero list: mixed dimensions");
            if (!seen.insert(z).second)
                throw DomainError("zero list: duplicate entry");
        }
    }

    const std::vector<std::vector<Int>>& zeros() const { return zeros_; }
    std::size_t size() const { return zeros_.size(); }
    std::size_t dim() const { return zeros_.empty() ? 0 : zeros_[0].size(); }

private:
    std::vector<std::vector<Int>> zeros_;
};

/* Checks G_i(xi) = 0 exactly for every listed zero and every G_i. */
inline void zero_list_verify(const ZeroList& zl, std::span<const MultiPoly> system) {
    for (const auto& z : zl.zeros()) {
        Point x(z.begin(), z.end());
        for (const MultiPoly& g : system)
            if (!g.eval(x).is_zero())
                throw DomainError("zero list: listed point is not a zero of the system");
    }
}

constexpr unsigned kBooleanCubeCap = 16;

/* All 2^n points of {0,1}^n in binary-counting order, least significant bit
 * first: entry j encodes j bitwise into coordinates 1..n. */
inline ZeroList boolean_zeros(std::size_t n, std::size_t cap = kBooleanCubeCap) {
    if (n < 1)
        throw DomainError("boolean_zeros: n must be >= 1");
    if (n > cap)
        throw GridTooLarge("boolean_zeros: n exceeds the cube cap");
    std::vector<std::vector<Int>> zs;
    zs.reserve(std::size_t(1) << n);
    for (std::uint64_t j = 0; j < (std::uint64_t(1) << n); ++j) {
        std::vector<Int> z(n);
        for (std::size_t i = 0; i < n; ++i)
            z[i] = Int((j >> i) & 1);
        zs.push_back(std::move(z));
    }
    return ZeroList(std::move(zs));
}

namespace detail {

/* Cofactor expansion along the first row; fine for the r <= 4 budget. */
template <typename V>
V cofactor_det(const std::vector<std::vector<V>>& m, std::size_t* ops) {
    std::size_t r = m.size();
    if (r == 1)
        return m[0][0];
    std::optional<V> acc;
    for (std::size_t t = 0; t < r; ++t) {
        std::vector<std::vector<V>> minor;
        minor.reserve(r - 1);
        for (std::size_t row = 1; row < r; ++row) {
            std::vector<V> mrow;
            mrow.reserve(r - 1);
            for (std::size_t col = 0; col < r; ++col)
                if (col != t)
                    mrow.push_back(m[row][col]);
            minor.push_back(std::move(mrow));
        }
        V term = m[0][t] * cofactor_det(minor, ops);
        if (ops)
            ++*ops;
        if (!acc) {
            acc = std::move(term);
        } else {
            acc = (t % 2 == 0) ? V(*acc + term) : V(*acc - term);
            if (ops)
                ++*ops;
        }
    }
    return *acc;
}

} // namespace detail

/* Product of generalized Vandermonde determinants det(u_t^{i_s - 1}) over
 * all increasing tuples 1 <= i_1 < ... < i_r <= 2^n with 1 <= r <= m. Never
 * expanded symbolically; evaluated exactly at points and by intervals over
 * boxes. */
class VandermondeFn final : public RealFn {
public:
    VandermondeFn(std::size_t m, std::size_t n) : m_(m), n_(n) {
        if (m < 1 || n < 1)
            throw DomainError("determinant product: m and n must be >= 1");
        if (m > 4)
            throw BudgetError("determinant product: m exceeds the subset budget of 4");
        top_ = std::size_t(1) << n;
        for (std::size_t r = 1; r <= m_; ++r) {
            std::vector<unsigned> tup(r);
            for (std::size_t i = 0; i < r; ++i)
                tup[i] = unsigned(i + 1);
            for (;;) {
                tuples_.push_back(tup);
                std::size_t i = r;
                while (i-- > 0) {
                    if (tup[i] < top_ - (r - 1 - i)) {
                        ++tup[i];
                        for (std::size_t l = i + 1; l < r; ++l)
                            tup[l] = tup[l - 1] + 1;
                        break;
                    }
                    if (i == 0)
                        goto next_r;
                }
            }
        next_r:;
        }
        Point probe(m_, Rat(0));
        length_ = 0;
        (void)at(probe, &length_);
    }

    std::size_t m() const { return m_; }
    std::size_t top() const { return top_; }
    const std::vector<std::vector<unsigned>>& tuples() const { return tuples_; }

    std::size_t arity() const override { return m_; }

    Rat at(std::span<const Rat> u, std::size_t* ops) const override {
        if (u.size() != m_)
            throw DomainError("evaluation point of wrong dimension");
        auto pw = power_table<Rat>(u, ops);
        std::optional<Rat> prod;
        for (const auto& tup : tuples_) {
            Rat f = factor_from_powers(pw, tup, ops);
            if (!prod) {
                prod = std::move(f);
            } else {
                *prod *= f;
                if (ops)
                    ++*ops;
            }
        }
        return *prod;
    }

    IVal over(const Box& box) const override {
        if (box.dim() != m_)
            throw DomainError("box of wrong dimension");
        std::vector<std::vector<IVal>> pw;
        pw.reserve(m_);
        for (std::size_t t = 0; t < m_; ++t) {
            IVal axis = box.axis(t);
            std::vector<IVal> row;
            row.reserve(top_);
            for (std::size_t e = 0; e < top_; ++e)
                row.push_back(ival_pow(axis, unsigned(e)));
            pw.push_back(std::move(row));
        }
        std::optional<IVal> prod;
        for (const auto& tup : tuples_) {
            IVal f = factor_from_powers(pw, tup, nullptr);
            prod = prod ? IVal(*prod * f) : f;
        }
        return *prod;
    }

    /* One determinant factor, for cross-checks against closed formulas. */
    Rat factor(std::span<const Rat> u, std::span<const unsigned> tup) const {
        auto pw = power_table<Rat>(u, nullptr);
        std::vector<unsigned> t(tup.begin(), tup.end());
        return factor_from_powers(pw, t, nullptr);
    }

    std::size_t length() const override { return length_; }
    std::string kind() const override { return "vandermonde"; }
    Json to_json() const override {
        return Json{{"kind", "vandermonde"}, {"m", m_}, {"n", n_}};
    }

private:
    template <typename V>
    std::vector<std::vector<V>> power_table(std::span<const V> u, std::size_t* ops) const {
        std::vector<std::vector<V>> pw(m_);
        for (std::size_t t = 0; t < m_; ++t) {
            pw[t].reserve(top_);
            pw[t].push_back(V(1));
            for (std::size_t e = 1; e < top_; ++e) {
                pw[t].push_back(pw[t][e - 1] * u[t]);
                if (ops)
                    ++*ops;
            }
        }
        return pw;
    }

    template <typename V>
    V factor_from_powers(const std::vector<std::vector<V>>& pw,
                         const std::vector<unsigned>& tup, std::size_t* ops) const {
        std::size_t r = tup.size();
        std::vector<std::vector<V>> mat(r);
        for (std::size_t s = 0; s < r; ++s) {
            mat[s].reserve(r);
            for (std::size_t t = 0; t < r; ++t)
                mat[s].push_back(pw[t][tup[s] - 1]);
        }
        return detail::cofactor_det(mat, ops);
    }

    std::size_t m_, n_, top_;
    std::vector<std::vector<unsigned>> tuples_;
    std::size_t length_ = 0;
};

inline FnPtr make_vandermonde(std::size_t m, std::size_t n) {
    return std::make_shared<VandermondeFn>(m, n);
}

/* Core descriptors plus the determinant product. */
inline FnPtr fn_from_json_any(const Json& j) {
    if (j.is_object() && j.contains("kind") && j.at("kind") == "vandermonde")
        return make_vandermonde(j.at("m").get<std::size_t>(), j.at("n").get<std::size_t>());
    return fn_from_json(j);
}

/* Specializes H at every listed zero and builds the adaptive database for
 * the family {H(U, xi_i)} over [0,1]^m restricted to delta >= 1. k defaults
 * to m. */
inline SignDatabase build_consistency_db(const Slp& H, const ZeroList& zeros, FnPtr delta,
                                         std::optional<unsigned> k, unsigned max_depth,
                                         unsigned depth_limit = kDefaultDepthLimit,
                                         unsigned threads = 1,
                                         std::size_t cell_budget = default_cell_budget()) {
    if (zeros.size() == 0)
        throw DomainError("consistency: empty zero list gives a vacuous family");
    std::size_t n = zeros.dim();
    if (H.num_inputs() <= n)
        throw DomainError("consistency: H must have m + n inputs with m >= 1");
    std::size_t m = H.num_inputs() - n;
    if (!delta)
        delta = make_one(m);
    std::vector<FnPtr> family;
    family.reserve(zeros.size());
    for (const auto& xi : zeros.zeros())
        family.push_back(make_slp_fn(slp_specialize(H, xi)));
    return build_adaptive(std::move(family), std::move(delta), k ? k : std::optional<unsigned>(unsigned(m)),
                          max_depth, depth_limit, threads, cell_budget);
}

struct ConsistencyResult {
    bool consistent = false;
    QueryStats stats;
};

/* True iff some specialized member vanishes at u: a recorded fixed sign 0
 * answers immediately, otherwise only the cell's cutting programs are
 * evaluated (all of them on an empty-region cell reached without
 * verification). */
inline ConsistencyResult consistency_query(const SignDatabase& db,
                                           const std::vector<FnPtr>& programs,
                                           std::span<const Rat> u,
                                           bool verify_delta = false) {
    if (programs.size() != db.meta.s)
        throw DomainError("consistency_query: one program per zero required");
    LocateResult loc = locate(db, u);
    ConsistencyResult out;
    out.stats = loc.stats;
    if (verify_delta) {
        Rat dv = db.meta.delta->at(u, &out.stats.arith_ops);
        if (dv < 1)
            throw OutsideRegion("consistency_query: Delta(u) < 1");
        if (loc.record->empty_region)
            throw InvariantError("consistency_query: verified point in an empty-region cell");
    }
    if (loc.record->empty_region) {
        for (std::size_t i = 0; i < db.meta.s && !out.consistent; ++i)
            out.consistent = programs[i]->sign_at(u, &out.stats.arith_ops) == 0;
        return out;
    }
    for (const auto& [i, s] : loc.record->fixed_signs)
        if (s == 0) {
            out.consistent = true;
            return out;
        }
    for (std::uint32_t i : loc.record->cutting)
        if (programs[i]->sign_at(u, &out.stats.arith_ops) == 0) {
            out.consistent = true;
            return out;
        }
    return out;
}

/* Rank test of the r x m matrix with entries i_t * u_j^(i_t - 1): true iff
 * the rows are independent, by exact Gaussian elimination. */
inline bool jacobian_transversality_check(std::span<const Rat> u,
                                          std::span<const unsigned> indices) {
    std::size_t r = indices.size(), m = u.size();
    if (r == 0 || r > m)
        throw DomainError("transversality: need 1 <= r <= m indices");
    for (std::size_t t = 0; t < r; ++t)
        if (indices[t] < 1 || (t > 0 && indices[t] <= indices[t - 1]))
            throw DomainError("transversality: indices must be strictly increasing and >= 1");
    std::vector<std::vector<Rat>> a(r, std::vector<Rat>(m));
    for (std::size_t t = 0; t < r; ++t)
        for (std::size_t j = 0; j < m; ++j)
            a[t][j] = Rat(indices[t]) * rat_pow(u[j], indices[t] - 1);

    std::size_t rank = 0;
    for (std::size_t col = 0; col < m && rank < r; ++col) {
        std::size_t pivot = rank;
        while (pivot < r && a[pivot][col].is_zero())
            ++pivot;
        if (pivot == r)
            continue;
        std::swap(a[pivot], a[rank]);
        for (std::size_t row = rank + 1; row < r; ++row) {
            if (a[row][col].is_zero())
                continue;
            Rat f = a[row][col] / a[rank][col];
            for (std::size_t cc = col; cc < m; ++cc)
                a[row][cc] -= f * a[rank][cc];
        }
        ++rank;
    }
    return rank == r;
}

struct ConsistencyInstance {
    std::size_t m = 0, n = 0;
    Slp H;
    ZeroList zeros;
    FnPtr delta;
};

/* Instance schema: {"m", "n", "H": <slp>, "zeros": "boolean-cube" | [[..]],
 * "delta": "vandermonde" | "one" | <poly> | <descriptor>}. */
inline ConsistencyInstance consistency_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("m") || !j.contains("n") || !j.contains("H") ||
        !j.contains("zeros") || !j.contains("delta"))
        throw SchemaError("consistency instance: expected {m, n, H, zeros, delta}");
    std::size_t m = j.at("m").get<std::size_t>();
    std::size_t n = j.at("n").get<std::size_t>();
    Slp H = slp_from_json(j.at("H"));
    if (H.num_inputs() != m + n)
        throw SchemaError("consistency instance: H must have m + n inputs");

    const Json& zj = j.at("zeros");
    std::optional<ZeroList> zeros;
    if (zj.is_string() && zj == "boolean-cube") {
        zeros.emplace(boolean_zeros(n));
    } else if (zj.is_array()) {
        std::vector<std::vector<Int>> zs;
        for (const auto& row : zj) {
            std::vector<Int> z;
            for (const auto& v : row)
                z.push_back(v.is_string() ? Int(v.get<std::string>())
                                          : Int(v.get<std::int64_t>()));
            if (z.size() != n)
                throw SchemaError("consistency instance: zero of wrong dimension");
            zs.push_back(std::move(z));
        }
        zeros.emplace(std::move(zs));
    } else {
        throw SchemaError("consistency instance: zeros must be \"boolean-cube\" or a list");
    }

    const Json& dj = j.at("delta");
    FnPtr delta;
    if (dj.is_string() && dj == "vandermonde")
        delta = make_vandermonde(m, n);
    else if (dj.is_string() && dj == "one")
        delta = make_one(m);
    else if (dj.is_object() && dj.contains("kind"))
        delta = fn_from_json_any(dj);
    else if (dj.is_object() && dj.contains("terms"))
        delta = make_poly_fn(poly_from_json(dj));
    else
        throw SchemaError("consistency instance: unrecognized delta");
    if (delta->arity() != m)
        throw SchemaError("consistency instance: delta arity must be m");

    return ConsistencyInstance{m, n, std::move(H), std::move(*zeros), std::move(delta)};
}

} // namespace signatlas
