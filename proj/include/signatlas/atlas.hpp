#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "signatlas/box.hpp"
#include "signatlas/fn.hpp"
#include "signatlas/numeric.hpp"
#include "signatlas/region.hpp"

namespace signatlas {

inline std::uint64_t env_u64(const char* name, std::uint64_t fallback) {
    const char* s = std::getenv(name);
    if (!s || !*s)
        return fallback;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0')
        throw ParseError(std::string(name) + ": not a number");
    return v;
}

inline std::size_t default_cell_budget() {
    return std::size_t(env_u64("SIGNATLAS_MAX_CELLS", std::uint64_t(1) << 20));
}

/* Digit budget for the bound calculators, as bits (~10/3 bits per decimal
 * digit, default 256 digits). */
inline std::uint64_t bound_bit_budget() {
    return env_u64("SIGNATLAS_BOUND_DIGITS", 256) * 10 / 3;
}

/* log2 of the coarseness: -h * d^(c' * n^2) + 1. */
inline Int coarseness_log2(unsigned n, unsigned d, unsigned h, unsigned c_prime) {
    if (n < 1 || d < 2 || h < 1)
        throw DomainError("coarseness_log2 needs n >= 1, d > 1, h >= 1");
    Int p = checked_pow(Int(d), std::uint64_t(c_prime) * n * n, bound_bit_budget());
    return 1 - Int(h) * p;
}

/* log2 of the root-distance bound: -h * d^(c * n). */
inline Int distance_bound_log2(unsigned n, unsigned d, unsigned h, unsigned c) {
    if (d < 2 || h < 1)
        throw DomainError("distance_bound_log2 needs d > 1, h >= 1");
    return -(Int(h) * checked_pow(Int(d), std::uint64_t(c) * n, bound_bit_budget()));
}

/* Per-cell classification: indices whose sign is fixed on the cell, indices
 * that (may) cut it, or an emptiness certificate for the whole cell. */
struct CellRecord {
    std::vector<std::uint32_t> cutting;
    std::vector<std::pair<std::uint32_t, int>> fixed_signs;
    bool empty_region = false;
    bool degenerate = false;

    bool operator==(const CellRecord&) const = default;
};

struct TreeNode {
    CellRecord record;
    std::vector<TreeNode> children;

    bool is_leaf() const { return children.empty(); }
    bool operator==(const TreeNode&) const = default;
};

struct DbMeta {
    std::size_t n = 0;
    std::size_t s = 0;
    unsigned k = 0;
    std::string mode;
    unsigned grid_log2 = 0;
    unsigned max_depth = 0;
    unsigned depth_limit = kDefaultDepthLimit;
    std::vector<FnPtr> family;
    FnPtr delta;
};

struct SignDatabase {
    DbMeta meta;
    std::vector<CellRecord> cells;
    TreeNode root;
};

namespace detail {

inline void check_family(const std::vector<FnPtr>& family, const FnPtr& delta) {
    if (family.empty())
        throw DomainError("build: family must be nonempty");
    if (!delta)
        throw DomainError("build: delta required");
    std::size_t n = family[0]->arity();
    for (const auto& f : family)
        if (!f || f->arity() != n)
            throw DomainError("build: family members must share one arity");
    if (delta->arity() != n)
        throw DomainError("build: delta arity must match the family");
}

/* Decides every active index on the box. Any EmptyRegion certificate makes
 * the whole cell empty; Cuts and Undecided are recorded as cutting. */
inline CellRecord classify_cell(const std::vector<FnPtr>& family, const FnPtr& delta,
                                const Box& box, unsigned depth_limit,
                                const std::vector<std::uint32_t>& active,
                                std::vector<std::pair<std::uint32_t, int>> inherited) {
    CellRecord rec;
    rec.fixed_signs = std::move(inherited);
    RegionSpec region(box, delta);
    for (std::uint32_t i : active) {
        CutStatus st = decide_cut(*family[i], region, depth_limit);
        if (st.kind == CutKind::EmptyRegion)
            return CellRecord{{}, {}, true, false};
        if (st.kind == CutKind::ConstSign)
            rec.fixed_signs.emplace_back(i, st.sign);
        else
            rec.cutting.push_back(i);
    }
    std::sort(rec.fixed_signs.begin(), rec.fixed_signs.end());
    return rec;
}

inline std::vector<std::uint32_t> all_indices(std::size_t s) {
    std::vector<std::uint32_t> v(s);
    for (std::size_t i = 0; i < s; ++i)
        v[i] = std::uint32_t(i);
    return v;
}

} // namespace detail

/* Dense grid of (2^mu)^n cells of side 2^-mu, classified independently.
 * Linear cell index: axis 0 least significant, mu bits per axis. */
inline SignDatabase build_uniform(std::vector<FnPtr> family, FnPtr delta, unsigned mu,
                                  unsigned depth_limit = kDefaultDepthLimit,
                                  std::optional<unsigned> k = std::nullopt,
                                  unsigned threads = 1,
                                  std::size_t cell_budget = default_cell_budget()) {
    detail::check_family(family, delta);
    if (mu < 1)
        throw DomainError("build_uniform: mu must be >= 1");
    std::size_t n = family[0]->arity();
    if (n * mu >= 63 || (std::size_t(1) << (n * mu)) > cell_budget)
        throw GridTooLarge("build_uniform: cell count exceeds budget");
    std::size_t total = std::size_t(1) << (n * mu);
    unsigned kk = k ? *k : unsigned(n);

    SignDatabase db;
    db.meta = {n, family.size(), kk, "uniform", mu, 0, depth_limit, family, delta};
    db.cells.resize(total);

    auto active = detail::all_indices(family.size());
    Rat side = make_rat(Int(1), Int(1) << mu);
    auto fill = [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            std::vector<Rat> lower(n);
            for (std::size_t j = 0; j < n; ++j) {
                std::size_t ij = (idx >> (mu * j)) & ((std::size_t(1) << mu) - 1);
                lower[j] = make_rat(Int(ij), Int(1) << mu);
            }
            CellRecord rec =
                detail::classify_cell(family, delta, Box(std::move(lower), side),
                                      depth_limit, active, {});
            rec.degenerate = !rec.empty_region && rec.cutting.size() > kk;
            db.cells[idx] = std::move(rec);
        }
    };

    if (threads <= 1 || total < 2) {
        fill(0, total);
        return db;
    }
    unsigned nt = unsigned(std::min<std::size_t>(threads, total));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nt);
    for (unsigned t = 0; t < nt; ++t) {
        std::size_t begin = total * t / nt, end = total * (t + 1) / nt;
        pool.emplace_back([&, t, begin, end] {
            try {
                fill(begin, end);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool)
        th.join();
    for (auto& e : errs)
        if (e)
            std::rethrow_exception(e);
    return db;
}

namespace detail {

struct AdaptiveBuild {
    const std::vector<FnPtr>& family;
    const FnPtr& delta;
    unsigned k;
    unsigned max_depth;
    unsigned depth_limit;
    std::size_t cell_budget;
    std::atomic<std::size_t> leaves{0};
    std::atomic<bool> over_budget{false};

    void build(TreeNode& node, const Box& box, unsigned depth,
               const std::vector<std::uint32_t>& active,
               std::vector<std::pair<std::uint32_t, int>> inherited, unsigned threads) {
        if (over_budget.load(std::memory_order_relaxed))
            return;
        CellRecord rec =
            classify_cell(family, delta, box, depth_limit, active, std::move(inherited));
        bool leaf = rec.empty_region || rec.cutting.size() <= k || depth >= max_depth;
        if (leaf) {
            rec.degenerate = !rec.empty_region && rec.cutting.size() > k;
            node.record = std::move(rec);
            if (leaves.fetch_add(1, std::memory_order_relaxed) + 1 > cell_budget)
                over_budget.store(true, std::memory_order_relaxed);
            return;
        }
        std::vector<Box> kids = box_subdivide(box);
        node.children.resize(kids.size());
        if (threads > 1) {
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errs(kids.size());
            for (std::size_t c = 0; c < kids.size(); ++c)
                pool.emplace_back([&, c] {
                    try {
                        build(node.children[c], kids[c], depth + 1, rec.cutting,
                              rec.fixed_signs, 1);
                    } catch (...) {
                        errs[c] = std::current_exception();
                    }
                });
            for (auto& th : pool)
                th.join();
            for (auto& e : errs)
                if (e)
                    std::rethrow_exception(e);
        } else {
            for (std::size_t c = 0; c < kids.size(); ++c)
                build(node.children[c], kids[c], depth + 1, rec.cutting, rec.fixed_signs,
                      1);
        }
    }
};

} // namespace detail

/* 2^n-ary refinement until each leaf is empty, has at most k cutters, or
 * reaches max_depth (then flagged degenerate). k defaults to the dimension. */
inline SignDatabase build_adaptive(std::vector<FnPtr> family, FnPtr delta,
                                   std::optional<unsigned> k, unsigned max_depth,
                                   unsigned depth_limit = kDefaultDepthLimit,
                                   unsigned threads = 1,
                                   std::size_t cell_budget = default_cell_budget()) {
    detail::check_family(family, delta);
    std::size_t n = family[0]->arity();
    unsigned kk = k ? *k : unsigned(n);
    if (kk < 1)
        throw DomainError("build_adaptive: k must be >= 1");

    SignDatabase db;
    db.meta = {n, family.size(), kk, "adaptive", 0, max_depth, depth_limit, family, delta};

    detail::AdaptiveBuild ctx{family, delta, kk, max_depth, depth_limit, cell_budget};
    ctx.build(db.root, unit_box(n), 0, detail::all_indices(family.size()), {}, threads);
    if (ctx.over_budget.load())
        throw GridTooLarge("build_adaptive: leaf count exceeds budget");
    return db;
}

inline void walk_leaves(const TreeNode& node, auto&& visit) {
    if (node.is_leaf()) {
        visit(node.record);
        return;
    }
    for (const TreeNode& c : node.children)
        walk_leaves(c, visit);
}

struct DbCounts {
    std::size_t leaves = 0, empty = 0, degenerate = 0;
};

inline DbCounts db_counts(const SignDatabase& db) {
    DbCounts c;
    auto tally = [&](const CellRecord& r) {
        ++c.leaves;
        if (r.empty_region)
            ++c.empty;
        if (r.degenerate)
            ++c.degenerate;
    };
    if (db.meta.mode == "uniform")
        for (const CellRecord& r : db.cells)
            tally(r);
    else
        walk_leaves(db.root, tally);
    return c;
}

inline Json record_to_json(const CellRecord& r) {
    Json fixed = Json::array();
    for (const auto& [i, s] : r.fixed_signs)
        fixed.push_back(Json::array({i, s}));
    return Json{{"cutting", r.cutting},
                {"fixed", fixed},
                {"empty", r.empty_region},
                {"degenerate", r.degenerate}};
}

inline CellRecord record_from_json(const Json& j) {
    CellRecord r;
    r.cutting = j.at("cutting").get<std::vector<std::uint32_t>>();
    for (const auto& p : j.at("fixed"))
        r.fixed_signs.emplace_back(p.at(0).get<std::uint32_t>(), p.at(1).get<int>());
    r.empty_region = j.at("empty").get<bool>();
    r.degenerate = j.at("degenerate").get<bool>();
    return r;
}

inline Json node_to_json(const TreeNode& node) {
    if (node.is_leaf())
        return Json{{"leaf", record_to_json(node.record)}};
    Json kids = Json::array();
    for (const TreeNode& c : node.children)
        kids.push_back(node_to_json(c));
    return Json{{"children", kids}};
}

inline TreeNode node_from_json(const Json& j) {
    TreeNode node;
    if (j.contains("leaf")) {
        node.record = record_from_json(j.at("leaf"));
        return node;
    }
    if (!j.contains("children"))
        throw SchemaError("tree node: expected leaf or children");
    for (const auto& c : j.at("children"))
        node.children.push_back(node_from_json(c));
    return node;
}

inline Json db_to_json(const SignDatabase& db) {
    Json family = Json::array();
    for (const auto& f : db.meta.family)
        family.push_back(f->to_json());
    Json meta{{"n", db.meta.n},           {"s", db.meta.s},
              {"k", db.meta.k},           {"mode", db.meta.mode},
              {"depth_limit", db.meta.depth_limit},
              {"delta", db.meta.delta->to_json()},
              {"family", family}};
    Json out{{"version", 1}, {"mode", db.meta.mode}, {"meta", meta}};
    if (db.meta.mode == "uniform") {
        out["meta"]["grid_log2"] = db.meta.grid_log2;
        Json cells = Json::array();
        for (const CellRecord& r : db.cells)
            cells.push_back(record_to_json(r));
        out["cells"] = cells;
    } else {
        out["meta"]["max_depth"] = db.meta.max_depth;
        out["tree"] = node_to_json(db.root);
    }
    return out;
}

inline SignDatabase db_from_json(const Json& j, const FnParser& parser = fn_from_json) {
    if (!j.is_object() || !j.contains("version"))
        throw SchemaError("database: expected {version, mode, meta, ...}");
    if (j.at("version") != 1)
        throw SchemaError("database: unsupported version");
    SignDatabase db;
    const Json& meta = j.at("meta");
    db.meta.n = meta.at("n").get<std::size_t>();
    db.meta.s = meta.at("s").get<std::size_t>();
    db.meta.k = meta.at("k").get<unsigned>();
    db.meta.mode = j.at("mode").get<std::string>();
    db.meta.depth_limit = meta.at("depth_limit").get<unsigned>();
    db.meta.delta = parser(meta.at("delta"));
    for (const auto& f : meta.at("family"))
        db.meta.family.push_back(parser(f));
    if (db.meta.family.size() != db.meta.s)
        throw SchemaError("database: family size disagrees with meta.s");
    if (db.meta.mode == "uniform") {
        db.meta.grid_log2 = meta.at("grid_log2").get<unsigned>();
        if (db.meta.grid_log2 * db.meta.n >= 63)
            throw SchemaError("database: grid extent out of range");
        for (const auto& c : j.at("cells"))
            db.cells.push_back(record_from_json(c));
        std::size_t want = std::size_t(1) << (db.meta.grid_log2 * db.meta.n);
        if (db.cells.size() != want)
            throw SchemaError("database: cell array has wrong extent");
    } else if (db.meta.mode == "adaptive") {
        db.meta.max_depth = meta.at("max_depth").get<unsigned>();
        db.root = node_from_json(j.at("tree"));
    } else {
        throw SchemaError("database: unknown mode '" + db.meta.mode + "'");
    }
    return db;
}

inline std::string db_serialize(const SignDatabase& db) { return db_to_json(db).dump(); }

inline SignDatabase db_deserialize(const std::string& bytes,
                                   const FnParser& parser = fn_from_json) {
    Json j;
    try {
        j = Json::parse(bytes);
    } catch (const Json::exception& e) {
        throw SchemaError(std::string("database: ") + e.what());
    }
    return db_from_json(j, parser);
}

inline bool db_equal(const SignDatabase& a, const SignDatabase& b) {
    return db_to_json(a) == db_to_json(b);
}

} // namespace signatlas
