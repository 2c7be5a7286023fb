#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <signatlas/signatlas.hpp>

namespace sa = signatlas;
using sa::Json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw sa::ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json parse_json_file(const std::string& path) {
    try {
        return Json::parse(slurp(path));
    } catch (const Json::exception& e) {
        throw sa::ParseError(path + ": " + e.what());
    }
}

/* Primary outputs are written whole and renamed into place. */
void write_atomic(const std::string& path, const std::string& data) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw sa::Error("cannot write '" + tmp + "'");
        out << data;
    }
    std::filesystem::rename(tmp, path);
}

sa::FnPtr parse_delta(const Json& dj, std::size_t n) {
    sa::FnPtr delta;
    if (dj.is_string() && dj == "one")
        delta = sa::make_one(n);
    else if (dj.is_object() && dj.contains("kind"))
        delta = sa::fn_from_json_any(dj);
    else if (dj.is_object() && dj.contains("terms"))
        delta = sa::make_poly_fn(sa::poly_from_json(dj));
    else
        throw sa::SchemaError("delta: expected \"one\", a polynomial, or a descriptor");
    if (delta->arity() != n)
        throw sa::SchemaError("delta: arity must match the family dimension");
    return delta;
}

sa::FnPtr parse_member(const Json& fj) {
    if (fj.is_object() && fj.contains("kind"))
        return sa::fn_from_json_any(fj);
    if (fj.is_object() && fj.contains("terms"))
        return sa::make_poly_fn(sa::poly_from_json(fj));
    throw sa::SchemaError("family member: expected a polynomial or a descriptor");
}

struct FamilyFile {
    std::size_t n = 0;
    std::vector<sa::FnPtr> family;
    sa::FnPtr delta;
};

/* Family file: {"n": 2, "family": [<poly>|<descriptor>, ...],
 *               "delta": "one" | <poly> | <descriptor>}. */
FamilyFile parse_family_file(const Json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("family"))
        throw sa::SchemaError("family file: expected {n, family, delta}");
    FamilyFile out;
    out.n = j.at("n").get<std::size_t>();
    for (const auto& fj : j.at("family"))
        out.family.push_back(parse_member(fj));
    out.delta = j.contains("delta") ? parse_delta(j.at("delta"), out.n) : sa::make_one(out.n);
    for (const auto& f : out.family)
        if (f->arity() != out.n)
            throw sa::SchemaError("family file: member arity must equal n");
    return out;
}

sa::SignDatabase load_db(const std::string& path) {
    return sa::db_from_json(parse_json_file(path), sa::fn_from_json_any);
}

Json signs_to_json(const sa::SignCondition& signs) {
    Json a = Json::array();
    for (int s : signs)
        a.push_back(s);
    return a;
}

int run_build(const std::string& family_path, const std::string& out_path,
              const std::string& mode, unsigned mu, std::optional<unsigned> k,
              unsigned max_depth, unsigned depth_limit, unsigned threads) {
    FamilyFile ff = parse_family_file(parse_json_file(family_path));
    auto t0 = std::chrono::steady_clock::now();
    sa::SignDatabase db;
    if (mode == "uniform")
        db = sa::build_uniform(ff.family, ff.delta, mu, depth_limit, k, threads);
    else
        db = sa::build_adaptive(ff.family, ff.delta, k, max_depth, depth_limit, threads);
    auto t1 = std::chrono::steady_clock::now();
    write_atomic(out_path, sa::db_serialize(db));
    sa::DbCounts c = sa::db_counts(db);
    Json report{{"mode", db.meta.mode},
                {"cells", c.leaves},
                {"empty", c.empty},
                {"degenerate", c.degenerate},
                {"out", out_path}};
    std::cout << report.dump() << "\n";
    std::cerr << "build wall time: "
              << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()
              << " ms\n";
    return 0;
}

int run_query(const std::string& db_path, const std::string& point, bool verify_delta,
              bool naive) {
    sa::SignDatabase db = load_db(db_path);
    sa::Point x = sa::parse_point(point);
    auto programs = sa::default_programs(db);
    sa::QueryResult r = sa::sign_query(db, programs, x, verify_delta);
    sa::LocateResult loc = sa::locate(db, x);
    Json out{{"cell", loc.cell_id},
             {"signs", signs_to_json(r.signs)},
             {"stats", sa::stats_to_json(r.stats)}};
    if (naive) {
        sa::SignCondition direct;
        for (const auto& f : db.meta.family)
            direct.push_back(f->sign_at(x));
        out["naive"] = signs_to_json(direct);
        if (direct != r.signs) {
            std::cout << out.dump() << "\n";
            std::cerr << "query disagrees with direct evaluation\n";
            return 1;
        }
    }
    std::cout << out.dump() << "\n";
    return 0;
}

/* Cut instance: {"P": <poly>, "box": <box>, "delta": ...}. */
int run_cut(const std::string& in_path, unsigned depth_limit) {
    Json j = parse_json_file(in_path);
    if (!j.is_object() || !j.contains("P") || !j.contains("box"))
        throw sa::SchemaError("cut instance: expected {P, box, delta}");
    sa::MultiPoly p = sa::poly_from_json(j.at("P"));
    sa::Box box = sa::box_from_json(j.at("box"));
    sa::FnPtr delta = j.contains("delta") ? parse_delta(j.at("delta"), box.dim())
                                          : sa::make_one(box.dim());
    sa::CutStatus st = sa::decide_cut(p, sa::RegionSpec(box, delta), depth_limit);
    Json out;
    switch (st.kind) {
    case sa::CutKind::Cuts:
        out = Json{{"status", "cuts"},
                   {"witness_a", sa::to_string(st.witness_a)},
                   {"sign_a", st.sign_a},
                   {"witness_b", sa::to_string(st.witness_b)},
                   {"sign_b", st.sign_b}};
        break;
    case sa::CutKind::ConstSign:
        out = Json{{"status", "const"}, {"sign", st.sign}};
        break;
    case sa::CutKind::EmptyRegion:
        out = Json{{"status", "empty"}};
        break;
    case sa::CutKind::Undecided:
        out = Json{{"status", "undecided"}};
        break;
    }
    std::cout << out.dump() << "\n";
    return 0;
}

int run_consistency(const std::string& in_path, const std::string& u_text,
                    const std::string& db_in, const std::string& db_out,
                    std::optional<unsigned> k, unsigned max_depth, unsigned depth_limit,
                    unsigned threads, bool verify_delta) {
    sa::SignDatabase db;
    if (!db_in.empty()) {
        db = load_db(db_in);
    } else {
        sa::ConsistencyInstance inst = sa::consistency_from_json(parse_json_file(in_path));
        db = sa::build_consistency_db(inst.H, inst.zeros, inst.delta, k, max_depth,
                                      depth_limit, threads);
    }
    if (!db_out.empty())
        write_atomic(db_out, sa::db_serialize(db));
    if (u_text.empty()) {
        sa::DbCounts c = sa::db_counts(db);
        Json report{{"cells", c.leaves}, {"empty", c.empty}, {"degenerate", c.degenerate}};
        if (!db_out.empty())
            report["out"] = db_out;
        std::cout << report.dump() << "\n";
        return 0;
    }
    sa::Point u = sa::parse_point(u_text);
    auto programs = sa::default_programs(db);
    sa::ConsistencyResult r = sa::consistency_query(db, programs, u, verify_delta);
    Json out{{"consistent", r.consistent}, {"stats", sa::stats_to_json(r.stats)}};
    std::cout << out.dump() << "\n";
    return 0;
}

int run_bounds(unsigned n, unsigned d, unsigned h, unsigned c, unsigned c_prime) {
    Json out{{"coarseness_log2", sa::coarseness_log2(n, d, h, c_prime).str()},
             {"distance_bound_log2", sa::distance_bound_log2(n, d, h, c).str()},
             {"family_cardinality_log2", sa::family_cardinality_bound(n, d, h).str()}};
    std::cout << out.dump() << "\n";
    return 0;
}

int run_bench(const std::string& db_path, const std::string& points_path,
              bool verify_delta) {
    sa::SignDatabase db = load_db(db_path);
    Json pj = parse_json_file(points_path);
    if (!pj.is_array())
        throw sa::SchemaError("points file: expected a JSON array of point strings");
    std::vector<sa::Point> points;
    for (const auto& s : pj)
        points.push_back(sa::parse_point(s.get<std::string>()));
    auto programs = sa::default_programs(db);
    sa::BenchReport rep = sa::bench(db, programs, points, verify_delta);
    Json out{{"queries", rep.per_query.size()},
             {"total", sa::stats_to_json(rep.total)},
             {"naive_per_query", rep.naive_per_query},
             {"naive_total", rep.naive_total}};
    std::cout << out.dump() << "\n";
    return 0;
}

int run_selftest() {
    sa::Slp h = sa::build_powersum_slp(2, 2);
    std::vector<sa::Rat> in{sa::Rat(2), sa::Rat(3), sa::Rat(1), sa::Rat(1)};
    if (sa::slp_eval<sa::Rat>(h, in).outputs[0] != 35)
        throw sa::Error("selftest: power-sum identity failed");

    sa::MultiPoly f = sa::MultiPoly::from_terms(1, {{{1}, sa::Int(3)}, {{0}, sa::Int(-1)}});
    sa::SignDatabase db = sa::build_uniform({sa::make_poly_fn(f)}, sa::make_one(1), 1);
    auto programs = sa::default_programs(db);
    sa::Point x{sa::Rat(2) / 3};
    if (sa::sign_query(db, programs, x).signs != sa::SignCondition{1})
        throw sa::Error("selftest: uniform query failed");

    sa::SignDatabase rt = sa::db_deserialize(sa::db_serialize(db));
    if (!sa::db_equal(db, rt))
        throw sa::Error("selftest: serialization round trip failed");

    if (sa::coarseness_log2(2, 2, 1, 1) != -15)
        throw sa::Error("selftest: bound calculator failed");

    std::cout << "selftest ok\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sign-condition database engine"};
    app.require_subcommand(1);

    auto* b = app.add_subcommand("build", "build a sign database from a family file");
    std::string b_family, b_out = "db.json", b_mode = "adaptive";
    unsigned b_mu = 1, b_max_depth = 12, b_depth_limit = sa::kDefaultDepthLimit,
             b_threads = 1;
    std::optional<unsigned> b_k;
    b->add_option("--family", b_family, "family file (JSON)")->required();
    b->add_option("--out", b_out, "output database path");
    b->add_option("--mode", b_mode, "uniform or adaptive")
        ->check(CLI::IsMember({"uniform", "adaptive"}));
    b->add_option("--mu", b_mu, "uniform grid log2 per axis");
    b->add_option("--k", b_k, "cutter budget per cell (default: dimension)");
    b->add_option("--max-depth", b_max_depth, "adaptive refinement depth cap");
    b->add_option("--depth-limit", b_depth_limit, "cut-decision subdivision depth");
    b->add_option("--threads", b_threads, "build worker threads");

    auto* q = app.add_subcommand("query", "sign vector of the family at a point");
    std::string q_db, q_point;
    bool q_verify = false, q_naive = false;
    q->add_option("--db", q_db, "database file")->required();
    q->add_option("--point", q_point, "comma-separated rationals, e.g. 1/3,2/5")->required();
    q->add_flag("--verify-delta", q_verify, "check Delta(x) >= 1 exactly (charged to ops)");
    q->add_flag("--naive", q_naive, "also evaluate directly and compare");

    auto* cu = app.add_subcommand("cut", "decide whether P cuts the region");
    std::string cu_in;
    unsigned cu_depth = sa::kDefaultDepthLimit;
    cu->add_option("--in", cu_in, "cut instance file {P, box, delta}")->required();
    cu->add_option("--depth-limit", cu_depth, "subdivision depth");

    auto* co = app.add_subcommand("consistency", "integer-solution consistency query");
    std::string co_in, co_u, co_db_in, co_db_out;
    unsigned co_max_depth = 10, co_depth_limit = sa::kDefaultDepthLimit, co_threads = 1;
    std::optional<unsigned> co_k;
    bool co_verify = false;
    co->add_option("--in", co_in, "instance file {m, n, H, zeros, delta}");
    co->add_option("--u", co_u, "query point in [0,1]^m");
    co->add_option("--db", co_db_in, "prebuilt consistency database");
    co->add_option("--out", co_db_out, "write the built database here");
    co->add_option("--k", co_k, "cutter budget (default: m)");
    co->add_option("--max-depth", co_max_depth, "adaptive refinement depth cap");
    co->add_option("--depth-limit", co_depth_limit, "cut-decision subdivision depth");
    co->add_option("--threads", co_threads, "build worker threads");
    co->add_flag("--verify-delta", co_verify, "check Delta(u) >= 1 exactly");

    auto* bo = app.add_subcommand("bounds", "closed-form bound calculators");
    unsigned bo_n = 1, bo_d = 2, bo_h = 1, bo_c = 1, bo_cp = 1;
    bo->add_option("--n", bo_n, "dimension")->required();
    bo->add_option("--d", bo_d, "degree bound")->required();
    bo->add_option("--h", bo_h, "height bound")->required();
    bo->add_option("--c", bo_c, "distance-bound constant");
    bo->add_option("--c-prime", bo_cp, "coarseness constant");

    auto* be = app.add_subcommand("bench", "aggregate query costs over a point list");
    std::string be_db, be_points;
    bool be_verify = false;
    be->add_option("--db", be_db, "database file")->required();
    be->add_option("--points", be_points, "JSON array of point strings")->required();
    be->add_flag("--verify-delta", be_verify, "check Delta at each point");

    app.add_subcommand("selftest", "quick built-in checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int r = app.exit(e);
        return r == 0 ? 0 : 2;
    }

    try {
        if (b->parsed())
            return run_build(b_family, b_out, b_mode, b_mu, b_k, b_max_depth,
                             b_depth_limit, b_threads);
        if (q->parsed())
            return run_query(q_db, q_point, q_verify, q_naive);
        if (cu->parsed())
            return run_cut(cu_in, cu_depth);
        if (co->parsed()) {
            if (co_in.empty() && co_db_in.empty())
                throw sa::ParseError("consistency: need --in or --db");
            return run_consistency(co_in, co_u, co_db_in, co_db_out, co_k, co_max_depth,
                                   co_depth_limit, co_threads, co_verify);
        }
        if (bo->parsed())
            return run_bounds(bo_n, bo_d, bo_h, bo_c, bo_cp);
        if (be->parsed())
            return run_bench(be_db, be_points, be_verify);
        return run_selftest();
    } catch (const sa::BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const sa::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sa::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
