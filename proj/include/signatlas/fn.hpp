#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "signatlas/box.hpp"
#include "signatlas/interval.hpp"
#include "signatlas/numeric.hpp"
#include "signatlas/poly.hpp"
#include "signatlas/slp.hpp"

namespace signatlas {

class RealFn;
using FnPtr = std::shared_ptr<const RealFn>;

/* Evaluable real function on [0,1]^n: exact value at a rational point with
 * operation accounting, and a containing interval over a box. Family members
 * and Delta restrictions both speak this interface. */
class RealFn {
public:
    virtual ~RealFn() = default;

    virtual std::size_t arity() const = 0;
    virtual Rat at(std::span<const Rat> x, std::size_t* ops = nullptr) const = 0;
    virtual IVal over(const Box& box) const = 0;

    /* Static count of the +,-,* executed by one at() call. */
    virtual std::size_t length() const = 0;

    virtual std::string kind() const = 0;
    virtual Json to_json() const = 0;

    /* Straight-line form for query-time evaluation; null means "use self". */
    virtual FnPtr program_form() const { return nullptr; }

    int sign_at(std::span<const Rat> x, std::size_t* ops = nullptr) const {
        return at(x, ops).sign();
    }
};

class OneFn final : public RealFn {
public:
    explicit OneFn(std::size_t n) : n_(n) {}

    std::size_t arity() const override { return n_; }
    Rat at(std::span<const Rat> x, std::size_t*) const override {
        if (x.size() != n_)
            throw DomainError("evaluation point of wrong dimension");
        return Rat(1);
    }
    IVal over(const Box&) const override { return IVal(1); }
    std::size_t length() const override { return 0; }
    std::string kind() const override { return "one"; }
    Json to_json() const override { return Json{{"kind", "one"}, {"n", n_}}; }

private:
    std::size_t n_;
};

class SlpFn final : public RealFn {
public:
    explicit SlpFn(Slp prog) : prog_(std::move(prog)) {
        if (prog_.outputs().size() != 1)
            throw DomainError("function program must have exactly one output");
    }

    const Slp& program() const { return prog_; }

    std::size_t arity() const override { return prog_.num_inputs(); }
    Rat at(std::span<const Rat> x, std::size_t* ops) const override {
        auto r = slp_eval<Rat>(prog_, x);
        if (ops)
            *ops += r.op_count;
        return std::move(r.outputs[0]);
    }
    IVal over(const Box& box) const override {
        std::vector<IVal> axes = box.axes();
        return slp_eval<IVal>(prog_, axes).outputs[0];
    }
    std::size_t length() const override { return prog_.length(); }
    std::string kind() const override { return "slp"; }
    Json to_json() const override { return Json{{"kind", "slp"}, {"slp", slp_to_json(prog_)}}; }

private:
    Slp prog_;
};

class PolyFn final : public RealFn {
public:
    explicit PolyFn(MultiPoly p) : poly_(std::move(p)) {}

    const MultiPoly& poly() const { return poly_; }

    std::size_t arity() const override { return poly_.num_vars(); }
    Rat at(std::span<const Rat> x, std::size_t* ops) const override {
        return poly_.eval(x, ops);
    }
    IVal over(const Box& box) const override { return poly_.eval_interval(box); }
    std::size_t length() const override {
        if (poly_.is_zero())
            return 0;
        std::size_t l = poly_.term_count() - 1;
        for (const auto& [e, c] : poly_.terms())
            for (auto d : e)
                l += d;
        return l;
    }
    std::string kind() const override { return "poly"; }
    Json to_json() const override { return Json{{"kind", "poly"}, {"poly", poly_to_json(poly_)}}; }
    FnPtr program_form() const override {
        return std::make_shared<SlpFn>(slp_from_poly(poly_));
    }

private:
    MultiPoly poly_;
};

inline FnPtr make_one(std::size_t n) { return std::make_shared<OneFn>(n); }
inline FnPtr make_poly_fn(MultiPoly p) { return std::make_shared<PolyFn>(std::move(p)); }
inline FnPtr make_slp_fn(Slp prog) { return std::make_shared<SlpFn>(std::move(prog)); }

/* Parses the core descriptors. Callers with extra kinds (module appkit's
 * determinant product) wrap this with their own dispatcher. */
inline FnPtr fn_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw SchemaError("function descriptor: expected {kind, ...}");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "one")
        return make_one(j.at("n").get<std::size_t>());
    if (kind == "poly")
        return make_poly_fn(poly_from_json(j.at("poly")));
    if (kind == "slp")
        return make_slp_fn(slp_from_json(j.at("slp")));
    throw SchemaError("function descriptor: unknown kind '" + kind + "'");
}

using FnParser = std::function<FnPtr(const Json&)>;

inline bool fn_equal(const RealFn& a, const RealFn& b) {
    return a.kind() == b.kind() && a.to_json() == b.to_json();
}

} // namespace signatlas
