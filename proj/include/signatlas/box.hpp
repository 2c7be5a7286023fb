#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "signatlas/interval.hpp"
#include "signatlas/numeric.hpp"

namespace signatlas {

using Json = nlohmann::json;

/* Axis-aligned rational hypercube: lower corner plus one side length.
 * Builder-produced boxes are dyadic; the type itself allows any rationals. */
struct Box {
    std::vector<Rat> lower;
    Rat side;

    Box(std::vector<Rat> lo, Rat s) : lower(std::move(lo)), side(std::move(s)) {
        if (side <= 0)
            throw DomainError("box with non-positive side");
    }

    std::size_t dim() const { return lower.size(); }

    IVal axis(std::size_t j) const { return IVal(lower[j], lower[j] + side); }

    std::vector<IVal> axes() const {
        std::vector<IVal> out;
        out.reserve(dim());
        for (std::size_t j = 0; j < dim(); ++j)
            out.push_back(axis(j));
        return out;
    }

    Point center() const {
        Point c(lower);
        Rat half = side / 2;
        for (auto& v : c)
            v += half;
        return c;
    }

    /* Corner selected by bit mask: bit j set means the upper end in axis j. */
    Point corner(unsigned mask) const {
        Point c(lower);
        for (std::size_t j = 0; j < dim(); ++j)
            if (mask & (1u << j))
                c[j] += side;
        return c;
    }

    /* Child of the 2^n split, same bit convention as corner(). */
    Box child(unsigned mask) const {
        Rat half = side / 2;
        Point lo(lower);
        for (std::size_t j = 0; j < dim(); ++j)
            if (mask & (1u << j))
                lo[j] += half;
        return Box(std::move(lo), half);
    }

    bool contains(std::span<const Rat> x) const {
        if (x.size() != dim())
            return false;
        for (std::size_t j = 0; j < dim(); ++j)
            if (x[j] < lower[j] || x[j] > lower[j] + side)
                return false;
        return true;
    }
};

/* All 2^n children ordered by corner bit pattern (00, 01, 10, 11, ...). */
inline std::vector<Box> box_subdivide(const Box& b) {
    std::vector<Box> out;
    unsigned count = 1u << b.dim();
    out.reserve(count);
    for (unsigned m = 0; m < count; ++m)
        out.push_back(b.child(m));
    return out;
}

inline Box unit_box(std::size_t n) {
    return Box(std::vector<Rat>(n, Rat(0)), Rat(1));
}

/* Max logarithmic height over the 2n coordinates alpha_j and alpha_j + side. */
inline unsigned box_log_height(const Box& b) {
    unsigned h = 0;
    for (std::size_t j = 0; j < b.dim(); ++j) {
        h = std::max(h, log_height(b.lower[j]));
        h = std::max(h, log_height(Rat(b.lower[j] + b.side)));
    }
    return h;
}

inline Json box_to_json(const Box& b) {
    Json lo = Json::array();
    for (const auto& v : b.lower)
        lo.push_back(to_string(v));
    return Json{{"lower", lo}, {"side", to_string(b.side)}};
}

inline Box box_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("lower") || !j.contains("side"))
        throw SchemaError("box: expected {lower, side}");
    std::vector<Rat> lo;
    for (const auto& v : j.at("lower"))
        lo.push_back(parse_rat(v.get<std::string>()));
    return Box(std::move(lo), parse_rat(j.at("side").get<std::string>()));
}

} // namespace signatlas
