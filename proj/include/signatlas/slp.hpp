#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "signatlas/numeric.hpp"
#include "signatlas/poly.hpp"

namespace signatlas {

enum class OpKind : std::uint8_t { ConstZero, ConstOne, Input, Add, Sub, Mul };

struct Instr {
    OpKind kind;
    std::uint32_t a = 0;
    std::uint32_t b = 0;

    bool operator==(const Instr&) const = default;
};

/* Division-free straight-line program. Operands reference strictly earlier
 * instructions; length L counts only Add/Sub/Mul. */
class Slp {
public:
    Slp(std::size_t num_inputs, std::vector<Instr> code, std::vector<std::uint32_t> outputs)
        : num_inputs_(num_inputs), code_(std::move(code)), outputs_(std::move(outputs)) {
        validate();
    }

    std::size_t num_inputs() const { return num_inputs_; }
    const std::vector<Instr>& code() const { return code_; }
    const std::vector<std::uint32_t>& outputs() const { return outputs_; }

    std::size_t length() const {
        std::size_t l = 0;
        for (const auto& in : code_)
            if (in.kind == OpKind::Add || in.kind == OpKind::Sub || in.kind == OpKind::Mul)
                ++l;
        return l;
    }

    bool operator==(const Slp&) const = default;

private:
    void validate() const {
        for (std::size_t i = 0; i < code_.size(); ++i) {
            const Instr& in = code_[i];
            switch (in.kind) {
            case OpKind::ConstZero:
            case OpKind::ConstOne:
                break;
            case OpKind::Input:
                if (in.a >= num_inputs_)
                    throw SchemaError("slp: input index out of range");
                break;
            case OpKind::Add:
            case OpKind::Sub:
            case OpKind::Mul:
                if (in.a >= i || in.b >= i)
                    throw SchemaError("slp: operand must reference an earlier instruction");
                break;
            }
        }
        for (auto o : outputs_)
            if (o >= code_.size())
                throw SchemaError("slp: output index out of range");
    }

    std::size_t num_inputs_;
    std::vector<Instr> code_;
    std::vector<std::uint32_t> outputs_;
};

template <typename V>
struct SlpResult {
    std::vector<V> outputs;
    std::size_t op_count = 0;
};

/* Generic evaluation over any value type with 0, 1, +, -, *.
 * op_count is the number of Add/Sub/Mul executed, i.e. the length L. */
template <typename V>
SlpResult<V> slp_eval(const Slp& prog, std::span<const V> inputs) {
    if (inputs.size() != prog.num_inputs())
        throw DomainError("slp_eval: wrong number of inputs");
    std::vector<V> vals;
    vals.reserve(prog.code().size());
    std::size_t ops = 0;
    for (const Instr& in : prog.code()) {
        switch (in.kind) {
        case OpKind::ConstZero: vals.push_back(V(0)); break;
        case OpKind::ConstOne: vals.push_back(V(1)); break;
        case OpKind::Input: vals.push_back(inputs[in.a]); break;
        case OpKind::Add: vals.push_back(vals[in.a] + vals[in.b]); ++ops; break;
        case OpKind::Sub: vals.push_back(vals[in.a] - vals[in.b]); ++ops; break;
        case OpKind::Mul: vals.push_back(vals[in.a] * vals[in.b]); ++ops; break;
        }
    }
    SlpResult<V> r;
    r.op_count = ops;
    r.outputs.reserve(prog.outputs().size());
    for (auto o : prog.outputs())
        r.outputs.push_back(vals[o]);
    return r;
}

template <typename V>
SlpResult<V> slp_eval(const Slp& prog, const std::vector<V>& inputs) {
    return slp_eval(prog, std::span<const V>(inputs));
}

/* Incremental program construction. Constants 0/1 and input loads are
 * memoized so repeated requests share one instruction. */
class SlpBuilder {
public:
    explicit SlpBuilder(std::size_t num_inputs) : num_inputs_(num_inputs) {}

    std::uint32_t zero() {
        if (!zero_)
            zero_ = emit({OpKind::ConstZero});
        return *zero_;
    }

    std::uint32_t one() {
        if (!one_)
            one_ = emit({OpKind::ConstOne});
        return *one_;
    }

    std::uint32_t input(std::uint32_t j) {
        if (j >= num_inputs_)
            throw DomainError("slp builder: input index out of range");
        auto it = inputs_.find(j);
        if (it != inputs_.end())
            return it->second;
        std::uint32_t idx = emit({OpKind::Input, j});
        inputs_.emplace(j, idx);
        return idx;
    }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) { return emit({OpKind::Add, a, b}); }
    std::uint32_t sub(std::uint32_t a, std::uint32_t b) { return emit({OpKind::Sub, a, b}); }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) { return emit({OpKind::Mul, a, b}); }

    /* Binary double-and-add from the constants 0 and 1; negatives subtract
     * from zero. O(bit length) operations. */
    std::uint32_t emit_const(const Int& c) {
        if (c == 0)
            return zero();
        if (c < 0)
            return sub(zero(), emit_const(Int(-c)));
        if (c == 1)
            return one();
        unsigned bits = boost::multiprecision::msb(c);
        std::uint32_t acc = one();
        for (unsigned i = bits; i-- > 0;) {
            acc = add(acc, acc);
            if (boost::multiprecision::bit_test(c, i))
                acc = add(acc, one());
        }
        return acc;
    }

    std::size_t size() const { return code_.size(); }

    Slp finish(std::vector<std::uint32_t> outputs) && {
        return Slp(num_inputs_, std::move(code_), std::move(outputs));
    }

private:
    std::uint32_t emit(Instr in) {
        code_.push_back(in);
        return std::uint32_t(code_.size() - 1);
    }

    std::size_t num_inputs_;
    std::vector<Instr> code_;
    std::map<std::uint32_t, std::uint32_t> inputs_;
    std::optional<std::uint32_t> zero_;
    std::optional<std::uint32_t> one_;
};

inline Slp synth_const(const Int& c) {
    SlpBuilder b(0);
    std::uint32_t out = b.emit_const(c);
    return std::move(b).finish({out});
}

/* Term-by-term compilation: synthesize the coefficient, build the monomial by
 * repeated multiplication, accumulate. Length <= #terms * (2 + deg + 2*bits). */
inline Slp slp_from_poly(const MultiPoly& p) {
    SlpBuilder b(p.num_vars());
    if (p.is_zero()) {
        std::uint32_t z = b.zero();
        return std::move(b).finish({z});
    }
    std::optional<std::uint32_t> acc;
    for (const auto& [e, c] : p.terms()) {
        std::optional<std::uint32_t> mono;
        for (std::size_t i = 0; i < e.size(); ++i)
            for (std::uint32_t t = 0; t < e[i]; ++t) {
                std::uint32_t xi = b.input(std::uint32_t(i));
                mono = mono ? b.mul(*mono, xi) : xi;
            }
        std::uint32_t term;
        if (!mono)
            term = b.emit_const(c);
        else if (c == 1)
            term = *mono;
        else if (c == -1)
            term = b.sub(b.zero(), *mono);
        else
            term = b.mul(b.emit_const(c), *mono);
        acc = acc ? b.add(*acc, term) : term;
    }
    return std::move(b).finish({*acc});
}

/* Replaces the trailing xi.size() inputs by synthesized constants; the
 * leading inputs keep their positions. */
inline Slp slp_specialize(const Slp& prog, std::span<const Int> xi) {
    if (xi.size() > prog.num_inputs())
        throw DomainError("slp_specialize: more values than inputs");
    std::size_t m = prog.num_inputs() - xi.size();
    SlpBuilder b(m);
    std::vector<std::uint32_t> remap(prog.code().size());
    for (std::size_t i = 0; i < prog.code().size(); ++i) {
        const Instr& in = prog.code()[i];
        switch (in.kind) {
        case OpKind::ConstZero: remap[i] = b.zero(); break;
        case OpKind::ConstOne: remap[i] = b.one(); break;
        case OpKind::Input:
            remap[i] = in.a < m ? b.input(in.a) : b.emit_const(xi[in.a - m]);
            break;
        case OpKind::Add: remap[i] = b.add(remap[in.a], remap[in.b]); break;
        case OpKind::Sub: remap[i] = b.sub(remap[in.a], remap[in.b]); break;
        case OpKind::Mul: remap[i] = b.mul(remap[in.a], remap[in.b]); break;
        }
    }
    std::vector<std::uint32_t> outs;
    outs.reserve(prog.outputs().size());
    for (auto o : prog.outputs())
        outs.push_back(remap[o]);
    return std::move(b).finish(std::move(outs));
}

inline Slp slp_specialize(const Slp& prog, const std::vector<Int>& xi) {
    return slp_specialize(prog, std::span<const Int>(xi));
}

/* H(U,X) = sum_{k=1..m} prod_{l=1..n} (1 + (U_k^{2^{l-1}} - 1) * X_l), with
 * inputs U_1..U_m then X_1..X_n. For j in {0,...,2^n - 1} encoded into X
 * least significant bit first, H(u, [j]) = sum_k u_k^j. A shared squaring
 * chain per k keeps the length at 5mn - m - 1 <= 5mn. */
inline Slp build_powersum_slp(std::size_t m, std::size_t n) {
    if (m < 1 || n < 1)
        throw DomainError("build_powersum_slp: m and n must be >= 1");
    SlpBuilder b(m + n);
    std::optional<std::uint32_t> acc;
    for (std::size_t k = 0; k < m; ++k) {
        std::uint32_t pw = b.input(std::uint32_t(k));
        std::optional<std::uint32_t> prod;
        for (std::size_t l = 0; l < n; ++l) {
            if (l > 0)
                pw = b.mul(pw, pw);
            std::uint32_t t = b.sub(pw, b.one());
            t = b.mul(t, b.input(std::uint32_t(m + l)));
            t = b.add(b.one(), t);
            prod = prod ? b.mul(*prod, t) : t;
        }
        acc = acc ? b.add(*acc, *prod) : *prod;
    }
    return std::move(b).finish({*acc});
}

/* n-bit encoding of j, least significant bit first, as exact 0/1 rationals. */
inline std::vector<Rat> bit_point(std::uint64_t j, std::size_t n) {
    std::vector<Rat> x;
    x.reserve(n);
    for (std::size_t l = 0; l < n; ++l)
        x.emplace_back(int((j >> l) & 1));
    return x;
}

inline Json slp_to_json(const Slp& prog) {
    Json code = Json::array();
    for (const Instr& in : prog.code()) {
        switch (in.kind) {
        case OpKind::ConstZero: code.push_back(Json::array({"zero"})); break;
        case OpKind::ConstOne: code.push_back(Json::array({"one"})); break;
        case OpKind::Input: code.push_back(Json::array({"in", in.a})); break;
        case OpKind::Add: code.push_back(Json::array({"add", in.a, in.b})); break;
        case OpKind::Sub: code.push_back(Json::array({"sub", in.a, in.b})); break;
        case OpKind::Mul: code.push_back(Json::array({"mul", in.a, in.b})); break;
        }
    }
    return Json{{"inputs", prog.num_inputs()}, {"code", code}, {"out", prog.outputs()}};
}

inline Slp slp_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("inputs") || !j.contains("code") || !j.contains("out"))
        throw SchemaError("slp: expected {inputs, code, out}");
    std::vector<Instr> code;
    for (const auto& row : j.at("code")) {
        if (!row.is_array() || row.empty() || !row[0].is_string())
            throw SchemaError("slp: each code entry is [op, ...]");
        std::string op = row[0].get<std::string>();
        auto arity = [&](std::size_t k) {
            if (row.size() != k + 1)
                throw SchemaError("slp: wrong operand count for '" + op + "'");
        };
        if (op == "zero") {
            arity(0);
            code.push_back({OpKind::ConstZero});
        } else if (op == "one") {
            arity(0);
            code.push_back({OpKind::ConstOne});
        } else if (op == "in") {
            arity(1);
            code.push_back({OpKind::Input, row[1].get<std::uint32_t>()});
        } else if (op == "add" || op == "sub" || op == "mul") {
            arity(2);
            OpKind k = op == "add" ? OpKind::Add : op == "sub" ? OpKind::Sub : OpKind::Mul;
            code.push_back({k, row[1].get<std::uint32_t>(), row[2].get<std::uint32_t>()});
        } else {
            throw SchemaError("slp: unknown opcode '" + op + "'");
        }
    }
    return Slp(j.at("inputs").get<std::size_t>(), std::move(code),
               j.at("out").get<std::vector<std::uint32_t>>());
}

} // namespace signatlas
