#pragma once

// Finite field arithmetic for GF(p), p prime, and GF(2^w), w <= 16.
//
// GF(2^w) uses the polynomial basis with a fixed irreducible polynomial
// per degree (table below), so element enumeration and all downstream
// hash family enumerations are bit-identical across runs and platforms.
// Fields of order > 2^16 are rejected.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hashlab {

// Low-weight irreducible polynomials over GF(2), bit i = coefficient of x^i.
// Degrees 2..4 are x^2+x+1, x^3+x+1, x^4+x+1; the rest follow the standard
// low-weight table.  Irreducibility of every entry is pinned by a trial
// division test in tests/test_field.cpp.
inline std::uint32_t irreducible_poly(std::uint32_t degree) {
    static constexpr std::uint32_t table[17] = {
        0,      0x3,    0x7,    0xB,    0x13,  0x25,   0x43,   0x83,  0x11B,
        0x203,  0x409,  0x805,  0x1009, 0x201B, 0x4021, 0x8003, 0x1100B};
    if (degree < 1 || degree > 16) throw std::invalid_argument("GF(2^w): w must be in [1,16]");
    return table[degree];
}

inline bool is_prime_u32(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Descriptor of GF(p^w).  Supported: w == 1 with p prime, or p == 2 with
// w <= 16.  Elements are uint32 representations in [0, order): for p = 2
// the bits are polynomial-basis coefficients, otherwise residues mod p.
class GaloisField {
  public:
    GaloisField(std::uint32_t p, std::uint32_t w) : p_(p), w_(w) {
        if (w == 0) throw std::invalid_argument("field: extension degree 0");
        if (p == 2) {
            if (w > 16) throw std::invalid_argument("field: order > 2^16 unsupported");
            poly_ = irreducible_poly(w);
            order_ = 1u << w;
        } else {
            if (!is_prime_u32(p)) throw std::invalid_argument("field: characteristic not prime");
            if (w != 1)
                throw std::invalid_argument("field: odd prime extensions unsupported");
            if (p > (1u << 16)) throw std::invalid_argument("field: order > 2^16 unsupported");
            poly_ = 0;
            order_ = p;
        }
    }

    // Order q as a convenience: picks GF(2^w) when q is a power of two,
    // otherwise requires q prime.
    static GaloisField of_order(std::uint32_t q) {
        if (q < 2) throw std::invalid_argument("field: order < 2");
        if ((q & (q - 1)) == 0) {
            std::uint32_t w = 0;
            while ((1u << w) < q) ++w;
            return GaloisField(2, w);
        }
        return GaloisField(q, 1);
    }

    std::uint32_t characteristic() const { return p_; }
    std::uint32_t degree() const { return w_; }
    std::uint32_t order() const { return order_; }
    std::uint32_t modulus_poly() const { return poly_; }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
        check(a), check(b);
        if (p_ == 2) return a ^ b;
        return (a + b) % p_;
    }

    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const {
        check(a), check(b);
        if (p_ == 2) return a ^ b;
        return (a + p_ - b) % p_;
    }

    std::uint32_t neg(std::uint32_t a) const { return sub(0, a); }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        check(a), check(b);
        if (p_ != 2) return static_cast<std::uint32_t>((std::uint64_t)a * b % p_);
        // carry-less multiply then reduce mod the fixed irreducible
        std::uint64_t acc = 0;
        std::uint64_t x = a;
        while (b) {
            if (b & 1) acc ^= x;
            x <<= 1;
            b >>= 1;
        }
        for (int bit = 2 * (int)w_ - 2; bit >= (int)w_; --bit)
            if (acc >> bit & 1) acc ^= (std::uint64_t)poly_ << (bit - w_);
        return static_cast<std::uint32_t>(acc);
    }

    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const {
        check(a);
        std::uint32_t acc = 1;
        while (e) {
            if (e & 1) acc = mul(acc, a);
            a = mul(a, a);
            e >>= 1;
        }
        return acc;
    }

    std::uint32_t inv(std::uint32_t a) const {
        check(a);
        if (a == 0) throw std::domain_error("field: inverse of zero");
        return pow(a, order_ - 2);
    }

    bool operator==(const GaloisField& o) const {
        return p_ == o.p_ && w_ == o.w_ && poly_ == o.poly_;
    }
    bool operator!=(const GaloisField& o) const { return !(*this == o); }

  private:
    void check(std::uint32_t v) const {
        if (v >= order_) throw std::invalid_argument("field: value out of range");
    }

    std::uint32_t p_, w_, poly_, order_;
};

// Strong element type; arithmetic between mismatched fields throws.
struct FieldElem {
    std::uint32_t value = 0;
    const GaloisField* field = nullptr;

    FieldElem() = default;
    FieldElem(std::uint32_t v, const GaloisField& f) : value(v), field(&f) {
        if (v >= f.order()) throw std::invalid_argument("field: value out of range");
    }

    friend FieldElem operator+(FieldElem a, FieldElem b) {
        same(a, b);
        return {a.field->add(a.value, b.value), *a.field};
    }
    friend FieldElem operator-(FieldElem a, FieldElem b) {
        same(a, b);
        return {a.field->sub(a.value, b.value), *a.field};
    }
    friend FieldElem operator*(FieldElem a, FieldElem b) {
        same(a, b);
        return {a.field->mul(a.value, b.value), *a.field};
    }
    FieldElem inverse() const { return {field->inv(value), *field}; }
    FieldElem pow(std::uint64_t e) const { return {field->pow(value, e), *field}; }

    friend bool operator==(FieldElem a, FieldElem b) {
        same(a, b);
        return a.value == b.value;
    }

  private:
    static void same(const FieldElem& a, const FieldElem& b) {
        if (!a.field || !b.field || *a.field != *b.field)
            throw std::invalid_argument("field: mixed-field arithmetic");
    }
};

}  // namespace hashlab
