#pragma once

// Enumerable hash function families [N] -> [M] with exhaustive property
// verifiers.  Enumeration order is part of each construction's contract:
// eval(index, x) is a pure function of the descriptor, identical across
// runs and platforms.
//
// Projection convention: a field GF(M^c) projects onto [M] by taking the
// low base-M digit of the representation (the degree-0 coefficient block
// in the fixed polynomial basis).  The projection is balanced, with
// M^(c-1) preimages per output.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hashlab/field.hpp"
#include "hashlab/rational.hpp"

namespace hashlab {

class HashFamily {
  public:
    virtual ~HashFamily() = default;

    std::uint64_t family_size() const { return family_size_; }
    std::uint32_t domain_size() const { return domain_size_; }
    std::uint32_t range_size() const { return range_size_; }
    const std::string& descriptor() const { return descriptor_; }

    virtual std::uint32_t eval(std::uint64_t index, std::uint32_t x) const = 0;

  protected:
    HashFamily(std::uint64_t fam, std::uint32_t n, std::uint32_t m, std::string desc)
        : family_size_(fam), domain_size_(n), range_size_(m), descriptor_(std::move(desc)) {}

    void check_args(std::uint64_t index, std::uint32_t x) const {
        if (index >= family_size_) throw std::invalid_argument("family: index out of range");
        if (x >= domain_size_) throw std::invalid_argument("family: point out of range");
    }

  private:
    std::uint64_t family_size_;
    std::uint32_t domain_size_;
    std::uint32_t range_size_;
    std::string descriptor_;
};

namespace detail {
inline std::uint32_t check_projection(std::uint32_t q, std::uint32_t m) {
    if (m < 2) throw std::invalid_argument("family: range must have size >= 2");
    std::uint32_t c = 0;
    std::uint64_t power = 1;
    while (power < q) {
        power *= m;
        ++c;
    }
    if (power != q) throw std::invalid_argument("family: field order is not a power of the range size");
    return c;
}
}  // namespace detail

// h_{a,b}(x) = project(a*x + b) over GF(q), index = a*q + b.  Pairwise
// independent into [M] (the a = 0 slice contributes the constant
// functions that exact pairwise independence requires).
class AffineFamily final : public HashFamily {
  public:
    AffineFamily(std::uint32_t q, std::uint32_t m)
        : HashFamily(static_cast<std::uint64_t>(q) * q, q, m,
                     "affine:q" + std::to_string(q) + ":m" + std::to_string(m)),
          gf_(GaloisField::of_order(q)) {
        detail::check_projection(q, m);
    }

    std::uint32_t eval(std::uint64_t index, std::uint32_t x) const override {
        check_args(index, x);
        std::uint32_t a = static_cast<std::uint32_t>(index / gf_.order());
        std::uint32_t b = static_cast<std::uint32_t>(index % gf_.order());
        return gf_.add(gf_.mul(a, x), b) % range_size();
    }

    const GaloisField& field() const { return gf_; }

  private:
    GaloisField gf_;
};

// The linear family H0 = {h_a : F^t -> F} with h_a(x) = sum_i a_i x_i.
// Index a = 0 is the constant-0 function, and h_a(0) = 0 for every a.
class LinearH0Family final : public HashFamily {
  public:
    LinearH0Family(std::uint32_t m, std::uint32_t t)
        : HashFamily(pow_u64(m, t), pow_u32(m, t), m,
                     "h0:m" + std::to_string(m) + ":t" + std::to_string(t)),
          gf_(GaloisField::of_order(m)),
          t_(t) {
        if (t == 0) throw std::invalid_argument("h0: t must be >= 1");
    }

    std::uint32_t eval(std::uint64_t index, std::uint32_t x) const override {
        check_args(index, x);
        std::uint32_t acc = 0;
        std::uint64_t a = index;
        std::uint32_t v = x;
        for (std::uint32_t i = 0; i < t_; ++i) {
            acc = gf_.add(acc, gf_.mul(static_cast<std::uint32_t>(a % gf_.order()),
                                       v % gf_.order()));
            a /= gf_.order();
            v /= gf_.order();
        }
        return acc;
    }

  private:
    static std::uint64_t pow_u64(std::uint32_t b, std::uint32_t e) {
        std::uint64_t r = 1;
        while (e--) r *= b;
        return r;
    }
    static std::uint32_t pow_u32(std::uint32_t b, std::uint32_t e) {
        std::uint64_t r = pow_u64(b, e);
        if (r > 0xFFFFFFFFull) throw std::invalid_argument("h0: domain too large");
        return static_cast<std::uint32_t>(r);
    }

    GaloisField gf_;
    std::uint32_t t_;
};

// Degree-(s-1) polynomials over GF(q) followed by the balanced projection:
// index digits base q are the coefficients c_0..c_{s-1}, and
// h(x) = project(sum_j c_j x^j).  s-wise independent into [M].
class KwiseFamily final : public HashFamily {
  public:
    KwiseFamily(std::uint32_t q, std::uint32_t m, std::uint32_t s)
        : HashFamily(pow_u64_checked(q, s), q, m,
                     "kwise:q" + std::to_string(q) + ":m" + std::to_string(m) + ":s" +
                         std::to_string(s)),
          gf_(GaloisField::of_order(q)),
          s_(s) {
        detail::check_projection(q, m);
        if (s < 2) throw std::invalid_argument("kwise: s must be >= 2");
        qpow_.resize(s);
        std::uint64_t p = 1;
        for (std::uint32_t j = 0; j < s; ++j) {
            qpow_[j] = p;
            p *= q;
        }
    }

    std::uint32_t eval(std::uint64_t index, std::uint32_t x) const override {
        check_args(index, x);
        // Horner from the top coefficient down; digit j of the index base q
        // is the coefficient of x^j.
        std::uint32_t acc = 0;
        for (std::uint32_t j = s_; j-- > 0;) {
            std::uint32_t cj = static_cast<std::uint32_t>(index / qpow_[j] % gf_.order());
            acc = gf_.add(gf_.mul(acc, x), cj);
        }
        return acc % range_size();
    }

  private:
    static std::uint64_t pow_u64_checked(std::uint32_t b, std::uint32_t e) {
        std::uint64_t r = 1;
        while (e--) {
            if (r > (0xFFFFFFFFFFFFFFFFull / b)) throw guard_error("kwise: family too large");
            r *= b;
        }
        return r;
    }

    GaloisField gf_;
    std::uint32_t s_;
    std::vector<std::uint64_t> qpow_;
};

// Split-domain family from the explicit lower-bound construction: the
// domain [s*M^t] is s copies of F^t, sub-domain i is hashed by the H0
// member with seed a + alpha_i * b computed in the field of size M^t,
// where alpha_i are the first s field elements in enumeration order.
// Index = a * M^t + b.
class SplitDomainFamily final : public HashFamily {
  public:
    SplitDomainFamily(std::uint32_t m, std::uint32_t t, std::uint32_t s)
        : HashFamily(big_order_sq(m, t), sub_domains(m, t, s), m,
                     "lb:m" + std::to_string(m) + ":t" + std::to_string(t) + ":s" +
                         std::to_string(s)),
          small_(GaloisField::of_order(m)),
          big_(big_field(m, t)),
          t_(t),
          s_(s) {}

    std::uint32_t eval(std::uint64_t index, std::uint32_t x) const override {
        check_args(index, x);
        std::uint32_t a = static_cast<std::uint32_t>(index / big_.order());
        std::uint32_t b = static_cast<std::uint32_t>(index % big_.order());
        std::uint32_t sub = x / big_.order();       // which copy of F^t
        std::uint32_t v = x % big_.order();         // the vector, base-M digits
        std::uint32_t seed = seed_for(a, b, sub);
        // inner product of seed and v over GF(M), digitwise base M
        std::uint32_t acc = 0;
        const std::uint32_t m = small_.order();
        while (seed || v) {
            acc = small_.add(acc, small_.mul(seed % m, v % m));
            seed /= m;
            v /= m;
        }
        return acc;
    }

    // Seed of sub-domain i at index (a, b); the "bad" classification keys
    // off these (exactly one zero seed, which requires b != 0).
    std::uint32_t seed_for(std::uint32_t a, std::uint32_t b, std::uint32_t sub) const {
        return big_.add(a, big_.mul(sub, b));  // alpha_i enumerates as 0,1,2,...
    }

    std::uint32_t sub_domain_count() const { return s_; }
    const GaloisField& big_field_ref() const { return big_; }
    const GaloisField& small_field_ref() const { return small_; }

  private:
    static GaloisField big_field(std::uint32_t m, std::uint32_t t) {
        if (t == 0) throw std::invalid_argument("lb: t must be >= 1");
        GaloisField small = GaloisField::of_order(m);
        if (small.characteristic() == 2) return GaloisField(2, small.degree() * t);
        if (t == 1) return small;
        throw std::invalid_argument("lb: odd prime with t > 1 unsupported");
    }
    static std::uint64_t big_order_sq(std::uint32_t m, std::uint32_t t) {
        std::uint64_t q = big_field(m, t).order();
        return q * q;
    }
    static std::uint32_t sub_domains(std::uint32_t m, std::uint32_t t, std::uint32_t s) {
        std::uint64_t q = big_field(m, t).order();
        if (s < 1 || s > q) throw std::invalid_argument("lb: need 1 <= s <= M^t");
        std::uint64_t n = s * q;
        if (n > 0xFFFFFFFFull) throw std::invalid_argument("lb: domain too large");
        return static_cast<std::uint32_t>(n);
    }

    GaloisField small_;
    GaloisField big_;
    std::uint32_t t_, s_;
};

// All M^N functions [N] -> [M], enumerated by base-M digit strings.
class TrulyRandomFamily final : public HashFamily {
  public:
    TrulyRandomFamily(std::uint32_t n, std::uint32_t m)
        : HashFamily(total(n, m), n, m,
                     "random:n" + std::to_string(n) + ":m" + std::to_string(m)) {
        digit_stride_.resize(n);
        std::uint64_t s = 1;
        for (std::uint32_t x = 0; x < n; ++x) {
            digit_stride_[x] = s;
            s *= m;
        }
    }

    std::uint32_t eval(std::uint64_t index, std::uint32_t x) const override {
        check_args(index, x);
        return static_cast<std::uint32_t>(index / digit_stride_[x] % range_size());
    }

  private:
    static std::uint64_t total(std::uint32_t n, std::uint32_t m) {
        if (m < 2) throw std::invalid_argument("random: range must have size >= 2");
        std::uint64_t r = 1;
        for (std::uint32_t i = 0; i < n; ++i) {
            r *= m;
            if (r > (1ull << 24)) throw guard_error("random: family larger than 2^24");
        }
        return r;
    }

    std::vector<std::uint64_t> digit_stride_;
};

struct VerifyResult {
    bool ok = false;
    std::vector<std::uint32_t> worst_points;  // an offending (or tightest) subset
    std::uint64_t worst_count = 0;            // colliding / deviating index count
    explicit operator bool() const { return ok; }
};

namespace detail {

// Visit every s-subset of {0..n-1} in lexicographic order.
template <class Visit>
void for_each_subset(std::uint32_t n, std::uint32_t s, Visit&& visit) {
    if (s > n) return;
    std::vector<std::uint32_t> pts(s);
    for (std::uint32_t i = 0; i < s; ++i) pts[i] = i;
    for (;;) {
        visit(pts);
        std::uint32_t j = s;
        bool done = true;
        while (j-- > 0) {
            if (pts[j] < n - (s - j)) {  // slot j tops out at n - s + j
                ++pts[j];
                for (std::uint32_t k = j + 1; k < s; ++k) pts[k] = pts[k - 1] + 1;
                done = false;
                break;
            }
        }
        if (done) return;
    }
}

inline void verify_guard(const HashFamily& f, std::uint32_t s, std::uint64_t limit) {
    // rough operation count: family_size * C(N, s)
    long double combos = 1;
    for (std::uint32_t i = 0; i < s; ++i)
        combos = combos * (f.domain_size() - i) / (i + 1);
    if (combos * static_cast<long double>(f.family_size()) > static_cast<long double>(limit))
        throw guard_error("verify: enumeration over " + f.descriptor() + " exceeds guard");
}

}  // namespace detail

// s-universality: for every s-subset of distinct points,
// Pr_H[H(x_1) = ... = H(x_s)] <= 1/M^(s-1).
inline VerifyResult verify_universal(const HashFamily& f, std::uint32_t s,
                                     std::uint64_t guard_ops = (1ull << 30)) {
    if (s < 2 || s > f.domain_size()) throw std::invalid_argument("verify: bad subset size");
    detail::verify_guard(f, s, guard_ops);
    std::uint64_t pow_m = 1;
    for (std::uint32_t i = 0; i + 1 < s; ++i) pow_m *= f.range_size();

    VerifyResult res;
    res.ok = true;
    detail::for_each_subset(f.domain_size(), s, [&](const std::vector<std::uint32_t>& pts) {
        std::uint64_t collisions = 0;
        for (std::uint64_t h = 0; h < f.family_size(); ++h) {
            std::uint32_t y = f.eval(h, pts[0]);
            bool all = true;
            for (std::uint32_t i = 1; i < s && all; ++i) all = f.eval(h, pts[i]) == y;
            collisions += all;
        }
        if (collisions > res.worst_count) {
            res.worst_count = collisions;
            res.worst_points = pts;
        }
        if (collisions * pow_m > f.family_size()) res.ok = false;
    });
    return res;
}

// s-wise independence: every s-subset of distinct points maps to an exactly
// uniform tuple distribution over [M]^s.
inline VerifyResult verify_s_wise(const HashFamily& f, std::uint32_t s,
                                  std::uint64_t guard_ops = (1ull << 30)) {
    if (s < 1 || s > f.domain_size()) throw std::invalid_argument("verify: bad subset size");
    detail::verify_guard(f, s, guard_ops);
    std::uint64_t tuples = 1;
    for (std::uint32_t i = 0; i < s; ++i) tuples *= f.range_size();
    if (f.family_size() % tuples != 0) {
        VerifyResult res;
        res.ok = false;  // uniform tuple counts are impossible
        return res;
    }
    const std::uint64_t expect = f.family_size() / tuples;

    VerifyResult res;
    res.ok = true;
    std::vector<std::uint64_t> histogram(tuples);
    detail::for_each_subset(f.domain_size(), s, [&](const std::vector<std::uint32_t>& pts) {
        std::fill(histogram.begin(), histogram.end(), 0);
        for (std::uint64_t h = 0; h < f.family_size(); ++h) {
            std::uint64_t key = 0;
            for (std::uint32_t i = 0; i < s; ++i) key = key * f.range_size() + f.eval(h, pts[i]);
            ++histogram[key];
        }
        for (std::uint64_t k = 0; k < tuples; ++k) {
            if (histogram[k] != expect) {
                std::uint64_t dev = histogram[k] > expect ? histogram[k] - expect
                                                          : expect - histogram[k];
                if (!res.ok && dev <= res.worst_count) continue;
                res.ok = false;
                res.worst_count = dev;
                res.worst_points = pts;
            }
        }
    });
    return res;
}

}  // namespace hashlab
