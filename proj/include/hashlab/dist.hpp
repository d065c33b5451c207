#pragma once

// Exact finite probability distributions over [M] = {0, ..., M-1} and the
// scalar functionals used throughout: collision probability, Renyi / min
// entropy, statistical distance, Hellinger distance and closeness, and the
// water-filling minimizer behind the nonuniformity certificates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hashlab/rational.hpp"

namespace hashlab {

template <class S>
class Dist {
  public:
    using scalar = S;

    Dist(std::uint32_t domain_size, std::vector<S> mass)
        : size_(domain_size), mass_(std::move(mass)) {
        if (size_ == 0) throw std::invalid_argument("dist: empty domain");
        if (mass_.size() != size_) throw std::invalid_argument("dist: mass length != domain size");
        S total = scalar_traits<S>::from_int(0);
        for (const S& m : mass_) {
            if (m < scalar_traits<S>::from_int(0))
                throw std::invalid_argument("dist: negative mass");
            total += m;
        }
        if constexpr (scalar_traits<S>::exact) {
            if (total != scalar_traits<S>::from_int(1))
                throw std::invalid_argument("dist: mass does not sum to 1");
        } else {
            if (std::abs(to_double(total) - 1.0) > 1e-12)
                throw std::invalid_argument("dist: mass does not sum to 1 within 1e-12");
        }
    }

    static Dist uniform(std::uint32_t m) {
        return Dist(m, std::vector<S>(m, frac<S>(1, m)));
    }

    static Dist point_mass(std::uint32_t m, std::uint32_t at) {
        if (at >= m) throw std::invalid_argument("dist: point outside domain");
        std::vector<S> mass(m, scalar_traits<S>::from_int(0));
        mass[at] = scalar_traits<S>::from_int(1);
        return Dist(m, std::move(mass));
    }

    // Uniform over a support set (a flat source viewed as a Dist).
    static Dist flat(std::uint32_t m, const std::vector<std::uint32_t>& support) {
        if (support.empty()) throw std::invalid_argument("dist: empty support");
        std::vector<S> mass(m, scalar_traits<S>::from_int(0));
        S share = frac<S>(1, static_cast<long>(support.size()));
        for (std::uint32_t x : support) {
            if (x >= m) throw std::invalid_argument("dist: support outside domain");
            if (mass[x] != scalar_traits<S>::from_int(0))
                throw std::invalid_argument("dist: duplicate support point");
            mass[x] = share;
        }
        return Dist(m, std::move(mass));
    }

    std::uint32_t domain_size() const { return size_; }
    const std::vector<S>& mass() const { return mass_; }
    const S& operator[](std::uint32_t x) const { return mass_.at(x); }
    static const char* mode() { return scalar_traits<S>::mode_name(); }

  private:
    std::uint32_t size_;
    std::vector<S> mass_;
};

// cp(X) = sum_x Pr[X=x]^2
template <class S>
S cp(const Dist<S>& d) {
    S acc = scalar_traits<S>::from_int(0);
    for (const S& m : d.mass()) acc += m * m;
    return acc;
}

template <class S>
S max_mass(const Dist<S>& d) {
    S best = d.mass()[0];
    for (const S& m : d.mass())
        if (m > best) best = m;
    return best;
}

// H_2(X) = log2(1/cp(X))
template <class S>
double renyi2(const Dist<S>& d) {
    return -std::log2(to_double(cp(d)));
}

// H_inf(X) = log2(1/max_x Pr[X=x])
template <class S>
double min_entropy(const Dist<S>& d) {
    return -std::log2(to_double(max_mass(d)));
}

// Delta(X, Y) = (1/2) sum_x |Pr[X=x] - Pr[Y=x]|
template <class S>
S stat_dist(const Dist<S>& a, const Dist<S>& b) {
    if (a.domain_size() != b.domain_size())
        throw std::invalid_argument("stat_dist: domain mismatch");
    S acc = scalar_traits<S>::from_int(0);
    for (std::uint32_t x = 0; x < a.domain_size(); ++x) {
        S diff = a[x] - b[x];
        if (diff < scalar_traits<S>::from_int(0)) diff = -diff;
        acc += diff;
    }
    return acc / scalar_traits<S>::from_int(2);
}

// d(X, Y) = sqrt(1 - sum_x sqrt(Pr[X=x] Pr[Y=x])); real-valued.
template <class S>
double hellinger_dist(const Dist<S>& a, const Dist<S>& b) {
    if (a.domain_size() != b.domain_size())
        throw std::invalid_argument("hellinger_dist: domain mismatch");
    double bc = 0;
    for (std::uint32_t x = 0; x < a.domain_size(); ++x) {
        S prod = a[x] * b[x];
        bc += std::sqrt(to_double(prod));
    }
    return std::sqrt(std::max(0.0, 1.0 - bc));
}

// C(X) = (1/M) sum_i sqrt(M Pr[X=i]) = 1 - d(X, U)^2
template <class S>
double hellinger_closeness(const Dist<S>& d) {
    double m = d.domain_size();
    double acc = 0;
    for (const S& p : d.mass()) acc += std::sqrt(to_double(p) * m);
    return acc / m;
}

template <class S>
struct WaterFillResult {
    S level;        // the water level lambda
    S min_sq_mass;  // min of sum q(x)^2 over admissible q
    std::vector<S> achieving_q;
};

// Minimize sum q(x)^2 over 0 <= q <= p with sum q = budget.  The optimum
// clips at a level: q = min(p, lambda).  Exact in rational mode; ties in
// lambda (flat regions of the budget curve) resolve to the first valid
// segment, which does not affect the minimum.
template <class S>
WaterFillResult<S> min_sq_mass(const Dist<S>& d, const S& budget) {
    const S zero = scalar_traits<S>::from_int(0);
    const S one = scalar_traits<S>::from_int(1);
    if (!(budget > zero) || budget > one)
        throw std::invalid_argument("min_sq_mass: budget must be in (0, 1]");

    std::vector<S> sorted = d.mass();
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();

    S level = zero;
    bool found = false;
    S prefix = zero;  // sum of the k smallest masses
    for (std::size_t k = 0; k < m && !found; ++k) {
        // clip everything above lambda, keep the k smallest intact:
        //   prefix_k + (m - k) * lambda = budget
        S lambda = (budget - prefix) / scalar_traits<S>::from_int(static_cast<long>(m - k));
        bool lower_ok = (k == 0) || !(lambda < sorted[k - 1]);
        bool upper_ok = !(sorted[k] < lambda);
        if (lower_ok && upper_ok) {
            level = lambda;
            found = true;
        }
        prefix += sorted[k];
    }
    if (!found) {
        // budget == total mass (q = p forced); any level >= max works
        level = sorted.back();
    }

    std::vector<S> q(d.domain_size());
    S msm = zero;
    for (std::uint32_t x = 0; x < d.domain_size(); ++x) {
        q[x] = std::min(d[x], level);
        msm += q[x] * q[x];
    }
    return {level, msm, std::move(q)};
}

}  // namespace hashlab
