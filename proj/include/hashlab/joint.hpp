#pragma once

// Distributions over named-axis product domains, row-major in axis order
// (axis 0 varies slowest).  Marginalization, conditioning, products, iid
// powers, and the conditional collision probability cp(target | given).

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hashlab/dist.hpp"

namespace hashlab {

struct Axis {
    std::string name;
    std::uint32_t size = 0;
    bool operator==(const Axis& o) const { return name == o.name && size == o.size; }
};

template <class S>
class JointDist {
  public:
    JointDist(std::vector<Axis> axes, std::vector<S> mass)
        : axes_(std::move(axes)), mass_(std::move(mass)) {
        if (axes_.empty()) throw std::invalid_argument("joint: no axes");
        std::uint64_t total = 1;
        for (const auto& a : axes_) {
            if (a.size == 0) throw std::invalid_argument("joint: empty axis");
            for (const auto& b : axes_)
                if (&a != &b && a.name == b.name)
                    throw std::invalid_argument("joint: duplicate axis name " + a.name);
            total *= a.size;
        }
        if (mass_.size() != total) throw std::invalid_argument("joint: mass length mismatch");
        S sum = scalar_traits<S>::from_int(0);
        for (const S& m : mass_) {
            if (m < scalar_traits<S>::from_int(0))
                throw std::invalid_argument("joint: negative mass");
            sum += m;
        }
        if constexpr (scalar_traits<S>::exact) {
            if (sum != scalar_traits<S>::from_int(1))
                throw std::invalid_argument("joint: mass does not sum to 1");
        } else {
            if (std::abs(to_double(sum) - 1.0) > 1e-12)
                throw std::invalid_argument("joint: mass does not sum to 1 within 1e-12");
        }
        strides_.resize(axes_.size());
        std::uint64_t s = 1;
        for (std::size_t i = axes_.size(); i-- > 0;) {
            strides_[i] = s;
            s *= axes_[i].size;
        }
    }

    static JointDist from_dist(const std::string& name, const Dist<S>& d) {
        return JointDist({{name, d.domain_size()}}, d.mass());
    }

    static JointDist uniform(std::vector<Axis> axes) {
        std::uint64_t total = 1;
        for (const auto& a : axes) total *= a.size;
        return JointDist(std::move(axes),
                         std::vector<S>(total, frac<S>(1, static_cast<long>(total))));
    }

    // Independent product of named factors, in the given order.
    static JointDist product(const std::vector<std::pair<std::string, Dist<S>>>& factors) {
        if (factors.empty()) throw std::invalid_argument("joint: empty product");
        std::vector<Axis> axes;
        std::uint64_t total = 1;
        for (const auto& [name, d] : factors) {
            axes.push_back({name, d.domain_size()});
            total *= d.domain_size();
        }
        std::vector<S> mass(total);
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            S m = scalar_traits<S>::from_int(1);
            std::uint64_t rest = idx;
            for (std::size_t i = factors.size(); i-- > 0;) {
                std::uint32_t v = rest % factors[i].second.domain_size();
                rest /= factors[i].second.domain_size();
                m *= factors[i].second[v];
            }
            mass[idx] = m;
        }
        return JointDist(std::move(axes), std::move(mass));
    }

    static JointDist iid_power(const Dist<S>& d, std::uint32_t t,
                               const std::string& prefix = "X") {
        if (t == 0) throw std::invalid_argument("joint: iid power with t = 0");
        std::vector<std::pair<std::string, Dist<S>>> factors;
        for (std::uint32_t i = 1; i <= t; ++i)
            factors.emplace_back(prefix + std::to_string(i), d);
        return product(factors);
    }

    const std::vector<Axis>& axes() const { return axes_; }
    const std::vector<S>& mass() const { return mass_; }
    std::uint64_t size() const { return mass_.size(); }

    std::size_t axis_index(const std::string& name) const {
        for (std::size_t i = 0; i < axes_.size(); ++i)
            if (axes_[i].name == name) return i;
        throw std::invalid_argument("joint: no axis named " + name);
    }

    std::uint32_t coord(std::uint64_t cell, std::size_t axis) const {
        return static_cast<std::uint32_t>(cell / strides_[axis] % axes_[axis].size);
    }

    // Marginal over the named axes, kept in their original joint order.
    JointDist marginal(const std::vector<std::string>& names) const {
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < axes_.size(); ++i)
            for (const auto& n : names)
                if (axes_[i].name == n) keep.push_back(i);
        if (keep.size() != names.size())
            throw std::invalid_argument("joint: marginal axis not found or repeated");
        std::vector<Axis> out_axes;
        std::uint64_t out_total = 1;
        for (std::size_t i : keep) {
            out_axes.push_back(axes_[i]);
            out_total *= axes_[i].size;
        }
        std::vector<S> out(out_total, scalar_traits<S>::from_int(0));
        for (std::uint64_t cell = 0; cell < mass_.size(); ++cell) {
            std::uint64_t idx = 0;
            for (std::size_t i : keep) idx = idx * axes_[i].size + coord(cell, i);
            out[idx] += mass_[cell];
        }
        return JointDist(std::move(out_axes), std::move(out));
    }

    // Condition on axis == value; the axis is removed.  Conditioning on a
    // zero-probability event is an error, never silently renormalized.
    JointDist condition(const std::string& name, std::uint32_t value) const {
        std::size_t ax = axis_index(name);
        if (value >= axes_[ax].size) throw std::invalid_argument("joint: condition value out of range");
        S w = scalar_traits<S>::from_int(0);
        for (std::uint64_t cell = 0; cell < mass_.size(); ++cell)
            if (coord(cell, ax) == value) w += mass_[cell];
        if (!(w > scalar_traits<S>::from_int(0)))
            throw std::domain_error("joint: conditioning on zero-probability event");
        std::vector<Axis> out_axes;
        for (std::size_t i = 0; i < axes_.size(); ++i)
            if (i != ax) out_axes.push_back(axes_[i]);
        std::vector<S> out;
        out.reserve(mass_.size() / axes_[ax].size);
        for (std::uint64_t cell = 0; cell < mass_.size(); ++cell)
            if (coord(cell, ax) == value) out.push_back(mass_[cell] / w);
        return JointDist(std::move(out_axes), std::move(out));
    }

    Dist<S> flatten() const {
        return Dist<S>(static_cast<std::uint32_t>(mass_.size()), mass_);
    }

  private:
    std::vector<Axis> axes_;
    std::vector<S> mass_;
    std::vector<std::uint64_t> strides_;
};

template <class S>
S cp(const JointDist<S>& j) {
    S acc = scalar_traits<S>::from_int(0);
    for (const S& m : j.mass()) acc += m * m;
    return acc;
}

template <class S>
S stat_dist(const JointDist<S>& a, const JointDist<S>& b) {
    if (!(a.axes() == b.axes())) throw std::invalid_argument("stat_dist: axis mismatch");
    S acc = scalar_traits<S>::from_int(0);
    for (std::uint64_t i = 0; i < a.size(); ++i) {
        S diff = a.mass()[i] - b.mass()[i];
        if (diff < scalar_traits<S>::from_int(0)) diff = -diff;
        acc += diff;
    }
    return acc / scalar_traits<S>::from_int(2);
}

template <class S>
double hellinger_closeness(const JointDist<S>& j) {
    double m = static_cast<double>(j.size());
    double acc = 0;
    for (const S& p : j.mass()) acc += std::sqrt(to_double(p) * m);
    return acc / m;
}

// cp(target | given-set) = E over the given marginal of cp(target | values).
template <class S>
S cond_cp(const JointDist<S>& j, const std::string& target,
          const std::vector<std::string>& given) {
    std::size_t t = j.axis_index(target);
    std::vector<std::size_t> g;
    for (const auto& name : given) {
        std::size_t i = j.axis_index(name);
        if (i == t) throw std::invalid_argument("cond_cp: target among given axes");
        g.push_back(i);
    }
    std::uint64_t gsize = 1;
    for (std::size_t i : g) gsize *= j.axes()[i].size;
    const std::uint32_t tsize = j.axes()[t].size;

    const S zero = scalar_traits<S>::from_int(0);
    std::vector<S> weight(gsize, zero);
    std::vector<S> cond(gsize * tsize, zero);
    for (std::uint64_t cell = 0; cell < j.size(); ++cell) {
        const S& m = j.mass()[cell];
        if (!(m > zero)) continue;
        std::uint64_t key = 0;
        for (std::size_t i : g) key = key * j.axes()[i].size + j.coord(cell, i);
        weight[key] += m;
        cond[key * tsize + j.coord(cell, t)] += m;
    }
    S acc = zero;
    for (std::uint64_t key = 0; key < gsize; ++key) {
        if (!(weight[key] > zero)) continue;
        S sq = zero;
        for (std::uint32_t v = 0; v < tsize; ++v) {
            const S& c = cond[key * tsize + v];
            sq += c * c;
        }
        acc += sq / weight[key];
    }
    return acc;
}

// Certified lower bound on cp of any distribution within statistical
// distance gamma of j: such a distribution keeps common mass >= 1 - gamma
// with j, so its cp is at least the water-filled minimum at that budget.
template <class S>
S min_cp_within_distance(const JointDist<S>& j, const S& gamma) {
    const S one = scalar_traits<S>::from_int(1);
    if (gamma < scalar_traits<S>::from_int(0) || !(gamma < one))
        throw std::invalid_argument("min_cp_within_distance: gamma must be in [0, 1)");
    S budget = one - gamma;
    return min_sq_mass(j.flatten(), budget).min_sq_mass;
}

}  // namespace hashlab
