#pragma once

// Block sources over [N]^T and the exact joint distribution of the hashed
// sequence (H, Y_1, ..., Y_T) = (H, H(X_1), ..., H(X_T)).
//
// A BlockSourceTree stores one conditional distribution per reachable
// prefix (sparsely; iid sources share a single conditional).  The hashed
// joint always places the hash axis first, named "H".

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hashlab/family.hpp"
#include "hashlab/joint.hpp"

namespace hashlab {

struct FlatSource {
    std::uint32_t domain_size = 0;
    std::vector<std::uint32_t> support;  // sorted, distinct

    FlatSource() = default;
    FlatSource(std::uint32_t n, std::vector<std::uint32_t> s)
        : domain_size(n), support(std::move(s)) {
        if (support.empty()) throw std::invalid_argument("flat source: empty support");
        for (std::size_t i = 0; i < support.size(); ++i) {
            if (support[i] >= n) throw std::invalid_argument("flat source: point outside domain");
            if (i > 0 && support[i] <= support[i - 1])
                throw std::invalid_argument("flat source: support not sorted distinct");
        }
    }

    template <class S>
    Dist<S> to_dist() const {
        return Dist<S>::flat(domain_size, support);
    }
};

template <class S>
class BlockSourceTree {
  public:
    using Prefix = std::vector<std::uint32_t>;

    // iid source: every conditional equals d
    static BlockSourceTree iid(const Dist<S>& d, std::uint32_t t) {
        if (t == 0) throw std::invalid_argument("source: t must be >= 1");
        BlockSourceTree src;
        src.domain_size_ = d.domain_size();
        src.blocks_ = t;
        src.iid_base_.push_back(d);
        return src;
    }

    // explicit tree: conditionals for every reachable prefix
    static BlockSourceTree explicit_tree(std::uint32_t domain_size, std::uint32_t t,
                                         std::map<Prefix, Dist<S>> conditionals) {
        if (t == 0) throw std::invalid_argument("source: t must be >= 1");
        BlockSourceTree src;
        src.domain_size_ = domain_size;
        src.blocks_ = t;
        src.conditionals_ = std::move(conditionals);
        src.check_reachable({}, 0);
        return src;
    }

    std::uint32_t domain_size() const { return domain_size_; }
    std::uint32_t blocks() const { return blocks_; }
    bool is_iid() const { return !iid_base_.empty(); }

    const Dist<S>& conditional(const Prefix& prefix) const {
        if (prefix.size() >= blocks_) throw std::invalid_argument("source: prefix too long");
        if (is_iid()) return iid_base_.front();
        auto it = conditionals_.find(prefix);
        if (it == conditionals_.end())
            throw std::invalid_argument("source: no conditional stored for prefix");
        return it->second;
    }

    // Visit every positive-probability sequence with its exact probability.
    template <class Visit>
    void for_each_sequence(Visit&& visit) const {
        Prefix seq;
        walk(seq, scalar_traits<S>::from_int(1), visit);
    }

    // Visit every reachable prefix (including the root, excluding full
    // sequences) with its probability.
    template <class Visit>
    void for_each_prefix(Visit&& visit) const {
        Prefix seq;
        walk_prefixes(seq, scalar_traits<S>::from_int(1), visit);
    }

    JointDist<S> joint(const std::string& prefix_name = "X") const {
        std::vector<Axis> axes;
        for (std::uint32_t i = 1; i <= blocks_; ++i)
            axes.push_back({prefix_name + std::to_string(i), domain_size_});
        std::uint64_t total = 1;
        for (const auto& a : axes) total *= a.size;
        if (total > (1ull << 24)) throw guard_error("source: joint exceeds 2^24 cells");
        std::vector<S> mass(total, scalar_traits<S>::from_int(0));
        for_each_sequence([&](const Prefix& seq, const S& p) {
            std::uint64_t idx = 0;
            for (std::uint32_t v : seq) idx = idx * domain_size_ + v;
            mass[idx] += p;
        });
        return JointDist<S>(std::move(axes), std::move(mass));
    }

  private:
    template <class Visit>
    void walk(Prefix& seq, const S& p, Visit&& visit) const {
        if (seq.size() == blocks_) {
            visit(const_cast<const Prefix&>(seq), p);
            return;
        }
        const Dist<S>& d = conditional(seq);
        for (std::uint32_t v = 0; v < domain_size_; ++v) {
            if (!(d[v] > scalar_traits<S>::from_int(0))) continue;
            seq.push_back(v);
            walk(seq, S(p * d[v]), visit);
            seq.pop_back();
        }
    }

    template <class Visit>
    void walk_prefixes(Prefix& seq, const S& p, Visit&& visit) const {
        visit(const_cast<const Prefix&>(seq), p);
        if (seq.size() + 1 == blocks_) return;
        const Dist<S>& d = conditional(seq);
        for (std::uint32_t v = 0; v < domain_size_; ++v) {
            if (!(d[v] > scalar_traits<S>::from_int(0))) continue;
            seq.push_back(v);
            walk_prefixes(seq, S(p * d[v]), visit);
            seq.pop_back();
        }
    }

    void check_reachable(Prefix prefix, std::uint32_t depth) {
        auto it = conditionals_.find(prefix);
        if (it == conditionals_.end())
            throw std::invalid_argument("source: missing conditional for a reachable prefix");
        if (it->second.domain_size() != domain_size_)
            throw std::invalid_argument("source: conditional domain mismatch");
        if (depth + 1 == blocks_) return;
        for (std::uint32_t v = 0; v < domain_size_; ++v) {
            if (!(it->second[v] > scalar_traits<S>::from_int(0))) continue;
            prefix.push_back(v);
            check_reachable(prefix, depth + 1);
            prefix.pop_back();
        }
    }

    std::uint32_t domain_size_ = 0;
    std::uint32_t blocks_ = 0;
    std::vector<Dist<S>> iid_base_;  // size 1 when iid
    std::map<Prefix, Dist<S>> conditionals_;
};

template <class S>
struct BlockValidation {
    bool ok = false;
    std::vector<std::uint32_t> worst_prefix;
    S worst_cp{};
};

// Block K-source check: cp(X_i | X_{<i} = x_{<i}) <= 1/K for every
// reachable prefix, exactly.
template <class S>
BlockValidation<S> validate_block_k_source(const BlockSourceTree<S>& src, std::uint64_t k) {
    if (k == 0) throw std::invalid_argument("validate: K must be >= 1");
    BlockValidation<S> out;
    out.worst_cp = scalar_traits<S>::from_int(0);
    bool first = true;
    if (src.is_iid()) {
        out.worst_cp = cp(src.conditional({}));
        out.worst_prefix = {};
        first = false;
    } else {
        src.for_each_prefix([&](const std::vector<std::uint32_t>& prefix, const S&) {
            S c = cp(src.conditional(prefix));
            if (first || c > out.worst_cp) {
                out.worst_cp = c;
                out.worst_prefix = prefix;
                first = false;
            }
        });
    }
    S bound = frac<S>(1, static_cast<long>(k));
    out.ok = !(out.worst_cp > bound);
    return out;
}

// Per-hash-function distributions of (h(X_1), ..., h(X_T)) as flat vectors
// over [M]^T (row-major, block 1 slowest).  Each slice sums to exactly 1.
template <class S>
std::vector<std::vector<S>> hashed_slices(const HashFamily& f, const BlockSourceTree<S>& src,
                                          std::uint64_t guard_cells = (1ull << 24)) {
    if (f.domain_size() != src.domain_size())
        throw std::invalid_argument("hashed: family/source domain mismatch");
    std::uint64_t cells_per_h = 1;
    for (std::uint32_t i = 0; i < src.blocks(); ++i) cells_per_h *= f.range_size();
    if (f.family_size() * cells_per_h > guard_cells)
        throw guard_error("hashed: joint exceeds the cell guard");

    std::vector<std::vector<S>> slices(
        f.family_size(), std::vector<S>(cells_per_h, scalar_traits<S>::from_int(0)));
    if (src.is_iid()) {
        // blocks are iid given h, so each slice is the tensor power of the
        // single-block image
        const Dist<S>& base = src.conditional({});
        std::vector<S> image(f.range_size());
        for (std::uint64_t h = 0; h < f.family_size(); ++h) {
            std::fill(image.begin(), image.end(), scalar_traits<S>::from_int(0));
            for (std::uint32_t v = 0; v < f.domain_size(); ++v)
                if (base[v] > scalar_traits<S>::from_int(0)) image[f.eval(h, v)] += base[v];
            for (std::uint64_t idx = 0; idx < cells_per_h; ++idx) {
                S m = scalar_traits<S>::from_int(1);
                std::uint64_t rest = idx;
                for (std::uint32_t i = 0; i < src.blocks(); ++i) {
                    m *= image[rest % f.range_size()];
                    rest /= f.range_size();
                }
                slices[h][idx] = m;
            }
        }
        return slices;
    }
    src.for_each_sequence([&](const std::vector<std::uint32_t>& seq, const S& p) {
        for (std::uint64_t h = 0; h < f.family_size(); ++h) {
            std::uint64_t idx = 0;
            for (std::uint32_t v : seq) idx = idx * f.range_size() + f.eval(h, v);
            slices[h][idx] += p;
        }
    });
    return slices;
}

template <class S>
JointDist<S> joint_from_slices(const HashFamily& f, std::uint32_t blocks,
                               const std::vector<std::vector<S>>& slices) {
    std::vector<Axis> axes{{"H", static_cast<std::uint32_t>(f.family_size())}};
    for (std::uint32_t i = 1; i <= blocks; ++i)
        axes.push_back({"Y" + std::to_string(i), f.range_size()});
    std::vector<S> mass;
    mass.reserve(slices.size() * slices.front().size());
    S inv_h = frac<S>(1, static_cast<long>(f.family_size()));
    for (const auto& slice : slices)
        for (const S& m : slice) mass.push_back(m * inv_h);
    return JointDist<S>(std::move(axes), std::move(mass));
}

// Exact joint of (H, Y_1, ..., Y_T); the marginal on H is exactly uniform.
template <class S>
JointDist<S> hashed_joint(const HashFamily& f, const BlockSourceTree<S>& src,
                          std::uint64_t guard_cells = (1ull << 24)) {
    return joint_from_slices(f, src.blocks(), hashed_slices(f, src, guard_cells));
}

// Distribution of (h(X_1), ..., h(X_T)) for one fixed hash function.
template <class S>
JointDist<S> hashed_given_h(const HashFamily& f, std::uint64_t h_index,
                            const BlockSourceTree<S>& src,
                            std::uint64_t guard_cells = (1ull << 24)) {
    if (h_index >= f.family_size()) throw std::invalid_argument("hashed: index out of range");
    if (f.domain_size() != src.domain_size())
        throw std::invalid_argument("hashed: family/source domain mismatch");
    std::uint64_t cells = 1;
    for (std::uint32_t i = 0; i < src.blocks(); ++i) cells *= f.range_size();
    if (cells > guard_cells) throw guard_error("hashed: joint exceeds the cell guard");
    std::vector<S> mass(cells, scalar_traits<S>::from_int(0));
    src.for_each_sequence([&](const std::vector<std::uint32_t>& seq, const S& p) {
        std::uint64_t idx = 0;
        for (std::uint32_t v : seq) idx = idx * f.range_size() + f.eval(h_index, v);
        mass[idx] += p;
    });
    std::vector<Axis> axes;
    for (std::uint32_t i = 1; i <= src.blocks(); ++i)
        axes.push_back({"Y" + std::to_string(i), f.range_size()});
    return JointDist<S>(std::move(axes), std::move(mass));
}

}  // namespace hashlab
