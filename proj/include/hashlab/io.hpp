#pragma once

// File formats and descriptor strings.
//
// Distributions are structured JSON documents:
//   {"domain_size": 8, "mode": "exact", "mass": ["1/4", ...]}
// JointDist adds "axes": [{"name": "H", "size": 64}, ...].  Exact mode
// serializes fractions "num/den"; approximate mode decimals with 17
// significant digits.
//
// Family descriptors:  affine:q<q>:m<M> | h0:m<M>:t<t> | kwise:q<q>:m<M>:s<s>
//                      | lb:m<M>:t<t>:s<s> | random:n<N>:m<M>
// Source descriptors:  flat:n<N>:support=<comma-list> | iid:<dist-file>:t<T>
//                      | tree:<file>
// Tree files are JSON: {"domain_size": N, "t": T, "mode": ...,
//   "conditionals": [{"prefix": [..], "mass": [..]}, ...]}.

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hashlab/adversary.hpp"
#include "hashlab/source.hpp"

namespace hashlab {

template <class S>
nlohmann::ordered_json dist_to_json(const Dist<S>& d) {
    nlohmann::ordered_json j;
    j["domain_size"] = d.domain_size();
    j["mode"] = scalar_traits<S>::mode_name();
    auto arr = nlohmann::ordered_json::array();
    for (const S& m : d.mass()) arr.push_back(scalar_traits<S>::to_string(m));
    j["mass"] = arr;
    return j;
}

template <class S>
Dist<S> dist_from_json(const nlohmann::json& j) {
    if (!j.contains("domain_size") || !j.contains("mass"))
        throw std::invalid_argument("dist file: missing domain_size or mass");
    std::uint32_t n = j.at("domain_size").get<std::uint32_t>();
    std::string mode = j.value("mode", scalar_traits<S>::mode_name());
    if (mode != scalar_traits<S>::mode_name())
        throw std::invalid_argument("dist file: mode \"" + mode + "\" does not match backend");
    std::vector<S> mass;
    for (const auto& v : j.at("mass"))
        mass.push_back(scalar_traits<S>::parse(v.template get<std::string>()));
    return Dist<S>(n, std::move(mass));
}

template <class S>
nlohmann::ordered_json joint_to_json(const JointDist<S>& d) {
    nlohmann::ordered_json j;
    auto axes = nlohmann::ordered_json::array();
    for (const auto& a : d.axes()) axes.push_back({{"name", a.name}, {"size", a.size}});
    j["axes"] = axes;
    j["mode"] = scalar_traits<S>::mode_name();
    auto arr = nlohmann::ordered_json::array();
    for (const S& m : d.mass()) arr.push_back(scalar_traits<S>::to_string(m));
    j["mass"] = arr;
    return j;
}

template <class S>
JointDist<S> joint_from_json(const nlohmann::json& j) {
    std::vector<Axis> axes;
    for (const auto& a : j.at("axes"))
        axes.push_back({a.at("name").get<std::string>(), a.at("size").get<std::uint32_t>()});
    std::string mode = j.value("mode", scalar_traits<S>::mode_name());
    if (mode != scalar_traits<S>::mode_name())
        throw std::invalid_argument("joint file: mode does not match backend");
    std::vector<S> mass;
    for (const auto& v : j.at("mass"))
        mass.push_back(scalar_traits<S>::parse(v.template get<std::string>()));
    return JointDist<S>(std::move(axes), std::move(mass));
}

inline nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

inline void save_json(const std::string& path, const nlohmann::ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

inline nlohmann::ordered_json witness_to_json(const LowerBoundWitness& w) {
    nlohmann::ordered_json j;
    j["family"] = w.family;
    j["source"] = w.source;
    j["claimed_property"] = w.claimed_property;
    j["seed"] = w.seed;
    j["satisfied"] = w.satisfied;
    auto cert = nlohmann::ordered_json::object();
    for (const auto& [k, v] : w.certificate) cert[k] = v;
    j["certificate"] = cert;
    return j;
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

inline std::uint64_t parse_field_u64(const std::string& part, const std::string& prefix) {
    if (part.size() <= prefix.size() || part.compare(0, prefix.size(), prefix) != 0)
        throw std::invalid_argument("descriptor: expected " + prefix + "<int>, got " + part);
    return std::stoull(part.substr(prefix.size()));
}

}  // namespace detail

inline std::unique_ptr<HashFamily> parse_family(const std::string& descriptor) {
    auto parts = detail::split(descriptor, ':');
    const std::string& kind = parts[0];
    try {
        if (kind == "affine" && parts.size() == 3) {
            return std::make_unique<AffineFamily>(
                (std::uint32_t)detail::parse_field_u64(parts[1], "q"),
                (std::uint32_t)detail::parse_field_u64(parts[2], "m"));
        }
        if (kind == "h0" && parts.size() == 3) {
            return std::make_unique<LinearH0Family>(
                (std::uint32_t)detail::parse_field_u64(parts[1], "m"),
                (std::uint32_t)detail::parse_field_u64(parts[2], "t"));
        }
        if (kind == "kwise" && parts.size() == 4) {
            return std::make_unique<KwiseFamily>(
                (std::uint32_t)detail::parse_field_u64(parts[1], "q"),
                (std::uint32_t)detail::parse_field_u64(parts[2], "m"),
                (std::uint32_t)detail::parse_field_u64(parts[3], "s"));
        }
        if (kind == "lb" && parts.size() == 4) {
            return std::make_unique<SplitDomainFamily>(
                (std::uint32_t)detail::parse_field_u64(parts[1], "m"),
                (std::uint32_t)detail::parse_field_u64(parts[2], "t"),
                (std::uint32_t)detail::parse_field_u64(parts[3], "s"));
        }
        if (kind == "random" && parts.size() == 3) {
            return std::make_unique<TrulyRandomFamily>(
                (std::uint32_t)detail::parse_field_u64(parts[1], "n"),
                (std::uint32_t)detail::parse_field_u64(parts[2], "m"));
        }
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        throw std::invalid_argument("descriptor \"" + descriptor + "\": " + e.what());
    }
    throw std::invalid_argument("unknown family descriptor: " + descriptor);
}

inline FlatSource parse_flat_source(const std::string& descriptor) {
    auto parts = detail::split(descriptor, ':');
    if (parts.size() != 3 || parts[0] != "flat")
        throw std::invalid_argument("expected flat:n<N>:support=..., got " + descriptor);
    std::uint32_t n = (std::uint32_t)detail::parse_field_u64(parts[1], "n");
    const std::string key = "support=";
    if (parts[2].compare(0, key.size(), key) != 0)
        throw std::invalid_argument("expected support=<comma-list> in " + descriptor);
    std::vector<std::uint32_t> support;
    for (const auto& tok : detail::split(parts[2].substr(key.size()), ','))
        support.push_back((std::uint32_t)std::stoul(tok));
    std::sort(support.begin(), support.end());
    return FlatSource(n, std::move(support));
}

// Parses a source descriptor into a block source with `t_blocks` blocks
// (flat sources become iid copies; iid files carry their own t, which must
// agree with t_blocks when both are given).
template <class S>
BlockSourceTree<S> parse_block_source(const std::string& descriptor, std::uint32_t t_blocks) {
    auto parts = detail::split(descriptor, ':');
    if (parts[0] == "flat") {
        return BlockSourceTree<S>::iid(parse_flat_source(descriptor).template to_dist<S>(),
                                       t_blocks == 0 ? 1 : t_blocks);
    }
    if (parts[0] == "iid" && parts.size() == 3) {
        std::uint32_t t_file = (std::uint32_t)detail::parse_field_u64(parts[2], "t");
        if (t_blocks != 0 && t_blocks != t_file)
            throw std::invalid_argument("source t mismatch: --T says " +
                                        std::to_string(t_blocks) + ", descriptor says " +
                                        std::to_string(t_file));
        return BlockSourceTree<S>::iid(dist_from_json<S>(load_json(parts[1])), t_file);
    }
    if (parts[0] == "tree" && parts.size() == 2) {
        auto j = load_json(parts[1]);
        std::uint32_t n = j.at("domain_size").get<std::uint32_t>();
        std::uint32_t t = j.at("t").get<std::uint32_t>();
        if (t_blocks != 0 && t_blocks != t)
            throw std::invalid_argument("source t mismatch with tree file");
        std::map<std::vector<std::uint32_t>, Dist<S>> conds;
        for (const auto& c : j.at("conditionals")) {
            std::vector<std::uint32_t> prefix;
            for (const auto& v : c.at("prefix")) prefix.push_back(v.get<std::uint32_t>());
            std::vector<S> mass;
            for (const auto& v : c.at("mass"))
                mass.push_back(scalar_traits<S>::parse(v.template get<std::string>()));
            conds.emplace(std::move(prefix), Dist<S>(n, std::move(mass)));
        }
        return BlockSourceTree<S>::explicit_tree(n, t, std::move(conds));
    }
    throw std::invalid_argument("unknown source descriptor: " + descriptor);
}

template <class S>
nlohmann::ordered_json tree_to_json(const BlockSourceTree<S>& src) {
    nlohmann::ordered_json j;
    j["domain_size"] = src.domain_size();
    j["t"] = src.blocks();
    j["mode"] = scalar_traits<S>::mode_name();
    auto conds = nlohmann::ordered_json::array();
    src.for_each_prefix([&](const std::vector<std::uint32_t>& prefix, const S&) {
        nlohmann::ordered_json c;
        c["prefix"] = prefix;
        auto arr = nlohmann::ordered_json::array();
        for (const S& m : src.conditional(prefix).mass())
            arr.push_back(scalar_traits<S>::to_string(m));
        c["mass"] = arr;
        conds.push_back(std::move(c));
    });
    j["conditionals"] = conds;
    return j;
}

}  // namespace hashlab
