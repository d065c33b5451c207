// hashlab: batch runner for every bound check and lower-bound witness.
//
// Exit codes: 0 all asserted bounds satisfied, 2 some bound unsatisfied
// (reports still written), 1 usage, guard, or validation errors.
//
// Data outputs are deterministic for a fixed config: exact fraction
// strings, fixed row order, no timestamps.  Timings go to <out>.meta.json.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hashlab/io.hpp"
#include "hashlab/selftest.hpp"

using namespace hashlab;

namespace {

struct Options {
    std::string family;
    std::string source;
    std::uint64_t k = 0;
    std::uint32_t blocks = 0;   // --T
    std::string eps, alpha, delta, beta, target, single_eps, level;
    std::uint32_t m = 0, t = 0, s = 0, n = 0, tset = 0, tmax = 8;
    std::uint64_t trials = 100;
    std::uint64_t seed = 1;
    std::string mode = "exact";
    std::string out;
    std::string format = "csv";
    std::uint64_t guard_cells = 1ull << 24;
};

template <class S>
S parse_scalar(const std::string& text, const char* what) {
    if (text.empty()) throw std::invalid_argument(std::string("missing --") + what);
    return scalar_traits<S>::parse(text);
}

// One check dispatch; returns rows and whether every asserted bound held.
template <class S>
std::pair<std::vector<ReportRow>, bool> run_check(const std::string& name, const Options& o) {
    std::vector<ReportRow> rows;
    bool ok = true;
    auto family = [&]() { return parse_family(o.family); };
    // blocks = 0 means "take T from the descriptor" (flat defaults to 1)
    auto source = [&](std::uint32_t) { return parse_block_source<S>(o.source, o.blocks); };

    if (name == "lhl") {
        auto f = family();
        auto src = source(1);
        if (src.blocks() != 1) throw std::invalid_argument("lhl: source must have one block");
        auto r = lhl_check(*f, src.conditional({}), o.k);
        ok = r.satisfied;
        rows.push_back(std::move(r.row));
    } else if (name == "condchain") {
        auto f = family();
        auto r = cond_cp_chain_check(*f, source(1), o.k, o.guard_cells);
        ok = r.satisfied;
        rows.push_back(std::move(r.row));
    } else if (name == "markov") {
        auto f = family();
        auto r = markov_tail(*f, source(1), o.k, parse_scalar<S>(o.eps, "eps"), o.guard_cells);
        ok = r.satisfied;
        rows.push_back(std::move(r.row));
    } else if (name == "thm2cp") {
        auto f = family();
        auto r = thm_2univ_cp_check(*f, source(1), o.k, parse_scalar<S>(o.eps, "eps"),
                                    o.guard_cells);
        ok = r.satisfied;
        rows.push_back(std::move(r.row));
    } else if (name == "thm4cp") {
        auto f = family();
        auto r = thm_4wise_cp_check(*f, source(1), o.k, parse_scalar<S>(o.eps, "eps"),
                                    o.guard_cells);
        ok = r.satisfied;
        rows.push_back(std::move(r.row));
    } else if (name == "thm2stat") {
        auto f = family();
        auto r = thm_2univ_stat_check(*f, source(1), o.k, parse_scalar<S>(o.eps, "eps"),
                                      o.guard_cells);
        ok = r.satisfied;
        rows.push_back(std::move(r.row));
    } else if (name == "variance4") {
        auto f = family();
        auto src = source(1);
        if (src.blocks() != 1) throw std::invalid_argument("variance4: source must have one block");
        auto r = fourwise_variance_check(*f, src.conditional({}), o.k);
        ok = r.satisfied;
        rows.push_back(std::move(r.row));
    } else if (name == "closeness") {
        auto src = source(1);
        auto joint = src.joint();
        std::vector<S> alphas;
        for (const auto& tok : detail::split(o.alpha, ','))
            alphas.push_back(scalar_traits<S>::parse(tok));
        auto r = closeness_chain_check(joint, alphas);
        ok = r.satisfied;
        rows.push_back(std::move(r.row));
    } else if (name == "prodsmall") {
        // the pair under test is (source, uniform) on the same domain
        auto src = source(1);
        Dist<S> x = src.conditional({});
        Dist<S> u = Dist<S>::uniform(x.domain_size());
        auto table = product_growth_small(x, u, o.tmax, o.guard_cells);
        for (auto& row : table.rows) {
            ok = ok && row.satisfied;
            rows.push_back(std::move(row));
        }
    } else if (name == "prodlarge") {
        auto r = product_growth_large(parse_scalar<S>(o.eps, "eps"),
                                      o.blocks ? o.blocks : o.tmax);
        ok = r.satisfied;
        rows.push_back(std::move(r.row));
    } else if (name == "hypergeom") {
        if constexpr (scalar_traits<S>::exact) {
            std::optional<Rational> l_override;
            if (!o.level.empty()) l_override = scalar_traits<Rational>::parse(o.level);
            auto r = hypergeom_claim_check(o.n, (std::uint32_t)o.k, o.tset,
                                           parse_scalar<Rational>(o.beta, "beta"), l_override);
            ok = r.satisfied;
            rows.push_back(std::move(r.row));
        } else {
            throw std::invalid_argument("hypergeom: exact mode only");
        }
    } else {
        throw std::invalid_argument("unknown check: " + name);
    }
    return {std::move(rows), ok};
}

std::pair<std::vector<ReportRow>, bool> run_witness(const std::string& name, const Options& o,
                                                    std::optional<nlohmann::ordered_json>& wit) {
    using R = Rational;
    std::vector<ReportRow> rows;
    bool ok = true;
    if (name == "flatsearch") {
        auto f = parse_family(o.family);
        R eps = parse_scalar<R>(o.eps, "eps");
        auto r = search_flat_source<R>(*f, (std::uint32_t)o.k, eps, o.trials, o.seed);
        R target = o.target.empty() ? R(0) : parse_scalar<R>(o.target, "target");
        ok = !(r.best_fraction < target);
        std::string support;
        for (std::size_t i = 0; i < r.best.support.size(); ++i)
            support += (i ? "," : "") + std::to_string(r.best.support[i]);
        rows.push_back({"flatsearch",
                        {{"family", o.family},
                         {"k", std::to_string(o.k)},
                         {"eps", fmt(eps)},
                         {"trials", std::to_string(o.trials)},
                         {"seed", std::to_string(o.seed)}},
                        fmt(r.best_fraction),
                        ">=",
                        fmt(target),
                        ok,
                        {{"support", support}}});
        LowerBoundWitness w{o.family,
                            "flat:n" + std::to_string(f->domain_size()) + ":support=" + support,
                            "flat_search",
                            o.seed,
                            ok,
                            {{"fraction_far", fmt(r.best_fraction)}, {"eps", fmt(eps)}}};
        wit = witness_to_json(w);
    } else if (name == "lbstat") {
        auto f = parse_family(o.family);
        R single = o.single_eps.empty() ? parse_scalar<R>(o.eps, "eps")
                                        : parse_scalar<R>(o.single_eps, "single-eps");
        R target = o.target.empty() ? R(0) : parse_scalar<R>(o.target, "target");
        auto r = lb_stat_witness<R>(*f, (std::uint32_t)o.k, single, target,
                                    o.blocks ? o.blocks : 2, o.trials, o.seed, o.guard_cells);
        ok = r.witness.satisfied;
        rows.push_back({"lbstat",
                        {{"family", o.family},
                         {"k", std::to_string(o.k)},
                         {"t", std::to_string(o.blocks ? o.blocks : 2)},
                         {"seed", std::to_string(o.seed)}},
                        fmt(r.measured_farness),
                        ">=",
                        fmt(target),
                        ok,
                        {{"fraction_far", fmt(r.search.best_fraction)},
                         {"per_h_average", fmt(r.per_h_average)}}});
        wit = witness_to_json(r.witness);
    } else if (name == "lb2univ") {
        R alpha = o.alpha.empty() ? R(100) : parse_scalar<R>(o.alpha, "alpha");
        auto r = lb_2univ_witness<R>(o.m, o.t, o.s, o.blocks ? o.blocks : 3, alpha,
                                     o.guard_cells);
        ok = r.witness.satisfied;
        rows.push_back({"lb2univ",
                        {{"m", std::to_string(o.m)},
                         {"t", std::to_string(o.t)},
                         {"s", std::to_string(o.s)},
                         {"T", std::to_string(o.blocks ? o.blocks : 3)}},
                        fmt(r.bad_fraction),
                        "==",
                        "bad fraction (1-1/M^t)(s/M^t)",
                        ok,
                        {{"bad_cp", fmt(r.bad_cp)},
                         {"farness_gamma", fmt(r.farness_gamma)}}});
        wit = witness_to_json(r.witness);
    } else if (name == "lbnoh") {
        auto f = parse_family(o.family);
        R single = o.single_eps.empty() ? parse_scalar<R>(o.eps, "eps")
                                        : parse_scalar<R>(o.single_eps, "single-eps");
        R alpha = o.alpha.empty() ? R(100) : parse_scalar<R>(o.alpha, "alpha");
        auto r = lb_no_h_witness<R>(*f, (std::uint32_t)o.k, single, o.blocks ? o.blocks : 2,
                                    alpha, o.trials, o.seed, o.guard_cells);
        ok = r.witness.satisfied;
        rows.push_back({"lbnoh",
                        {{"family", o.family},
                         {"k", std::to_string(o.k)},
                         {"t", std::to_string(o.blocks ? o.blocks : 2)},
                         {"alpha", fmt(alpha)},
                         {"seed", std::to_string(o.seed)}},
                        fmt(r.gamma_marginal),
                        ">",
                        "0",
                        ok,
                        {{"gamma_joint", fmt(r.gamma_joint)}}});
        wit = witness_to_json(r.witness);
    } else if (name == "supportcount") {
        auto f = parse_family(o.family);
        R alpha = o.alpha.empty() ? R(100) : parse_scalar<R>(o.alpha, "alpha");
        R delta = o.delta.empty() ? R(1, 2) : parse_scalar<R>(o.delta, "delta");
        auto r = support_counting_bound<R>(*f, (std::uint32_t)o.k, o.blocks ? o.blocks : 2,
                                           alpha, delta, o.guard_cells);
        ok = r.row.satisfied;
        rows.push_back(r.row);
    } else {
        throw std::invalid_argument("unknown witness: " + name);
    }
    return {std::move(rows), ok};
}

// Cross-product sweep over comma-separated flag values, rows emitted in
// lexicographic grid order (axes sorted by flag name, values in given
// order).
std::pair<std::vector<ReportRow>, bool> run_sweep(
    const std::string& name, const Options& base,
    const std::map<std::string, std::vector<std::string>>& lists) {
    if (name == "hypergeom" && lists.empty()) {
        auto sweep = hypergeom_sweep();
        std::vector<ReportRow> rows;
        bool ok = true;
        for (auto& c : sweep.cells) {
            ok = ok && c.satisfied;
            rows.push_back(c.row);
        }
        rows.push_back({"hypergeom_max_ratio",
                        {{"cells", std::to_string(sweep.cells.size())}},
                        fmt(sweep.max_ratio),
                        "==",
                        fmt(derived_constants::hypergeom_cpp()),
                        sweep.max_ratio == derived_constants::hypergeom_cpp(),
                        {}});
        ok = ok && rows.back().satisfied;
        return {std::move(rows), ok};
    }
    if (name == "prodsmall" && lists.empty()) {
        using R = Rational;
        std::vector<ReportRow> rows;
        R min_ratio_sq(-1);
        for (int j = 1; j <= 8; ++j) {
            R eps(j, 16);
            eps.canonicalize();
            Dist<R> x(2, {R(frac<R>(1, 2) - eps), R(frac<R>(1, 2) + eps)});
            Dist<R> u = Dist<R>::uniform(2);
            for (std::uint32_t t = 1; t <= 16; ++t) {
                R delta = product_stat_dist(x, u, t);
                ReportRow row{"growth_cell",
                              {{"eps", fmt(eps)}, {"t", std::to_string(t)}},
                              fmt(delta),
                              "",
                              "",
                              true,
                              {}};
                if (!(delta > frac<R>(3, 10))) {
                    R rsq = (delta / eps) * (delta / eps) / R((long)t);
                    row.extras.emplace_back("ratio_sq", fmt(rsq));
                    if (min_ratio_sq < 0 || rsq < min_ratio_sq) min_ratio_sq = rsq;
                }
                rows.push_back(std::move(row));
            }
        }
        rows.push_back({"growth_c0_sq",
                        {},
                        fmt(min_ratio_sq),
                        "==",
                        fmt(derived_constants::growth_c0_sq()),
                        min_ratio_sq == derived_constants::growth_c0_sq(),
                        {}});
        return {std::move(rows), rows.back().satisfied};
    }

    // general grid: vary the listed flags over their comma-separated values
    std::vector<std::pair<std::string, std::vector<std::string>>> axes(lists.begin(),
                                                                       lists.end());
    std::vector<ReportRow> rows;
    bool ok = true;
    std::vector<std::size_t> idx(axes.size(), 0);
    bool empty = false;
    for (const auto& [_, vals] : axes)
        if (vals.empty()) empty = true;
    if (!empty) {
        for (;;) {
            Options o = base;
            KV cell;
            for (std::size_t i = 0; i < axes.size(); ++i) {
                const std::string& key = axes[i].first;
                const std::string& val = axes[i].second[idx[i]];
                cell.emplace_back(key, val);
                if (key == "k") o.k = std::stoull(val);
                else if (key == "T") o.blocks = (std::uint32_t)std::stoul(val);
                else if (key == "eps") o.eps = val;
                else if (key == "alpha") o.alpha = val;
                else if (key == "delta") o.delta = val;
                else if (key == "beta") o.beta = val;
                else if (key == "n") o.n = (std::uint32_t)std::stoul(val);
                else if (key == "tset") o.tset = (std::uint32_t)std::stoul(val);
                else if (key == "family") o.family = val;
                else if (key == "source") o.source = val;
                else throw std::invalid_argument("sweep: cannot vary --" + key);
            }
            auto [cell_rows, cell_ok] = base.mode == "approximate"
                                            ? run_check<double>(name, o)
                                            : run_check<Rational>(name, o);
            ok = ok && cell_ok;
            for (auto& r : cell_rows) {
                for (const auto& kv : cell) r.extras.emplace_back("grid_" + kv.first, kv.second);
                rows.push_back(std::move(r));
            }
            std::size_t i = axes.size();
            while (i-- > 0) {
                if (++idx[i] < axes[i].second.size()) break;
                idx[i] = 0;
                if (i == 0) {
                    i = SIZE_MAX;
                    break;
                }
            }
            if (i == SIZE_MAX) break;
        }
    }
    return {std::move(rows), ok};
}

void emit(const Options& o, const std::vector<ReportRow>& rows,
          const std::optional<nlohmann::ordered_json>& witness, double runtime_ms) {
    if (o.out.empty()) {
        if (witness) {
            std::cout << witness->dump(2) << "\n";
        } else if (o.format == "json") {
            nlohmann::ordered_json arr = nlohmann::ordered_json::array();
            for (const auto& r : rows) arr.push_back(to_json(r));
            std::cout << arr.dump(2) << "\n";
        } else {
            std::cout << csv_header() << "\n";
            for (const auto& r : rows) std::cout << to_csv(r) << "\n";
        }
        return;
    }
    if (witness) {
        save_json(o.out, *witness);
    } else if (o.format == "json") {
        write_rows_json(o.out, rows);
    } else {
        write_rows_csv(o.out, rows);
    }
    nlohmann::ordered_json meta;
    meta["runtime_ms"] = runtime_ms;
    meta["mode"] = o.mode;
    meta["seed"] = o.seed;
    save_json(o.out + ".meta.json", meta);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact block-source hashing laboratory"};
    app.require_subcommand(1);
    Options o;

    std::string check_name, witness_name, sweep_name;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--family", o.family, "family descriptor");
        cmd->add_option("--source", o.source, "source descriptor");
        cmd->add_option("--k", o.k, "entropy parameter K");
        cmd->add_option("--T", o.blocks, "number of blocks");
        cmd->add_option("--eps", o.eps, "epsilon (fraction or decimal)");
        cmd->add_option("--alpha", o.alpha, "alpha (fraction; comma list for closeness)");
        cmd->add_option("--delta", o.delta, "delta");
        cmd->add_option("--beta", o.beta, "beta");
        cmd->add_option("--L", o.level, "hypergeometric L override");
        cmd->add_option("--n", o.n, "hypergeometric N");
        cmd->add_option("--tset", o.tset, "hypergeometric |T|");
        cmd->add_option("--m", o.m, "range size M");
        cmd->add_option("--t", o.t, "field extension degree t");
        cmd->add_option("--s", o.s, "sub-domain count s");
        cmd->add_option("--tmax", o.tmax, "largest product power");
        cmd->add_option("--trials", o.trials, "search trials");
        cmd->add_option("--target", o.target, "witness target");
        cmd->add_option("--single-eps", o.single_eps, "per-block farness for searches");
        cmd->add_option("--seed", o.seed, "64-bit seed");
        cmd->add_option("--mode", o.mode, "exact|approximate");
        cmd->add_option("--out", o.out, "output path");
        cmd->add_option("--format", o.format, "csv|json");
        cmd->add_option("--guard-cells", o.guard_cells, "exact joint cell guard");
    };

    auto* check = app.add_subcommand("check", "run one bound check");
    check->add_option("name", check_name, "check name")->required();
    add_common(check);
    auto* witness = app.add_subcommand("witness", "build a lower-bound witness");
    witness->add_option("name", witness_name, "witness name")->required();
    add_common(witness);
    auto* sweep = app.add_subcommand("sweep", "cross-product sweep of a check");
    sweep->add_option("name", sweep_name, "check name")->required();
    std::vector<std::string> grid_specs;
    sweep->add_option("--grid", grid_specs, "grid axis as key=v1,v2,...");
    add_common(sweep);
    auto* selftest = app.add_subcommand("selftest", "run the full acceptance suite");
    add_common(selftest);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    if (o.mode != "exact" && o.mode != "approximate") {
        std::fprintf(stderr, "error: --mode must be exact or approximate\n");
        return 1;
    }
    if (o.format != "csv" && o.format != "json") {
        std::fprintf(stderr, "error: --format must be csv or json\n");
        return 1;
    }

    auto started = std::chrono::steady_clock::now();
    try {
        std::vector<ReportRow> rows;
        bool ok = true;
        std::optional<nlohmann::ordered_json> wit;
        if (check->parsed()) {
            std::tie(rows, ok) = o.mode == "approximate" ? run_check<double>(check_name, o)
                                                         : run_check<Rational>(check_name, o);
        } else if (witness->parsed()) {
            if (o.mode == "approximate")
                throw std::invalid_argument("witnesses require exact mode");
            std::tie(rows, ok) = run_witness(witness_name, o, wit);
        } else if (sweep->parsed()) {
            std::map<std::string, std::vector<std::string>> lists;
            for (const auto& spec : grid_specs) {
                auto pos = spec.find('=');
                if (pos == std::string::npos)
                    throw std::invalid_argument("grid spec must be key=v1,v2,...");
                std::string key = spec.substr(0, pos);
                std::string vals = spec.substr(pos + 1);
                std::vector<std::string> items;
                if (!vals.empty())
                    for (const auto& v : hashlab::detail::split(vals, ','))
                        items.push_back(v);
                lists[key] = items;
            }
            std::tie(rows, ok) = run_sweep(sweep_name, o, lists);
        } else if (selftest->parsed()) {
            auto outcomes = run_acceptance(o.seed);
            for (const auto& c : outcomes) {
                ok = ok && c.pass;
                std::fprintf(stderr, "criterion %2d %-24s %s\n", c.id, c.slug.c_str(),
                             c.pass ? "PASS" : "FAIL");
            }
            if (!o.out.empty()) {
                std::filesystem::create_directories(o.out);
                write_acceptance_files(outcomes, o.out, o.format);
                double ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - started)
                                .count();
                nlohmann::ordered_json meta;
                meta["runtime_ms"] = ms;
                meta["seed"] = o.seed;
                save_json(o.out + "/metadata.json", meta);
            }
            return ok ? 0 : 2;
        }
        double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                              started)
                        .count();
        emit(o, rows, wit, ms);
        return ok ? 0 : 2;
    } catch (const guard_error& e) {
        std::fprintf(stderr, "guard: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
