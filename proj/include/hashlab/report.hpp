#pragma once

// Uniform reporting of bound checks.  Data rows are fully deterministic
// (exact fraction strings, fixed column and key order, no timestamps);
// timings belong in a separate metadata file, never in data rows.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hashlab/rational.hpp"

namespace hashlab {

using KV = std::vector<std::pair<std::string, std::string>>;

template <class S>
std::string fmt(const S& v) {
    return scalar_traits<S>::to_string(v);
}

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct ReportRow {
    std::string claim;
    KV params;
    std::string measured;
    std::string direction;  // how measured relates to bound when satisfied
    std::string bound;
    bool satisfied = false;
    KV extras;
};

inline std::string join_kv(const KV& kv) {
    std::string out;
    for (std::size_t i = 0; i < kv.size(); ++i) {
        if (i) out += ';';
        out += kv[i].first + "=" + kv[i].second;
    }
    return out;
}

inline const char* csv_header() { return "claim,params,measured,direction,bound,satisfied,extras"; }

inline std::string to_csv(const ReportRow& r) {
    std::ostringstream os;
    os << r.claim << ',' << join_kv(r.params) << ',' << r.measured << ',' << r.direction << ','
       << r.bound << ',' << (r.satisfied ? "true" : "false") << ',' << join_kv(r.extras);
    return os.str();
}

inline nlohmann::ordered_json to_json(const ReportRow& r) {
    nlohmann::ordered_json j;
    j["claim"] = r.claim;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.params) params[k] = v;
    j["params"] = params;
    j["measured"] = r.measured;
    j["direction"] = r.direction;
    j["bound"] = r.bound;
    j["satisfied"] = r.satisfied;
    nlohmann::ordered_json extras = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.extras) extras[k] = v;
    j["extras"] = extras;
    return j;
}

inline void write_rows_csv(const std::string& path, const std::vector<ReportRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << csv_header() << '\n';
    for (const auto& r : rows) out << to_csv(r) << '\n';
}

inline void write_rows_json(const std::string& path, const std::vector<ReportRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) arr.push_back(to_json(r));
    out << arr.dump(2) << '\n';
}

}  // namespace hashlab
