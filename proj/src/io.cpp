#include "lpm/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>

namespace lpm {

std::string fmt_num(double x) {
    if (x == 0.0) return "0";  // folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

nlohmann::json num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

nlohmann::json to_json(const GapReport& rep) {
    nlohmann::json j;
    j["name"] = rep.name;
    j["lhs"] = num(rep.lhs);
    j["threshold"] = num(rep.threshold);
    j["margin"] = num(rep.margin);
    j["pass"] = rep.pass;
    nlohmann::json c = nlohmann::json::object();
    for (const auto& [k, v] : rep.constants) c[k] = num(v);
    j["constants"] = c;
    return j;
}

nlohmann::json to_json(const std::vector<GapReport>& reps) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : reps) j.push_back(to_json(r));
    return j;
}

nlohmann::json to_json(const FixedPointStats& st) {
    return {{"iterations", st.iterations},
            {"residual", num(st.residual)},
            {"max_ratio", num(st.max_ratio)},
            {"certified", num(st.certified)}};
}

nlohmann::json to_json(const VerificationReport& rep) {
    return {{"name", rep.name},
            {"samples", rep.samples},
            {"worst", num(rep.worst)},
            {"tol", num(rep.tol)},
            {"pass", rep.pass},
            {"note", rep.note}};
}

nlohmann::json to_json(const Eigen::VectorXd& v) {
    nlohmann::json j = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(num(v(i)));
    return j;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace lpm
