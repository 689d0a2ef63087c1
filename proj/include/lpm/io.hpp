#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lpm/gap.hpp"
#include "lpm/lyapunov_perron.hpp"
#include "lpm/verify.hpp"

namespace lpm {

/// Round-trip decimal form used by every CSV writer (17 significant digits).
std::string fmt_num(double x);

nlohmann::json to_json(const GapReport& rep);
nlohmann::json to_json(const std::vector<GapReport>& reps);
nlohmann::json to_json(const FixedPointStats& st);
nlohmann::json to_json(const VerificationReport& rep);
nlohmann::json to_json(const Eigen::VectorXd& v);

/// Non-finite doubles become strings ("inf", "-inf", "nan") so reports stay valid JSON.
nlohmann::json num(double x);

/// FNV-1a 64-bit hash as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace lpm
