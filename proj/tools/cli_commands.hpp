#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace lpm::cli {

struct CliOptions {
    std::string command;
    std::string config;
    std::string out = ".";
    std::string input;  // plot only
    std::optional<std::uint64_t> seed;
    int threads = 1;
    bool corrected_shift_term = false;
};

enum ExitCode : int { kPass = 0, kGateFailed = 1, kUsage = 2, kNumerical = 3 };

/// Runs one subcommand. Progress and errors go to `log`.
int run(const CliOptions& opt, std::ostream& log);

}  // namespace lpm::cli
