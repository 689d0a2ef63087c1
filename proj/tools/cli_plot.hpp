#pragma once

#include <istream>
#include <string>
#include <vector>

namespace lpm::cli {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(std::size_t j) const;
};

/// Numeric CSV with one header line; non-numeric cells are rejected.
CsvTable read_csv(std::istream& in);

/// Input columns are those whose name starts with `input_prefix` ("xi_", "iota_");
/// the others are outputs. One varying input gives a line plot of every output
/// column, two give a heat map of the output norm over the two most varied
/// inputs. Throws ConfigError for anything else.
std::string render_svg(const CsvTable& table, const std::string& title);

}  // namespace lpm::cli
