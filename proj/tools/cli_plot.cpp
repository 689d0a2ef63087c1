#include "cli_plot.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "lpm/errors.hpp"
#include "lpm/io.hpp"

namespace lpm::cli {

std::vector<double> CsvTable::column(std::size_t j) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(j));
    return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

bool is_input(const std::string& name) { return name.rfind("xi_", 0) == 0 || name.rfind("iota_", 0) == 0; }

std::vector<double> distinct(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

constexpr double kW = 640, kH = 420, kPad = 56;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

void axes(std::ostringstream& os, double x0, double x1, double y0, double y1, const std::string& xl,
          const std::string& title) {
    os << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << kW - 2 * kPad << "\" height=\""
       << kH - 2 * kPad << "\" fill=\"none\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
    os << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << xl
       << "</text>\n";
    os << "<text x=\"" << kPad << "\" y=\"" << kH - kPad + 16 << "\" font-size=\"11\">" << fmt(x0) << "</text>\n";
    os << "<text x=\"" << kW - kPad << "\" y=\"" << kH - kPad + 16 << "\" text-anchor=\"end\" font-size=\"11\">"
       << fmt(x1) << "</text>\n";
    os << "<text x=\"" << kPad - 4 << "\" y=\"" << kH - kPad << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(y0)
       << "</text>\n";
    os << "<text x=\"" << kPad - 4 << "\" y=\"" << kPad + 10 << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(y1)
       << "</text>\n";
}

}  // namespace

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("plot: empty CSV");
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != t.header.size()) throw ConfigError("plot: ragged CSV row");
        std::vector<double> row;
        for (const auto& c : cells) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(c, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != c.size() || c.empty()) throw ConfigError("plot: non-numeric cell '" + c + "'");
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (t.rows.empty()) throw ConfigError("plot: CSV has no data rows");
    return t;
}

std::string render_svg(const CsvTable& table, const std::string& title) {
    std::vector<std::size_t> varied, outputs;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (!is_input(table.header[j]))
            outputs.push_back(j);
        else if (distinct(table.column(j)).size() > 1)
            varied.push_back(j);
    }
    if (outputs.empty()) throw ConfigError("plot: no output columns");
    if (varied.empty() || varied.size() > 2) throw ConfigError("plot: need one or two varying input columns");

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const double pw = kW - 2 * kPad, ph = kH - 2 * kPad;

    if (varied.size() == 1) {
        const std::size_t xc = varied[0];
        std::vector<std::size_t> order(table.rows.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return table.rows[a][xc] < table.rows[b][xc]; });
        double x0 = table.rows[order.front()][xc], x1 = table.rows[order.back()][xc];
        double y0 = 0.0, y1 = 0.0;
        for (const auto& r : table.rows)
            for (std::size_t j : outputs) {
                y0 = std::min(y0, r[j]);
                y1 = std::max(y1, r[j]);
            }
        if (y1 - y0 < 1e-300) y1 = y0 + 1.0;
        axes(os, x0, x1, y0, y1, table.header[xc], title);
        static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
        int c = 0;
        for (std::size_t j : outputs) {
            os << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << colours[c % 6] << "\" points=\"";
            for (std::size_t i : order) {
                const double px = kPad + (table.rows[i][xc] - x0) / (x1 - x0) * pw;
                const double py = kPad + ph - (table.rows[i][j] - y0) / (y1 - y0) * ph;
                os << fmt_num(std::round(px * 100) / 100) << ',' << fmt_num(std::round(py * 100) / 100) << ' ';
            }
            os << "\"/>\n";
            os << "<text x=\"" << kW - kPad + 4 << "\" y=\"" << kPad + 14 * (c + 1) << "\" font-size=\"10\" fill=\""
               << colours[c % 6] << "\">" << table.header[j] << "</text>\n";
            ++c;
        }
    } else {
        const std::size_t xc = varied[0], yc = varied[1];
        const auto xs = distinct(table.column(xc)), ys = distinct(table.column(yc));
        std::map<std::pair<double, double>, double> cell;
        double vmax = 0.0;
        for (const auto& r : table.rows) {
            double s = 0.0;
            for (std::size_t j : outputs) s += r[j] * r[j];
            cell[{r[xc], r[yc]}] = std::sqrt(s);
            vmax = std::max(vmax, std::sqrt(s));
        }
        axes(os, xs.front(), xs.back(), ys.front(), ys.back(), table.header[xc] + " / " + table.header[yc], title);
        const double cw = pw / static_cast<double>(xs.size()), ch = ph / static_cast<double>(ys.size());
        for (std::size_t a = 0; a < xs.size(); ++a)
            for (std::size_t b = 0; b < ys.size(); ++b) {
                auto it = cell.find({xs[a], ys[b]});
                if (it == cell.end()) continue;
                const double f = vmax > 0.0 ? it->second / vmax : 0.0;
                const int red = static_cast<int>(std::lround(255 * f)), blue = 255 - red;
                os << "<rect x=\"" << fmt(kPad + a * cw) << "\" y=\"" << fmt(kPad + ph - (b + 1) * ch)
                   << "\" width=\"" << fmt(cw) << "\" height=\"" << fmt(ch) << "\" fill=\"rgb(" << red << ",64,"
                   << blue << ")\"/>\n";
            }
        os << "<text x=\"" << kW - kPad << "\" y=\"" << kPad - 8 << "\" text-anchor=\"end\" font-size=\"10\">max |out| = "
           << fmt(vmax) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace lpm::cli
