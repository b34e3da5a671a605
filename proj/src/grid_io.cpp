#include "maxlab/grid_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "maxlab/error.hpp"

namespace maxlab {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_value(const std::string& token, int row) {
    const std::string t = trim(token);
    if (t.empty()) throw ParseError("empty value in CSV row " + std::to_string(row));
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) throw ParseError("bad number '" + t + "' in CSV row " + std::to_string(row));
    return v;
}

} // namespace

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double round12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return std::strtod(buf, nullptr);
}

Grid2D parse_grid_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ls(t);
        std::string tok;
        while (std::getline(ls, tok, ',')) row.push_back(parse_value(tok, static_cast<int>(rows.size())));
        rows.push_back(std::move(row));
    }
    const int side = static_cast<int>(rows.size());
    if (side == 0) throw ParseError("grid CSV has no rows");
    std::vector<double> cells;
    cells.reserve(static_cast<std::size_t>(side) * side);
    for (std::size_t y = 0; y < rows.size(); ++y) {
        if (static_cast<int>(rows[y].size()) != side) {
            throw ParseError("grid CSV row " + std::to_string(y) + " has " + std::to_string(rows[y].size()) +
                             " values, expected " + std::to_string(side));
        }
        cells.insert(cells.end(), rows[y].begin(), rows[y].end());
    }
    try {
        return Grid2D(side, std::move(cells));
    } catch (const GeometryError& e) {
        throw ParseError(std::string("invalid grid: ") + e.what());
    }
}

Grid2D parse_grid_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        const int side = j.at("side").get<int>();
        auto cells = j.at("cells").get<std::vector<double>>();
        return Grid2D(side, std::move(cells));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad grid JSON: ") + e.what());
    } catch (const GeometryError& e) {
        throw ParseError(std::string("invalid grid: ") + e.what());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << text;
}

Grid2D read_grid_file(const std::string& path) {
    const std::string text = read_text_file(path);
    return ends_with(path, ".json") ? parse_grid_json(text) : parse_grid_csv(text);
}

void write_grid_csv(std::ostream& os, const Grid2D& g, const Metadata& meta) {
    for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
    for (int y = 0; y < g.side(); ++y) {
        for (int x = 0; x < g.side(); ++x) {
            if (x) os << ',';
            os << format_number(g(x, y));
        }
        os << '\n';
    }
}

std::string grid_to_json(const Grid2D& g, const Metadata& meta) {
    nlohmann::ordered_json j;
    j["side"] = g.side();
    std::vector<double> cells;
    cells.reserve(g.size());
    for (double v : g.cells()) cells.push_back(round12(v));
    j["cells"] = std::move(cells);
    if (!meta.empty()) {
        nlohmann::ordered_json m = nlohmann::ordered_json::object();
        for (const auto& [k, v] : meta) m[k] = v;
        j["meta"] = std::move(m);
    }
    return j.dump() + "\n";
}

void write_grid_file(const std::string& path, const Grid2D& g, const Metadata& meta) {
    if (ends_with(path, ".json")) {
        write_text_file(path, grid_to_json(g, meta));
        return;
    }
    std::ostringstream os;
    write_grid_csv(os, g, meta);
    write_text_file(path, os.str());
}

} // namespace maxlab
