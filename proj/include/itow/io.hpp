#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "itow/errors.hpp"
#include "itow/geometry.hpp"

namespace itow {

/// Shortest exact decimal form: 17 significant digits round-trip doubles.
inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Write-then-rename so readers never observe a partial file.
inline void write_text_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out << content;
        if (!out.good()) throw std::runtime_error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

/// Grid/solution CSV: header x1..xm,is_boundary,value; one row per node in
/// grid order.
inline std::string solution_to_csv(const GridFunction& f) {
    const Grid& g = *f.grid;
    std::ostringstream out;
    for (int i = 0; i < g.dim(); ++i) out << "x" << (i + 1) << ",";
    out << "is_boundary,value\n";
    for (int id = 0; id < g.size(); ++id) {
        for (int i = 0; i < g.dim(); ++i) out << format_value(g.node(id)[i]) << ",";
        out << (g.is_boundary(id) ? 1 : 0) << "," << format_value(f.values[id]) << "\n";
    }
    return out.str();
}

inline void write_solution_csv(const std::string& path, const GridFunction& f) {
    write_text_atomic(path, solution_to_csv(f));
}

/// Reads a solution CSV back onto a matching grid. Rows are matched to nodes
/// by coordinates; every node must be covered exactly once.
inline GridFunction read_solution_csv(const std::string& path, GridPtr grid) {
    std::ifstream in(path);
    if (!in) throw InvalidSpecError("cannot open solution CSV: " + path);
    GridFunction f(grid);
    std::vector<char> seen(static_cast<std::size_t>(grid->size()), 0);
    std::string line;
    if (!std::getline(in, line)) throw InvalidSpecError("empty solution CSV: " + path);
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<double> cols;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cols.push_back(std::stod(cell));
        if (static_cast<int>(cols.size()) != grid->dim() + 2)
            throw InvalidSpecError(path + ":" + std::to_string(row) + ": wrong column count");
        Vec x(grid->dim());
        for (int i = 0; i < grid->dim(); ++i) x[i] = cols[i];
        int id = grid->nearest_node(x);
        if (id < 0 || (grid->node(id) - x).norm() > 1e-9 * (1.0 + grid->spacing()))
            throw InvalidSpecError(path + ":" + std::to_string(row) +
                                   ": row does not match a grid node");
        f.values[id] = cols.back();
        seen[id] = 1;
    }
    for (int id = 0; id < grid->size(); ++id)
        if (!seen[id])
            throw InvalidSpecError(path + ": missing row for node " + std::to_string(id));
    return f;
}

/// Small generic CSV writer: header plus numeric rows.
inline std::string table_to_csv(const std::vector<std::string>& header,
                                const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i)
            out << format_value(r[i]) << (i + 1 < r.size() ? "," : "\n");
    }
    return out.str();
}

}  // namespace itow
