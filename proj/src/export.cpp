#include "porolux/export.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace porolux {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) {
        throw std::runtime_error("write failed for " + path);
    }
}

void require_finite(double v, const std::string& path) {
    if (!std::isfinite(v)) {
        throw std::runtime_error("refusing to write non-finite value to " + path);
    }
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void export_csv(const Table& table, const std::string& path) {
    auto out = open_out(path);
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        out << (c ? "," : "") << table.header[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) {
            throw std::runtime_error("row width does not match header in " + path);
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            require_finite(row[c], path);
            out << (c ? "," : "") << format_number(row[c]);
        }
        out << '\n';
    }
    finish(out, path);
}

Table read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    Table t;
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(path + " is empty");
    }
    std::istringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream rs(line);
        for (std::string cell; std::getline(rs, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table field_table(const Grid2D& grid, const std::vector<std::string>& names,
                  const std::vector<const std::vector<double>*>& columns) {
    if (names.size() != columns.size()) {
        throw std::invalid_argument("field_table: one name per column");
    }
    Table t;
    t.header = {"x", "y"};
    t.header.insert(t.header.end(), names.begin(), names.end());
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            std::vector<double> row{grid.x_center(i), grid.y_center(j)};
            for (const auto* col : columns) row.push_back((*col)[grid.index(i, j)]);
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

Table column_table(const ColumnField3D& field, const std::vector<std::string>& names) {
    if (static_cast<int>(names.size()) != field.components) {
        throw std::invalid_argument("column_table: one name per component");
    }
    const Grid2D& g = field.grid;
    Table t;
    t.header = {"x", "y", "z"};
    t.header.insert(t.header.end(), names.begin(), names.end());
    for (int k = 0; k <= field.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                std::vector<double> row{g.x_center(i), g.y_center(j), field.z(i, j, k)};
                const std::size_t o = field.offset(i, j, k);
                for (int c = 0; c < field.components; ++c) row.push_back(field.values[o + c]);
                t.rows.push_back(std::move(row));
            }
        }
    }
    return t;
}

Table dilated_table(const DilatedSolution& s) {
    const MacGrid& g = s.grid;
    const CellVelocity cv = cell_velocity(s);
    Table t;
    t.header = {"x", "y", "z", "u1", "u2", "u3", "Q", "T", "Phi"};
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t c = g.cell(i, j, k);
                t.rows.push_back({(i + 0.5) * g.dx(), (j + 0.5) * g.dy(), (k + 0.5) * g.dz(), cv.u1[c], cv.u2[c],
                                  cv.u3[c], s.Q[c], s.T[c], s.Phi[c]});
            }
        }
    }
    return t;
}

void export_structured_grid(const std::string& path, const std::string& title, int nx, int ny, int nz,
                            const std::vector<double>& origin, const std::vector<double>& spacing,
                            const std::vector<VtkArray>& arrays) {
    if (origin.size() != 3 || spacing.size() != 3 || nx < 1 || ny < 1 || nz < 1) {
        throw std::invalid_argument("structured grid needs positive dimensions and 3D origin/spacing");
    }
    const std::size_t npts = static_cast<std::size_t>(nx) * ny * nz;
    auto out = open_out(path);
    // The title line is limited to 256 characters by the format.
    out << "# vtk DataFile Version 3.0\n" << title.substr(0, 255) << "\nASCII\nDATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << nx << ' ' << ny << ' ' << nz << '\n';
    out << "ORIGIN " << format_number(origin[0]) << ' ' << format_number(origin[1]) << ' '
        << format_number(origin[2]) << '\n';
    out << "SPACING " << format_number(spacing[0]) << ' ' << format_number(spacing[1]) << ' '
        << format_number(spacing[2]) << '\n';
    out << "POINT_DATA " << npts << '\n';
    for (const VtkArray& a : arrays) {
        if (a.values.size() != npts * a.components || (a.components != 1 && a.components != 3)) {
            throw std::invalid_argument("array " + a.name + " does not match the grid");
        }
        if (a.components == 1) {
            out << "SCALARS " << a.name << " double 1\nLOOKUP_TABLE default\n";
        } else {
            out << "VECTORS " << a.name << " double\n";
        }
        for (std::size_t p = 0; p < npts; ++p) {
            for (int c = 0; c < a.components; ++c) {
                const double v = a.values[p * a.components + c];
                require_finite(v, path);
                out << (c ? " " : "") << format_number(v);
            }
            out << '\n';
        }
    }
    finish(out, path);
}

void export_structured_grid(const ColumnField3D& field, const std::vector<std::string>& names,
                            const std::string& path, const std::string& title) {
    const Grid2D& g = field.grid;
    std::vector<VtkArray> arrays;
    const bool vector = field.components == 3 && names.size() == 1;
    if (!vector && static_cast<int>(names.size()) != field.components) {
        throw std::invalid_argument("export_structured_grid: names do not match components");
    }
    const std::size_t npts = g.size() * static_cast<std::size_t>(field.nz + 1);
    if (vector) {
        arrays.push_back({names[0], 3, std::vector<double>(3 * npts)});
    } else {
        for (const auto& n : names) arrays.push_back({n, 1, std::vector<double>(npts)});
    }
    std::size_t p = 0;
    for (int k = 0; k <= field.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i, ++p) {
                const std::size_t o = field.offset(i, j, k);
                for (int c = 0; c < field.components; ++c) {
                    if (vector) {
                        arrays[0].values[3 * p + c] = field.values[o + c];
                    } else {
                        arrays[c].values[p] = field.values[o + c];
                    }
                }
            }
        }
    }
    export_structured_grid(path, title, g.nx, g.ny, field.nz + 1, {0.5 * g.dx(), 0.5 * g.dy(), 0.0},
                           {g.dx(), g.dy(), 1.0 / field.nz}, arrays);
}

void export_structured_grid(const DilatedSolution& s, const std::string& path, const std::string& title) {
    const MacGrid& g = s.grid;
    const CellVelocity cv = cell_velocity(s);
    VtkArray U{"U", 3, std::vector<double>(3 * g.cells())};
    for (std::size_t c = 0; c < g.cells(); ++c) {
        U.values[3 * c] = cv.u1[c];
        U.values[3 * c + 1] = cv.u2[c];
        U.values[3 * c + 2] = cv.u3[c];
    }
    export_structured_grid(path, title, g.nx, g.ny, g.nz, {0.5 * g.dx(), 0.5 * g.dy(), 0.5 * g.dz()},
                           {g.dx(), g.dy(), g.dz()},
                           {U, {"Q", 1, s.Q}, {"T", 1, s.T}, {"Phi", 1, s.Phi}});
}

}  // namespace porolux
