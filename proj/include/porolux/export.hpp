#pragma once

// Plain-text artifacts. Numbers are written with 17 significant digits so a
// read-back reproduces every double exactly.

#include <string>
#include <vector>

#include "porolux/brinkman3d.hpp"
#include "porolux/core.hpp"

namespace porolux {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::string format_number(double v);

/// Throws std::runtime_error naming the path on IO failure or a non-finite value.
void export_csv(const Table& table, const std::string& path);
Table read_csv(const std::string& path);

/// x,y,<names...> at cell centers, row-major (x fastest).
Table field_table(const Grid2D& grid, const std::vector<std::string>& names,
                  const std::vector<const std::vector<double>*>& columns);
/// x,y,z,<names...> over every column sample of a reduced field.
Table column_table(const ColumnField3D& field, const std::vector<std::string>& names);
/// x,y,z,<names...> at the cell centers of the dilated grid.
Table dilated_table(const DilatedSolution& s);

struct VtkArray {
    std::string name;
    int components = 1;  // 1 or 3
    std::vector<double> values;  // point-major, components interleaved
};

/// Legacy ASCII STRUCTURED_POINTS, one value (or vector) per line.
void export_structured_grid(const std::string& path, const std::string& title, int nx, int ny, int nz,
                            const std::vector<double>& origin, const std::vector<double>& spacing,
                            const std::vector<VtkArray>& arrays);

/// Reduced column field in normalized height z/h, so the points are uniform.
void export_structured_grid(const ColumnField3D& field, const std::vector<std::string>& names,
                            const std::string& path, const std::string& title);

/// Cell-centered U (vector), Q, T and Phi of a dilated solve.
void export_structured_grid(const DilatedSolution& s, const std::string& path, const std::string& title);

}  // namespace porolux
