#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "liouplan/trajectory.hpp"

namespace liouplan {

/// Header `t,<col>,...`, one row per grid point, 17 significant digits, LF endings.
/// `columns` empty means every column in table order.
void write_csv(std::ostream& out, const TrajectoryTable& table,
               const std::vector<std::string>& columns = {});
void write_csv_file(const std::string& path, const TrajectoryTable& table,
                    const std::vector<std::string>& columns = {});

/// Reads a grid-only CSV. The `t` column must be uniform; midpoint samples are
/// then filled by four-point cubic interpolation.
TrajectoryTable read_csv(std::istream& in);
TrajectoryTable read_csv_file(const std::string& path);

/// Adds midpoint samples to every column that lacks them (cubic Lagrange on
/// the four nearest grid points; lower order when N < 3).
void fill_midpoints(TrajectoryTable& table);

}  // namespace liouplan
