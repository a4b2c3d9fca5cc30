#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "netheat/analysis.hpp"
#include "netheat/evolution.hpp"

namespace netheat {

/// Shortest decimal form that round-trips the double exactly.
std::string format_number(double x);

/// Columns time,l1,l2,linf,re_0,im_0,... with one row per recorded state.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Columns t,x,y,re,im; x and y are the stretched coordinates of the two
/// sample nodes. Kernels are written back to back.
void write_kernel_csv(std::ostream& os,
                      const std::vector<KernelMatrix>& kernels);

/// One compact JSON document per line.
void write_json_line(std::ostream& os, const Json& j);

}  // namespace netheat
