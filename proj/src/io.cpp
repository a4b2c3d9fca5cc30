#include "netheat/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace netheat {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "time,l1,l2,linf";
  const int dof =
      traj.states.empty() ? 0 : static_cast<int>(traj.states[0].values.size());
  for (int i = 0; i < dof; ++i) os << ",re_" << i << ",im_" << i;
  os << '\n';
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const StateVector& s = traj.states[k];
    const NormTriple& n = traj.norms[k];
    os << format_number(s.time) << ',' << format_number(n.l1) << ','
       << format_number(n.l2) << ',' << format_number(n.linf);
    for (int i = 0; i < dof; ++i)
      os << ',' << format_number(s.values(i).real()) << ','
         << format_number(s.values(i).imag());
    os << '\n';
  }
}

void write_kernel_csv(std::ostream& os,
                      const std::vector<KernelMatrix>& kernels) {
  os << "t,x,y,re,im\n";
  for (const KernelMatrix& k : kernels) {
    for (Eigen::Index i = 0; i < k.entries.rows(); ++i)
      for (Eigen::Index j = 0; j < k.entries.cols(); ++j)
        os << format_number(k.t) << ',' << format_number(k.coordinates(i))
           << ',' << format_number(k.coordinates(j)) << ','
           << format_number(k.entries(i, j).real()) << ','
           << format_number(k.entries(i, j).imag()) << '\n';
  }
}

void write_json_line(std::ostream& os, const Json& j) {
  os << j.dump() << '\n';
}

}  // namespace netheat
