#include "fvvisc/solver.hpp"

#include <iomanip>
#include <ostream>

namespace fvvisc {

void SolverConfig::validate() const {
  if (!(target_drop > 0.0)) throw InvalidArgument("solver config: target_drop must be positive");
  if (max_iterations <= 0) throw InvalidArgument("solver config: max_iterations must be positive");
  if (!(cfl_start > 0.0) || !(cfl_max >= cfl_start)) {
    throw InvalidArgument("solver config: need 0 < cfl_start <= cfl_max");
  }
  if (!(cfl_growth >= 1.0)) throw InvalidArgument("solver config: cfl_growth must be >= 1");
  if (linear_sweeps <= 0) throw InvalidArgument("solver config: linear_sweeps must be positive");
  if (!(absolute_tolerance >= 0.0)) {
    throw InvalidArgument("solver config: absolute_tolerance must be nonnegative");
  }
}

void write_history_csv(std::ostream& out, const IterationHistory& history) {
  const std::size_t neq = history.empty() ? 0 : history.front().l1_residual.size();
  out << "iteration";
  for (std::size_t e = 0; e < neq; ++e) out << ",res_" << e;
  out << ",cfl\n";
  const auto old_precision = out.precision(10);
  for (const auto& rec : history) {
    out << rec.iteration;
    for (double v : rec.l1_residual) out << ',' << v;
    out << ',' << rec.cfl << '\n';
  }
  out.precision(old_precision);
}

}  // namespace fvvisc
