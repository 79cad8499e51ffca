// SPDX-License-Identifier: Apache-2.0

#ifndef EIGENROM_COMMANDS_HPP
#define EIGENROM_COMMANDS_HPP

#include <iosfwd>
#include "eigenrom/config.hpp"

namespace eigenrom
{

// Process exit codes.
enum ExitCode : int
{
  kExitSuccess = 0,
  kExitTolerance = 1,
  kExitInvalidConfig = 2,
  kExitNumerical = 3
};

// fom_eigenvalues.csv (mu_1..mu_d, k, lambda) and, if requested,
// fom_vector_<t>_k<k>.csv (x[,y], value) for test point t.
int cmd_fom(const RunConfig &cfg, std::ostream &log);

// rom_model.json and manifest.json.
int cmd_train(const RunConfig &cfg, std::ostream &log);

//
// dd_eigenvalues.csv (mu.., k, lambda, lambda_lo, lambda_hi, out_of_box),
// dd_vector_<t>_k<k>.csv per test point and gpr_curves.csv. The curve grid has
// curve_points nodes per parameter axis over the box widened by curve_margin of
// its width on each side, so it holds curve_points^d rows per regressor.
//
int cmd_predict(const RunConfig &cfg, std::ostream &log);

// error_report.csv and eval_summary.json; kExitTolerance when a tolerance fails.
int cmd_evaluate(const RunConfig &cfg, std::ostream &log);

// Throws InvalidInput when the model was trained with another problem or mesh.
void check_provenance(const RunConfig &cfg, const RomModel &model);

}  // namespace eigenrom

#endif  // EIGENROM_COMMANDS_HPP
