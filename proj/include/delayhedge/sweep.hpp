#pragma once

// Parameter sweeps over model families: one optimal-value computation per
// (parameter, delay) grid point, optionally fanned out over worker threads.
// Row order and row contents are deterministic and independent of the job
// count.

#include <string>
#include <vector>

#include "delayhedge/matrix_core.hpp"

namespace delayhedge {

enum class ModelFamily { kms, fbm };

struct SweepSpec {
  ModelFamily family = ModelFamily::kms;
  double param_min = 0.0;   // rho (kms) or Hurst (fbm) grid
  double param_max = 0.0;
  double param_step = 0.0;
  int n = 0;
  double dt = 0.0;          // fbm only; <= 0 selects the default 1/n
  std::vector<int> delays;
  int jobs = 1;
};

struct SweepRow {
  double param;
  int delay;
  double value;
  double logdet_sigma;
  double logdet_q;
};

/// Grid parameters param_min, param_min + step, ... up to param_max.
std::vector<double> sweep_grid(const SweepSpec& spec);

/// Runs the sweep; rows ordered by (param ascending, delay ascending).
/// A failure at any grid point aborts with an error naming the point.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

std::string family_name(ModelFamily family);

}  // namespace delayhedge
