#include "delayhedge/sweep.hpp"

#include <atomic>
#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "delayhedge/decomposition.hpp"
#include "delayhedge/hedging.hpp"
#include "delayhedge/log.hpp"
#include "delayhedge/models.hpp"

namespace delayhedge {

std::string family_name(ModelFamily family) {
  return family == ModelFamily::kms ? "kms" : "fbm";
}

std::vector<double> sweep_grid(const SweepSpec& spec) {
  if (!(spec.param_step > 0.0)) {
    throw InvalidParameter("sweep requires param_step > 0");
  }
  if (spec.param_max < spec.param_min) {
    throw InvalidParameter("sweep requires param_max >= param_min");
  }
  std::vector<double> grid;
  const double slack = spec.param_step * 1e-9;
  for (int k = 0;; ++k) {
    const double p = spec.param_min + k * spec.param_step;
    if (p > spec.param_max + slack) break;
    grid.push_back(p);
  }
  if (grid.empty()) throw InvalidParameter("sweep grid is empty");
  return grid;
}

namespace {

void validate_spec(const SweepSpec& spec, const std::vector<double>& grid) {
  if (spec.n < 1) throw InvalidParameter("sweep requires n >= 1");
  if (spec.delays.empty()) throw InvalidParameter("sweep requires delays");
  for (int d : spec.delays) {
    if (d < 0 || d > spec.n - 1) {
      std::ostringstream msg;
      msg << "sweep delay " << d << " outside [0, n-1] = [0, " << spec.n - 1
          << "]";
      throw InvalidParameter(msg.str());
    }
  }
  for (double p : grid) {
    if (!(p > 0.0 && p < 1.0)) {
      std::ostringstream msg;
      msg << "sweep parameter " << p << " outside (0, 1)";
      throw InvalidParameter(msg.str());
    }
  }
}

// All delays for one parameter; the covariance, its log determinant, and the
// precision matrix are shared across delays.
void run_param(const SweepSpec& spec, double param, SweepRow* rows) {
  const Vector<double> mu = Vector<double>::Zero(spec.n);
  MarketModel<double> model =
      spec.family == ModelFamily::kms
          ? kms_model(param, spec.n, mu)
          : fbm_model(FbmSpec<double>{param, spec.n,
                                      spec.dt > 0.0 ? spec.dt : 1.0 / spec.n},
                      mu);
  const SymMatrix<double> theta(invert_pd(model.sigma));
  for (std::size_t k = 0; k < spec.delays.size(); ++k) {
    try {
      const BandDecomposition<double> dec = decompose(theta, spec.delays[k]);
      const ValueReport<double> report = optimal_value(model, dec);
      rows[k] = SweepRow{param, spec.delays[k], report.value,
                         report.logdet_sigma, report.logdet_q};
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "delay=" << spec.delays[k] << ": " << e.what();
      throw Error(msg.str());
    }
  }
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  const std::vector<double> grid = sweep_grid(spec);
  validate_spec(spec, grid);

  std::vector<int> delays = spec.delays;
  std::sort(delays.begin(), delays.end());
  SweepSpec ordered = spec;
  ordered.delays = delays;

  std::vector<SweepRow> rows(grid.size() * delays.size());
  const int jobs = std::clamp<int>(spec.jobs, 1, static_cast<int>(grid.size()));

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string first_error;

  auto worker = [&] {
    for (;;) {
      const std::size_t g = next.fetch_add(1);
      if (g >= grid.size()) return;
      try {
        run_param(ordered, grid[g], rows.data() + g * delays.size());
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error.empty()) {
          std::ostringstream msg;
          msg << "sweep failed at family=" << family_name(spec.family)
              << " param=" << grid[g] << ": " << e.what();
          first_error = msg.str();
        }
        return;
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (!first_error.empty()) throw Error(first_error);
  log_info("sweep finished: ", rows.size(), " rows (",
           family_name(spec.family), ", n=", spec.n, ")");
  return rows;
}

}  // namespace delayhedge
