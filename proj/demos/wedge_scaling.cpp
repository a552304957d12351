// Smoothed 60 degree wedge: scaled inverse interfaces and their collapse.
#include <cstdio>

#include "freesurf/cli/commands.hpp"

int main() {
  using namespace freesurf;
  const auto cfg = cli::preset("scaling-desk");
  const auto res = cli::run_scaling(cfg);
  std::printf("N=%zu  beta=%.6f  %s at t=%g\n", cfg.N, res.beta, integrate::to_string(res.report.reason),
              res.report.t_final);
  for (std::size_t i = 0; i < res.series.size(); ++i) {
    std::printf("  d(t=%g, t=%g) = %.4e\n", res.times[i], res.times[i + 1], res.series[i]);
  }
  std::printf("final half monotone: %s\n", cli::final_half_monotone(res.series) ? "yes" : "no");
  return 0;
}
