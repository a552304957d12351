// Single-mode velocity on a compressed grid; fits a conic to the tip region.
#include <cstdio>

#include "freesurf/diagnostics.hpp"
#include "freesurf/integrate.hpp"

int main(int argc, char** argv) {
  using namespace freesurf;
  const std::size_t n = argc > 1 ? std::stoul(argv[1]) : 4096;
  spectral::SpectralGrid g(n);
  auto s = dynamics::nose(g, dynamics::Formulation::ZF, 250.0);
  integrate::IntegratorConfig cfg;
  cfg.post_step_filter = true;
  cfg.output_times = {0.2, 0.4};
  auto rep = integrate::evolve(s, 0.6, cfg, [&](const integrate::Frame& f) {
    const auto fit = diagnostics::conic_fit(f.Z);
    std::printf("t=%.3f  maxCurvature=%9.3f  %s a=%.4f b=%.4f x0=%.4f residual=%.2e\n", f.t,
                f.diagnostics.maxCurvature, fit.branch > 0 ? "ellipse  " : "hyperbola", fit.a, fit.b, fit.x0,
                fit.residual);
  });
  std::printf("%s at t=%.4f after %zu steps\n", integrate::to_string(rep.reason), rep.t_final, rep.stats.accepted);
  return 0;
}
