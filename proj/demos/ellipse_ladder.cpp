// Ellipse accuracy ladder for both formulations.
#include <cstdio>

#include "freesurf/cli/commands.hpp"

int main() {
  using namespace freesurf;
  cli::VerifyConfig v;
  const auto rows = cli::run_ladder(v, 4);
  std::printf("%6s %12s %12s\n", "N", "E_ZF", "E_QU");
  for (const auto& r : rows) std::printf("%6zu %12.3e %12.3e\n", r.N, r.E_ZF, r.E_QU);
  const auto gate = cli::ladder_gate(rows, v);
  std::printf("convergence gate: %s\n", gate.pass ? "pass" : "fail");
  return gate.pass ? 0 : 1;
}
