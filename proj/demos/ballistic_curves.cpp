// Ballistic cusp and cavity: exponents, singular times and splash detection.
#include <cstdio>

#include "freesurf/exact.hpp"

int main() {
  using namespace freesurf::exact;
  for (double t : {-4.0, -2.0, -1.0}) std::printf("cusp t=%4.1f local exponent %.5f\n", t, cusp_local_exponent(t));
  const Cavity dimple{0.2, 1.2}, bubble{-0.2, 1.2};
  std::printf("cavity a=0.2  singular time %.6f\n", dimple.singularity_time());
  if (auto ts = cavity_splash_time(bubble, -3.0, -0.5)) std::printf("cavity a=-0.2 splash at t=%.6f\n", *ts);
  return 0;
}
