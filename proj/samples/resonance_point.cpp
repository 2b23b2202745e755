// Populations of 14N2 after the pulse train at one period, using the library directly.
//
//   ./resonance_point [period_ps]

#include <cstdio>
#include <cstdlib>

#include "rotorpath/rotorpath.hpp"

int main(int argc, char** argv) {
  using namespace rotorpath;
  const double period_ps = argc > 1 ? std::atof(argv[1]) : 8.38;

  ScanConfig config;  // 14N2 at 6.3 K, A = 2.5, E0 = 6e9 V/m, 500 fs pulses, n = -3..3
  const PointResult point = simulate_point(config, period_ps * kPicosecond);

  std::printf("tau_per = %.2f ps, %zu slices\n", period_ps, point.slices);
  double high = 0.0;
  for (std::size_t l = 0; l < point.populations.size(); ++l) {
    std::printf("  l = %zu  P = %.6f\n", l, point.populations[l]);
    if (l >= 3) high += point.populations[l];
  }
  std::printf("P(l >= 3) = %.6f\n", high);
}
