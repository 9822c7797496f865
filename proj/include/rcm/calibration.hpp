#pragma once

// Frozen constants for the checks whose inequalities carry an unspecified
// constant C(d, p, q). Each value is twice the largest ratio observed on the
// calibration run of `rcm_calibrate` (seeds from kCalibrationSeedBase); the
// acceptance suite and the CLI use seeds outside that range.

#include <cmath>
#include <limits>
#include <string>

namespace rcm {

struct CalibratedConstant {
  const char* kind;  // BoundReport kind, "local_boundedness/<form>", or "ks"
  int dim;  // 0: any dimension
  double p;  // 0: not keyed on p
  double q;  // 0: not keyed on q
  double s;  // 0: not keyed on s
  double value;
};

// clang-format off
inline constexpr CalibratedConstant kCalibratedConstants[] = {
    {"local_boundedness/theorem", 3, 4.0, 4.0, 0.0, 1.7321821748032857},
    {"cutoff",                    3, 4.0, 4.0, 0.0, 0.013979147465575631},
    {"gradient",                  3, 4.0, 4.0, 0.0, 0.8089799049142777},
    {"sobolev_bulk",              3, 0.0, 0.0, 1.0, 0.4781807233256421},
    {"sobolev_bulk",              3, 0.0, 0.0, 2.0, 0.9070312005619918},
    {"sobolev_sphere",            3, 0.0, 0.0, 1.0, 0.20316112518767906},
    {"sobolev_sphere",            4, 0.0, 0.0, 2.0, 0.3182156907219417},
    {"bound2d",                   2, 0.0, 0.0, 0.0, 2.47145315717713},
    {"sobolev_1d",                2, 0.0, 0.0, 0.0, 0.35057577383338556},
    {"multiscale",                3, 4.0, 4.0, 0.0, 0.050828288077357967},
    {"ks",                        0, 0.0, 0.0, 0.0, 2.5725365644166707},
};
// clang-format on

/// The frozen constant for (kind, d, p, q, s), or NaN when that combination
/// was never calibrated (checks then report ratios without a verdict).
inline double calibrated_constant(const std::string& kind, int dim, double p = 0.0, double q = 0.0, double s = 0.0) {
  for (const CalibratedConstant& c : kCalibratedConstants) {
    if (kind != c.kind || (c.dim != 0 && dim != c.dim)) continue;
    if (c.p != 0.0 && p != c.p) continue;
    if (c.q != 0.0 && q != c.q) continue;
    if (c.s != 0.0 && s != c.s) continue;
    return c.value;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace rcm
