#pragma once

// Numeric defaults shared by the library, the CLI and the test suites.
//
//   quantity                          value              used by
//   --------------------------------  -----------------  -----------------------------
//   resolvent scan range               [1e-8, 1e8]        certify_* (plus s = 0 when invertible)
//   resolvent scan points              512 (log-spaced)   certify_*
//   golden-section iterations          80                 certify_* refinement
//   eigenvector condition limit        1e12               eig / oracle route
//   oracle a-posteriori error limit    1e-6 (relative)    oracle route (else quadrature)
//   quadrature truncation (x = ln s)   [-40, 40]          real-line quadratures (extended on demand)
//   panels x nodes                     20 x 20            all quadratures (embedded rule: 10 nodes)
//   tail tolerance                     1e-10              truncation of every integral
//   panel refinement tolerance         1e-10 (relative)   adaptive bisection
//   imaginary-power panel width        <= pi / (4 |t|)    imaginary_power
//   BIP t grid                         81 points, [-10, 10]
//   BIP phi grid                       101 points, [0, 2]
//   Heinz-Kato exponent grid           {0.05, 0.10, ..., 0.95}
//   three-lines t grid                 81 points, [-10, 10] (at least 41 required by the harness)
//   region-bound samples               100

#include <cstddef>
#include <vector>

namespace hk::defaults {

inline constexpr double kScanSMin = 1e-8;
inline constexpr double kScanSMax = 1e8;
inline constexpr int kScanPoints = 512;
inline constexpr int kGoldenIterations = 80;

inline constexpr double kCondMax = 1e12;

inline constexpr double kTruncLower = -40.0;
inline constexpr double kTruncUpper = 40.0;
inline constexpr int kPanels = 20;
inline constexpr int kNodes = 20;
inline constexpr double kTailTol = 1e-10;
inline constexpr double kPanelRelTol = 1e-10;

inline constexpr double kBipTMax = 10.0;
inline constexpr int kBipTPoints = 81;
inline constexpr double kBipPhiMax = 2.0;
inline constexpr int kBipPhiPoints = 101;

inline constexpr double kTraceTMax = 10.0;
inline constexpr int kTraceTPoints = 81;
inline constexpr int kTraceMinTPoints = 41;

inline constexpr int kRegionSamples = 100;

/// n points uniformly on [lo, hi] (n == 1 gives {lo}).
inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  if (n <= 0) return out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
  return out;
}

/// {0.05, 0.10, ..., 0.95}, each value formed as i / 20 so that the grid is exact to rounding.
inline std::vector<double> heinz_kato_a_grid() {
  std::vector<double> a;
  for (int i = 1; i <= 19; ++i) a.push_back(static_cast<double>(i) / 20.0);
  return a;
}

inline std::vector<double> bip_t_grid() { return linspace(-kBipTMax, kBipTMax, kBipTPoints); }
inline std::vector<double> bip_phi_grid() { return linspace(0.0, kBipPhiMax, kBipPhiPoints); }
inline std::vector<double> trace_t_grid() { return linspace(-kTraceTMax, kTraceTMax, kTraceTPoints); }

}  // namespace hk::defaults
