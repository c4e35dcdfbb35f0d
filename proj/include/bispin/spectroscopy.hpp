#ifndef BISPIN_SPECTROSCOPY_HPP
#define BISPIN_SPECTROSCOPY_HPP

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bispin/spin_core.hpp"

namespace bispin {

/// Intensities are |<u|Sx|l>|^2 (max 1/4). 0.05 separates the allowed lines
/// from the weak forbidden ones at both 4.044 and 9.7 GHz.
inline constexpr double kDefaultIntensityFloor = 0.05;

struct Transition {
  int label_upper = 0;
  int label_lower = 0;
  double field_b = 0.0;        // T
  double frequency_mhz = 0.0;
  double sx_element = 0.0;     // |<upper|Sx|lower>|
  double intensity = 0.0;      // sx_element^2
  double dfdb_mhz_per_mt = 0.0;
};

/// Label pairs (i < j) whose conserved m differ by one.
std::vector<std::pair<int, int>> adjacent_doublet_pairs(const SpinSystem& sys);

double transition_frequency(const DonorEigensystem& es, int i, int j);
double transition_frequency(const SpinSystem& sys, int i, int j, double b_tesla);

double sx_matrix_element(const DonorEigensystem& es, int i, int j);
double sx_matrix_element(const SpinSystem& sys, int i, int j, double b_tesla);

/// Every B in [b_min, b_max] where |E_i - E_j| = f_target, refined to 1e-9 T.
/// Scans on a 0.5 mT grid and probes turning points of f(B) so that roots
/// near extrema (two resonant fields close together) are kept.
std::vector<double> resonance_fields(const SpinSystem& sys, int i, int j, double f_target_mhz,
                                     double b_min, double b_max);

/// All adjacent-doublet resonances with intensity > floor, sorted by field.
std::vector<Transition> find_all_resonances(const SpinSystem& sys, double f_target_mhz, double b_min,
                                            double b_max, double intensity_floor = kDefaultIntensityFloor);

Transition make_transition(const SpinSystem& sys, int i, int j, double b_tesla);

/// Rotating-wave nutation frequency 2 f1 |<i|Sx|j>| (MHz).
double rabi_frequency(const SpinSystem& sys, int i, int j, double b_tesla, double f1_mhz);

inline constexpr double kDfDbStepTesla = 1e-4;

/// Central difference of the transition frequency, MHz/mT, O(step^2).
double df_db(const SpinSystem& sys, int i, int j, double b_tesla);

enum class SpectrumMode { absorption, derivative };

struct SpectrumCurve {
  Eigen::VectorXd field;   // T, ascending
  Eigen::VectorXd signal;  // absorption per tesla, or its field derivative
  SpectrumMode mode = SpectrumMode::absorption;
};

/// Sum of unit-area Gaussians (scaled by intensity) or their field derivatives.
SpectrumCurve synthesize_spectrum(std::span<const Transition> lines, double fwhm_mt, SpectrumMode mode,
                                  const Eigen::VectorXd& field_grid);

struct MapPoint {
  double field_b = 0.0;
  int label_upper = 0;
  int label_lower = 0;
  double frequency_mhz = 0.0;
  double intensity = 0.0;
};

/// Frequency-field map over every adjacent-doublet pair, rows kept when intensity > floor.
std::vector<MapPoint> frequency_field_map(const SpinSystem& sys, const Eigen::VectorXd& field_grid,
                                          double intensity_floor = kDefaultIntensityFloor);

}  // namespace bispin

#endif  // BISPIN_SPECTROSCOPY_HPP
