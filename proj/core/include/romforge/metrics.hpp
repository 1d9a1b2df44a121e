#pragma once

#include <optional>
#include <string>
#include <vector>

#include "romforge/pod.hpp"

namespace romforge {

/// ||reference - candidate|| / ||reference|| in the discrete L2 norm;
/// empty when the reference has zero norm.
std::optional<double> relative_l2_error(const Field& reference, const Field& candidate);

/// Relative error of the kinetic energy 0.5 (u, u) per time.
std::vector<std::optional<double>> kinetic_energy_error(const std::vector<Field>& reference,
                                                        const std::vector<Field>& candidate);

/// Error of the best approximation of each field in the basis (lifting
/// coefficients taken from `bc` per entry when the basis is lifted).
std::vector<std::optional<double>> projection_error_series(
    const std::vector<Field>& fields, const PodBasis& basis,
    const std::vector<std::map<std::string, Vec2>>& bc = {});

/// Error of the fields reconstructed from coefficient vectors.
std::vector<std::optional<double>> prediction_error_series(const std::vector<Field>& reference,
                                                           const PodBasis& basis,
                                                           const std::vector<Eigen::VectorXd>& coeffs);

/// Mean over entries with time > t_min and a defined value; NaN if none.
double time_average(const std::vector<double>& times, const std::vector<std::optional<double>>& values,
                    double t_min);

struct PhaseTiming {
  std::string phase;
  double seconds = 0.0;
};

struct TimingReport {
  std::vector<PhaseTiming> phases;
  double fom_seconds = 0.0;
  double rom_seconds = 0.0;
  double speedup = 0.0;
};

/// Speedup = FOM time / ROM online time. Throws std::invalid_argument when
/// either phase is missing or the ROM time is not positive.
TimingReport timing_report(const std::vector<PhaseTiming>& phases, const std::string& fom_phase = "fom",
                           const std::string& rom_phase = "rom");

struct ErrorSeries {
  std::string name;
  std::vector<std::optional<double>> values;
};

/// CSV with a time column and one column per series; undefined entries are
/// written as "nan".
void write_error_csv(const std::string& path, const std::vector<double>& times,
                     const std::vector<ErrorSeries>& series);

}  // namespace romforge
