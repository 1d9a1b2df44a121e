#include "romforge/metrics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "romforge/errors.hpp"

namespace romforge {

std::optional<double> relative_l2_error(const Field& reference, const Field& candidate) {
  const double ref = l2_norm(reference);
  if (!(ref > 0.0)) return std::nullopt;
  return l2_norm(reference - candidate) / ref;
}

std::vector<std::optional<double>> kinetic_energy_error(const std::vector<Field>& reference,
                                                        const std::vector<Field>& candidate) {
  if (reference.size() != candidate.size()) throw std::invalid_argument("trajectories have different lengths");
  std::vector<std::optional<double>> out;
  for (std::size_t n = 0; n < reference.size(); ++n) {
    const auto& r = reference[n];
    const auto& c = candidate[n];
    if (r.time_stamp && c.time_stamp && std::abs(*r.time_stamp - *c.time_stamp) > 1e-9 * std::max(1.0, std::abs(*r.time_stamp)))
      throw std::invalid_argument("trajectory times are not aligned at entry " + std::to_string(n));
    const double ke_ref = 0.5 * inner_product(r, r);
    const double ke = 0.5 * inner_product(c, c);
    out.push_back(ke_ref > 0.0 ? std::optional<double>(std::abs(ke_ref - ke) / ke_ref) : std::nullopt);
  }
  return out;
}

std::vector<std::optional<double>> projection_error_series(const std::vector<Field>& fields, const PodBasis& basis,
                                                           const std::vector<std::map<std::string, Vec2>>& bc) {
  if (basis.n_lift() > 0 && bc.size() != fields.size())
    throw std::invalid_argument("lifted basis needs one boundary-value set per field");
  std::vector<std::optional<double>> out;
  for (std::size_t n = 0; n < fields.size(); ++n) {
    const Eigen::VectorXd a = basis.n_lift() > 0 ? project_with_lifting(fields[n], basis, bc[n])
                                                 : project_field(fields[n], basis);
    out.push_back(relative_l2_error(fields[n], reconstruct(basis, a)));
  }
  return out;
}

std::vector<std::optional<double>> prediction_error_series(const std::vector<Field>& reference,
                                                           const PodBasis& basis,
                                                           const std::vector<Eigen::VectorXd>& coeffs) {
  if (reference.size() != coeffs.size()) throw std::invalid_argument("reference and coefficient counts differ");
  std::vector<std::optional<double>> out;
  for (std::size_t n = 0; n < reference.size(); ++n)
    out.push_back(relative_l2_error(reference[n], reconstruct(basis, coeffs[n])));
  return out;
}

double time_average(const std::vector<double>& times, const std::vector<std::optional<double>>& values, double t_min) {
  if (times.size() != values.size()) throw std::invalid_argument("times and values have different lengths");
  double sum = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] <= t_min || !values[k]) continue;
    sum += *values[k];
    ++n;
  }
  return n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

TimingReport timing_report(const std::vector<PhaseTiming>& phases, const std::string& fom_phase,
                           const std::string& rom_phase) {
  TimingReport r;
  r.phases = phases;
  bool have_fom = false, have_rom = false;
  for (const auto& p : phases) {
    if (p.phase == fom_phase) {
      r.fom_seconds = p.seconds;
      have_fom = true;
    }
    if (p.phase == rom_phase) {
      r.rom_seconds = p.seconds;
      have_rom = true;
    }
  }
  if (!have_fom || !have_rom) throw std::invalid_argument("timing report needs both '" + fom_phase + "' and '" + rom_phase + "' phases");
  if (!(r.rom_seconds > 0.0)) throw std::invalid_argument("ROM time must be positive");
  r.speedup = r.fom_seconds / r.rom_seconds;
  return r;
}

void write_error_csv(const std::string& path, const std::vector<double>& times, const std::vector<ErrorSeries>& series) {
  for (const auto& s : series)
    if (s.values.size() != times.size()) throw std::invalid_argument("series '" + s.name + "' has the wrong length");
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  os.precision(12);
  os << "time";
  for (const auto& s : series) os << ',' << s.name;
  os << '\n';
  for (std::size_t k = 0; k < times.size(); ++k) {
    os << times[k];
    for (const auto& s : series) {
      os << ',';
      if (s.values[k]) os << *s.values[k];
      else os << "nan";
    }
    os << '\n';
  }
}

}  // namespace romforge
