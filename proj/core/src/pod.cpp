#include "romforge/pod.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "romforge/errors.hpp"
#include "romforge/hash.hpp"
#include "romforge/io.hpp"

namespace romforge {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(ComponentTag tag) { return tag == ComponentTag::Velocity ? "velocity" : "pressure"; }

ComponentTag component_tag_from_string(const std::string& s) {
  if (s == "velocity") return ComponentTag::Velocity;
  if (s == "pressure") return ComponentTag::Pressure;
  throw ConfigError("unknown component tag '" + s + "'");
}

namespace {

void require_common_mesh(const std::vector<Field>& fields) {
  if (fields.empty()) throw std::invalid_argument("empty snapshot set");
  for (const auto& f : fields) fields.front().require_compatible(f);
}

// Cell values weighted by sqrt(volume), one column per field, so that
// X^T X is the matrix of discrete L2 inner products.
Eigen::MatrixXd weighted_cells(const std::vector<Field>& fields) {
  const auto& mesh = fields.front().mesh();
  const int nc = fields.front().components();
  const auto rows = static_cast<Eigen::Index>(mesh.num_cells()) * nc;
  Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(fields.size()));
  Eigen::VectorXd w(rows);
  for (int c = 0; c < mesh.num_cells(); ++c)
    for (int k = 0; k < nc; ++k) w[static_cast<Eigen::Index>(c) * nc + k] = std::sqrt(mesh.cell_volume(c));
  for (std::size_t n = 0; n < fields.size(); ++n) {
    const auto cv = fields[n].cell_values();
    x.col(static_cast<Eigen::Index>(n)) = Eigen::Map<const Eigen::VectorXd>(cv.data(), rows).cwiseProduct(w);
  }
  return x;
}

void fix_sign(Field& mode) {
  double best = 0.0;
  for (double v : mode.cell_values())
    if (std::abs(v) > std::abs(best)) best = v;
  if (best < 0.0) mode *= -1.0;
}

}  // namespace

Eigen::MatrixXd correlation_matrix(const std::vector<Field>& snapshots) {
  require_common_mesh(snapshots);
  const Eigen::MatrixXd x = weighted_cells(snapshots);
  Eigen::MatrixXd c = x.transpose() * x;
  // Exact symmetry regardless of the product kernel's summation order.
  return 0.5 * (c + c.transpose());
}

int numerical_rank(const std::vector<double>& eigenvalues) {
  if (eigenvalues.empty() || !(eigenvalues.front() > 0.0)) return 0;
  const double cut = 1e-12 * eigenvalues.front();
  int r = 0;
  for (double l : eigenvalues)
    if (l > cut) ++r;
  return r;
}

PodBasis compute_pod(const std::vector<Field>& snapshots, int n_modes, ComponentTag tag) {
  const Eigen::MatrixXd c = correlation_matrix(snapshots);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  if (es.info() != Eigen::Success) throw NumericalError("correlation-matrix eigen decomposition failed");
  const auto ns = static_cast<int>(snapshots.size());

  PodBasis basis;
  basis.tag = tag;
  Eigen::MatrixXd q(ns, ns);
  for (int i = 0; i < ns; ++i) {
    basis.eigenvalues.push_back(std::max(0.0, es.eigenvalues()[ns - 1 - i]));
    q.col(i) = es.eigenvectors().col(ns - 1 - i);
  }
  const int rank = numerical_rank(basis.eigenvalues);
  if (rank == 0) throw ConfigError("snapshot set has zero energy; no POD modes exist");
  if (n_modes < 1 || n_modes > rank)
    throw ConfigError("requested " + std::to_string(n_modes) + " modes but the snapshot set has numerical rank " +
                      std::to_string(rank));

  for (int i = 0; i < n_modes; ++i) {
    Field mode(snapshots.front().mesh_ptr(), snapshots.front().components());
    const double pre = 1.0 / (ns * std::sqrt(basis.eigenvalues[static_cast<std::size_t>(i)]));
    for (int n = 0; n < ns; ++n) mode.axpy(pre * q(n, i), snapshots[static_cast<std::size_t>(n)]);
    const double norm = l2_norm(mode);
    if (!(norm > 0.0)) throw NumericalError("POD mode " + std::to_string(i) + " has zero norm");
    mode *= 1.0 / norm;
    fix_sign(mode);
    basis.modes.push_back(std::move(mode));
  }
  return basis;
}

std::vector<double> cumulative_energy(const std::vector<double>& eigenvalues) {
  double total = 0.0;
  for (double l : eigenvalues) {
    if (l < 0.0) throw std::invalid_argument("negative eigenvalue in spectrum");
    total += l;
  }
  if (!(total > 0.0)) throw std::invalid_argument("spectrum has zero total energy");
  std::vector<double> out;
  double run = 0.0;
  for (double l : eigenvalues) {
    run += l;
    out.push_back(run / total);
  }
  out.back() = 1.0;
  return out;
}

Field normalize_lifting(const Field& raw) {
  const double norm = l2_norm(raw);
  if (!(norm > 0.0)) throw std::invalid_argument("cannot normalize a zero lifting field");
  Field out = raw;
  out *= 1.0 / norm;
  return out;
}

Lifting make_lifting(const Field& raw, const std::string& patch) {
  if (raw.components() != 2) throw std::invalid_argument("lifting must be a vector field");
  const auto idx = raw.mesh().find_patch(patch);
  if (!idx) throw std::invalid_argument("mesh has no patch named '" + patch + "'");
  const auto& p = raw.mesh().patches()[static_cast<std::size_t>(*idx)];
  Vec2 mean{};
  for (std::size_t f = 0; f < p.size(); ++f) mean = mean + raw.boundary_vec(*idx, static_cast<int>(f)) * p.face_areas[f];
  mean = mean * (1.0 / p.total_area());
  const double mag = mean.norm();
  if (!(mag > 0.0)) throw std::invalid_argument("lifting has zero boundary value on patch '" + patch + "'");
  Lifting l;
  l.patch = patch;
  l.direction = mean * (1.0 / mag);
  l.mode = normalize_lifting(raw);
  l.scale = mag / l2_norm(raw);
  return l;
}

std::vector<Field> homogenize_snapshots(const std::vector<Field>& snapshots, const std::vector<Lifting>& liftings,
                                        const std::map<std::string, std::vector<Vec2>>& bc_trace) {
  std::vector<Field> out = snapshots;
  for (const auto& l : liftings) {
    auto it = bc_trace.find(l.patch);
    if (it == bc_trace.end()) throw std::invalid_argument("no boundary trace for lifting patch '" + l.patch + "'");
    if (it->second.size() != snapshots.size())
      throw std::invalid_argument("boundary trace length does not match the snapshot count");
    for (std::size_t n = 0; n < out.size(); ++n) out[n].axpy(-l.coefficient(it->second[n]), l.mode);
  }
  return out;
}

PodBasis extend_basis_with_lifting(PodBasis basis, const std::vector<Lifting>& liftings) {
  std::vector<Field> modes;
  for (const auto& l : liftings) {
    if (!basis.modes.empty()) basis.modes.front().require_compatible(l.mode);
    modes.push_back(l.mode);
  }
  for (auto& m : basis.modes) modes.push_back(std::move(m));
  basis.modes = std::move(modes);
  basis.liftings.insert(basis.liftings.begin(), liftings.begin(), liftings.end());
  return basis;
}

Eigen::VectorXd lifting_coefficients(const PodBasis& basis, const std::map<std::string, Vec2>& bc) {
  Eigen::VectorXd c(basis.n_lift());
  for (int j = 0; j < basis.n_lift(); ++j) {
    const auto& l = basis.liftings[static_cast<std::size_t>(j)];
    auto it = bc.find(l.patch);
    if (it == bc.end()) throw std::invalid_argument("no boundary value for lifting patch '" + l.patch + "'");
    c[j] = l.coefficient(it->second);
  }
  return c;
}

Eigen::VectorXd project_field(const Field& field, const PodBasis& basis) {
  Eigen::VectorXd a(basis.size());
  for (int i = 0; i < basis.size(); ++i) a[i] = inner_product(basis.modes[static_cast<std::size_t>(i)], field);
  return a;
}

Field reconstruct(const PodBasis& basis, const Eigen::VectorXd& coeffs) {
  if (basis.modes.empty()) throw std::invalid_argument("empty basis");
  if (coeffs.size() != basis.size())
    throw std::invalid_argument("coefficient vector has " + std::to_string(coeffs.size()) + " entries, basis has " +
                                std::to_string(basis.size()) + " modes");
  Field out(basis.modes.front().mesh_ptr(), basis.modes.front().components());
  for (int i = 0; i < basis.size(); ++i) out.axpy(coeffs[i], basis.modes[static_cast<std::size_t>(i)]);
  return out;
}

Eigen::VectorXd project_with_lifting(const Field& field, const PodBasis& basis,
                                     const std::map<std::string, Vec2>& bc) {
  Eigen::VectorXd a(basis.size());
  const Eigen::VectorXd lift = lifting_coefficients(basis, bc);
  Field homogeneous = field;
  for (int j = 0; j < basis.n_lift(); ++j) {
    a[j] = lift[j];
    homogeneous.axpy(-lift[j], basis.modes[static_cast<std::size_t>(j)]);
  }
  for (int i = basis.n_lift(); i < basis.size(); ++i)
    a[i] = inner_product(basis.modes[static_cast<std::size_t>(i)], homogeneous);
  return a;
}

std::string basis_hash(const PodBasis& basis) {
  Fnv1a h;
  h.update(to_string(basis.tag));
  for (const auto& m : basis.modes) h.update(std::as_bytes(m.data()));
  for (double l : basis.eigenvalues) h.update_value(l);
  for (const auto& l : basis.liftings) {
    h.update(l.patch);
    h.update_value(l.direction.x);
    h.update_value(l.direction.y);
    h.update_value(l.scale);
  }
  return h.hex();
}

void write_basis(const std::string& dir, const PodBasis& basis, const std::string& lineage) {
  fs::create_directories(dir);
  json j;
  j["tag"] = to_string(basis.tag);
  j["n_modes"] = basis.size();
  j["n_lift"] = basis.n_lift();
  j["eigenvalues"] = basis.eigenvalues;
  j["hash"] = basis_hash(basis);
  j["lineage"] = lineage;
  if (!basis.modes.empty()) j["mesh_fingerprint"] = to_hex(basis.mesh().fingerprint());
  json lifts = json::array();
  for (const auto& l : basis.liftings)
    lifts.push_back({{"patch", l.patch}, {"direction", {l.direction.x, l.direction.y}}, {"scale", l.scale}});
  j["liftings"] = lifts;
  json files = json::array();
  for (int i = 0; i < basis.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "mode_%04d.field", i);
    write_field(basis.modes[static_cast<std::size_t>(i)], fs::path(dir) / name);
    files.push_back(name);
  }
  j["mode_files"] = files;
  std::ofstream os(fs::path(dir) / "manifest.json");
  if (!os) throw ConfigError("cannot write basis manifest in '" + dir + "'");
  os << j.dump(2) << '\n';
}

PodBasis read_basis(const std::string& dir, const MeshPtr& mesh, std::string* lineage) {
  std::ifstream is(fs::path(dir) / "manifest.json");
  if (!is) throw ConfigError("no basis manifest in '" + dir + "'");
  json j;
  try {
    is >> j;
    PodBasis basis;
    basis.tag = component_tag_from_string(j.at("tag").get<std::string>());
    basis.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    for (const auto& name : j.at("mode_files")) basis.modes.push_back(read_field(fs::path(dir) / name.get<std::string>(), mesh));
    const auto& lifts = j.at("liftings");
    for (std::size_t k = 0; k < lifts.size(); ++k) {
      Lifting l;
      l.patch = lifts[k].at("patch").get<std::string>();
      l.direction = {lifts[k].at("direction")[0].get<double>(), lifts[k].at("direction")[1].get<double>()};
      l.scale = lifts[k].at("scale").get<double>();
      l.mode = basis.modes.at(k);
      basis.liftings.push_back(std::move(l));
    }
    if (basis_hash(basis) != j.at("hash").get<std::string>())
      throw ConfigError("basis in '" + dir + "' does not match its manifest hash");
    if (lineage) *lineage = j.value("lineage", std::string{});
    return basis;
  } catch (const json::exception& e) {
    throw ConfigError("malformed basis manifest in '" + dir + "': " + e.what());
  }
}

}  // namespace romforge
