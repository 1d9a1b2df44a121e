#include "romforge/galerkin.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "romforge/errors.hpp"
#include "romforge/fv_operators.hpp"
#include "romforge/hash.hpp"
#include "romforge/io.hpp"

namespace romforge {

Eigen::VectorXd contract(const Tensor3& t, const Eigen::VectorXd& a) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) out[static_cast<Eigen::Index>(i)] = a.dot(t[i] * a);
  return out;
}

int ReducedSystem::find_penalty(const std::string& patch, int component) const {
  for (std::size_t l = 0; l < penalty.size(); ++l)
    if (penalty[l].patch == patch && penalty[l].component == component) return static_cast<int>(l);
  return -1;
}

namespace {

void require_same_mesh(const PodBasis& u, const PodBasis& p) {
  if (u.modes.empty() || p.modes.empty()) throw std::invalid_argument("empty basis");
  if (u.modes.front().components() != 2) throw std::invalid_argument("velocity basis must hold vector modes");
  if (p.modes.front().components() != 1) throw std::invalid_argument("pressure basis must hold scalar modes");
  if (&u.mesh() != &p.mesh() && u.mesh().fingerprint() != p.mesh().fingerprint())
    throw std::invalid_argument("velocity and pressure bases live on different meshes");
}

std::vector<Field> pressure_gradients(const PodBasis& p) {
  std::vector<Field> out;
  for (const auto& chi : p.modes) out.push_back(fv::gradient(chi));
  return out;
}

void check_cap(int n, int cap) {
  if (n > cap)
    throw ConfigError("velocity basis of " + std::to_string(n) + " modes exceeds the tensor cap of " +
                      std::to_string(cap) + " (storage grows with the cube of the mode count)");
}

// Calls fn(j, k, div(phi_j (x) phi_k)) for every mode pair.
template <typename Fn>
void for_each_convection(const PodBasis& u, Fn&& fn) {
  for (int j = 0; j < u.size(); ++j)
    for (int k = 0; k < u.size(); ++k)
      fn(j, k, fv::convection(u.modes[static_cast<std::size_t>(j)], u.modes[static_cast<std::size_t>(k)]));
}

}  // namespace

MomentumOperators assemble_momentum(const PodBasis& velocity, const PodBasis& pressure) {
  require_same_mesh(velocity, pressure);
  const int nu = velocity.size();
  const int np = pressure.size();
  MomentumOperators ops{Eigen::MatrixXd(nu, nu), Eigen::MatrixXd(nu, nu), Eigen::MatrixXd(nu, np)};
  std::vector<Field> lap;
  for (const auto& phi : velocity.modes) lap.push_back(fv::laplacian(phi));
  const auto grads = pressure_gradients(pressure);
  for (int i = 0; i < nu; ++i) {
    const Field& phi = velocity.modes[static_cast<std::size_t>(i)];
    for (int j = 0; j < nu; ++j) {
      ops.M(i, j) = inner_product(phi, velocity.modes[static_cast<std::size_t>(j)]);
      ops.A(i, j) = inner_product(phi, lap[static_cast<std::size_t>(j)]);
    }
    for (int j = 0; j < np; ++j) ops.B(i, j) = inner_product(phi, grads[static_cast<std::size_t>(j)]);
  }
  return ops;
}

Tensor3 assemble_convective_tensor(const PodBasis& velocity, int cap) {
  const int n = velocity.size();
  check_cap(n, cap);
  Tensor3 c(static_cast<std::size_t>(n), Eigen::MatrixXd(n, n));
  for_each_convection(velocity, [&](int j, int k, const Field& conv) {
    for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)](j, k) = inner_product(velocity.modes[static_cast<std::size_t>(i)], conv);
  });
  return c;
}

PpeOperators assemble_ppe(const PodBasis& velocity, const PodBasis& pressure, int cap) {
  require_same_mesh(velocity, pressure);
  const int nu = velocity.size();
  const int np = pressure.size();
  check_cap(nu, cap);
  const auto& mesh = velocity.mesh();
  const auto grads = pressure_gradients(pressure);

  PpeOperators ops{Eigen::MatrixXd(np, np), Tensor3(static_cast<std::size_t>(np), Eigen::MatrixXd(nu, nu)),
                   Eigen::MatrixXd::Zero(np, nu), Eigen::MatrixXd::Zero(np, nu)};
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < np; ++j)
      ops.D(i, j) = inner_product(grads[static_cast<std::size_t>(i)], grads[static_cast<std::size_t>(j)]);

  for_each_convection(velocity, [&](int j, int k, const Field& conv) {
    for (int i = 0; i < np; ++i) ops.G[static_cast<std::size_t>(i)](j, k) = inner_product(grads[static_cast<std::size_t>(i)], conv);
  });

  std::vector<Field> curls;
  for (const auto& phi : velocity.modes) curls.push_back(fv::boundary_vorticity(phi));
  for (std::size_t pi = 0; pi < mesh.patches().size(); ++pi) {
    const auto& patch = mesh.patches()[pi];
    const int ip = static_cast<int>(pi);
    for (std::size_t f = 0; f < patch.size(); ++f) {
      const int face = static_cast<int>(f);
      const double area = patch.face_areas[f];
      for (int i = 0; i < np; ++i) {
        const double n_cross_grad = fv::boundary_tangential_derivative(grads[static_cast<std::size_t>(i)], ip, face);
        const double chi = pressure.modes[static_cast<std::size_t>(i)].boundary(ip, face);
        for (int j = 0; j < nu; ++j) {
          ops.N(i, j) += area * n_cross_grad * curls[static_cast<std::size_t>(j)].boundary(ip, face);
          ops.T(i, j) += area * chi * patch.normals[f].dot(velocity.modes[static_cast<std::size_t>(j)].boundary_vec(ip, face));
        }
      }
    }
  }
  return ops;
}

std::vector<PenaltyTerm> assemble_penalty(const PodBasis& velocity, const std::vector<std::string>& patches) {
  if (velocity.modes.empty()) throw std::invalid_argument("empty basis");
  const auto& mesh = velocity.mesh();
  std::vector<PenaltyTerm> out;
  for (const auto& name : patches) {
    const auto idx = mesh.find_patch(name);
    if (!idx) throw std::invalid_argument("mesh has no patch named '" + name + "'");
    const auto& patch = mesh.patches()[static_cast<std::size_t>(*idx)];
    const auto nf = static_cast<Eigen::Index>(patch.size());
    for (int comp = 0; comp < 2; ++comp) {
      PenaltyTerm t;
      t.patch = name;
      t.component = comp;
      t.face_areas = Eigen::Map<const Eigen::VectorXd>(patch.face_areas.data(), nf);
      t.face_values.resize(nf, velocity.size());
      for (Eigen::Index f = 0; f < nf; ++f)
        for (int i = 0; i < velocity.size(); ++i)
          t.face_values(f, i) = velocity.modes[static_cast<std::size_t>(i)].boundary(*idx, static_cast<int>(f), comp);
      t.p1 = t.face_values.transpose() * t.face_areas.asDiagonal() * t.face_values;
      t.p2 = t.face_values.transpose() * t.face_areas;
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::string combined_basis_hash(const PodBasis& velocity, const PodBasis& pressure) {
  Fnv1a h;
  h.update(basis_hash(velocity));
  h.update(basis_hash(pressure));
  return h.hex();
}

ReducedSystem assemble_reduced_system(const PodBasis& velocity, const PodBasis& pressure, double nu, int cap) {
  ReducedSystem sys;
  sys.n_u = velocity.size();
  sys.n_p = pressure.size();
  sys.nu = nu;
  auto mom = assemble_momentum(velocity, pressure);
  sys.M = std::move(mom.M);
  sys.A = std::move(mom.A);
  sys.B = std::move(mom.B);
  sys.C = assemble_convective_tensor(velocity, cap);
  auto ppe = assemble_ppe(velocity, pressure, cap);
  sys.D = std::move(ppe.D);
  sys.G = std::move(ppe.G);
  sys.N = std::move(ppe.N);
  sys.T = std::move(ppe.T);
  std::vector<std::string> controlled;
  for (const auto& p : velocity.mesh().patches())
    if (p.kind == PatchKind::DirichletVelocity) controlled.push_back(p.name);
  sys.penalty = assemble_penalty(velocity, controlled);
  for (const auto& l : velocity.liftings) sys.liftings.push_back({l.patch, l.direction, l.scale});
  sys.basis_hash = combined_basis_hash(velocity, pressure);
  return sys;
}

namespace {

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  // Row-major on disk.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r = m;
  detail::write_f64_le(os, r.data(), static_cast<std::size_t>(r.size()));
}

Eigen::MatrixXd read_matrix(std::istream& is, Eigen::Index rows, Eigen::Index cols) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r(rows, cols);
  detail::read_f64_le(is, r.data(), static_cast<std::size_t>(r.size()));
  return r;
}

template <typename T>
T parse_field(const std::string& line, const std::string& key) {
  std::istringstream ss(line);
  std::string k;
  T v{};
  if (!(ss >> k >> v) || k != key) throw ConfigError("reduced-system header: expected '" + key + "', got '" + line + "'");
  return v;
}

}  // namespace

void write_reduced_system(const ReducedSystem& sys, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write reduced system to '" + path + "'");
  os.precision(17);
  os << kReducedSystemMagic << '\n'
     << "n_u " << sys.n_u << '\n'
     << "n_p " << sys.n_p << '\n'
     << "nu " << sys.nu << '\n'
     << "basis_hash " << sys.basis_hash << '\n'
     << "lineage " << (sys.lineage.empty() ? "-" : sys.lineage) << '\n'
     << "liftings " << sys.liftings.size() << '\n';
  for (const auto& l : sys.liftings) os << l.patch << ' ' << l.direction.x << ' ' << l.direction.y << ' ' << l.scale << '\n';
  os << "penalty " << sys.penalty.size() << '\n';
  for (const auto& t : sys.penalty) os << t.patch << ' ' << t.component << ' ' << t.face_areas.size() << '\n';
  os << "end_header\n";
  for (const auto* m : {&sys.M, &sys.A, &sys.B}) write_matrix(os, *m);
  for (const auto& s : sys.C) write_matrix(os, s);
  write_matrix(os, sys.D);
  for (const auto& s : sys.G) write_matrix(os, s);
  write_matrix(os, sys.N);
  write_matrix(os, sys.T);
  for (const auto& t : sys.penalty) {
    write_matrix(os, t.face_areas);
    write_matrix(os, t.face_values);
  }
  if (!os) throw ConfigError("failed writing reduced system to '" + path + "'");
}

ReducedSystem read_reduced_system(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open reduced system '" + path + "'");
  if (detail::read_header_line(is) != kReducedSystemMagic) throw ConfigError("'" + path + "' is not a reduced-system file");
  ReducedSystem sys;
  sys.n_u = parse_field<int>(detail::read_header_line(is), "n_u");
  sys.n_p = parse_field<int>(detail::read_header_line(is), "n_p");
  sys.nu = parse_field<double>(detail::read_header_line(is), "nu");
  sys.basis_hash = parse_field<std::string>(detail::read_header_line(is), "basis_hash");
  sys.lineage = parse_field<std::string>(detail::read_header_line(is), "lineage");
  if (sys.lineage == "-") sys.lineage.clear();
  const auto nl = parse_field<std::size_t>(detail::read_header_line(is), "liftings");
  for (std::size_t k = 0; k < nl; ++k) {
    std::istringstream ss(detail::read_header_line(is));
    LiftingInfo l;
    if (!(ss >> l.patch >> l.direction.x >> l.direction.y >> l.scale)) throw ConfigError("bad lifting line in '" + path + "'");
    sys.liftings.push_back(l);
  }
  const auto np = parse_field<std::size_t>(detail::read_header_line(is), "penalty");
  std::vector<Eigen::Index> faces;
  for (std::size_t k = 0; k < np; ++k) {
    std::istringstream ss(detail::read_header_line(is));
    PenaltyTerm t;
    Eigen::Index nf = 0;
    if (!(ss >> t.patch >> t.component >> nf) || nf <= 0) throw ConfigError("bad penalty line in '" + path + "'");
    sys.penalty.push_back(std::move(t));
    faces.push_back(nf);
  }
  if (detail::read_header_line(is) != "end_header") throw ConfigError("missing end_header in '" + path + "'");
  if (sys.n_u <= 0 || sys.n_p <= 0) throw ConfigError("invalid mode counts in '" + path + "'");

  const Eigen::Index u = sys.n_u, p = sys.n_p;
  sys.M = read_matrix(is, u, u);
  sys.A = read_matrix(is, u, u);
  sys.B = read_matrix(is, u, p);
  for (Eigen::Index i = 0; i < u; ++i) sys.C.push_back(read_matrix(is, u, u));
  sys.D = read_matrix(is, p, p);
  for (Eigen::Index i = 0; i < p; ++i) sys.G.push_back(read_matrix(is, u, u));
  sys.N = read_matrix(is, p, u);
  sys.T = read_matrix(is, p, u);
  for (std::size_t k = 0; k < sys.penalty.size(); ++k) {
    auto& t = sys.penalty[k];
    t.face_areas = read_matrix(is, faces[k], 1);
    t.face_values = read_matrix(is, faces[k], u);
    t.p1 = t.face_values.transpose() * t.face_areas.asDiagonal() * t.face_values;
    t.p2 = t.face_values.transpose() * t.face_areas;
  }
  return sys;
}

}  // namespace romforge
