#include "romforge/fv_operators.hpp"

#include <stdexcept>

namespace romforge::fv {

namespace {
constexpr std::array<Side, 4> kSides{Side::West, Side::East, Side::South, Side::North};
}

double face_value(const Field& f, int c, Side s, int comp) {
  const auto& mesh = f.mesh();
  const FaceRef ref = mesh.face_of(c, s);
  if (ref.kind == FaceRef::Kind::Boundary) return f.boundary(ref.index, ref.local, comp);
  return 0.5 * (f.cell(c, comp) + f.cell(mesh.neighbour(c, s), comp));
}

Field gradient(const Field& scalar) {
  if (scalar.components() != 1) throw std::invalid_argument("gradient expects a scalar field");
  const auto& mesh = scalar.mesh();
  Field g = Field::vector(scalar.mesh_ptr());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    Vec2 acc;
    for (Side s : kSides) acc = acc + side_normal(s) * (mesh.side_area(s) * face_value(scalar, c, s, 0));
    g.set_cell_vec(c, acc * (1.0 / mesh.cell_volume(c)));
  }
  for (std::size_t p = 0; p < mesh.patches().size(); ++p) {
    const auto& patch = mesh.patches()[p];
    for (std::size_t f = 0; f < patch.size(); ++f)
      g.set_boundary_vec(static_cast<int>(p), static_cast<int>(f), g.cell_vec(patch.faces[f].cell));
  }
  return g;
}

std::vector<std::array<double, 4>> velocity_gradient(const Field& u) {
  if (u.components() != 2) throw std::invalid_argument("velocity_gradient expects a vector field");
  const auto& mesh = u.mesh();
  std::vector<std::array<double, 4>> out(static_cast<std::size_t>(mesh.num_cells()));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    std::array<double, 4> g{};
    for (Side s : kSides) {
      const Vec2 n = side_normal(s) * mesh.side_area(s);
      const double fu = face_value(u, c, s, 0);
      const double fv = face_value(u, c, s, 1);
      g[0] += fu * n.x;
      g[1] += fu * n.y;
      g[2] += fv * n.x;
      g[3] += fv * n.y;
    }
    const double inv = 1.0 / mesh.cell_volume(c);
    for (double& v : g) v *= inv;
    out[static_cast<std::size_t>(c)] = g;
  }
  return out;
}

Field vorticity(const Field& u) {
  const auto grad = velocity_gradient(u);
  Field w = Field::scalar(u.mesh_ptr());
  for (int c = 0; c < u.mesh().num_cells(); ++c) {
    const auto& g = grad[static_cast<std::size_t>(c)];
    w.cell(c) = g[2] - g[1];
  }
  const auto& mesh = u.mesh();
  for (std::size_t p = 0; p < mesh.patches().size(); ++p) {
    const auto& patch = mesh.patches()[p];
    for (std::size_t f = 0; f < patch.size(); ++f)
      w.boundary(static_cast<int>(p), static_cast<int>(f)) = w.cell(patch.faces[f].cell);
  }
  return w;
}

Field boundary_vorticity(const Field& u) {
  const auto grad = velocity_gradient(u);
  Field w = vorticity(u);
  const auto& mesh = u.mesh();
  for (std::size_t p = 0; p < mesh.patches().size(); ++p) {
    const auto& patch = mesh.patches()[p];
    for (std::size_t f = 0; f < patch.size(); ++f) {
      const int c = patch.faces[f].cell;
      auto g = grad[static_cast<std::size_t>(c)];
      const Vec2 n = patch.normals[f];
      const Vec2 dn = (u.boundary_vec(static_cast<int>(p), static_cast<int>(f)) - u.cell_vec(c)) *
                      (1.0 / mesh.half_width(patch.faces[f].side));
      if (n.x != 0.0) {
        g[0] = n.x * dn.x;
        g[2] = n.x * dn.y;
      } else {
        g[1] = n.y * dn.x;
        g[3] = n.y * dn.y;
      }
      w.boundary(static_cast<int>(p), static_cast<int>(f)) = g[2] - g[1];
    }
  }
  return w;
}

Field laplacian(const Field& f) {
  const auto& mesh = f.mesh();
  Field out(f.mesh_ptr(), f.components());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int k = 0; k < f.components(); ++k) {
      double acc = 0.0;
      for (Side s : kSides) {
        const FaceRef ref = mesh.face_of(c, s);
        const double area = mesh.side_area(s);
        if (ref.kind == FaceRef::Kind::Internal) {
          const double d = (s == Side::West || s == Side::East) ? mesh.dx() : mesh.dy();
          acc += area / d * (f.cell(mesh.neighbour(c, s), k) - f.cell(c, k));
        } else {
          acc += area / mesh.half_width(s) * (f.boundary(ref.index, ref.local, k) - f.cell(c, k));
        }
      }
      out.cell(c, k) = acc / mesh.cell_volume(c);
    }
  }
  return out;
}

Field convection(const Field& w, const Field& v) {
  if (w.components() != 2) throw std::invalid_argument("convecting field must be a vector field");
  if (w.mesh_ptr() != v.mesh_ptr() && w.mesh().fingerprint() != v.mesh().fingerprint())
    throw std::invalid_argument("fields live on different meshes");
  const auto& mesh = w.mesh();
  Field out(v.mesh_ptr(), v.components());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (Side s : kSides) {
      const Vec2 n = side_normal(s);
      const double flux =
          mesh.side_area(s) * (n.x * face_value(w, c, s, 0) + n.y * face_value(w, c, s, 1));
      for (int k = 0; k < v.components(); ++k) out.cell(c, k) += flux * face_value(v, c, s, k);
    }
    for (int k = 0; k < v.components(); ++k) out.cell(c, k) /= mesh.cell_volume(c);
  }
  return out;
}

Field divergence(const Field& u) {
  if (u.components() != 2) throw std::invalid_argument("divergence expects a vector field");
  const auto& mesh = u.mesh();
  Field out = Field::scalar(u.mesh_ptr());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    double acc = 0.0;
    for (Side s : kSides) {
      const Vec2 n = side_normal(s);
      acc += mesh.side_area(s) * (n.x * face_value(u, c, s, 0) + n.y * face_value(u, c, s, 1));
    }
    out.cell(c) = acc / mesh.cell_volume(c);
  }
  return out;
}

std::vector<double> interpolated_flux(const Field& u) {
  const auto& mesh = u.mesh();
  std::vector<double> flux(mesh.internal_faces().size());
  for (std::size_t f = 0; f < flux.size(); ++f) {
    const auto& face = mesh.internal_faces()[f];
    const Vec2 uf = (u.cell_vec(face.owner) + u.cell_vec(face.neighbour)) * 0.5;
    flux[f] = face.area * face.normal.dot(uf);
  }
  return flux;
}

double boundary_tangential_derivative(const Field& scalar_gradient, int patch, int face) {
  const auto& p = scalar_gradient.mesh().patches()[static_cast<std::size_t>(patch)];
  const Vec2 n = p.normals[static_cast<std::size_t>(face)];
  const Vec2 t{-n.y, n.x};
  return t.dot(scalar_gradient.cell_vec(p.faces[static_cast<std::size_t>(face)].cell));
}

}  // namespace romforge::fv
