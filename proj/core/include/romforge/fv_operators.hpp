#pragma once

#include <array>
#include <vector>

#include "romforge/field.hpp"

namespace romforge::fv {

// Explicit finite-volume operators shared by the full-order solver and the
// Galerkin projection. Face values are linear interpolants between the two
// adjacent cells on internal faces and the stored boundary value on patch
// faces. Results carry zero boundary values unless stated otherwise.

/// Value of `f` (component `comp`) on side `s` of cell `c`.
double face_value(const Field& f, int c, Side s, int comp);

/// Gauss gradient of a scalar field; boundary values are copied from the
/// adjacent cell.
Field gradient(const Field& scalar);

/// Per-cell velocity gradient: {du/dx, du/dy, dv/dx, dv/dy}.
std::vector<std::array<double, 4>> velocity_gradient(const Field& u);

/// Cell vorticity dv/dx - du/dy from the Gauss velocity gradient.
Field vorticity(const Field& u);

/// Vorticity with one-sided boundary values: on each patch face the
/// wall-normal derivatives use (u_b - u_P) over the half cell width, the
/// tangential ones the adjacent cell's Gauss gradient.
Field boundary_vorticity(const Field& u);

/// Componentwise Laplacian: compact two-point normal gradients on internal
/// faces, half-cell gradients against the stored value on boundary faces.
Field laplacian(const Field& f);

/// Divergence of the tensor w (x) v, i.e. sum_f F_f(w) v_f / V with the
/// central face flux F_f(w) = A_f n_f . w_f. Bilinear in (w, v).
Field convection(const Field& w, const Field& v);

/// Gauss divergence of a vector field.
Field divergence(const Field& u);

/// Central face flux A n.u_f of each internal face (owner -> neighbour).
std::vector<double> interpolated_flux(const Field& u);

/// Tangential derivative dS/dt along patch face `face` with t = (-n_y, n_x),
/// evaluated from the adjacent cell's Gauss gradient (one-sided at the wall).
double boundary_tangential_derivative(const Field& scalar_gradient, int patch, int face);

}  // namespace romforge::fv
