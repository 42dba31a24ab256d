#include "ferrobvp/mesh.hpp"

namespace ferrobvp {

FieldState embed(const ORState& s) {
  FieldState out(s.mesh_ptr());
  out.field(field::q11) = s.field(0);
  out.field(field::m1) = s.field(1);
  out.field(field::q12).setZero();
  out.field(field::m2).setZero();
  return out;
}

ORState restrict_to_or(const FieldState& s) {
  ORState out(s.mesh_ptr());
  out.field(0) = s.field(field::q11);
  out.field(1) = s.field(field::m1);
  return out;
}

FieldState flip(const FieldState& s) {
  FieldState out = s;
  out.field(field::q12) *= -1.0;
  out.field(field::m2) *= -1.0;
  return out;
}

bool is_or_state(const FieldState& s, double tol) {
  return s.field(field::q12).cwiseAbs().maxCoeff() <= tol && s.field(field::m2).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace ferrobvp
