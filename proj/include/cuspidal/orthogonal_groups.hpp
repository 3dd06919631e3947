#pragma once

// Membership of a given isometry in the standard subgroups of O(L).

#include "cuspidal/fqf.hpp"
#include "cuspidal/lattice.hpp"

namespace cuspidal {

enum class DiscriminantAction { Identity, MinusIdentity, Other };

inline const char* to_string(DiscriminantAction a) {
  switch (a) {
    case DiscriminantAction::Identity: return "identity";
    case DiscriminantAction::MinusIdentity: return "minus-identity";
    case DiscriminantAction::Other: return "other";
  }
  return "other";
}

/// Induced automorphism of A_L (form must come from discriminant_form of the domain).
inline FormMap induced_action(const Isometry& g, const FiniteQuadraticForm& disc) {
  FormMap f;
  const RatMatrix m = to_rational(g.matrix());
  for (std::size_t i = 0; i < disc.rank(); ++i) f.images.push_back(disc.element_from_dual(m * disc.lift(disc.generator(i))));
  return f;
}

struct GroupMembership {
  int spinor = 1;
  int det = 1;
  DiscriminantAction action = DiscriminantAction::Identity;
  bool in_O_plus = true;        // spinor norm +1
  bool stable = true;           // trivial on A_L
  bool in_tilde_O_plus = true;  // stable and O+
  bool in_tilde_SO_plus = true;
  bool in_hat_O_plus = true;    // +-id on A_L and O+
  bool in_hat_SO_plus = true;
};

inline GroupMembership group_membership(const Isometry& g) {
  const Lattice& l = g.domain();
  GroupMembership r;
  r.spinor = spinor_norm(g);
  r.det = determinant(g.matrix()) > 0 ? 1 : -1;
  const auto disc = discriminant_form(l);
  const FormMap f = induced_action(g, disc);
  bool ident = true, minus = true;
  for (std::size_t i = 0; i < disc.rank(); ++i) {
    if (!(f.images[i] == disc.generator(i))) ident = false;
    if (!(f.images[i] == disc.neg(disc.generator(i)))) minus = false;
  }
  r.action = ident ? DiscriminantAction::Identity : minus ? DiscriminantAction::MinusIdentity : DiscriminantAction::Other;
  r.in_O_plus = r.spinor == 1;
  r.stable = ident;
  r.in_tilde_O_plus = r.stable && r.in_O_plus;
  r.in_tilde_SO_plus = r.in_tilde_O_plus && r.det == 1;
  r.in_hat_O_plus = (ident || minus) && r.in_O_plus;
  r.in_hat_SO_plus = r.in_hat_O_plus && r.det == 1;
  return r;
}

}  // namespace cuspidal
