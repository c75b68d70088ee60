#pragma once

// Gradient and divergence for scalar, H-valued, R^d-valued and
// L(H, R^d)-valued polynomial functionals on H = R^n.

#include <span>
#include <string>
#include <vector>

#include "wienerlab/chaos.hpp"

namespace wienerlab {

/// H-valued random element; coordinate i is <u, e_i>.
class HField {
 public:
  /// Every coordinate must have ambient dimension coords.size().
  explicit HField(std::vector<ChaosPoly> coords);
  static HField zero(unsigned n, unsigned degree_cap = kDefaultDegreeCap);
  /// The deterministic field h.
  static HField constant(std::span<const double> h,
                         unsigned degree_cap = kDefaultDegreeCap);

  unsigned dim() const noexcept { return static_cast<unsigned>(coords_.size()); }
  const ChaosPoly& operator[](unsigned i) const { return coords_[i]; }
  const std::vector<ChaosPoly>& coords() const noexcept { return coords_; }

  friend bool operator==(const HField&, const HField&) = default;

 private:
  std::vector<ChaosPoly> coords_;
};

/// R^d-valued random element.
class VField {
 public:
  VField(unsigned ambient_dim, std::vector<ChaosPoly> components);
  static VField constant(unsigned ambient_dim, std::span<const double> y,
                         unsigned degree_cap = kDefaultDegreeCap);

  unsigned ambient_dim() const noexcept { return ambient_dim_; }
  unsigned target_dim() const noexcept {
    return static_cast<unsigned>(components_.size());
  }
  const ChaosPoly& operator[](unsigned a) const { return components_[a]; }
  const std::vector<ChaosPoly>& components() const noexcept { return components_; }

  friend bool operator==(const VField&, const VField&) = default;

 private:
  unsigned ambient_dim_;
  std::vector<ChaosPoly> components_;
};

/// Random operator K : H -> R^d as a d x n matrix of functionals with
/// entry (a, i) = <y_a, K e_i>. Row a is the H-field K^T y_a.
class OperatorField {
 public:
  OperatorField(unsigned target_dim, unsigned ambient_dim,
                std::vector<ChaosPoly> entries);
  static OperatorField zero(unsigned target_dim, unsigned ambient_dim,
                            unsigned degree_cap = kDefaultDegreeCap);
  static OperatorField from_rows(const std::vector<HField>& rows);
  /// 1_H on R^n (d = n).
  static OperatorField identity(unsigned n, unsigned degree_cap = kDefaultDegreeCap);
  /// alpha (x) y : h -> (alpha, h) y.
  static OperatorField rank_one(const HField& alpha, std::span<const double> y);

  unsigned target_dim() const noexcept { return target_dim_; }
  unsigned ambient_dim() const noexcept { return ambient_dim_; }
  const ChaosPoly& operator()(unsigned a, unsigned i) const {
    return entries_[static_cast<std::size_t>(a) * ambient_dim_ + i];
  }
  HField row(unsigned a) const;
  /// K^T F = sum_a F_a row_a, with products realized exactly.
  HField transpose_apply(const VField& f) const;

  friend OperatorField operator+(const OperatorField& k, const OperatorField& q);
  friend OperatorField operator-(const OperatorField& k, const OperatorField& q);
  friend OperatorField operator*(double s, const OperatorField& k);
  friend bool operator==(const OperatorField&, const OperatorField&) = default;

 private:
  unsigned target_dim_;
  unsigned ambient_dim_;
  std::vector<ChaosPoly> entries_;
};

HField operator+(const HField& u, const HField& v);
HField operator-(const HField& u, const HField& v);
HField operator*(double s, const HField& u);

/// E(u, v)_H = sum_i <u_i, v_i>_{L^2}.
double field_inner(const HField& u, const HField& v);
/// E|u|_H^2.
double field_energy(const HField& u);
/// sum_a ||v_a||_{L^2}^2.
double vfield_energy(const VField& v);

HField gradient_scalar(const ChaosPoly& p);
/// Row a is the gradient of component a.
OperatorField gradient_vector(const VField& v);
/// delta u = sum_i (eta_i u_i - d_i u_i).
ChaosPoly divergence_h(const HField& u);
/// Component a is divergence_h of row a.
VField divergence_op(const OperatorField& k);
/// u_i = sum_j A_ij eta_j for a skew-symmetric row-major n x n matrix A;
/// delta u = 0. Throws PreconditionError if A is not skew-symmetric.
HField skew_linear_field(unsigned n, std::span<const double> skew,
                         unsigned degree_cap = kDefaultDegreeCap);

/// tr(K^T D) as a random variable.
ChaosPoly trace_pairing(const OperatorField& k, const OperatorField& d);

/// |E<<K, grad F>> - E<F, delta K>|.
double check_duality(const OperatorField& k, const VField& f);
/// L^2 norm of delta(K^T F) - <F, delta K> + <<K, grad F>>.
double check_weakb(const OperatorField& k, const VField& f);
/// Smallest C with ||delta(K^T l)||_{L^2} <= C |l| for all l in R^d, from the
/// top eigenvalue of the Gram form l -> ||delta(K^T l)||^2.
double check_cbound(const OperatorField& k);

/// JSON array of rows, each row an array of canonical chaos text.
std::string operator_to_json(const OperatorField& k);
OperatorField operator_from_json(const std::string& json, unsigned ambient_dim,
                                 unsigned degree_cap = kDefaultDegreeCap);

}  // namespace wienerlab
