#pragma once

// Filtration generated by the grid, predictable (strict-past) fields, the
// predictable projection and its operator extension, and the discrete Ito
// integral.
//
// Convention: coordinate i of a predictable field may depend on
// eta_1..eta_{i-1} only. With this convention the Skorokhod divergence of a
// predictable field is the pathwise sum sum_i u_i eta_i and the isometry
// E delta(u) delta(v) = E(u, v)_H holds exactly on the grid.

#include <span>
#include <vector>

#include "wienerlab/malliavin.hpp"

namespace wienerlab {

/// Stage k is sigma(eta_1..eta_k).
class Filtration {
 public:
  explicit Filtration(unsigned n) : n_(n) {}

  unsigned stages() const noexcept { return n_; }
  bool is_measurable(const ChaosPoly& p, unsigned stage) const;
  ChaosPoly condition(const ChaosPoly& p, unsigned stage) const;

 private:
  unsigned n_;
};

bool is_predictable(const HField& u);
bool is_weakly_adapted(const OperatorField& k);

class PredictableHField {
 public:
  /// Throws NotPredictable.
  explicit PredictableHField(HField field);

  const HField& field() const noexcept { return field_; }
  unsigned dim() const noexcept { return field_.dim(); }

 private:
  HField field_;
};

/// Operator whose rows K^T y_a are all predictable.
class WeaklyAdaptedOperator {
 public:
  /// Throws NotPredictable.
  explicit WeaklyAdaptedOperator(OperatorField op);

  const OperatorField& op() const noexcept { return op_; }

 private:
  OperatorField op_;
};

/// Finite-rank operator sum_j q_j (x) y_j with predictable q_j, kept in
/// structural form.
class FiniteRankOperator {
 public:
  struct Term {
    PredictableHField field;
    std::vector<double> direction;
  };

  FiniteRankOperator(unsigned target_dim, unsigned ambient_dim);
  void add(PredictableHField field, std::vector<double> direction);

  unsigned target_dim() const noexcept { return target_dim_; }
  unsigned ambient_dim() const noexcept { return ambient_dim_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  OperatorField assemble() const;

 private:
  unsigned target_dim_;
  unsigned ambient_dim_;
  std::vector<Term> terms_;
};

/// Pi: coordinate i -> E[u_i | stage i-1].
PredictableHField project_adapted(const HField& u);
/// Pi applied row by row.
WeaklyAdaptedOperator project_operator(const OperatorField& k);

/// Pathwise sum_i u_i(omega) eta_i(omega).
double ito_integral(const PredictableHField& u, std::span<const double> sample);

/// |E delta(u) delta(v) - E(u, v)_H|.
double check_ito_isometry(const PredictableHField& u, const PredictableHField& v);
/// |E<<K, Q>> - E<<PiPi K, Q>>|.
double check_weak_orthogonality(const OperatorField& k, const FiniteRankOperator& q);
/// |E<delta D, delta K> - E<<K, D>>|.
double check_operator_isometry(const WeaklyAdaptedOperator& k,
                               const FiniteRankOperator& d);
/// True iff delta K = 0 (within 1e-12) implies every entry of K vanishes.
bool check_divergence_free_uniqueness(const WeaklyAdaptedOperator& k);

/// sum_{a,i} <K_ai, D_ai>_{L^2}.
double expected_trace_pairing(const OperatorField& k, const OperatorField& d);

}  // namespace wienerlab
