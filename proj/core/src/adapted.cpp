#include "wienerlab/adapted.hpp"

#include <cmath>

#include "wienerlab/errors.hpp"

namespace wienerlab {

namespace {

constexpr double kZeroTolerance = 1e-12;

// Every term of p lives on coordinates below `coordinate`.
bool depends_only_on_past(const ChaosPoly& p, unsigned coordinate) {
  for (const auto& [index, coeff] : p.terms()) {
    if (index.max_coordinate() >= coordinate) return false;
  }
  return true;
}

}  // namespace

bool Filtration::is_measurable(const ChaosPoly& p, unsigned stage) const {
  if (stage > n_) throw IndexOutOfRange("stage outside 0..n");
  return depends_only_on_past(p, stage + 1);
}

ChaosPoly Filtration::condition(const ChaosPoly& p, unsigned stage) const {
  if (stage > n_) throw IndexOutOfRange("stage outside 0..n");
  return conditional_expectation(p, stage);
}

bool is_predictable(const HField& u) {
  for (unsigned i = 1; i <= u.dim(); ++i) {
    if (!depends_only_on_past(u[i - 1], i)) return false;
  }
  return true;
}

bool is_weakly_adapted(const OperatorField& k) {
  for (unsigned a = 0; a < k.target_dim(); ++a) {
    for (unsigned i = 1; i <= k.ambient_dim(); ++i) {
      if (!depends_only_on_past(k(a, i - 1), i)) return false;
    }
  }
  return true;
}

PredictableHField::PredictableHField(HField field) : field_(std::move(field)) {
  if (!is_predictable(field_)) {
    throw NotPredictable("field has a coordinate depending on the present or future");
  }
}

WeaklyAdaptedOperator::WeaklyAdaptedOperator(OperatorField op) : op_(std::move(op)) {
  if (!is_weakly_adapted(op_)) {
    throw NotPredictable("operator has a row that is not predictable");
  }
}

FiniteRankOperator::FiniteRankOperator(unsigned target_dim, unsigned ambient_dim)
    : target_dim_(target_dim), ambient_dim_(ambient_dim) {}

void FiniteRankOperator::add(PredictableHField field, std::vector<double> direction) {
  if (field.dim() != ambient_dim_ || direction.size() != target_dim_) {
    throw DimensionMismatch("finite-rank term does not match operator shape");
  }
  terms_.push_back({std::move(field), std::move(direction)});
}

OperatorField FiniteRankOperator::assemble() const {
  OperatorField sum = OperatorField::zero(target_dim_, ambient_dim_);
  for (const auto& t : terms_) {
    sum = sum + OperatorField::rank_one(t.field.field(), t.direction);
  }
  return sum;
}

PredictableHField project_adapted(const HField& u) {
  std::vector<ChaosPoly> coords;
  for (unsigned i = 1; i <= u.dim(); ++i) {
    coords.push_back(conditional_expectation(u[i - 1], i - 1));
  }
  return PredictableHField(HField(std::move(coords)));
}

WeaklyAdaptedOperator project_operator(const OperatorField& k) {
  std::vector<ChaosPoly> entries;
  for (unsigned a = 0; a < k.target_dim(); ++a) {
    for (unsigned i = 1; i <= k.ambient_dim(); ++i) {
      entries.push_back(conditional_expectation(k(a, i - 1), i - 1));
    }
  }
  return WeaklyAdaptedOperator(
      OperatorField(k.target_dim(), k.ambient_dim(), std::move(entries)));
}

double ito_integral(const PredictableHField& u, std::span<const double> sample) {
  if (sample.size() != u.dim()) {
    throw DimensionMismatch("ito_integral: sample length does not match field");
  }
  double sum = 0.0;
  for (unsigned i = 0; i < u.dim(); ++i) {
    sum += evaluate(u.field()[i], sample) * sample[i];
  }
  return sum;
}

double check_ito_isometry(const PredictableHField& u, const PredictableHField& v) {
  const double lhs = l2_inner(divergence_h(u.field()), divergence_h(v.field()));
  const double rhs = field_inner(u.field(), v.field());
  return std::abs(lhs - rhs);
}

double expected_trace_pairing(const OperatorField& k, const OperatorField& d) {
  if (k.target_dim() != d.target_dim() || k.ambient_dim() != d.ambient_dim()) {
    throw DimensionMismatch("expected_trace_pairing: shape mismatch");
  }
  double sum = 0.0;
  for (unsigned a = 0; a < k.target_dim(); ++a) {
    for (unsigned i = 0; i < k.ambient_dim(); ++i) sum += l2_inner(k(a, i), d(a, i));
  }
  return sum;
}

double check_weak_orthogonality(const OperatorField& k, const FiniteRankOperator& q) {
  const OperatorField qop = q.assemble();
  const double lhs = expected_trace_pairing(k, qop);
  const double rhs = expected_trace_pairing(project_operator(k).op(), qop);
  return std::abs(lhs - rhs);
}

double check_operator_isometry(const WeaklyAdaptedOperator& k,
                               const FiniteRankOperator& d) {
  const OperatorField dop = d.assemble();
  const VField div_d = divergence_op(dop);
  const VField div_k = divergence_op(k.op());
  if (div_d.target_dim() != div_k.target_dim()) {
    throw DimensionMismatch("check_operator_isometry: target dimensions differ");
  }
  double lhs = 0.0;
  for (unsigned a = 0; a < div_k.target_dim(); ++a) lhs += l2_inner(div_d[a], div_k[a]);
  const double rhs = expected_trace_pairing(k.op(), dop);
  return std::abs(lhs - rhs);
}

bool check_divergence_free_uniqueness(const WeaklyAdaptedOperator& k) {
  const VField div = divergence_op(k.op());
  bool divergence_free = true;
  for (const auto& c : div.components()) {
    if (l2_norm(c) > kZeroTolerance) divergence_free = false;
  }
  if (!divergence_free) return true;
  for (unsigned a = 0; a < k.op().target_dim(); ++a) {
    for (unsigned i = 0; i < k.op().ambient_dim(); ++i) {
      if (l2_norm(k.op()(a, i)) > kZeroTolerance) return false;
    }
  }
  return true;
}

}  // namespace wienerlab
