#include "wienerlab/harness/instances.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace wienerlab::harness {

namespace {

// Fixed mappings from raw 64-bit draws so instances do not depend on the
// standard library's distribution implementations.
double uniform_real(Rng& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double coefficient(Rng& rng) {
  double c = 0.0;
  while (std::abs(c) < 0.05) c = uniform_real(rng, -1.0, 1.0);
  return c;
}

double standard_normal(Rng& rng) {
  double u = 0.0;
  while (u <= 0.0) u = uniform_real(rng, 0.0, 1.0);
  const double v = uniform_real(rng, 0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * 3.141592653589793 * v);
}

}  // namespace

unsigned uniform_int(Rng& rng, unsigned lo, unsigned hi) {
  return lo + static_cast<unsigned>(rng() % (static_cast<std::uint64_t>(hi - lo) + 1));
}

ChaosPoly random_past_poly(Rng& rng, const PolyShape& shape, unsigned bound) {
  const unsigned coords = std::min(bound, shape.n + 1) - 1;
  std::vector<std::pair<MultiIndex, double>> terms;
  if (bound <= 1) {
    terms.push_back({MultiIndex(), coefficient(rng)});
    return ChaosPoly::from_terms(shape.n, std::move(terms), shape.degree_cap);
  }
  const unsigned count = uniform_int(rng, 1, shape.max_terms);
  for (unsigned t = 0; t < count; ++t) {
    const unsigned degree = uniform_int(rng, 0, shape.max_degree);
    std::vector<MultiIndex::Entry> entries;
    for (unsigned k = 0; k < degree; ++k) entries.push_back({uniform_int(rng, 1, coords), 1});
    terms.push_back({MultiIndex::from_entries(std::move(entries)), coefficient(rng)});
  }
  return ChaosPoly::from_terms(shape.n, std::move(terms), shape.degree_cap);
}

ChaosPoly random_poly(Rng& rng, const PolyShape& shape) {
  return random_past_poly(rng, shape, shape.n + 1);
}

ChaosPoly random_centered_poly(Rng& rng, const PolyShape& shape) {
  const ChaosPoly p = random_poly(rng, shape);
  return p - ChaosPoly::constant(shape.n, expectation(p), shape.degree_cap);
}

ChaosPoly random_first_chaos(Rng& rng, unsigned n, unsigned degree_cap) {
  std::vector<std::pair<MultiIndex, double>> terms;
  terms.push_back({MultiIndex(), uniform_real(rng, -1.0, 1.0)});
  const unsigned lead = uniform_int(rng, 1, n);
  terms.push_back({MultiIndex::single(lead), coefficient(rng)});
  for (unsigned i = 1; i <= n; ++i) {
    if (i != lead && rng() % 2 == 0) terms.push_back({MultiIndex::single(i), coefficient(rng)});
  }
  return ChaosPoly::from_terms(n, std::move(terms), degree_cap);
}

VField random_vfield(Rng& rng, unsigned d, const PolyShape& shape) {
  std::vector<ChaosPoly> comps;
  for (unsigned a = 0; a < d; ++a) comps.push_back(random_poly(rng, shape));
  return VField(shape.n, std::move(comps));
}

OperatorField random_operator(Rng& rng, unsigned d, const PolyShape& shape) {
  std::vector<ChaosPoly> entries;
  for (unsigned k = 0; k < d * shape.n; ++k) entries.push_back(random_poly(rng, shape));
  return OperatorField(d, shape.n, std::move(entries));
}

PredictableHField random_predictable(Rng& rng, const PolyShape& shape) {
  std::vector<ChaosPoly> coords;
  for (unsigned i = 1; i <= shape.n; ++i) coords.push_back(random_past_poly(rng, shape, i));
  return PredictableHField(HField(std::move(coords)));
}

WeaklyAdaptedOperator random_weakly_adapted(Rng& rng, unsigned d, const PolyShape& shape) {
  std::vector<HField> rows;
  for (unsigned a = 0; a < d; ++a) rows.push_back(random_predictable(rng, shape).field());
  return WeaklyAdaptedOperator(OperatorField::from_rows(rows));
}

FiniteRankOperator random_finite_rank(Rng& rng, unsigned d, unsigned rank,
                                      const PolyShape& shape) {
  FiniteRankOperator q(d, shape.n);
  for (unsigned r = 0; r < rank; ++r) {
    std::vector<double> y(d);
    for (auto& c : y) c = uniform_real(rng, -1.0, 1.0);
    q.add(random_predictable(rng, shape), std::move(y));
  }
  return q;
}

std::vector<double> random_skew(Rng& rng, unsigned n) {
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (unsigned i = 0; i < n; ++i) {
    for (unsigned j = i + 1; j < n; ++j) {
      const double c = uniform_real(rng, -1.0, 1.0);
      a[i * n + j] = c;
      a[j * n + i] = -c;
    }
  }
  return a;
}

std::vector<double> random_onb(Rng& rng, unsigned n) {
  Eigen::MatrixXd g(n, n);
  for (unsigned i = 0; i < n; ++i) {
    for (unsigned j = 0; j < n; ++j) g(i, j) = standard_normal(rng);
  }
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  std::vector<double> rows(static_cast<std::size_t>(n) * n);
  for (unsigned i = 0; i < n; ++i) {
    for (unsigned j = 0; j < n; ++j) rows[i * n + j] = q(j, i);
  }
  return rows;
}

RepresentableInstance random_representable(Rng& rng, unsigned d, const PolyShape& shape) {
  PolyShape inner = shape;
  inner.max_degree = shape.max_degree > 0 ? shape.max_degree - 1 : 0;
  WeaklyAdaptedOperator k = random_weakly_adapted(rng, d, inner);
  const VField div = divergence_op(k.op());
  std::vector<ChaosPoly> comps;
  for (unsigned a = 0; a < d; ++a) {
    comps.push_back(ChaosPoly::constant(shape.n, uniform_real(rng, -1.0, 1.0),
                                        shape.degree_cap) +
                    div[a]);
  }
  return {VField(shape.n, std::move(comps)), std::move(k)};
}

}  // namespace wienerlab::harness
