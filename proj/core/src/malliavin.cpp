#include "wienerlab/malliavin.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <json.hpp>

#include "wienerlab/errors.hpp"

namespace wienerlab {

namespace {

unsigned max_cap(std::span<const ChaosPoly> polys) {
  unsigned cap = kDefaultDegreeCap;
  for (const auto& p : polys) cap = std::max(cap, p.degree_cap());
  return cap;
}

void require_shape(const OperatorField& k, const OperatorField& d,
                   const char* what) {
  if (k.target_dim() != d.target_dim() || k.ambient_dim() != d.ambient_dim()) {
    throw DimensionMismatch(std::string(what) + ": shapes " +
                            std::to_string(k.target_dim()) + "x" +
                            std::to_string(k.ambient_dim()) + " and " +
                            std::to_string(d.target_dim()) + "x" +
                            std::to_string(d.ambient_dim()));
  }
}

void require_compatible(const OperatorField& k, const VField& f,
                        const char* what) {
  if (k.target_dim() != f.target_dim() || k.ambient_dim() != f.ambient_dim()) {
    throw DimensionMismatch(std::string(what) + ": operator " +
                            std::to_string(k.target_dim()) + "x" +
                            std::to_string(k.ambient_dim()) +
                            " against field with d = " +
                            std::to_string(f.target_dim()) + ", n = " +
                            std::to_string(f.ambient_dim()));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Field types

HField::HField(std::vector<ChaosPoly> coords) : coords_(std::move(coords)) {
  for (const auto& c : coords_) {
    if (c.dim() != coords_.size()) {
      throw DimensionMismatch("HField: coordinate of dimension " +
                              std::to_string(c.dim()) + " in a field on R^" +
                              std::to_string(coords_.size()));
    }
  }
}

HField HField::zero(unsigned n, unsigned degree_cap) {
  return HField(std::vector<ChaosPoly>(n, ChaosPoly(n, degree_cap)));
}

HField HField::constant(std::span<const double> h, unsigned degree_cap) {
  const auto n = static_cast<unsigned>(h.size());
  std::vector<ChaosPoly> coords;
  for (double v : h) coords.push_back(ChaosPoly::constant(n, v, degree_cap));
  return HField(std::move(coords));
}

VField::VField(unsigned ambient_dim, std::vector<ChaosPoly> components)
    : ambient_dim_(ambient_dim), components_(std::move(components)) {
  for (const auto& c : components_) {
    if (c.dim() != ambient_dim_) {
      throw DimensionMismatch("VField: component of dimension " +
                              std::to_string(c.dim()) + ", expected " +
                              std::to_string(ambient_dim_));
    }
  }
}

VField VField::constant(unsigned ambient_dim, std::span<const double> y,
                        unsigned degree_cap) {
  std::vector<ChaosPoly> comps;
  for (double v : y) comps.push_back(ChaosPoly::constant(ambient_dim, v, degree_cap));
  return VField(ambient_dim, std::move(comps));
}

OperatorField::OperatorField(unsigned target_dim, unsigned ambient_dim,
                             std::vector<ChaosPoly> entries)
    : target_dim_(target_dim), ambient_dim_(ambient_dim), entries_(std::move(entries)) {
  if (entries_.size() != static_cast<std::size_t>(target_dim_) * ambient_dim_) {
    throw DimensionMismatch("OperatorField: " + std::to_string(entries_.size()) +
                            " entries for shape " + std::to_string(target_dim_) +
                            "x" + std::to_string(ambient_dim_));
  }
  for (const auto& e : entries_) {
    if (e.dim() != ambient_dim_) {
      throw DimensionMismatch("OperatorField: entry of dimension " +
                              std::to_string(e.dim()) + ", expected " +
                              std::to_string(ambient_dim_));
    }
  }
}

OperatorField OperatorField::zero(unsigned target_dim, unsigned ambient_dim,
                                  unsigned degree_cap) {
  return OperatorField(
      target_dim, ambient_dim,
      std::vector<ChaosPoly>(static_cast<std::size_t>(target_dim) * ambient_dim,
                             ChaosPoly(ambient_dim, degree_cap)));
}

OperatorField OperatorField::from_rows(const std::vector<HField>& rows) {
  if (rows.empty()) throw DimensionMismatch("OperatorField::from_rows: no rows");
  const unsigned n = rows.front().dim();
  std::vector<ChaosPoly> entries;
  for (const auto& r : rows) {
    if (r.dim() != n) throw DimensionMismatch("OperatorField::from_rows: ragged rows");
    entries.insert(entries.end(), r.coords().begin(), r.coords().end());
  }
  return OperatorField(static_cast<unsigned>(rows.size()), n, std::move(entries));
}

OperatorField OperatorField::identity(unsigned n, unsigned degree_cap) {
  std::vector<ChaosPoly> entries;
  for (unsigned a = 0; a < n; ++a) {
    for (unsigned i = 0; i < n; ++i) {
      entries.push_back(ChaosPoly::constant(n, a == i ? 1.0 : 0.0, degree_cap));
    }
  }
  return OperatorField(n, n, std::move(entries));
}

OperatorField OperatorField::rank_one(const HField& alpha, std::span<const double> y) {
  std::vector<ChaosPoly> entries;
  for (double ya : y) {
    for (const auto& c : alpha.coords()) entries.push_back(ya * c);
  }
  return OperatorField(static_cast<unsigned>(y.size()), alpha.dim(), std::move(entries));
}

HField OperatorField::row(unsigned a) const {
  if (a >= target_dim_) {
    throw IndexOutOfRange("row " + std::to_string(a) + " of " +
                          std::to_string(target_dim_));
  }
  auto first = entries_.begin() + static_cast<std::ptrdiff_t>(a) * ambient_dim_;
  return HField(std::vector<ChaosPoly>(first, first + ambient_dim_));
}

HField OperatorField::transpose_apply(const VField& f) const {
  if (f.target_dim() != target_dim_ || f.ambient_dim() != ambient_dim_) {
    throw DimensionMismatch("transpose_apply: shape mismatch");
  }
  std::vector<ChaosPoly> coords;
  for (unsigned i = 0; i < ambient_dim_; ++i) {
    TermAccumulator acc(ambient_dim_,
                        std::max(max_cap(entries_), max_cap(f.components())));
    for (unsigned a = 0; a < target_dim_; ++a) {
      acc.add(hermite_product(f[a], (*this)(a, i)));
    }
    coords.push_back(std::move(acc).finish());
  }
  return HField(std::move(coords));
}

OperatorField operator+(const OperatorField& k, const OperatorField& q) {
  require_shape(k, q, "operator +");
  std::vector<ChaosPoly> entries;
  for (std::size_t e = 0; e < k.entries_.size(); ++e) {
    entries.push_back(k.entries_[e] + q.entries_[e]);
  }
  return OperatorField(k.target_dim_, k.ambient_dim_, std::move(entries));
}

OperatorField operator-(const OperatorField& k, const OperatorField& q) {
  return k + (-1.0) * q;
}

OperatorField operator*(double s, const OperatorField& k) {
  std::vector<ChaosPoly> entries;
  for (const auto& e : k.entries_) entries.push_back(s * e);
  return OperatorField(k.target_dim_, k.ambient_dim_, std::move(entries));
}

HField operator+(const HField& u, const HField& v) {
  if (u.dim() != v.dim()) throw DimensionMismatch("HField +: dimension mismatch");
  std::vector<ChaosPoly> coords;
  for (unsigned i = 0; i < u.dim(); ++i) coords.push_back(u[i] + v[i]);
  return HField(std::move(coords));
}

HField operator-(const HField& u, const HField& v) { return u + (-1.0) * v; }

HField operator*(double s, const HField& u) {
  std::vector<ChaosPoly> coords;
  for (const auto& c : u.coords()) coords.push_back(s * c);
  return HField(std::move(coords));
}

double field_inner(const HField& u, const HField& v) {
  if (u.dim() != v.dim()) throw DimensionMismatch("field_inner: dimension mismatch");
  double sum = 0.0;
  for (unsigned i = 0; i < u.dim(); ++i) sum += l2_inner(u[i], v[i]);
  return sum;
}

double field_energy(const HField& u) { return field_inner(u, u); }

double vfield_energy(const VField& v) {
  double sum = 0.0;
  for (const auto& c : v.components()) sum += l2_inner(c, c);
  return sum;
}

// ---------------------------------------------------------------------------
// Gradient and divergence

HField gradient_scalar(const ChaosPoly& p) {
  std::vector<ChaosPoly> coords;
  for (unsigned i = 1; i <= p.dim(); ++i) coords.push_back(partial_derivative(p, i));
  return HField(std::move(coords));
}

OperatorField gradient_vector(const VField& v) {
  std::vector<HField> rows;
  for (const auto& c : v.components()) rows.push_back(gradient_scalar(c));
  if (rows.empty()) return OperatorField::zero(0, v.ambient_dim());
  return OperatorField::from_rows(rows);
}

ChaosPoly divergence_h(const HField& u) {
  const unsigned n = u.dim();
  TermAccumulator acc(n, max_cap(u.coords()));
  for (unsigned i = 1; i <= n; ++i) {
    const ChaosPoly& ui = u[i - 1];
    if (ui.is_zero()) continue;
    acc.add(multiply_by_coordinate(ui, i));
    acc.add(partial_derivative(ui, i), -1.0);
  }
  return std::move(acc).finish();
}

VField divergence_op(const OperatorField& k) {
  std::vector<ChaosPoly> comps;
  for (unsigned a = 0; a < k.target_dim(); ++a) comps.push_back(divergence_h(k.row(a)));
  return VField(k.ambient_dim(), std::move(comps));
}

ChaosPoly trace_pairing(const OperatorField& k, const OperatorField& d) {
  require_shape(k, d, "trace_pairing");
  unsigned cap = kDefaultDegreeCap;
  for (unsigned a = 0; a < k.target_dim(); ++a) {
    for (unsigned i = 0; i < k.ambient_dim(); ++i) {
      cap = std::max({cap, k(a, i).degree_cap(), d(a, i).degree_cap()});
    }
  }
  TermAccumulator acc(k.ambient_dim(), cap);
  for (unsigned a = 0; a < k.target_dim(); ++a) {
    for (unsigned i = 0; i < k.ambient_dim(); ++i) {
      acc.add(hermite_product(k(a, i), d(a, i)));
    }
  }
  return std::move(acc).finish();
}

HField skew_linear_field(unsigned n, std::span<const double> skew,
                         unsigned degree_cap) {
  if (skew.size() != static_cast<std::size_t>(n) * n) {
    throw DimensionMismatch("skew_linear_field: expected an n x n matrix");
  }
  for (unsigned i = 0; i < n; ++i) {
    for (unsigned j = 0; j < n; ++j) {
      if (std::abs(skew[i * n + j] + skew[j * n + i]) > 1e-14) {
        throw PreconditionError("skew_linear_field: matrix is not skew-symmetric");
      }
    }
  }
  std::vector<ChaosPoly> coords;
  for (unsigned i = 0; i < n; ++i) {
    TermAccumulator acc(n, degree_cap);
    for (unsigned j = 0; j < n; ++j) acc.add(MultiIndex::single(j + 1), skew[i * n + j]);
    coords.push_back(std::move(acc).finish());
  }
  return HField(std::move(coords));
}

// ---------------------------------------------------------------------------
// Verification

double check_duality(const OperatorField& k, const VField& f) {
  require_compatible(k, f, "check_duality");
  // E<<K, grad F>> = sum_{a,i} <K_ai, d_i F_a>, E<F, delta K> = sum_a <F_a, (delta K)_a>
  double lhs = 0.0;
  for (unsigned a = 0; a < k.target_dim(); ++a) {
    for (unsigned i = 1; i <= k.ambient_dim(); ++i) {
      lhs += l2_inner(k(a, i - 1), partial_derivative(f[a], i));
    }
  }
  const VField div = divergence_op(k);
  double rhs = 0.0;
  for (unsigned a = 0; a < k.target_dim(); ++a) rhs += l2_inner(f[a], div[a]);
  return std::abs(lhs - rhs);
}

double check_weakb(const OperatorField& k, const VField& f) {
  require_compatible(k, f, "check_weakb");
  const ChaosPoly lhs = divergence_h(k.transpose_apply(f));
  const VField div = divergence_op(k);
  const OperatorField grad = gradient_vector(f);
  TermAccumulator acc(k.ambient_dim(), lhs.degree_cap());
  acc.add(lhs);
  for (unsigned a = 0; a < k.target_dim(); ++a) {
    acc.add(hermite_product(f[a], div[a]), -1.0);
  }
  acc.add(trace_pairing(k, grad), 1.0);
  return l2_norm(std::move(acc).finish());
}

double check_cbound(const OperatorField& k) {
  const unsigned d = k.target_dim();
  if (d == 0) return 0.0;
  const VField div = divergence_op(k);
  Eigen::MatrixXd gram(d, d);
  for (unsigned a = 0; a < d; ++a) {
    for (unsigned b = a; b < d; ++b) {
      gram(a, b) = gram(b, a) = l2_inner(div[a], div[b]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  const double top = solver.eigenvalues().maxCoeff();
  return std::sqrt(std::max(top, 0.0));
}

// ---------------------------------------------------------------------------
// Serialization

std::string operator_to_json(const OperatorField& k) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (unsigned a = 0; a < k.target_dim(); ++a) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (unsigned i = 0; i < k.ambient_dim(); ++i) row.push_back(json_text(k(a, i)));
    rows.push_back(std::move(row));
  }
  return rows.dump();
}

OperatorField operator_from_json(const std::string& json, unsigned ambient_dim,
                                 unsigned degree_cap) {
  const auto rows = nlohmann::json::parse(json);
  if (!rows.is_array() || rows.empty()) {
    throw Error("operator JSON: expected a non-empty array of rows");
  }
  std::vector<ChaosPoly> entries;
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != ambient_dim) {
      throw Error("operator JSON: every row needs " + std::to_string(ambient_dim) +
                  " entries");
    }
    for (const auto& cell : row) {
      entries.push_back(from_text(cell.get<std::string>(), ambient_dim, degree_cap));
    }
  }
  return OperatorField(static_cast<unsigned>(rows.size()), ambient_dim,
                       std::move(entries));
}

}  // namespace wienerlab
