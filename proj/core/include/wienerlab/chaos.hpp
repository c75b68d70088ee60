#pragma once

// Exact algebra of polynomial Wiener functionals.
//
// A functional of n i.i.d. standard Gaussian coordinates eta_1..eta_n is
// stored in the Hermite basis: a finite sum of c_alpha * prod_i He_{alpha_i}(eta_i)
// with probabilists' Hermite polynomials (He_0 = 1, He_1 = x,
// He_{k+1} = x He_k - k He_{k-1}). Because E[He_j He_k] = k! [j == k], every
// expectation, inner product and conditional expectation is read off the
// coefficients without any integration.

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wienerlab {

inline constexpr unsigned kDefaultDegreeCap = 8;
inline constexpr unsigned kDimensionCap = 128;

/// Coefficients with magnitude at or below this are pruned after every
/// operation.
inline constexpr double kPruneThreshold = 1e-14;

/// Sparse exponent vector alpha. Coordinates are 1-based; no stored order is
/// zero.
class MultiIndex {
 public:
  /// (coordinate, order)
  using Entry = std::pair<unsigned, unsigned>;

  MultiIndex() = default;

  /// Sorts by coordinate, merges repeated coordinates by adding orders and
  /// drops zero orders. Coordinate 0 is rejected.
  static MultiIndex from_entries(std::vector<Entry> entries);
  static MultiIndex single(unsigned coordinate, unsigned order = 1);

  std::span<const Entry> entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  unsigned order(unsigned coordinate) const noexcept;
  unsigned total_degree() const noexcept { return total_degree_; }
  /// Largest coordinate with positive order, 0 for the empty index.
  unsigned max_coordinate() const noexcept;
  /// alpha! = prod_i alpha_i!
  double factorial() const noexcept;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  /// Orders by total degree, then coordinate list, then order list.
  friend std::strong_ordering operator<=>(const MultiIndex& a,
                                          const MultiIndex& b);

 private:
  std::vector<Entry> entries_;
  unsigned total_degree_ = 0;
};

/// A polynomial Wiener functional in the Hermite basis. Value type; every
/// operation returns a new polynomial in canonical (pruned) form.
class ChaosPoly {
 public:
  using TermMap = std::map<MultiIndex, double>;

  /// The zero functional.
  explicit ChaosPoly(unsigned dim, unsigned degree_cap = kDefaultDegreeCap);

  /// Builds from raw terms; repeated indices are summed. Throws
  /// DimensionCapExceeded, IndexOutOfRange or DegreeCapExceeded.
  static ChaosPoly from_terms(unsigned dim,
                              std::vector<std::pair<MultiIndex, double>> terms,
                              unsigned degree_cap = kDefaultDegreeCap);
  static ChaosPoly constant(unsigned dim, double value,
                            unsigned degree_cap = kDefaultDegreeCap);
  static ChaosPoly monomial(unsigned dim, const MultiIndex& index,
                            double coefficient = 1.0,
                            unsigned degree_cap = kDefaultDegreeCap);
  /// He_order(eta_coordinate).
  static ChaosPoly hermite(unsigned dim, unsigned coordinate, unsigned order,
                           unsigned degree_cap = kDefaultDegreeCap);
  /// eta_coordinate, i.e. the Gaussian functional of a basis vector.
  static ChaosPoly coordinate(unsigned dim, unsigned coordinate,
                              unsigned degree_cap = kDefaultDegreeCap);

  unsigned dim() const noexcept { return dim_; }
  unsigned degree_cap() const noexcept { return degree_cap_; }
  const TermMap& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  double coefficient(const MultiIndex& index) const;
  /// Largest total degree present, 0 for constants and zero.
  unsigned degree() const noexcept;

  /// Same terms with a different degree cap (must still hold every term).
  ChaosPoly with_degree_cap(unsigned degree_cap) const;

  friend bool operator==(const ChaosPoly&, const ChaosPoly&) = default;

 private:
  ChaosPoly(unsigned dim, unsigned degree_cap, TermMap terms);
  friend class TermAccumulator;

  unsigned dim_;
  unsigned degree_cap_;
  TermMap terms_;
};

/// Collects terms and emits a canonical ChaosPoly.
class TermAccumulator {
 public:
  TermAccumulator(unsigned dim, unsigned degree_cap);
  void add(const MultiIndex& index, double coefficient);
  void add(const ChaosPoly& p, double scale = 1.0);
  ChaosPoly finish() &&;

 private:
  unsigned dim_;
  unsigned degree_cap_;
  ChaosPoly::TermMap terms_;
};

ChaosPoly linear_combine(std::span<const double> coeffs,
                         std::span<const ChaosPoly> polys);
ChaosPoly hermite_product(const ChaosPoly& p, const ChaosPoly& q);
double expectation(const ChaosPoly& p);
double l2_inner(const ChaosPoly& p, const ChaosPoly& q);
double l2_norm(const ChaosPoly& p);
ChaosPoly partial_derivative(const ChaosPoly& p, unsigned coordinate);
ChaosPoly multiply_by_coordinate(const ChaosPoly& p, unsigned coordinate);
/// E[p | eta_1..eta_stage].
ChaosPoly conditional_expectation(const ChaosPoly& p, unsigned stage);
/// Homogeneous chaos of grade m.
ChaosPoly chaos_projection(const ChaosPoly& p, unsigned grade);
/// Ornstein-Uhlenbeck (number) operator: grade-m terms scaled by m.
ChaosPoly ou_apply(const ChaosPoly& p);
/// Inverse on centered inputs; throws PreconditionError if |E p| > 1e-12.
ChaosPoly ou_inverse(const ChaosPoly& p);
/// Embeds p into a grid refined by `factor`: eta_i becomes the normalized sum
/// of the `factor` fine increments of cell i.
ChaosPoly refine(const ChaosPoly& p, unsigned factor);
double evaluate(const ChaosPoly& p, std::span<const double> sample);

/// He_k(x) by the three-term recurrence.
double hermite_value(unsigned order, double x) noexcept;

ChaosPoly operator+(const ChaosPoly& p, const ChaosPoly& q);
ChaosPoly operator-(const ChaosPoly& p, const ChaosPoly& q);
ChaosPoly operator-(const ChaosPoly& p);
ChaosPoly operator*(double s, const ChaosPoly& p);
ChaosPoly operator*(const ChaosPoly& p, const ChaosPoly& q);

/// Canonical text form: one line `coeff i1:k1 i2:k2 ...` per term in
/// canonical order; the zero polynomial is the single line `0`.
std::string to_text(const ChaosPoly& p);
/// to_text without the final newline, for embedding in JSON strings.
std::string json_text(const ChaosPoly& p);
ChaosPoly from_text(std::string_view text, unsigned dim,
                    unsigned degree_cap = kDefaultDegreeCap);
/// Shortest round-trip decimal form of a double.
std::string format_number(double value);

}  // namespace wienerlab
