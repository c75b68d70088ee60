#include "wienerlab/chaos.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "wienerlab/errors.hpp"

namespace wienerlab {

namespace {

double binomial(unsigned n, unsigned k) {
  double result = 1.0;
  for (unsigned j = 1; j <= k; ++j) {
    result = result * static_cast<double>(n - k + j) / static_cast<double>(j);
  }
  return result;
}

double factorial_of(unsigned n) {
  double result = 1.0;
  for (unsigned j = 2; j <= n; ++j) result *= static_cast<double>(j);
  return result;
}

void require_same_dim(const ChaosPoly& p, const ChaosPoly& q,
                      const char* what) {
  if (p.dim() != q.dim()) {
    throw DimensionMismatch(std::string(what) + ": dimensions " +
                            std::to_string(p.dim()) + " and " +
                            std::to_string(q.dim()));
  }
}

void require_coordinate(const ChaosPoly& p, unsigned coordinate,
                        const char* what) {
  if (coordinate < 1 || coordinate > p.dim()) {
    throw IndexOutOfRange(std::string(what) + ": coordinate " +
                          std::to_string(coordinate) + " outside 1.." +
                          std::to_string(p.dim()));
  }
}

struct ProductOption {
  unsigned order;
  double coefficient;
};

// Expands prod_c He_{a_c} He_{b_c} coordinatewise with the linearization
// He_m He_n = sum_k C(m,k) C(n,k) k! He_{m+n-2k}.
void multiply_monomials(const MultiIndex& a, double ca, const MultiIndex& b,
                        double cb, TermAccumulator& out) {
  std::vector<unsigned> coords;
  std::vector<std::vector<ProductOption>> options;
  auto ea = a.entries();
  auto eb = b.entries();
  std::size_t ia = 0, ib = 0;
  while (ia < ea.size() || ib < eb.size()) {
    if (ib == eb.size() || (ia < ea.size() && ea[ia].first < eb[ib].first)) {
      coords.push_back(ea[ia].first);
      options.push_back({{ea[ia].second, 1.0}});
      ++ia;
    } else if (ia == ea.size() || eb[ib].first < ea[ia].first) {
      coords.push_back(eb[ib].first);
      options.push_back({{eb[ib].second, 1.0}});
      ++ib;
    } else {
      const unsigned m = ea[ia].second;
      const unsigned n = eb[ib].second;
      std::vector<ProductOption> opts;
      for (unsigned k = 0; k <= std::min(m, n); ++k) {
        opts.push_back({m + n - 2 * k,
                        binomial(m, k) * binomial(n, k) * factorial_of(k)});
      }
      coords.push_back(ea[ia].first);
      options.push_back(std::move(opts));
      ++ia;
      ++ib;
    }
  }

  std::vector<MultiIndex::Entry> entries;
  entries.reserve(coords.size());
  auto expand = [&](auto&& self, std::size_t level, double coeff) -> void {
    if (level == coords.size()) {
      out.add(MultiIndex::from_entries(entries), coeff);
      return;
    }
    for (const auto& opt : options[level]) {
      if (opt.order > 0) entries.emplace_back(coords[level], opt.order);
      self(self, level + 1, coeff * opt.coefficient);
      if (opt.order > 0) entries.pop_back();
    }
  };
  expand(expand, 0, ca * cb);
}

template <typename Keep>
ChaosPoly filter_terms(const ChaosPoly& p, Keep keep) {
  TermAccumulator acc(p.dim(), p.degree_cap());
  for (const auto& [index, coeff] : p.terms()) {
    if (keep(index)) acc.add(index, coeff);
  }
  return std::move(acc).finish();
}

template <typename Scale>
ChaosPoly scale_terms(const ChaosPoly& p, Scale scale) {
  TermAccumulator acc(p.dim(), p.degree_cap());
  for (const auto& [index, coeff] : p.terms()) acc.add(index, coeff * scale(index));
  return std::move(acc).finish();
}

}  // namespace

// ---------------------------------------------------------------------------
// MultiIndex

MultiIndex MultiIndex::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end());
  MultiIndex result;
  for (const auto& [coordinate, order] : entries) {
    if (coordinate == 0) throw IndexOutOfRange("coordinates are 1-based");
    if (order == 0) continue;
    if (!result.entries_.empty() && result.entries_.back().first == coordinate) {
      result.entries_.back().second += order;
    } else {
      result.entries_.emplace_back(coordinate, order);
    }
    result.total_degree_ += order;
  }
  return result;
}

MultiIndex MultiIndex::single(unsigned coordinate, unsigned order) {
  return from_entries({{coordinate, order}});
}

unsigned MultiIndex::order(unsigned coordinate) const noexcept {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), coordinate,
      [](const Entry& e, unsigned c) { return e.first < c; });
  return (it != entries_.end() && it->first == coordinate) ? it->second : 0;
}

unsigned MultiIndex::max_coordinate() const noexcept {
  return entries_.empty() ? 0 : entries_.back().first;
}

double MultiIndex::factorial() const noexcept {
  double result = 1.0;
  for (const auto& e : entries_) result *= factorial_of(e.second);
  return result;
}

std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
  if (auto c = a.total_degree_ <=> b.total_degree_; c != 0) return c;
  const std::size_t n = std::min(a.entries_.size(), b.entries_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = a.entries_[i].first <=> b.entries_[i].first; c != 0) return c;
  }
  if (auto c = a.entries_.size() <=> b.entries_.size(); c != 0) return c;
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = a.entries_[i].second <=> b.entries_[i].second; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// ChaosPoly

ChaosPoly::ChaosPoly(unsigned dim, unsigned degree_cap)
    : ChaosPoly(dim, degree_cap, {}) {}

ChaosPoly::ChaosPoly(unsigned dim, unsigned degree_cap, TermMap terms)
    : dim_(dim), degree_cap_(degree_cap), terms_(std::move(terms)) {
  if (dim_ > kDimensionCap) {
    throw DimensionCapExceeded("dimension " + std::to_string(dim_) +
                               " exceeds dimension cap " +
                               std::to_string(kDimensionCap));
  }
}

ChaosPoly ChaosPoly::from_terms(
    unsigned dim, std::vector<std::pair<MultiIndex, double>> terms,
    unsigned degree_cap) {
  TermAccumulator acc(dim, degree_cap);
  for (const auto& [index, coeff] : terms) acc.add(index, coeff);
  return std::move(acc).finish();
}

ChaosPoly ChaosPoly::constant(unsigned dim, double value, unsigned degree_cap) {
  return from_terms(dim, {{MultiIndex{}, value}}, degree_cap);
}

ChaosPoly ChaosPoly::monomial(unsigned dim, const MultiIndex& index,
                              double coefficient, unsigned degree_cap) {
  return from_terms(dim, {{index, coefficient}}, degree_cap);
}

ChaosPoly ChaosPoly::hermite(unsigned dim, unsigned coordinate, unsigned order,
                             unsigned degree_cap) {
  return monomial(dim, MultiIndex::single(coordinate, order), 1.0, degree_cap);
}

ChaosPoly ChaosPoly::coordinate(unsigned dim, unsigned coordinate,
                                unsigned degree_cap) {
  return hermite(dim, coordinate, 1, degree_cap);
}

double ChaosPoly::coefficient(const MultiIndex& index) const {
  auto it = terms_.find(index);
  return it == terms_.end() ? 0.0 : it->second;
}

unsigned ChaosPoly::degree() const noexcept {
  unsigned d = 0;
  for (const auto& [index, coeff] : terms_) d = std::max(d, index.total_degree());
  return d;
}

ChaosPoly ChaosPoly::with_degree_cap(unsigned degree_cap) const {
  TermAccumulator acc(dim_, degree_cap);
  acc.add(*this);
  return std::move(acc).finish();
}

TermAccumulator::TermAccumulator(unsigned dim, unsigned degree_cap)
    : dim_(dim), degree_cap_(degree_cap) {}

void TermAccumulator::add(const MultiIndex& index, double coefficient) {
  if (index.max_coordinate() > dim_) {
    throw IndexOutOfRange("coordinate " + std::to_string(index.max_coordinate()) +
                          " outside 1.." + std::to_string(dim_));
  }
  terms_[index] += coefficient;
}

void TermAccumulator::add(const ChaosPoly& p, double scale) {
  if (p.dim() != dim_) {
    throw DimensionMismatch("accumulate: dimensions " + std::to_string(p.dim()) +
                            " and " + std::to_string(dim_));
  }
  for (const auto& [index, coeff] : p.terms()) terms_[index] += scale * coeff;
}

ChaosPoly TermAccumulator::finish() && {
  unsigned worst = 0;
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) <= kPruneThreshold) {
      it = terms_.erase(it);
      continue;
    }
    worst = std::max(worst, it->first.total_degree());
    ++it;
  }
  if (worst > degree_cap_) throw DegreeCapExceeded(worst, degree_cap_);
  return ChaosPoly(dim_, degree_cap_, std::move(terms_));
}

// ---------------------------------------------------------------------------
// Operations

ChaosPoly linear_combine(std::span<const double> coeffs,
                         std::span<const ChaosPoly> polys) {
  if (coeffs.size() != polys.size()) {
    throw DimensionMismatch("linear_combine: " + std::to_string(coeffs.size()) +
                            " coefficients for " + std::to_string(polys.size()) +
                            " polynomials");
  }
  if (polys.empty()) return ChaosPoly(0);
  unsigned cap = 0;
  for (const auto& p : polys) {
    require_same_dim(polys.front(), p, "linear_combine");
    cap = std::max(cap, p.degree_cap());
  }
  TermAccumulator acc(polys.front().dim(), cap);
  for (std::size_t k = 0; k < polys.size(); ++k) acc.add(polys[k], coeffs[k]);
  return std::move(acc).finish();
}

ChaosPoly hermite_product(const ChaosPoly& p, const ChaosPoly& q) {
  require_same_dim(p, q, "hermite_product");
  TermAccumulator acc(p.dim(), std::max(p.degree_cap(), q.degree_cap()));
  for (const auto& [a, ca] : p.terms()) {
    for (const auto& [b, cb] : q.terms()) multiply_monomials(a, ca, b, cb, acc);
  }
  return std::move(acc).finish();
}

double expectation(const ChaosPoly& p) { return p.coefficient(MultiIndex{}); }

double l2_inner(const ChaosPoly& p, const ChaosPoly& q) {
  require_same_dim(p, q, "l2_inner");
  const auto& small = p.size() <= q.size() ? p : q;
  const auto& large = p.size() <= q.size() ? q : p;
  double sum = 0.0;
  for (const auto& [index, coeff] : small.terms()) {
    auto it = large.terms().find(index);
    if (it != large.terms().end()) sum += index.factorial() * coeff * it->second;
  }
  return sum;
}

double l2_norm(const ChaosPoly& p) { return std::sqrt(l2_inner(p, p)); }

ChaosPoly partial_derivative(const ChaosPoly& p, unsigned coordinate) {
  require_coordinate(p, coordinate, "partial_derivative");
  TermAccumulator acc(p.dim(), p.degree_cap());
  for (const auto& [index, coeff] : p.terms()) {
    const unsigned k = index.order(coordinate);
    if (k == 0) continue;
    std::vector<MultiIndex::Entry> entries(index.entries().begin(),
                                           index.entries().end());
    for (auto& e : entries) {
      if (e.first == coordinate) e.second -= 1;
    }
    acc.add(MultiIndex::from_entries(std::move(entries)), coeff * k);
  }
  return std::move(acc).finish();
}

ChaosPoly multiply_by_coordinate(const ChaosPoly& p, unsigned coordinate) {
  require_coordinate(p, coordinate, "multiply_by_coordinate");
  // He_1 He_k = He_{k+1} + k He_{k-1}
  TermAccumulator acc(p.dim(), p.degree_cap());
  for (const auto& [index, coeff] : p.terms()) {
    const unsigned k = index.order(coordinate);
    std::vector<MultiIndex::Entry> up(index.entries().begin(),
                                      index.entries().end());
    up.emplace_back(coordinate, 1);
    acc.add(MultiIndex::from_entries(std::move(up)), coeff);
    if (k > 0) {
      std::vector<MultiIndex::Entry> down(index.entries().begin(),
                                          index.entries().end());
      for (auto& e : down) {
        if (e.first == coordinate) e.second -= 1;
      }
      acc.add(MultiIndex::from_entries(std::move(down)), coeff * k);
    }
  }
  return std::move(acc).finish();
}

ChaosPoly conditional_expectation(const ChaosPoly& p, unsigned stage) {
  if (stage > p.dim()) {
    throw IndexOutOfRange("conditional_expectation: stage " +
                          std::to_string(stage) + " outside 0.." +
                          std::to_string(p.dim()));
  }
  return filter_terms(p, [stage](const MultiIndex& index) {
    return index.max_coordinate() <= stage;
  });
}

ChaosPoly chaos_projection(const ChaosPoly& p, unsigned grade) {
  return filter_terms(p, [grade](const MultiIndex& index) {
    return index.total_degree() == grade;
  });
}

ChaosPoly ou_apply(const ChaosPoly& p) {
  return scale_terms(p, [](const MultiIndex& index) {
    return static_cast<double>(index.total_degree());
  });
}

ChaosPoly ou_inverse(const ChaosPoly& p) {
  const double mean = expectation(p);
  if (std::abs(mean) > 1e-12) {
    throw PreconditionError("ou_inverse: input has mean " + format_number(mean) +
                            ", expected a centered functional");
  }
  return scale_terms(p, [](const MultiIndex& index) {
    return index.total_degree() == 0
               ? 0.0
               : 1.0 / static_cast<double>(index.total_degree());
  });
}

ChaosPoly refine(const ChaosPoly& p, unsigned factor) {
  if (factor == 0) throw PreconditionError("refine: factor must be >= 1");
  if (factor == 1) return p;
  const unsigned fine_dim = p.dim() * factor;
  if (fine_dim > kDimensionCap) {
    throw DimensionCapExceeded("refine: dimension " + std::to_string(fine_dim) +
                               " exceeds dimension cap " +
                               std::to_string(kDimensionCap));
  }
  const unsigned cap = p.degree_cap();
  const double weight = 1.0 / std::sqrt(static_cast<double>(factor));

  // powers[i][k] = He_k(Y_i) with Y_i the normalized sum of cell i's
  // fine increments, built by the recurrence He_{k+1} = Y He_k - k He_{k-1}.
  std::map<unsigned, std::vector<ChaosPoly>> powers;
  auto hermite_of_cell = [&](unsigned cell, unsigned order) -> const ChaosPoly& {
    auto& table = powers[cell];
    if (table.empty()) {
      TermAccumulator acc(fine_dim, cap);
      for (unsigned j = 1; j <= factor; ++j) {
        acc.add(MultiIndex::single((cell - 1) * factor + j), weight);
      }
      table.push_back(ChaosPoly::constant(fine_dim, 1.0, cap));
      table.push_back(std::move(acc).finish());
    }
    while (table.size() <= order) {
      const std::size_t k = table.size() - 1;
      ChaosPoly next = hermite_product(table[1], table[k]);
      if (k >= 1) {
        next = next - static_cast<double>(k) * table[k - 1];
      }
      table.push_back(std::move(next));
    }
    return table[order];
  };

  TermAccumulator acc(fine_dim, cap);
  for (const auto& [index, coeff] : p.terms()) {
    ChaosPoly term = ChaosPoly::constant(fine_dim, coeff, cap);
    for (const auto& [cell, order] : index.entries()) {
      term = hermite_product(term, hermite_of_cell(cell, order));
    }
    acc.add(term);
  }
  return std::move(acc).finish();
}

double hermite_value(unsigned order, double x) noexcept {
  if (order == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (unsigned k = 1; k < order; ++k) {
    const double next = x * cur - static_cast<double>(k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double evaluate(const ChaosPoly& p, std::span<const double> sample) {
  if (sample.size() != p.dim()) {
    throw DimensionMismatch("evaluate: sample of length " +
                            std::to_string(sample.size()) + " for dimension " +
                            std::to_string(p.dim()));
  }
  double sum = 0.0;
  for (const auto& [index, coeff] : p.terms()) {
    double value = coeff;
    for (const auto& [coordinate, order] : index.entries()) {
      value *= hermite_value(order, sample[coordinate - 1]);
    }
    sum += value;
  }
  return sum;
}

ChaosPoly operator+(const ChaosPoly& p, const ChaosPoly& q) {
  const double c[] = {1.0, 1.0};
  const ChaosPoly v[] = {p, q};
  return linear_combine(c, v);
}

ChaosPoly operator-(const ChaosPoly& p, const ChaosPoly& q) {
  const double c[] = {1.0, -1.0};
  const ChaosPoly v[] = {p, q};
  return linear_combine(c, v);
}

ChaosPoly operator-(const ChaosPoly& p) { return -1.0 * p; }

ChaosPoly operator*(double s, const ChaosPoly& p) {
  return scale_terms(p, [s](const MultiIndex&) { return s; });
}

ChaosPoly operator*(const ChaosPoly& p, const ChaosPoly& q) {
  return hermite_product(p, q);
}

// ---------------------------------------------------------------------------
// Text form

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::string to_text(const ChaosPoly& p) {
  if (p.is_zero()) return "0\n";
  std::string out;
  for (const auto& [index, coeff] : p.terms()) {
    out += format_number(coeff);
    for (const auto& [coordinate, order] : index.entries()) {
      out += ' ';
      out += std::to_string(coordinate);
      out += ':';
      out += std::to_string(order);
    }
    out += '\n';
  }
  return out;
}

std::string json_text(const ChaosPoly& p) {
  std::string text = to_text(p);
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

ChaosPoly from_text(std::string_view text, unsigned dim, unsigned degree_cap) {
  TermAccumulator acc(dim, degree_cap);
  std::istringstream lines{std::string(text)};
  std::string line;
  unsigned line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string token;
    if (!(tokens >> token)) continue;
    auto bad = [&](const std::string& why) {
      return Error("chaos text line " + std::to_string(line_no) + ": " + why);
    };
    double coeff = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), coeff);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw bad("bad coefficient '" + token + "'");
    }
    std::vector<MultiIndex::Entry> entries;
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) throw bad("expected i:k, got '" + token + "'");
      unsigned i = 0, k = 0;
      auto r1 = std::from_chars(token.data(), token.data() + colon, i);
      auto r2 = std::from_chars(token.data() + colon + 1,
                                token.data() + token.size(), k);
      if (r1.ec != std::errc() || r1.ptr != token.data() + colon ||
          r2.ec != std::errc() || r2.ptr != token.data() + token.size() || i == 0) {
        throw bad("expected i:k, got '" + token + "'");
      }
      entries.emplace_back(i, k);
    }
    acc.add(MultiIndex::from_entries(std::move(entries)), coeff);
  }
  return std::move(acc).finish();
}

}  // namespace wienerlab
