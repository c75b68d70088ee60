#include "oracles.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace oracle {

Rule gauss_hermite(unsigned k) {
  // Golub-Welsch: He_k satisfies x He_j = He_{j+1} + j He_{j-1}.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(k, k);
  for (unsigned j = 1; j < k; ++j) jacobi(j, j - 1) = jacobi(j - 1, j) = std::sqrt(double(j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  Rule r;
  for (unsigned j = 0; j < k; ++j) {
    r.nodes.push_back(eig.eigenvalues()(j));
    const double v = eig.eigenvectors()(0, j);
    r.weights.push_back(v * v);
  }
  return r;
}

namespace {

double tensor(const Fn& f, std::vector<double>& x, unsigned from, const Rule& rule) {
  if (from == x.size()) return f(x);
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    x[from] = rule.nodes[q];
    sum += rule.weights[q] * tensor(f, x, from + 1, rule);
  }
  return sum;
}

}  // namespace

double expect(const Fn& f, unsigned n, unsigned points) {
  std::vector<double> x(n, 0.0);
  return tensor(f, x, 0, gauss_hermite(points));
}

double expect_given(const Fn& f, std::span<const double> point, unsigned stage,
                    unsigned points) {
  std::vector<double> x(point.begin(), point.end());
  return tensor(f, x, stage, gauss_hermite(points));
}

double derivative(const Fn& f, std::span<const double> x, unsigned i, double h) {
  std::vector<double> up(x.begin(), x.end()), down(x.begin(), x.end());
  up[i - 1] += h;
  down[i - 1] -= h;
  return (f(up) - f(down)) / (2.0 * h);
}

}  // namespace oracle
