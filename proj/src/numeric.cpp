#include "catalytic/numeric.hpp"

#include <unsupported/Eigen/Polynomials>

namespace catalytic {

double extrapolate_to_zero(std::vector<double> h, std::vector<double> y) {
  const std::size_t n = y.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      y[i] = (h[i + level] * y[i] - h[i] * y[i + 1]) / (h[i + level] - h[i]);
    }
  }
  return y.empty() ? 0.0 : y[0];
}

double condition_number(const Mat<double>& a) {
  Eigen::JacobiSVD<Mat<double>> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0.0;
  double smin = s[s.size() - 1];
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / smin;
}

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& c) {
  std::vector<double> trimmed = c;
  while (trimmed.size() > 1 && trimmed.back() == 0.0) trimmed.pop_back();
  if (trimmed.size() < 2) return {};
  Eigen::VectorXd coeffs(static_cast<Eigen::Index>(trimmed.size()));
  for (std::size_t i = 0; i < trimmed.size(); ++i) coeffs[static_cast<Eigen::Index>(i)] = trimmed[i];
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
  std::vector<std::complex<double>> roots;
  for (Eigen::Index i = 0; i < solver.roots().size(); ++i) roots.push_back(solver.roots()[i]);
  return roots;
}

}  // namespace catalytic
