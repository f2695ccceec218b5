#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <complex>
#include <vector>

namespace catalytic {

// 106-bit binary floating point, the precision of a double-double.
using Extended = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<106, boost::multiprecision::digit_base_2>, boost::multiprecision::et_off>;

enum class Precision { F64, DD };

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

inline double to_f64(double x) { return x; }
inline double to_f64(const Extended& x) { return static_cast<double>(x); }

// Value at h = 0 of the interpolating polynomial through (h_i, y_i).
double extrapolate_to_zero(std::vector<double> h, std::vector<double> y);

// Solves a small dense system with partial pivoting. Returns false when the
// matrix is numerically singular.
template <class S>
bool solve_dense(const Mat<S>& a, const Vec<S>& b, Vec<S>& x) {
  Eigen::PartialPivLU<Mat<S>> lu(a);
  S det = lu.determinant();
  using std::abs;
  if (!(abs(det) > S(0))) return false;
  x = lu.solve(b);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double v = to_f64(x[i]);
    if (!(v == v) || v - v != 0.0) return false;
  }
  return true;
}

double condition_number(const Mat<double>& a);

// Roots of sum_i c[i] x^i (c.back() != 0).
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& c);

// Max-norm of a vector.
template <class S>
double max_norm(const Vec<S>& v) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double a = std::abs(to_f64(v[i]));
    if (!(a <= m)) m = a;
  }
  return m;
}

}  // namespace catalytic
