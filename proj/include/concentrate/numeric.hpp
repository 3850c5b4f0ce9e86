#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace concentrate {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Input that fails a contract precondition (bad file, bad parameter).
struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Query outside the numerically meaningful domain (table range, empty
// feasible set).
struct numeric_domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

// Neumaier compensated accumulator; spectra carry many tiny masses and the
// majorization tolerance is 1e-12 per prefix sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_total(std::span<const double> xs) {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

// log(exp(a) + exp(b)) with -inf as the empty sum.
inline double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// Streaming log-sum-exp; feed log terms, read the log of their sum.
class LogSumExp {
 public:
  void add(double log_term) {
    if (log_term == -kInf) return;
    if (log_term > max_) {
      if (max_ != -std::numeric_limits<double>::infinity()) {
        scaled_ = scaled_ * std::exp(max_ - log_term) + 1.0;
      } else {
        scaled_ = 1.0;
      }
      max_ = log_term;
    } else {
      scaled_ += std::exp(log_term - max_);
    }
  }
  bool empty() const { return scaled_ == 0.0; }
  double value() const {
    if (empty()) return -kInf;
    return max_ + std::log(scaled_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double scaled_ = 0.0;
};

// Root of a continuous monotone function on [lo, hi]; the bracket must have
// opposite (or zero) signs at the ends.
inline double bisect_root(const std::function<double(double)>& f, double lo,
                          double hi, double xtol = 1e-12, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw numeric_domain_error("bisect_root: bracket does not change sign");
  }
  for (int i = 0; i < max_iter && (hi - lo) > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Maximum of a unimodal function by golden-section search.
inline double golden_section_max(const std::function<double(double)>& f,
                                 double lo, double hi, double xtol = 1e-10) {
  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return f(0.5 * (a + b));
}

// Floor with snapping: segment endpoints of the h(x) machinery are exact
// rationals in theory, so a ratio within 1e-9 of an integer is treated as
// that integer before flooring.
inline long long floor_snap(double x, double eps = 1e-9) {
  const double rounded = std::round(x);
  if (std::abs(x - rounded) <= eps) return static_cast<long long>(rounded);
  return static_cast<long long>(std::floor(x));
}

// Piecewise-linear interpolation over strictly increasing knots, clamped at
// the ends.
inline double lerp_at(std::span<const double> xs, std::span<const double> ys,
                      double x) {
  if (xs.empty() || xs.size() != ys.size()) {
    throw validation_error("lerp_at: bad knot arrays");
  }
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  std::size_t hi = 1;
  while (xs[hi] < x) ++hi;
  const std::size_t lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + t * (ys[hi] - ys[lo]);
}

// min:max:step grid string semantics shared by every CLI sweep.
inline std::vector<double> arange_inclusive(double min, double max,
                                            double step) {
  if (!(step > 0.0) || !(min < max)) {
    throw validation_error("grid requires min < max and step > 0");
  }
  const long long count =
      static_cast<long long>(std::floor((max - min) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) out.push_back(min + step * i);
  return out;
}

}  // namespace concentrate
