#include "lpwg/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lpwg::poly {

namespace {

std::span<const double> trimmed(std::span<const double> c) {
  std::size_t n = c.size();
  while (n > 0 && c[n - 1] == 0.0) --n;
  return c.first(n);
}

// p is monotone on [lo, hi] with a strict sign change between the endpoints.
double refine_root(std::span<const double> c, std::span<const double> dc, double lo, double hi) {
  double flo = eval(c, lo);
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fx = eval(c, x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == (flo < 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const double d = eval(dc, x);
    double next = d != 0.0 ? x - fx / d : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
      return next;
    }
    x = next;
  }
  return x;
}

}  // namespace

double eval(std::span<const double> c, double t) {
  double acc = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
  return acc;
}

std::vector<double> derivative(std::span<const double> c) {
  if (c.size() <= 1) return {};
  std::vector<double> d(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = static_cast<double>(i) * c[i];
  return d;
}

std::vector<double> multiply(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

double integrate(std::span<const double> c, double a, double b) {
  double acc = 0.0;
  double pa = a, pb = b;
  for (std::size_t m = 0; m < c.size(); ++m) {
    acc += c[m] * (pb - pa) / static_cast<double>(m + 1);
    pa *= a;
    pb *= b;
  }
  return acc;
}

std::vector<double> sign_change_roots(std::span<const double> c_in, double a, double b) {
  const auto c = trimmed(c_in);
  std::vector<double> roots;
  if (c.size() <= 1) return roots;
  if (c.size() == 2) {
    const double r = -c[0] / c[1];
    if (r > a && r < b) roots.push_back(r);
    return roots;
  }
  const std::vector<double> dc = derivative(c);
  std::vector<double> breaks{a};
  for (double r : sign_change_roots(dc, a, b)) breaks.push_back(r);
  breaks.push_back(b);

  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double fl = eval(c, breaks[i]);
    const double fr = eval(c, breaks[i + 1]);
    if ((fl < 0.0 && fr > 0.0) || (fl > 0.0 && fr < 0.0)) {
      roots.push_back(refine_root(c, dc, breaks[i], breaks[i + 1]));
    }
  }
  return roots;
}

namespace {

std::vector<double> unit_breaks(std::span<const double> c) {
  std::vector<double> breaks{0.0};
  for (double r : sign_change_roots(c, 0.0, 1.0)) breaks.push_back(r);
  breaks.push_back(1.0);
  return breaks;
}

}  // namespace

double integrate_abs_unit(std::span<const double> c) {
  const auto breaks = unit_breaks(c);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    acc += std::abs(integrate(c, breaks[i], breaks[i + 1]));
  }
  return acc;
}

std::vector<double> integrate_abs_unit_gradient(std::span<const double> c) {
  const auto breaks = unit_breaks(c);
  std::vector<double> g(c.size(), 0.0);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i], hi = breaks[i + 1];
    const double s = eval(c, 0.5 * (lo + hi));
    if (s == 0.0) continue;
    const double sign = s > 0.0 ? 1.0 : -1.0;
    double plo = lo, phi = hi;
    for (std::size_t m = 0; m < c.size(); ++m) {
      g[m] += sign * (phi - plo) / static_cast<double>(m + 1);
      plo *= lo;
      phi *= hi;
    }
  }
  return g;
}

}  // namespace lpwg::poly
