#ifndef TALBOT_QUADRATURE_HPP
#define TALBOT_QUADRATURE_HPP

#include "talbot/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <queue>
#include <type_traits>
#include <vector>

namespace talbot::quad {

/// Gauss-Legendre rule on [-1, 1].
struct Rule
{
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
inline Rule gauss_legendre(int n)
{
  Rule rule{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 0 ? 1.0 : (n == 1 ? x : p1);
      const double pm = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

inline double norm_of(double v) { return std::abs(v); }
inline double norm_of(const std::complex<double>& v) { return std::abs(v); }
template <class Derived>
double norm_of(const Eigen::DenseBase<Derived>& v)
{
  return v.size() == 0 ? 0.0 : v.derived().cwiseAbs().maxCoeff();
}

struct Options
{
  double abs_tol = 0.0;
  double rel_tol = 1e-10;
  int max_intervals = 20000;
  /// Initial uniform subdivision of [a, b].
  int initial_intervals = 1;
};

template <class R>
struct Result
{
  R value;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

namespace detail {

// Kronrod 15-point abscissae and weights, embedded Gauss 7-point weights.
inline constexpr std::array<double, 8> xk15 = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wk15 = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg7 = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F, class R>
std::pair<R, double> gk15(const F& f, double a, double b)
{
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  R fc = f(c);
  R kron = fc * wk15[7];
  R gauss = fc * wg7[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * xk15[j];
    R sum = f(c - dx) + f(c + dx);
    kron = kron + sum * wk15[j];
    if (j % 2 == 1)
      gauss = gauss + sum * wg7[j / 2];
  }
  R value = kron * h;
  R diff = (kron - gauss) * h;
  return {value, norm_of(diff)};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod 7/15 quadrature of a scalar, complex or
/// Eigen-vector valued integrand. The interval with the largest error
/// estimate is bisected until the summed estimate meets
/// max(abs_tol, rel_tol * |I|) in the max-norm.
template <class F>
auto integrate(const F& f, double a, double b, const Options& opt = {})
    -> Result<std::decay_t<std::invoke_result_t<F, double>>>
{
  using R = std::decay_t<std::invoke_result_t<F, double>>;
  struct Piece
  {
    double a, b;
    R value;
    double error;
  };
  auto cmp = [](const Piece& x, const Piece& y) { return x.error < y.error; };
  std::priority_queue<Piece, std::vector<Piece>, decltype(cmp)> heap(cmp);

  const int n0 = std::max(1, opt.initial_intervals);
  const double width = (b - a) / n0;
  for (int i = 0; i < n0; ++i) {
    const double lo = a + i * width, hi = (i + 1 == n0) ? b : a + (i + 1) * width;
    auto [v, e] = detail::gk15<F, R>(f, lo, hi);
    heap.push({lo, hi, std::move(v), e});
  }

  auto totals = [&heap]() {
    auto copy = heap;
    R sum = copy.top().value;
    double err = copy.top().error;
    copy.pop();
    while (!copy.empty()) {
      sum = sum + copy.top().value;
      err += copy.top().error;
      copy.pop();
    }
    return std::pair<R, double>{sum, err};
  };

  auto [total, err] = totals();
  int count = n0;
  // Refresh the exact totals periodically; incremental updates in between.
  while (err > std::max(opt.abs_tol, opt.rel_tol * norm_of(total))) {
    if (count >= opt.max_intervals)
      return {total, err, count, false};
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      return {total, err, count, false};
    }
    auto [v1, e1] = detail::gk15<F, R>(f, worst.a, mid);
    auto [v2, e2] = detail::gk15<F, R>(f, mid, worst.b);
    total = total - worst.value + v1 + v2;
    err += e1 + e2 - worst.error;
    heap.push({worst.a, mid, std::move(v1), e1});
    heap.push({mid, worst.b, std::move(v2), e2});
    ++count;
    if (count % 256 == 0)
      std::tie(total, err) = totals();
  }
  std::tie(total, err) = totals();
  return {total, err, count, true};
}

namespace detail {

template <class F, class R>
R recurse(const F& f, double a, double b, const R& whole, double err, double tol_density, int depth,
          int& evaluations, bool& ok)
{
  if (err <= tol_density * (b - a) || depth == 0) {
    if (depth == 0 && err > tol_density * (b - a))
      ok = false;
    return whole;
  }
  const double mid = 0.5 * (a + b);
  auto [v1, e1] = gk15<F, R>(f, a, mid);
  auto [v2, e2] = gk15<F, R>(f, mid, b);
  evaluations += 2;
  R left = recurse(f, a, mid, v1, e1, tol_density, depth - 1, evaluations, ok);
  R right = recurse(f, mid, b, v2, e2, tol_density, depth - 1, evaluations, ok);
  return left + right;
}

} // namespace detail

/// Locally adaptive Gauss-Kronrod 7/15 with O(depth) memory, for large
/// vector-valued integrands. Each subinterval must meet its length-weighted
/// share of `abs_tol`.
template <class F>
auto integrate_recursive(const F& f, double a, double b, double abs_tol, int initial_intervals = 1,
                         int max_depth = 40) -> Result<std::decay_t<std::invoke_result_t<F, double>>>
{
  using R = std::decay_t<std::invoke_result_t<F, double>>;
  const int n0 = std::max(1, initial_intervals);
  const double width = (b - a) / n0;
  const double density = abs_tol / (b - a);
  bool ok = true;
  int evaluations = 0;
  R total{};
  double err = 0.0;
  for (int i = 0; i < n0; ++i) {
    const double lo = a + i * width, hi = (i + 1 == n0) ? b : a + (i + 1) * width;
    auto [v, e] = detail::gk15<F, R>(f, lo, hi);
    ++evaluations;
    R part = detail::recurse(f, lo, hi, v, e, density, max_depth, evaluations, ok);
    total = i == 0 ? part : R(total + part);
    err += e;
  }
  return {total, err, evaluations, ok};
}

namespace detail {

// j_0(w) .. j_{n-1}(w).
inline void spherical_bessel(double w, int n, double* out)
{
  n = std::min(n, 64);
  const double aw = std::abs(w);
  if (aw < 0.5) {
    const double q = -0.5 * aw * aw;
    double lead = 1.0; // aw^m / (2m+1)!!
    for (int m = 0; m < n; ++m) {
      double term = 1.0, sum = 1.0;
      for (int k = 1; k < 12; ++k) {
        term *= q / (k * (2.0 * m + 2.0 * k + 1.0));
        sum += term;
      }
      out[m] = lead * sum;
      lead *= aw / (2.0 * m + 3.0);
    }
  } else {
    const double s = std::sin(aw), c = std::cos(aw);
    const double j0 = s / aw, j1 = s / (aw * aw) - c / aw;
    if (aw >= n) {
      out[0] = j0;
      if (n > 1)
        out[1] = j1;
      for (int m = 1; m + 1 < n; ++m)
        out[m + 1] = (2.0 * m + 1.0) / aw * out[m] - out[m - 1];
    } else {
      // Miller's backward recurrence, normalised on the larger of j0, j1.
      const int start = n + 24 + static_cast<int>(aw);
      double f_next = 0.0, f = 1e-30;
      double tmp[64];
      for (int m = start; m > 0; --m) {
        const double f_prev = (2.0 * m + 1.0) / aw * f - f_next;
        f_next = f;
        f = f_prev;
        if (m - 1 < n)
          tmp[m - 1] = f;
        if (std::abs(f) > 1e250) {
          f *= 1e-250;
          f_next *= 1e-250;
          for (int i = m - 1; i < n; ++i)
            tmp[i] *= 1e-250;
        }
      }
      const double scale = std::abs(j0) > std::abs(j1) || n < 2 ? j0 / tmp[0] : j1 / tmp[1];
      for (int m = 0; m < n; ++m)
        out[m] = tmp[m] * scale;
    }
  }
  if (w < 0.0)
    for (int m = 1; m < n; m += 2)
      out[m] = -out[m];
}

struct FilonTables
{
  static constexpr int n = 16;
  Rule rule = gauss_legendre(n);
  Eigen::Matrix<double, n, n> transform; // Legendre coefficients from node values

  FilonTables()
  {
    for (int i = 0; i < n; ++i) {
      double p0 = 1.0, p1 = rule.nodes[i];
      for (int m = 0; m < n; ++m) {
        const double pm = m == 0 ? 1.0 : p1;
        transform(m, i) = 0.5 * (2.0 * m + 1.0) * rule.weights[i] * pm;
        if (m >= 1) {
          const double p2 = ((2.0 * m + 1.0) * rule.nodes[i] * p1 - m * p0) / (m + 1.0);
          p0 = p1;
          p1 = p2;
        }
      }
    }
  }
};

inline const FilonTables& filon_tables()
{
  static const FilonTables t;
  return t;
}

} // namespace detail

/// int_a^b h(x) exp(-i k x) dx for a smooth complex h. h is expanded in
/// Legendre polynomials on panels adapted to h only; the oscillatory factor
/// is integrated exactly (spherical Bessel moments), so the cost does not
/// grow with k.
template <class H>
Result<std::complex<double>> integrate_filon(const H& h, double a, double b, double k, double abs_tol,
                                             int max_depth = 40, double noise_floor = 1e-10)
{
  using C = std::complex<double>;
  constexpr int n = detail::FilonTables::n;
  const auto& tab = detail::filon_tables();
  const double density = abs_tol / (b - a);
  Result<C> res{C{}, 0.0, 0, true};

  auto panel = [&](double p, double q, double& err, double& scale) {
    const double c = 0.5 * (p + q), hl = 0.5 * (q - p);
    Eigen::Matrix<C, n, 1> vals;
    for (int i = 0; i < n; ++i)
      vals[i] = h(c + hl * tab.rule.nodes[i]);
    const Eigen::Matrix<C, n, 1> coef = tab.transform.cast<C>() * vals;
    double jn[n];
    detail::spherical_bessel(k * hl, n, jn);
    C sum = 0.0;
    C mi = 1.0; // (-i)^m
    for (int m = 0; m < n; ++m) {
      sum += coef[m] * mi * jn[m];
      mi *= C{0.0, -1.0};
    }
    err = 2.0 * hl * (std::abs(coef[n - 1]) + std::abs(coef[n - 2]) + std::abs(coef[n - 3]));
    scale = vals.cwiseAbs().maxCoeff();
    ++res.intervals;
    return 2.0 * hl * std::polar(1.0, -k * c) * sum;
  };

  struct Frame
  {
    double p, q;
    int depth;
  };
  std::vector<Frame> stack{{a, b, max_depth}};
  while (!stack.empty()) {
    const Frame fr = stack.back();
    stack.pop_back();
    double err = 0.0, scale = 0.0;
    const C v = panel(fr.p, fr.q, err, scale);
    // Rounding of x limits the attainable accuracy where h varies rapidly.
    const double local = std::max(density, noise_floor * scale) * (fr.q - fr.p);
    if (err <= local || fr.depth == 0) {
      if (err > local)
        res.converged = false;
      res.value += v;
      res.error += err;
      continue;
    }
    const double mid = 0.5 * (fr.p + fr.q);
    stack.push_back({mid, fr.q, fr.depth - 1});
    stack.push_back({fr.p, mid, fr.depth - 1});
  }
  return res;
}

/// Composite fixed Gauss-Legendre rule over `panels` equal panels.
template <class F>
auto integrate_fixed(const F& f, double a, double b, const Rule& rule, int panels)
    -> std::decay_t<std::invoke_result_t<F, double>>
{
  using R = std::decay_t<std::invoke_result_t<F, double>>;
  const double h = (b - a) / panels;
  R sum{};
  bool first = true;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
      R term = f(c + 0.5 * h * rule.nodes[i]) * (0.5 * h * rule.weights[i]);
      if (first) {
        sum = term;
        first = false;
      } else {
        sum = sum + term;
      }
    }
  }
  return sum;
}

} // namespace talbot::quad

#endif
