#include "isl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace isl {

// ---------------------------------------------------------------------------
// Cubic spline, not-a-knot boundary conditions.
// ---------------------------------------------------------------------------

CubicSpline::CubicSpline(std::vector<double> t, std::vector<double> v) : t_(std::move(t)) {
  const std::size_t n = t_.size();
  if (n != v.size() || n < 2) throw NumericsError("spline needs >= 2 matched nodes");
  for (std::size_t i = 1; i < n; ++i)
    if (!(t_[i] > t_[i - 1])) throw NumericsError("spline nodes must increase");

  a_ = v;
  b_.assign(n, 0.0);
  c_.assign(n, 0.0);
  d_.assign(n, 0.0);
  if (n == 2) {  // straight segment
    b_[0] = (v[1] - v[0]) / (t_[1] - t_[0]);
    return;
  }

  // Solve the tridiagonal system for the quadratic coefficients c.
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = t_[i + 1] - t_[i];

  // not-a-knot: third derivative continuous across the first and last
  // interior nodes; the end rows give
  //   h1*c0 - (h0+h1)*c1 + h0*c2 = 0
  //   h_{n-2}*c_{n-3} - (h_{n-3}+h_{n-2})*c_{n-2} + h_{n-3}*c_{n-1} = 0.
  // Express c0 and c_{n-1} through interior unknowns and solve the reduced
  // tridiagonal system for c1..c_{n-2}.
  auto interior_rhs = [&](std::size_t i) {
    return 3.0 * ((a_[i + 1] - a_[i]) / h[i] - (a_[i] - a_[i - 1]) / h[i - 1]);
  };

  c_.assign(n, 0.0);
  const double d0 = h[1], u0 = -(h[0] + h[1]), e0 = h[0];
  const double dN = h[n - 3], lN = -(h[n - 3] + h[n - 2]), eN = h[n - 2];

  if (n == 3) {
    // not-a-knot with three nodes degenerates to the interpolating parabola
    double dd1 = (a_[1] - a_[0]) / h[0];
    double dd2 = (a_[2] - a_[1]) / h[1];
    double c2 = (dd2 - dd1) / (h[0] + h[1]);  // half the second derivative
    c_[0] = c_[1] = c_[2] = c2;
    b_[0] = dd1 - c2 * h[0];
    b_[1] = dd1 + c2 * h[0];
    d_[0] = d_[1] = 0.0;
    (void)d0;
    (void)u0;
    (void)e0;
    (void)dN;
    (void)lN;
    (void)eN;
    return;
  } else {
    const std::size_t m = n - 2;  // unknowns c1..c_{n-2}
    std::vector<double> lo(m, 0.0), di(m, 0.0), up(m, 0.0), r(m, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      std::size_t k = i - 1;
      lo[k] = h[i - 1];
      di[k] = 2.0 * (h[i - 1] + h[i]);
      up[k] = h[i];
      r[k] = interior_rhs(i);
    }
    // fold c0 = -(u0*c1 + e0*c2)/d0 into row for i=1
    di[0] += lo[0] * (-u0 / d0);
    up[0] += lo[0] * (-e0 / d0);
    lo[0] = 0.0;
    // fold c_{n-1} = -(lN*c_{n-2} + eN*c_{n-3})/dN into row for i=n-2
    di[m - 1] += up[m - 1] * (-lN / dN);
    lo[m - 1] += up[m - 1] * (-eN / dN);
    up[m - 1] = 0.0;

    std::vector<double> cp(m, 0.0), dp(m, 0.0);
    double den = di[0];
    if (den == 0.0) throw NumericsError("singular spline system");
    cp[0] = up[0] / den;
    dp[0] = r[0] / den;
    for (std::size_t i = 1; i < m; ++i) {
      den = di[i] - lo[i] * cp[i - 1];
      if (den == 0.0) throw NumericsError("singular spline system");
      cp[i] = up[i] / den;
      dp[i] = (r[i] - lo[i] * dp[i - 1]) / den;
    }
    std::vector<double> sol(m, 0.0);
    sol[m - 1] = dp[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) sol[i] = dp[i] - cp[i] * sol[i + 1];
    for (std::size_t i = 0; i < m; ++i) c_[i + 1] = sol[i];
    c_[0] = -(u0 * c_[1] + e0 * c_[2]) / d0;
    c_[n - 1] = -(lN * c_[n - 2] + eN * c_[n - 3]) / dN;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    b_[i] = (a_[i + 1] - a_[i]) / h[i] - h[i] * (2.0 * c_[i] + c_[i + 1]) / 3.0;
    d_[i] = (c_[i + 1] - c_[i]) / (3.0 * h[i]);
  }
}

std::size_t CubicSpline::segment(double t) const {
  if (t <= t_.front()) return 0;
  if (t >= t_.back()) return t_.size() - 2;
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  return static_cast<std::size_t>(it - t_.begin()) - 1;
}

double CubicSpline::operator()(double t) const {
  std::size_t i = segment(t);
  double dt = t - t_[i];
  return a_[i] + dt * (b_[i] + dt * (c_[i] + dt * d_[i]));
}

double CubicSpline::derivative(double t) const {
  std::size_t i = segment(t);
  double dt = t - t_[i];
  return b_[i] + dt * (2.0 * c_[i] + 3.0 * dt * d_[i]);
}

double CubicSpline::second_derivative(double t) const {
  std::size_t i = segment(t);
  double dt = t - t_[i];
  return 2.0 * c_[i] + 6.0 * dt * d_[i];
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7-15 adaptive quadrature.
// ---------------------------------------------------------------------------

namespace {

constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct GKResult {
  double value;
  double error;
};

GKResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fc = f(c);
  double kron = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (int j = 0; j < 7; ++j) {
    double fl = f(c - h * kKronrodNodes[j]);
    double fr = f(c + h * kKronrodNodes[j]);
    kron += kKronrodWeights[j] * (fl + fr);
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (fl + fr);
  }
  kron *= h;
  gauss *= h;
  return {kron, std::abs(kron - gauss)};
}

struct AdaptiveState {
  const std::function<double(double)>* f;
  double tol_per_unit;  // error budget per unit of interval length
  int max_depth;
  long nodes = 0;
  static constexpr long kMaxNodes = 60000;
};

double integrate_rec(AdaptiveState& st, double a, double b, int depth) {
  GKResult r = gk15(*st.f, a, b);
  ++st.nodes;
  double budget = st.tol_per_unit * std::abs(b - a);
  // noise floor: stop splitting once the estimate is at rounding level
  double floor = 5e-15 * (std::abs(r.value) + 1e-30);
  if (r.error <= std::max(budget, floor) || depth >= st.max_depth ||
      st.nodes > AdaptiveState::kMaxNodes)
    return r.value;
  double c = 0.5 * (a + b);
  return integrate_rec(st, a, c, depth + 1) + integrate_rec(st, c, b, depth + 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  GKResult whole = gk15(f, a, b);
  double tol = std::max(abs_tol, rel_tol * std::abs(whole.value));
  if (whole.error <= tol) return whole.value;
  AdaptiveState st{&f, tol / std::abs(b - a), max_depth};
  double c = 0.5 * (a + b);
  return integrate_rec(st, a, c, 1) + integrate_rec(st, c, b, 1);
}

// ---------------------------------------------------------------------------
// Householder QR least squares.
// ---------------------------------------------------------------------------

std::vector<double> solve_least_squares(const std::vector<double>& a_in, std::size_t m,
                                        std::size_t n, const std::vector<double>& b_in,
                                        double* residual_norm) {
  if (a_in.size() != m * n || b_in.size() != m || m < n || n == 0)
    throw NumericsError("least squares: bad dimensions");
  std::vector<double> A = a_in;
  std::vector<double> b = b_in;

  // Column scaling for conditioning.
  std::vector<double> scale(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    double mx = 0.0;
    for (std::size_t i = 0; i < m; ++i) mx = std::max(mx, std::abs(A[i * n + j]));
    if (mx > 0) {
      scale[j] = mx;
      for (std::size_t i = 0; i < m; ++i) A[i * n + j] /= mx;
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < m; ++i) norm += A[i * n + k] * A[i * n + k];
    norm = std::sqrt(norm);
    if (norm == 0.0) throw NumericsError("least squares: rank-deficient design matrix");
    double alpha = A[k * n + k] > 0 ? -norm : norm;
    std::vector<double> v(m - k);
    v[0] = A[k * n + k] - alpha;
    for (std::size_t i = k + 1; i < m; ++i) v[i - k] = A[i * n + k];
    double vnorm2 = 0.0;
    for (double t : v) vnorm2 += t * t;
    if (vnorm2 == 0.0) continue;
    A[k * n + k] = alpha;
    for (std::size_t i = k + 1; i < m; ++i) A[i * n + k] = 0.0;
    for (std::size_t j = k + 1; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += v[i - k] * A[i * n + j];
      double f = 2.0 * dot / vnorm2;
      for (std::size_t i = k; i < m; ++i) A[i * n + j] -= f * v[i - k];
    }
    double dotb = 0.0;
    for (std::size_t i = k; i < m; ++i) dotb += v[i - k] * b[i];
    double fb = 2.0 * dotb / vnorm2;
    for (std::size_t i = k; i < m; ++i) b[i] -= fb * v[i - k];
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = b[ri];
    for (std::size_t j = ri + 1; j < n; ++j) s -= A[ri * n + j] * x[j];
    double diag = A[ri * n + ri];
    if (diag == 0.0) throw NumericsError("least squares: singular R");
    x[ri] = s / diag;
  }
  for (std::size_t j = 0; j < n; ++j) x[j] /= scale[j];

  if (residual_norm) {
    double r2 = 0.0;
    for (std::size_t i = n; i < m; ++i) r2 += b[i] * b[i];
    *residual_norm = std::sqrt(r2);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Root finding.
// ---------------------------------------------------------------------------

double find_root(const std::function<double(double)>& f, double a, double b, double tol,
                 int max_iter) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) throw NumericsError("find_root: endpoints do not bracket");
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * tol;
    double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
  }
  return b;
}

double refine_root(const std::function<double(double)>& f,
                   const std::function<double(double)>& df, double x0, double lo, double hi,
                   double tol, int max_iter) {
  double x = std::clamp(x0, lo, hi);
  for (int it = 0; it < max_iter; ++it) {
    double fx = f(x);
    if (fx == 0.0) return x;
    double d = df(x);
    double xn = (d != 0.0) ? x - fx / d : lo - 1.0;  // forces fallback when d == 0
    if (xn < lo || xn > hi || !std::isfinite(xn)) {
      double flo = f(lo);
      if (flo * fx < 0.0)
        xn = 0.5 * (lo + x);
      else if (f(hi) * fx < 0.0)
        xn = 0.5 * (x + hi);
      else
        return x;
    }
    if (std::abs(xn - x) <= tol * (1.0 + std::abs(xn))) return xn;
    x = xn;
  }
  return x;
}

// ---------------------------------------------------------------------------
// Halton points.
// ---------------------------------------------------------------------------

namespace {
double radical_inverse(std::uint32_t i, std::uint32_t base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}
}  // namespace

std::vector<std::pair<double, double>> halton_2d(std::size_t count, std::uint32_t seed_offset) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t k = static_cast<std::uint32_t>(i) + 1 + seed_offset;
    pts.emplace_back(radical_inverse(k, 2), radical_inverse(k, 3));
  }
  return pts;
}

long long gcd_list(const std::vector<long long>& values) {
  long long g = 0;
  for (long long v : values) g = std::gcd(g, std::abs(v));
  return g;
}

// ---------------------------------------------------------------------------
// Monotone cubic (Fritsch-Carlson).
// ---------------------------------------------------------------------------

MonotoneCubic::MonotoneCubic(std::vector<double> t, std::vector<double> v)
    : t_(std::move(t)), v_(std::move(v)) {
  const std::size_t n = t_.size();
  if (n != v_.size() || n < 2) throw NumericsError("monotone cubic needs >= 2 nodes");
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = t_[i + 1] - t_[i];
    if (h[i] <= 0) throw NumericsError("monotone cubic nodes must increase");
    delta[i] = (v_[i + 1] - v_[i]) / h[i];
  }
  m_.assign(n, 0.0);
  m_[0] = delta[0];
  m_[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0)
      m_[i] = 0.0;
    else
      m_[i] = 2.0 / (1.0 / delta[i - 1] + 1.0 / delta[i]);  // harmonic mean
  }
  // Fritsch-Carlson limiter
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (delta[i] == 0.0) {
      m_[i] = m_[i + 1] = 0.0;
      continue;
    }
    double alpha = m_[i] / delta[i], beta = m_[i + 1] / delta[i];
    double s = alpha * alpha + beta * beta;
    if (s > 9.0) {
      double tau = 3.0 / std::sqrt(s);
      m_[i] = tau * alpha * delta[i];
      m_[i + 1] = tau * beta * delta[i];
    }
  }
}

double MonotoneCubic::operator()(double t) const {
  std::size_t n = t_.size();
  std::size_t i;
  if (t <= t_.front())
    i = 0;
  else if (t >= t_.back())
    i = n - 2;
  else
    i = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin()) - 1;
  double h = t_[i + 1] - t_[i];
  double s = (t - t_[i]) / h;
  double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  double h10 = s * (1 - s) * (1 - s);
  double h01 = s * s * (3 - 2 * s);
  double h11 = s * s * (s - 1);
  return h00 * v_[i] + h10 * h * m_[i] + h01 * v_[i + 1] + h11 * h * m_[i + 1];
}

double MonotoneCubic::derivative(double t) const {
  std::size_t n = t_.size();
  std::size_t i;
  if (t <= t_.front())
    i = 0;
  else if (t >= t_.back())
    i = n - 2;
  else
    i = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin()) - 1;
  double h = t_[i + 1] - t_[i];
  double s = (t - t_[i]) / h;
  double d00 = (6 * s * s - 6 * s) / h;
  double d10 = 3 * s * s - 4 * s + 1;
  double d01 = (-6 * s * s + 6 * s) / h;
  double d11 = 3 * s * s - 2 * s;
  return d00 * v_[i] + d10 * m_[i] + d01 * v_[i + 1] + d11 * m_[i + 1];
}

}  // namespace isl
