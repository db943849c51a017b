#pragma once
// Test-only reference computations. Nothing here calls the planners or the
// closed forms it is used to check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = double(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / double(v.size() - 1);
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(double(i) / double(a.size()) - double(j) / double(b.size())));
  }
  return d;
}

/// Asymptotic two-sample KS critical value at significance `alpha`.
inline double ks_critical(std::size_t n, std::size_t m, double alpha) {
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  return c * std::sqrt(double(n + m) / (double(n) * double(m)));
}

struct T1GridResult {
  double p_y = 0, p_xy = 0, crb = std::numeric_limits<double>::infinity();
};

/// Exhaustive search of the decentralized single-mean problem (learner at S_y,
/// p_x = 0) on a `step` lattice, with the budget rows written out by hand:
///   p_y + (a+1) p_xy <= E1,  (a+1) p_xy <= E1,  p_y + p_xy <= 1.
/// CRB = (1 - rho^2) var_y / ((1 - rho^2) p_y + p_xy).
inline T1GridResult t1_decentralized_grid(double alpha, double e1, double rho, double var_y, double step) {
  T1GridResult best;
  const double q = 1.0 - rho * rho;
  const long n = long(std::llround(1.0 / step));
  for (long i = 0; i <= n; ++i) {
    const double py = double(i) * step;
    for (long j = 0; i + j <= n; ++j) {
      const double pxy = double(j) * step;
      if (py + (alpha + 1) * pxy > e1 + 1e-12 || (alpha + 1) * pxy > e1 + 1e-12) break;
      const double denom = q * py + pxy;
      if (denom <= 0) continue;
      const double crb = q * var_y / denom;
      if (crb < best.crb) best = {py, pxy, crb};
    }
  }
  return best;
}

struct PolicyGridResult {
  double p_x = 0, p_y = 0, p_xy = 0, value = -std::numeric_limits<double>::infinity();
};

/// Centralized single-mean problem, maximizing information about mu_y over a
/// lattice in (p_x, p_y, p_xy) with hand-written rows:
///   (a+1)(p_x + p_xy) <= E1, (a+1)(p_y + p_xy) <= E1, a(p_x + p_y + 2 p_xy) <= E2.
inline PolicyGridResult t1_centralized_grid(double alpha, double e1, double e2, double rho, double var_y,
                                            double step) {
  PolicyGridResult best;
  const long n = long(std::llround(1.0 / step));
  for (long i = 0; i <= n; ++i)
    for (long j = 0; i + j <= n; ++j)
      for (long k = 0; i + j + k <= n; ++k) {
        const double px = i * step, py = j * step, pxy = k * step;
        if ((alpha + 1) * (px + pxy) > e1 + 1e-12 || (alpha + 1) * (py + pxy) > e1 + 1e-12 ||
            alpha * (px + py + 2 * pxy) > e2 + 1e-12)
          break;
        const double info = py / var_y + pxy / ((1 - rho * rho) * var_y);
        if (info > best.value + 1e-15) best = {px, py, pxy, info};
      }
  return best;
}

/// [I^-1]_11 for two unknown means from the 2x2 FIM entries, by Schur
/// complement: 1 / (I11 - I12^2 / I22); 1/I11 when the cross term vanishes.
inline double t3_crb_mux(double px, double py, double pxy, double rho, double vx, double vy) {
  const double q = 1 - rho * rho;
  const double sx = std::sqrt(vx), sy = std::sqrt(vy);
  const double i11 = px / vx + pxy / (q * vx);
  const double i22 = py / vy + pxy / (q * vy);
  const double i12 = -rho * pxy / (q * sx * sy);
  if (i12 == 0) return i11 > 0 ? 1 / i11 : std::numeric_limits<double>::infinity();
  const double schur = i11 - i12 * i12 / i22;
  return schur > 1e-14 ? 1 / schur : std::numeric_limits<double>::infinity();
}

}  // namespace oracle
