#include "ltlab/tridiagonal.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ltlab {

namespace {

inline double norm1(Complex z) { return std::abs(z.real()) + std::abs(z.imag()); }

// Principal square root without the special-value handling of csqrt; inputs
// here are finite and moderately scaled.
inline Complex fast_sqrt(Complex z) {
  const double x = z.real();
  const double y = z.imag();
  const double modulus = std::sqrt(x * x + y * y);
  if (modulus == 0.0) return {};
  if (x >= 0.0) {
    const double t = std::sqrt(0.5 * (x + modulus));
    return {t, y / (2.0 * t)};
  }
  const double t = std::sqrt(0.5 * (modulus - x));
  return {std::abs(y) / (2.0 * t), std::copysign(t, y)};
}

inline Complex reciprocal(Complex z) {
  const double d = z.real() * z.real() + z.imag() * z.imag();
  return {z.real() / d, -z.imag() / d};
}

inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

std::vector<Complex> eig_all(const TridiagonalComplexMatrix& matrix, int max_iterations_per_eigenvalue) {
  const std::size_t n = matrix.size();
  if (n == 0) return {};
  if (matrix.off_diagonal.size() + 1 != n) throw InputError("tridiagonal matrix dimensions inconsistent");

  std::vector<Complex> d = matrix.diagonal;
  // e[i] couples i and i+1; e[n-1] is padding.
  std::vector<Complex> e(n, Complex{});
  std::copy(matrix.off_diagonal.begin(), matrix.off_diagonal.end(), e.begin());

  constexpr double eps = std::numeric_limits<double>::epsilon();
  // Rotations with |r| this small relative to their inputs are near-isotropic.
  constexpr double isotropy_guard = 1e-7;
  std::vector<Complex> saved_d, saved_e;

  for (std::size_t l = 0; l < n; ++l) {
    int iterations = 0;
    for (;;) {
      std::size_t m = l;
      for (; m + 1 < n; ++m) {
        const double dd = norm1(d[m]) + norm1(d[m + 1]);
        if (norm1(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (iterations++ == max_iterations_per_eigenvalue) {
        throw ComputationError("QL iteration did not converge for eigenvalue index " + std::to_string(l));
      }

      // Wilkinson shift from the leading 2x2 block; every tenth iteration an
      // exceptional shift breaks cycles.
      Complex g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      Complex r = std::sqrt(g * g + 1.0);
      const Complex den = norm1(g + r) >= norm1(g - r) ? g + r : g - r;
      Complex shift = d[l] - e[l] / den;
      if (iterations % 10 == 0) shift += Complex(0.75, 0.5) * (1.0 + 0.37 * iterations / 10) * std::abs(e[l]);

      saved_d.assign(d.begin() + static_cast<std::ptrdiff_t>(l), d.begin() + static_cast<std::ptrdiff_t>(m + 1));
      saved_e.assign(e.begin() + static_cast<std::ptrdiff_t>(l), e.begin() + static_cast<std::ptrdiff_t>(m + 1));

      bool near_isotropic = false;
      bool deflated = false;
      g = d[m] - shift;
      Complex s{1.0}, c{1.0}, p{0.0};
      for (std::size_t k = m; k-- > l;) {
        const Complex f = mul(s, e[k]);
        const Complex b = mul(c, e[k]);
        r = fast_sqrt(mul(f, f) + mul(g, g));
        e[k + 1] = r;
        const double scale = norm1(f) + norm1(g);
        if (scale == 0.0) {
          d[k + 1] -= p;
          e[m] = 0.0;
          deflated = true;
          break;
        }
        if (norm1(r) < isotropy_guard * scale) {
          near_isotropic = true;
          break;
        }
        const Complex inv_r = reciprocal(r);
        s = mul(f, inv_r);
        c = mul(g, inv_r);
        g = d[k + 1] - p;
        r = mul(d[k] - g, s) + 2.0 * mul(c, b);
        p = mul(s, r);
        d[k + 1] = g + p;
        g = mul(c, r) - b;
      }
      if (near_isotropic) {
        std::copy(saved_d.begin(), saved_d.end(), d.begin() + static_cast<std::ptrdiff_t>(l));
        std::copy(saved_e.begin(), saved_e.end(), e.begin() + static_cast<std::ptrdiff_t>(l));
        // Retry the sweep with an exceptional shift.
        iterations += 9 - (iterations % 10);
        continue;
      }
      if (deflated) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
  return d;
}

}  // namespace ltlab
