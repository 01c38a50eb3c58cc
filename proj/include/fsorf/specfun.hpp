#pragma once

// Special functions evaluated by Mellin-Barnes contour quadrature.
//
// Conventions
//   Univariate Fox-H (z^{-s} kernel):
//     H^{m,n}_{p,q}[z] = 1/(2 pi i) * integral of
//       prod_{j<=m} G(b_j + B_j s) prod_{i<=n} G(1 - a_i - A_i s)
//       / ( prod_{j>m} G(1 - b_j - B_j s) prod_{i>n} G(a_i + A_i s) ) z^{-s} ds
//   Meijer-G is the same object with every scale coefficient equal to one.
//   Bivariate Fox-H (z^{+s} kernel, the two-variable form used for dual-hop
//   statistics):
//     H[z1, z2] = 1/(2 pi i)^2 * double integral of
//       phi(s, t) theta1(s) theta2(t) z1^s z2^t ds dt
//     phi(s,t)  = prod_{j<=n1} G(1 - a_j + A_j s + B_j t)
//                 / ( prod_{j>n1} G(a_j - A_j s - B_j t)
//                     prod_{j} G(1 - b_j + A'_j s + B'_j t) )
//     theta(s)  = prod_{j<=m} G(d_j - D_j s) prod_{j<=n} G(1 - c_j + C_j s)
//                 / ( prod_{j>n} G(c_j - C_j s) prod_{j>m} G(1 - d_j + D_j s) )

#include <complex>
#include <optional>
#include <vector>

namespace fsorf::specfun {

using cplx = std::complex<double>;

/// One factor G(a + A s) of a Mellin-Barnes integrand.
struct GammaTriple {
  double a = 0.0;
  double A = 1.0;
};

/// One factor G(1 - a + A s + B t) (or its reciprocal) coupling both contour
/// variables of a bivariate integrand.
struct JointTriple {
  double a = 0.0;
  double A = 1.0;
  double B = 1.0;
};

struct QuadratureControl {
  int max_nodes = 1 << 22;          // total integrand evaluations per call
  double truncation_height = 400.0;  // |Im s| cut-off of the contour
  double abs_tol = 1e-14;
  double rel_tol = 1e-10;
  double pole_margin = 1e-6;        // minimum distance between contour and a pole

  void validate() const;
};

struct FoxHSpec {
  int m = 0;
  int n = 0;
  std::vector<GammaTriple> upper;  // a_i, A_i  (length p)
  std::vector<GammaTriple> lower;  // b_j, B_j  (length q)
  std::optional<double> contour_shift;
  // With contour_shift set: integrate along that line only, without adding
  // the residues of poles it leaves on the wrong side.
  bool line_only = false;
  QuadratureControl quadrature;
  // Added to the log of the integrand; lets callers fold huge normalizing
  // constants (1/G(kappa) for kappa ~ 1e4) into the quadrature.
  double log_scale = 0.0;

  int p() const { return static_cast<int>(upper.size()); }
  int q() const { return static_cast<int>(lower.size()); }
  void validate() const;
};

struct BivariateBlock {
  int m = 0;
  int n = 0;
  std::vector<GammaTriple> upper;  // c_j, C_j
  std::vector<GammaTriple> lower;  // d_j, D_j
};

struct BivariateFoxHSpec {
  int n1 = 0;
  std::vector<JointTriple> joint_upper;  // length p1
  std::vector<JointTriple> joint_lower;  // length q1
  BivariateBlock first;
  BivariateBlock second;
  std::optional<double> shift_s;
  std::optional<double> shift_t;
  QuadratureControl quadrature;
  double log_scale = 0.0;

  void validate() const;
};

/// Result of a contour quadrature: the value plus an error estimate that is
/// the larger of the last refinement difference and the truncated tail.
struct Evaluation {
  double value = 0.0;
  double error = 0.0;
  long nodes = 0;
};

/// Open strip (lo, hi) between the nearest genuine left and right poles of a
/// univariate integrand, after cancelling poles against reciprocal-gamma
/// zeros. Either end may be infinite.
struct Strip {
  double lo;
  double hi;
  bool empty() const { return !(lo < hi); }
};

// --- elementary pieces -----------------------------------------------------

/// Principal branch of log Gamma(z). Throws DomainError at the poles.
cplx log_gamma_complex(cplx z);

/// Modified Bessel function of the second kind K_nu(x), x > 0.
double bessel_k(double nu, double x);

// --- contour functions -----------------------------------------------------

Strip fox_h_strip(const FoxHSpec& spec);

/// Contour abscissa fox_h would use at z: the override if set, else the
/// saddle point of the integrand envelope inside the strip.
double fox_h_contour(const FoxHSpec& spec, double z);

Evaluation fox_h(const FoxHSpec& spec, double z);

/// Meijer-G with the conventional z^{+s} kernel; every scale in spec must be 1.
Evaluation meijer_g(const FoxHSpec& spec, double z);
double meijer_contour(const FoxHSpec& spec, double z);

/// Contour abscissae (sigma_s, sigma_t) fox_h_bivariate would use.
std::pair<double, double> bivariate_contours(const BivariateFoxHSpec& spec, double z1,
                                             double z2);

Evaluation fox_h_bivariate(const BivariateFoxHSpec& spec, double z1, double z2);

/// Convenience builder for Meijer-G specs.
FoxHSpec meijer_spec(int m, int n, std::vector<double> a, std::vector<double> b);

}  // namespace fsorf::specfun
