#include "fsorf/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fsorf/errors.hpp"

namespace fsorf::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kHalfLog2Pi = 0.5 * std::log(2.0 * kPi);

// Lanczos approximation, g = 607/128, 15 terms.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczosCoef = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4,
    .15808870322491248884e-3,   -.21026444172410488319e-3,
    .21743961811521264320e-3,   -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4,
    .36899182659531622704e-5};

bool at_pole(cplx z) {
  if (z.imag() != 0.0 || z.real() > 0.0) return false;
  const double nearest = std::round(z.real());
  return std::abs(z.real() - nearest) <= 1e-14 * std::max(1.0, std::abs(nearest));
}

cplx lanczos_log_gamma(cplx z) {
  // Re(z) >= 0.5
  const cplx w = z - 1.0;
  cplx series = kLanczosCoef[0];
  for (std::size_t k = 1; k < kLanczosCoef.size(); ++k)
    series += kLanczosCoef[k] / (w + static_cast<double>(k));
  const cplx t = w + kLanczosG + 0.5;
  return kHalfLog2Pi + (w + 0.5) * std::log(t) - t + std::log(series);
}

// log(1/G(z)); exactly -inf at the poles, where the reciprocal vanishes.
cplx log_rgamma(cplx z) {
  if (at_pole(z)) return {-kInf, 0.0};
  return -log_gamma_complex(z);
}

void check_triples(const std::vector<GammaTriple>& v, const char* what) {
  for (const auto& g : v) {
    if (!std::isfinite(g.a) || !(g.A > 0.0) || !std::isfinite(g.A)) {
      std::ostringstream os;
      os << what << ": scale coefficients must be finite and positive (got a=" << g.a
         << ", A=" << g.A << ")";
      throw DomainError(os.str());
    }
  }
}

// --- 1-D contour quadrature --------------------------------------------------

// Integrates (1/pi) * integral_0^inf Re exp(L(y)) dy where L(y) is the complex
// log of the integrand at height y on the contour.
template <class LogF>
Evaluation integrate_line(LogF&& logf, const QuadratureControl& q, double oscillation) {
  // Locate the truncation height from the integrand envelope.
  double max_log = -kInf;
  double height = 0.0;
  double tail = 0.0;
  const double scan_step = 0.25;
  bool decayed = false;
  for (double y = 0.0; y <= q.truncation_height; y += scan_step) {
    const double lr = logf(y).real();
    max_log = std::max(max_log, lr);
    height = y;
    if (y >= 2.0 && lr < max_log - 41.0) {
      decayed = true;
      break;
    }
  }
  if (max_log == -kInf) return {0.0, 0.0, 0};
  if (!decayed) tail = std::exp(logf(height).real()) * height / kPi;

  // Normalize by the envelope maximum to keep exp() in range.
  auto term = [&](double y) { return std::exp(logf(y) - max_log).real(); };
  const double scale = std::exp(max_log);

  double h = std::min(0.25, 1.0 / (1.0 + oscillation));
  long n = static_cast<long>(std::ceil(height / h));
  h = height / static_cast<double>(n);
  double sum = 0.5 * term(0.0) + 0.5 * term(height);
  for (long k = 1; k < n; ++k) sum += term(static_cast<double>(k) * h);
  long nodes = n + 1;
  double value = sum * h * scale / kPi;

  double diff = kInf;
  for (int level = 0;; ++level) {
    // Add midpoints.
    double mid = 0.0;
    for (long k = 0; k < n; ++k) mid += term((static_cast<double>(k) + 0.5) * h);
    nodes += n;
    sum += mid;
    n *= 2;
    h *= 0.5;
    const double refined = sum * h * scale / kPi;
    diff = std::abs(refined - value);
    value = refined;
    const double tol = std::max(q.abs_tol, q.rel_tol * std::abs(value));
    if (level >= 1 && diff <= tol) break;
    if (nodes + n > q.max_nodes) {
      if (diff > 1e3 * tol) {
        std::ostringstream os;
        os << "contour quadrature did not converge: estimate " << value << ", change "
           << diff << " after " << nodes << " nodes";
        throw ConvergenceError(os.str());
      }
      break;
    }
  }
  // A line integral whose integrand has not decayed by the truncation height
  // is not absolutely convergent there; the truncated sum means nothing.
  if (tail > std::max(q.abs_tol, 1e-3 * std::abs(value)))
    throw ConvergenceError("contour integrand does not decay along the line (tail " +
                           std::to_string(tail) + ")");
  return {value, diff + tail, nodes};
}

// --- pole bookkeeping ---------------------------------------------------------

// One factor G(c0 + k s) of an integrand in a single contour variable.
struct Factor {
  double c0;
  double k;
  bool numerator;
};

bool singular(double x) {
  return x <= 0.5 && std::abs(x - std::round(x)) <= 1e-9 * std::max(1.0, std::abs(x));
}

// Nearest genuine poles on either side after cancelling against the zeros of
// reciprocal gamma factors. Poles of factors with k > 0 run to the left.
struct PoleBounds {
  double lo = -kInf;
  double hi = kInf;
  double k_lo = 1.0;
  double k_hi = 1.0;
};

PoleBounds pole_bounds(const std::vector<Factor>& factors) {
  PoleBounds pb;
  for (const auto& f : factors) {
    if (!f.numerator) continue;
    for (int l = 0; l < 64; ++l) {
      const double p = (-f.c0 - l) / f.k;
      // Only the innermost genuine pole of each family matters.
      if (f.k > 0 && p <= pb.lo) break;
      if (f.k < 0 && p >= pb.hi) break;
      int order = 0;
      for (const auto& g : factors)
        if (singular(g.c0 + g.k * p)) order += g.numerator ? 1 : -1;
      if (order <= 0) continue;
      if (f.k > 0) {
        pb.lo = p;
        pb.k_lo = f.k;
      } else {
        pb.hi = p;
        pb.k_hi = -f.k;
      }
      break;
    }
  }
  return pb;
}

cplx factors_log(const std::vector<Factor>& factors, cplx s) {
  cplx acc = 0.0;
  for (const auto& f : factors) {
    const cplx arg = f.c0 + f.k * s;
    acc += f.numerator ? log_gamma_complex(arg) : log_rgamma(arg);
  }
  return acc;
}

// Real log of the integrand envelope near the real axis at Re(s) = x, with the
// kernel contributing slope * x. A small imaginary offset keeps zeros of
// reciprocal gamma factors from posing as minima.
double envelope(const std::vector<Factor>& factors, double x, double slope) {
  double best = -kInf;
  for (double y : {0.0, 0.5}) {
    try {
      const double v = factors_log(factors, cplx(x, y)).real();
      if (!std::isnan(v)) best = std::max(best, v);
    } catch (const DomainError&) {
    }
  }
  return best == -kInf ? kInf : best + slope * x;
}

// Minimizes f over [a, b] by a coarse scan followed by golden-section search.
template <class F>
double minimize_1d(F&& f, double a, double b) {
  const int n = 64;
  double best = a, fbest = kInf;
  for (int i = 0; i <= n; ++i) {
    const double x = a + (b - a) * i / n;
    const double v = f(x);
    if (v < fbest) {
      fbest = v;
      best = x;
    }
  }
  double lo = std::max(a, best - (b - a) / n), hi = std::min(b, best + (b - a) / n);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      hi = x2; x2 = x1; f2 = f1; x1 = hi - gr * (hi - lo); f1 = f(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2; x2 = lo + gr * (hi - lo); f2 = f(x2);
    }
  }
  const double xm = 0.5 * (lo + hi);
  return f(xm) <= fbest ? xm : best;
}

// Chooses the abscissa of a vertical contour inside the pole-free strip: the
// saddle point of the integrand envelope on the real axis, kept away from the
// bounding poles so the trapezoid rule retains a wide strip of analyticity.
template <class LogF>
double place_contour(const PoleBounds& pb, LogF&& real_log) {
  const double width = pb.hi - pb.lo;
  double a, b;
  const double far = 60.0;
  if (std::isfinite(pb.lo) && std::isfinite(pb.hi)) {
    const double d = std::min(0.25 * width, 0.25);
    a = pb.lo + std::min(d, 0.25 / pb.k_lo);
    b = pb.hi - std::min(d, 0.25 / pb.k_hi);
  } else if (std::isfinite(pb.lo)) {
    a = pb.lo + 0.25 / pb.k_lo;
    b = pb.lo + far;
  } else if (std::isfinite(pb.hi)) {
    a = pb.hi - far;
    b = pb.hi - 0.25 / pb.k_hi;
  } else {
    a = -far;
    b = far;
  }
  return minimize_1d([&](double x) {
    const double v = real_log(x);
    return std::isfinite(v) ? v : kInf;
  }, a, b);
}

// --- bivariate helpers --------------------------------------------------------

struct Constraint {
  double c0, cs, ct;  // gamma argument real part: c0 + cs*sigma_s + ct*sigma_t
  double margin(double s, double t) const { return c0 + cs * s + ct * t; }
};

std::vector<Factor> block_factors(const BivariateBlock& b) {
  std::vector<Factor> f;
  const int p = static_cast<int>(b.upper.size());
  const int q = static_cast<int>(b.lower.size());
  for (int j = 0; j < b.m; ++j) f.push_back({b.lower[j].a, -b.lower[j].A, true});
  for (int j = 0; j < b.n; ++j) f.push_back({1.0 - b.upper[j].a, b.upper[j].A, true});
  for (int j = b.n; j < p; ++j) f.push_back({b.upper[j].a, -b.upper[j].A, false});
  for (int j = b.m; j < q; ++j) f.push_back({1.0 - b.lower[j].a, b.lower[j].A, false});
  return f;
}

void add_bound_constraints(const PoleBounds& pb, bool is_s, std::vector<Constraint>& out) {
  if (std::isfinite(pb.lo)) {
    const double k = pb.k_lo;
    out.push_back(is_s ? Constraint{-k * pb.lo, k, 0.0} : Constraint{-k * pb.lo, 0.0, k});
  }
  if (std::isfinite(pb.hi)) {
    const double k = pb.k_hi;
    out.push_back(is_s ? Constraint{k * pb.hi, -k, 0.0} : Constraint{k * pb.hi, 0.0, -k});
  }
}

cplx joint_log(const BivariateFoxHSpec& spec, cplx s, cplx t) {
  cplx acc = 0.0;
  const int p1 = static_cast<int>(spec.joint_upper.size());
  for (int j = 0; j < spec.n1; ++j) {
    const auto& g = spec.joint_upper[j];
    acc += log_gamma_complex(1.0 - g.a + g.A * s + g.B * t);
  }
  for (int j = spec.n1; j < p1; ++j) {
    const auto& g = spec.joint_upper[j];
    acc += log_rgamma(g.a - g.A * s - g.B * t);
  }
  for (const auto& g : spec.joint_lower) acc += log_rgamma(1.0 - g.a + g.A * s + g.B * t);
  return acc;
}

void validate_block(const BivariateBlock& b, const char* name) {
  if (b.m < 0 || b.n < 0 || b.m > static_cast<int>(b.lower.size()) ||
      b.n > static_cast<int>(b.upper.size()))
    throw DomainError(std::string(name) + ": index counts must satisfy 0<=m<=q, 0<=n<=p");
  check_triples(b.upper, name);
  check_triples(b.lower, name);
}

std::vector<Factor> fox_factors(const FoxHSpec& spec) {
  std::vector<Factor> f;
  for (int j = 0; j < spec.m; ++j) f.push_back({spec.lower[j].a, spec.lower[j].A, true});
  for (int i = 0; i < spec.n; ++i) f.push_back({1.0 - spec.upper[i].a, -spec.upper[i].A, true});
  for (int j = spec.m; j < spec.q(); ++j)
    f.push_back({1.0 - spec.lower[j].a, -spec.lower[j].A, false});
  for (int i = spec.n; i < spec.p(); ++i) f.push_back({spec.upper[i].a, spec.upper[i].A, false});
  return f;
}

std::vector<Factor> meijer_factors(const FoxHSpec& spec) {
  std::vector<Factor> f;
  for (int j = 0; j < spec.m; ++j) f.push_back({spec.lower[j].a, -1.0, true});
  for (int i = 0; i < spec.n; ++i) f.push_back({1.0 - spec.upper[i].a, 1.0, true});
  for (int j = spec.m; j < spec.q(); ++j) f.push_back({1.0 - spec.lower[j].a, 1.0, false});
  for (int i = spec.n; i < spec.p(); ++i) f.push_back({spec.upper[i].a, -1.0, false});
  return f;
}

// Genuine poles of each family, nearest first.
struct PoleLists {
  std::vector<double> left;   // descending
  std::vector<double> right;  // ascending
};

PoleLists genuine_poles(const std::vector<Factor>& factors) {
  PoleLists pl;
  for (const auto& f : factors) {
    if (!f.numerator) continue;
    for (int l = 0; l < 64; ++l) {
      const double p = (-f.c0 - l) / f.k;
      int order = 0;
      for (const auto& g : factors)
        if (singular(g.c0 + g.k * p)) order += g.numerator ? 1 : -1;
      if (order > 0) (f.k > 0 ? pl.left : pl.right).push_back(p);
    }
  }
  auto tidy = [](std::vector<double>& v, bool desc) {
    std::sort(v.begin(), v.end());
    if (desc) std::reverse(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(),
                        [](double x, double y) { return std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(x)); }),
            v.end());
  };
  tidy(pl.left, true);
  tidy(pl.right, false);
  return pl;
}

// A vertical line plus the poles it leaves on the wrong side. The integral
// over a separating (possibly curved) contour equals the line integral plus
// the residues at `add` minus those at `subtract`.
struct LinePlan {
  double c = 0.0;
  std::vector<double> add;       // left-family poles right of the line
  std::vector<double> subtract;  // right-family poles left of the line
};

double distance_to_poles(const PoleLists& pl, double c) {
  double d = kInf;
  for (double p : pl.left) d = std::min(d, std::abs(p - c));
  for (double p : pl.right) d = std::min(d, std::abs(p - c));
  return d;
}

template <class LogF>
LinePlan plan_line(const std::vector<Factor>& factors, std::optional<double> shift,
                   bool line_only, double margin, const char* who, LogF&& real_log) {
  const PoleLists pl = genuine_poles(factors);
  const PoleBounds pb = pole_bounds(factors);
  LinePlan plan;
  if (shift) {
    plan.c = *shift;
    if (!(distance_to_poles(pl, plan.c) > margin)) {
      std::ostringstream os;
      os << who << ": contour Re(s)=" << plan.c << " lies on a pole";
      throw ConvergenceError(os.str());
    }
  } else if (pb.hi - pb.lo > 2.0 * margin) {
    plan.c = place_contour(pb, real_log);
  } else {
    // Overlapping families: pick the gap between consecutive poles that
    // leaves the fewest poles on the wrong side, preferring wide gaps.
    std::vector<double> all(pl.left);
    all.insert(all.end(), pl.right.begin(), pl.right.end());
    std::sort(all.begin(), all.end());
    int best_count = std::numeric_limits<int>::max();
    double best_gap = 0.0;
    for (std::size_t i = 0; i + 1 < all.size(); ++i) {
      const double gap = all[i + 1] - all[i];
      if (gap <= 2.0 * margin) continue;
      const double c = 0.5 * (all[i] + all[i + 1]);
      int count = 0;
      for (double p : pl.left) count += p > c;
      for (double p : pl.right) count += p < c;
      if (count < best_count || (count == best_count && gap > best_gap)) {
        best_count = count;
        best_gap = gap;
        plan.c = c;
      }
    }
    if (best_count == std::numeric_limits<int>::max()) {
      std::ostringstream os;
      os << who << ": no admissible contour (coincident poles near " << pb.hi << ")";
      throw ConvergenceError(os.str());
    }
  }
  if (line_only) return plan;
  for (double p : pl.left)
    if (p > plan.c) plan.add.push_back(p);
  for (double p : pl.right)
    if (p < plan.c) plan.subtract.push_back(p);
  if (plan.add.size() + plan.subtract.size() > 32) {
    std::ostringstream os;
    os << who << ": contour leaves too many poles on the wrong side";
    throw ConvergenceError(os.str());
  }
  return plan;
}

// Residue by the trapezoid rule on a small circle; valid for poles of any
// order provided no other singularity lies within the circle.
template <class LogF>
double residue(LogF&& logf, double p, const PoleLists& pl) {
  double gap = 0.5;
  for (double q : pl.left)
    if (std::abs(q - p) > 1e-9) gap = std::min(gap, std::abs(q - p));
  for (double q : pl.right)
    if (std::abs(q - p) > 1e-9) gap = std::min(gap, std::abs(q - p));
  const double rho = 0.4 * gap;
  const int n = 128;
  cplx acc = 0.0;
  for (int j = 0; j < n; ++j) {
    const cplx w = std::polar(rho, 2.0 * kPi * (j + 0.5) / n);
    acc += std::exp(logf(p + w)) * w;
  }
  return acc.real() / n;
}

template <class LogF>
Evaluation evaluate_plan(const LinePlan& plan, const std::vector<Factor>& factors, LogF&& logf,
                         const QuadratureControl& q, double oscillation) {
  Evaluation e = integrate_line([&](double y) { return logf(cplx(plan.c, y)); }, q, oscillation);
  if (plan.add.empty() && plan.subtract.empty()) return e;
  const PoleLists pl = genuine_poles(factors);
  for (double p : plan.add) e.value += residue(logf, p, pl);
  for (double p : plan.subtract) e.value -= residue(logf, p, pl);
  e.error += 1e-12 * std::abs(e.value);
  return e;
}

}  // namespace

// ---------------------------------------------------------------------------

void QuadratureControl::validate() const {
  if (!(abs_tol > 0) || !(rel_tol > 0)) throw DomainError("quadrature tolerances must be > 0");
  if (!(truncation_height > 0)) throw DomainError("truncation_height must be > 0");
  if (max_nodes < 16) throw DomainError("max_nodes must be >= 16");
  if (!(pole_margin >= 0)) throw DomainError("pole_margin must be >= 0");
}

void FoxHSpec::validate() const {
  if (m < 0 || n < 0 || m > q() || n > p())
    throw DomainError("Fox-H index counts must satisfy 0<=m<=q, 0<=n<=p");
  check_triples(upper, "Fox-H upper parameters");
  check_triples(lower, "Fox-H lower parameters");
  quadrature.validate();
}

void BivariateFoxHSpec::validate() const {
  if (n1 < 0 || n1 > static_cast<int>(joint_upper.size()))
    throw DomainError("bivariate Fox-H: n1 must not exceed the joint parameter count");
  for (const auto& g : joint_upper)
    if (!std::isfinite(g.a) || !std::isfinite(g.A) || !std::isfinite(g.B))
      throw DomainError("bivariate Fox-H: joint parameters must be finite");
  validate_block(first, "bivariate Fox-H first block");
  validate_block(second, "bivariate Fox-H second block");
  quadrature.validate();
}

cplx log_gamma_complex(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("log_gamma_complex: non-finite argument");
  if (at_pole(z)) {
    std::ostringstream os;
    os << "log_gamma_complex: pole at z = " << z.real();
    throw DomainError(os.str());
  }
  if (z.real() >= 0.5) return lanczos_log_gamma(z);
  // Upward recurrence keeps the principal branch: logG(z+1) = logG(z) + log z.
  const int shift = static_cast<int>(std::ceil(0.5 - z.real()));
  cplx acc = 0.0;
  for (int j = 0; j < shift; ++j) acc += std::log(z + static_cast<double>(j));
  return lanczos_log_gamma(z + static_cast<double>(shift)) - acc;
}

double bessel_k(double nu, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("bessel_k: x must be positive");
  nu = std::abs(nu);
  // K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt; the trapezoid rule is
  // spectrally accurate on this integrand.
  auto f = [&](double t) { return std::exp(-x * (std::cosh(t) - 1.0)) * std::cosh(nu * t); };
  const double h = 0.03125;
  double sum = 0.5 * f(0.0);
  double peak = sum;
  for (int k = 1; k < 200000; ++k) {
    const double v = f(k * h);
    sum += v;
    peak = std::max(peak, v);
    if (v < 1e-18 * peak && v < 1e-18 * sum) break;
  }
  return sum * h * std::exp(-x);
}

// --- univariate Fox-H ---------------------------------------------------------

Strip fox_h_strip(const FoxHSpec& spec) {
  spec.validate();
  const PoleBounds pb = pole_bounds(fox_factors(spec));
  return {pb.lo, pb.hi};
}

namespace {

LinePlan fox_plan(const FoxHSpec& spec, const std::vector<Factor>& factors, double z) {
  const double lz = std::log(z);
  return plan_line(factors, spec.contour_shift, spec.line_only, spec.quadrature.pole_margin,
                   "Fox-H",
                   [&](double x) { return envelope(factors, x, -lz); });
}

void check_meijer(const FoxHSpec& spec) {
  spec.validate();
  for (const auto& g : spec.upper)
    if (g.A != 1.0) throw DomainError("meijer_g: all scale coefficients must be 1");
  for (const auto& g : spec.lower)
    if (g.A != 1.0) throw DomainError("meijer_g: all scale coefficients must be 1");
}

LinePlan meijer_plan(const FoxHSpec& spec, const std::vector<Factor>& factors, double z) {
  const double lz = std::log(z);
  return plan_line(factors, spec.contour_shift, spec.line_only, spec.quadrature.pole_margin,
                   "Meijer-G",
                   [&](double x) { return envelope(factors, x, lz); });
}

}  // namespace

double fox_h_contour(const FoxHSpec& spec, double z) {
  spec.validate();
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("fox_h: z must be positive");
  return fox_plan(spec, fox_factors(spec), z).c;
}

Evaluation fox_h(const FoxHSpec& spec, double z) {
  spec.validate();
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("fox_h: z must be positive");
  const auto factors = fox_factors(spec);
  const LinePlan plan = fox_plan(spec, factors, z);
  const double lz = std::log(z);
  double max_scale = 0.0;
  for (const auto& g : spec.upper) max_scale = std::max(max_scale, g.A);
  for (const auto& g : spec.lower) max_scale = std::max(max_scale, g.A);
  auto logf = [&](cplx s) { return spec.log_scale - s * lz + factors_log(factors, s); };
  return evaluate_plan(plan, factors, logf, spec.quadrature, std::abs(lz) + max_scale);
}

double meijer_contour(const FoxHSpec& spec, double z) {
  check_meijer(spec);
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("meijer_g: z must be positive");
  return meijer_plan(spec, meijer_factors(spec), z).c;
}

Evaluation meijer_g(const FoxHSpec& spec, double z) {
  check_meijer(spec);
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("meijer_g: z must be positive");
  const auto factors = meijer_factors(spec);
  const LinePlan plan = meijer_plan(spec, factors, z);
  const double lz = std::log(z);
  auto logf = [&](cplx s) { return spec.log_scale + s * lz + factors_log(factors, s); };
  return evaluate_plan(plan, factors, logf, spec.quadrature, std::abs(lz) + 1.0);
}

FoxHSpec meijer_spec(int m, int n, std::vector<double> a, std::vector<double> b) {
  FoxHSpec spec;
  spec.m = m;
  spec.n = n;
  for (double v : a) spec.upper.push_back({v, 1.0});
  for (double v : b) spec.lower.push_back({v, 1.0});
  return spec;
}

// --- bivariate Fox-H ----------------------------------------------------------

std::pair<double, double> bivariate_contours(const BivariateFoxHSpec& spec, double z1,
                                             double z2) {
  spec.validate();
  const auto fs = block_factors(spec.first);
  const auto ft = block_factors(spec.second);
  const PoleBounds ps = pole_bounds(fs), pt = pole_bounds(ft);
  std::vector<Constraint> cons;
  add_bound_constraints(ps, true, cons);
  add_bound_constraints(pt, false, cons);
  for (int j = 0; j < spec.n1; ++j) {
    const auto& g = spec.joint_upper[j];
    cons.push_back({1.0 - g.a, g.A, g.B});
  }
  const double margin = spec.quadrature.pole_margin;
  auto worst = [&](double s, double t) {
    double w = kInf;
    for (const auto& c : cons) w = std::min(w, c.margin(s, t));
    return w;
  };
  if (spec.shift_s && spec.shift_t) {
    if (!(worst(*spec.shift_s, *spec.shift_t) > margin))
      throw ConvergenceError("bivariate Fox-H: contours do not separate the pole families");
    return {*spec.shift_s, *spec.shift_t};
  }

  const double far = 60.0;
  auto range = [&](const PoleBounds& pb, std::optional<double> fixed) {
    if (fixed) return std::pair{*fixed, *fixed};
    double lo = pb.lo, hi = pb.hi;
    if (!std::isfinite(lo) && !std::isfinite(hi)) return std::pair{-far, far};
    if (!std::isfinite(lo)) lo = hi - far;
    if (!std::isfinite(hi)) hi = lo + far;
    return std::pair{lo, hi};
  };
  auto [slo, shi] = range(ps, spec.shift_s);
  auto [tlo, thi] = range(pt, spec.shift_t);

  const double l1 = std::log(z1), l2 = std::log(z2);
  auto objective = [&](double s, double t) {
    double best = -kInf;
    for (double y : {0.0, 0.5}) {
      try {
        const cplx v = factors_log(fs, cplx(s, y)) + factors_log(ft, cplx(t, y)) +
                       joint_log(spec, cplx(s, y), cplx(t, y));
        if (!std::isnan(v.real())) best = std::max(best, v.real());
      } catch (const DomainError&) {
      }
    }
    return best == -kInf ? kInf : best + s * l1 + t * l2;
  };

  // Pass 1: largest achievable clearance from the pole families (capped).
  const int n = 80;
  auto node = [](double lo, double hi, int i, int cnt) {
    return cnt == 1 ? lo : lo + (hi - lo) * (i + 0.5) / cnt;
  };
  const int ns = slo == shi ? 1 : n, nt = tlo == thi ? 1 : n;
  double clearance = -kInf;
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j)
      clearance = std::max(clearance,
                           std::min(worst(node(slo, shi, i, ns), node(tlo, thi, j, nt)), 0.5));
  if (!(clearance > margin))
    throw ConvergenceError("bivariate Fox-H: no admissible pair of contours");
  const double need = std::max(margin, std::min(0.25, 0.5 * clearance));

  // Pass 2: saddle of the envelope among admissible points, then local zooms.
  double bs = slo, bt = tlo, bv = kInf;
  bool found = false;
  auto search = [&](double s0, double s1, double t0, double t1, int cs, int ct) {
    for (int i = 0; i < cs; ++i) {
      const double s = node(s0, s1, i, cs);
      for (int j = 0; j < ct; ++j) {
        const double t = node(t0, t1, j, ct);
        if (worst(s, t) < need) continue;
        const double v = objective(s, t);
        if (!found || v < bv) {
          found = true;
          bv = v;
          bs = s;
          bt = t;
        }
      }
    }
  };
  search(slo, shi, tlo, thi, ns, nt);
  double ds = (shi - slo) / ns, dt = (thi - tlo) / nt;
  for (int pass = 0; pass < 3 && found; ++pass) {
    const double s0 = bs - 2 * ds, s1 = bs + 2 * ds, t0 = bt - 2 * dt, t1 = bt + 2 * dt;
    search(s0, s1, t0, t1, ns == 1 ? 1 : 20, nt == 1 ? 1 : 20);
    ds /= 5.0;
    dt /= 5.0;
  }
  if (!found) throw ConvergenceError("bivariate Fox-H: no admissible pair of contours");
  return {bs, bt};
}

Evaluation fox_h_bivariate(const BivariateFoxHSpec& spec, double z1, double z2) {
  spec.validate();
  if (!(z1 > 0.0) || !(z2 > 0.0) || !std::isfinite(z1) || !std::isfinite(z2))
    throw DomainError("fox_h_bivariate: arguments must be positive");
  const auto [cs, ct] = bivariate_contours(spec, z1, z2);
  const double l1 = std::log(z1), l2 = std::log(z2);
  const auto fs = block_factors(spec.first);
  const auto ft = block_factors(spec.second);
  const auto& q = spec.quadrature;

  if (spec.joint_upper.empty() && spec.joint_lower.empty()) {
    // Separable integrand: product of two line integrals.
    const auto a = integrate_line(
        [&](double y) { const cplx s(cs, y); return factors_log(fs, s) + s * l1; }, q,
        std::abs(l1) + 1.0);
    const auto b = integrate_line(
        [&](double y) {
          const cplx t(ct, y);
          return spec.log_scale + factors_log(ft, t) + t * l2;
        },
        q, std::abs(l2) + 1.0);
    return {a.value * b.value, std::abs(a.value) * b.error + a.error * std::abs(b.value),
            a.nodes + b.nodes};
  }

  auto log_s = [&](double u) {
    const cplx s(cs, u);
    return factors_log(fs, s) + s * l1;
  };
  auto log_t = [&](double v) {
    const cplx t(ct, v);
    return factors_log(ft, t) + t * l2;
  };

  // Truncation heights from the envelope along both axes.
  const double jl0 = joint_log(spec, cplx(cs, 0), cplx(ct, 0)).real();
  auto scan = [&](auto&& envelope) {
    double mx = -kInf, y = 0.0;
    for (; y <= q.truncation_height; y += 0.25) {
      const double lr = envelope(y);
      mx = std::max(mx, lr);
      if (y >= 2.0 && lr < mx - 41.0) return std::pair{y, true};
    }
    return std::pair{q.truncation_height, false};
  };
  const double base_t = log_t(0.0).real();
  const double base_s = log_s(0.0).real();
  auto [tu, ok_u] = scan([&](double u) {
    return (log_s(u) + joint_log(spec, cplx(cs, u), cplx(ct, 0))).real() + base_t;
  });
  auto [tvp, ok_p] = scan([&](double v) {
    return (log_t(v) + joint_log(spec, cplx(cs, 0), cplx(ct, v))).real() + base_s;
  });
  auto [tvm, ok_m] = scan([&](double v) {
    return (log_t(-v) + joint_log(spec, cplx(cs, 0), cplx(ct, -v))).real() + base_s;
  });
  (void)jl0;
  const double tv = std::max(tvp, tvm);
  const bool truncated = !(ok_u && ok_p && ok_m);

  bool fast = true;
  for (const auto& g : spec.joint_upper) fast = fast && g.A == g.B;
  for (const auto& g : spec.joint_lower) fast = fast && g.A == g.B;

  auto evaluate = [&](double h, double& edge) -> double {
    const long nu = static_cast<long>(std::ceil(tu / h));
    const long nv = static_cast<long>(std::ceil(tv / h));
    std::vector<cplx> ls(nu + 1), lt(2 * nv + 1);
    for (long i = 0; i <= nu; ++i) ls[i] = log_s(i * h);
    for (long j = -nv; j <= nv; ++j) lt[j + nv] = log_t(j * h);
    double ms = -kInf, mt = -kInf;
    for (const auto& v : ls) ms = std::max(ms, v.real());
    for (const auto& v : lt) mt = std::max(mt, v.real());
    std::vector<cplx> es(nu + 1), et(2 * nv + 1);
    for (long i = 0; i <= nu; ++i) es[i] = std::exp(ls[i] - ms);
    for (long j = 0; j <= 2 * nv; ++j) et[j] = std::exp(lt[j] - mt);

    cplx total = 0.0;
    double mj = 0.0;
    edge = 0.0;
    if (fast) {
      // Joint factors depend on s + t only: tabulate by i + j.
      std::vector<cplx> lj(nu + 2 * nv + 1);
      mj = -kInf;
      for (long k = -nv; k <= nu + nv; ++k) {
        const double y = k * h;
        lj[k + nv] = joint_log(spec, cplx(cs, y), cplx(ct, 0.0));
        mj = std::max(mj, lj[k + nv].real());
      }
      std::vector<cplx> ej(lj.size());
      for (std::size_t k = 0; k < lj.size(); ++k) ej[k] = std::exp(lj[k] - mj);
      for (long i = 0; i <= nu; ++i) {
        cplx row = 0.0;
        for (long j = -nv; j <= nv; ++j) row += et[j + nv] * ej[i + j + nv];
        const cplx contrib = es[i] * row;
        total += (i == 0 ? 0.5 : 1.0) * contrib;
        if (i == nu) edge = std::max(edge, std::abs(contrib));
      }
      for (long i = 0; i <= nu; ++i)
        edge = std::max(edge, std::abs(es[i] * (et[0] * ej[i] + et[2 * nv] * ej[i + 2 * nv])));
    } else {
      mj = jl0;
      for (long i = 0; i <= nu; ++i) {
        cplx row = 0.0;
        for (long j = -nv; j <= nv; ++j) {
          const cplx jl = joint_log(spec, cplx(cs, i * h), cplx(ct, j * h));
          row += et[j + nv] * std::exp(jl - mj);
          if (j == -nv || j == nv) edge = std::max(edge, std::abs(es[i] * et[j + nv] * std::exp(jl - mj)));
        }
        total += (i == 0 ? 0.5 : 1.0) * es[i] * row;
      }
    }
    const double log_norm = ms + mt + mj + spec.log_scale;
    const double factor = std::exp(log_norm) * h * h / (2.0 * kPi * kPi);
    edge *= std::exp(log_norm) / (2.0 * kPi * kPi);
    return total.real() * factor;
  };

  const double osc = std::max(std::abs(l1), std::abs(l2)) + 1.0;
  double h = std::min(0.25, 1.0 / osc);
  double edge = 0.0;
  double value = evaluate(h, edge);
  long nodes = static_cast<long>((tu / h + 1) * (2 * tv / h + 1));
  double diff = kInf;
  for (int level = 0;; ++level) {
    h *= 0.5;
    const long next = static_cast<long>((tu / h + 1) * (2 * tv / h + 1));
    if (level >= 2 && next > q.max_nodes) {
      const double tol = std::max(q.abs_tol, q.rel_tol * std::abs(value));
      if (diff > 1e3 * tol) {
        std::ostringstream os;
        os << "bivariate contour quadrature did not converge: estimate " << value
           << ", change " << diff;
        throw ConvergenceError(os.str());
      }
      break;
    }
    const double refined = evaluate(h, edge);
    nodes += next;
    diff = std::abs(refined - value);
    value = refined;
    const double tol = std::max(q.abs_tol, q.rel_tol * std::abs(value));
    if (level >= 1 && diff <= tol) break;
  }
  const double tail = truncated ? edge * (tu + tv) : 0.0;
  // A line integral whose integrand has not decayed by the truncation height
  // is not absolutely convergent there; the truncated sum means nothing.
  if (tail > std::max(q.abs_tol, 1e-3 * std::abs(value)))
    throw ConvergenceError("contour integrand does not decay along the line (tail " +
                           std::to_string(tail) + ")");
  return {value, diff + tail, nodes};
}

}  // namespace fsorf::specfun
