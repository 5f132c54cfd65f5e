#include "selinf/scalar_normal.hpp"

#include <array>
#include <numbers>
#include <string>

#include "selinf/error.hpp"

namespace selinf {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Gauss-Legendre, 20 points on [-1, 1] (positive half).
constexpr std::array<double, 10> kGl20x = {
    0.07652652113349733, 0.2277858511416451, 0.3737060887154196, 0.5108670019508271,
    0.6360536807265150,  0.7463319064601508, 0.8391169718222188, 0.9122344282513259,
    0.9639719272779138,  0.9931285991850949};
constexpr std::array<double, 10> kGl20w = {
    0.1527533871307259, 0.1491729864726037, 0.1420961093183821, 0.1316886384491766,
    0.1181945319615184, 0.1019301198172404, 0.08327674157670475, 0.06267204833410906,
    0.04060142980038694, 0.01761400713915212};

double polyval(const double* c, int n, double x) {
  double acc = c[n - 1];
  for (int i = n - 2; i >= 0; --i) acc = acc * x + c[i];
  return acc;
}

// Wichura's AS241 (PPND16); relative accuracy about 1e-16.
double ppnd16(double p) {
  static constexpr double a[] = {3.3871328727963666080e0,  1.3314166789178437745e+2,
                                 1.9715909503065514427e+3, 1.3731693765509461125e+4,
                                 4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                 3.3430575583588128105e+4, 2.5090809287301226727e+3};
  static constexpr double b[] = {1.0,
                                 4.2313330701600911252e+1, 6.8718700749205790830e+2,
                                 5.3941960214247511077e+3, 2.1213794301586595867e+4,
                                 3.9307895800092710610e+4, 2.8729085735721942674e+4,
                                 5.2264952788528545610e+3};
  static constexpr double c[] = {1.42343711074968357734e0,  4.63033784615654529590e0,
                                 5.76949722146069140550e0,  3.64784832476320460504e0,
                                 1.27045825245236838258e0,  2.41780725177450611770e-1,
                                 2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double d[] = {1.0,
                                 2.05319162663775882187e0,  1.67638483018380384940e0,
                                 6.89767334985100004550e-1, 1.48103976427480074590e-1,
                                 1.51986665636164571966e-2, 5.47593808499534494600e-4,
                                 1.05075007164441684324e-9};
  static constexpr double e[] = {6.65790464350110377720e0,  5.46378491116411436990e0,
                                 1.78482653991729133580e0,  2.96560571828504891230e-1,
                                 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                 2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[] = {1.0,
                                 5.99832206555887937690e-1, 1.36929880922735805310e-1,
                                 1.48753612908506148525e-2, 7.86869131145613259100e-4,
                                 1.84631831751005468180e-5, 1.42151175831644588870e-7,
                                 2.04426310338993978564e-15};
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * polyval(a, 8, r) / polyval(b, 8, r);
  }
  double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = polyval(c, 8, r) / polyval(d, 8, r);
  } else {
    r -= 5.0;
    x = polyval(e, 8, r) / polyval(f, 8, r);
  }
  return q < 0.0 ? -x : x;
}

// Continued fraction for the Mills ratio, modified Lentz; t > 0.
double mills_ratio_cf(double t) {
  constexpr double tiny = 1e-300;
  double f = t;
  double c = t;
  double d = 0.0;
  for (int n = 1; n < 5000; ++n) {
    d = t + n * d;
    if (d == 0.0) d = tiny;
    c = t + n / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 / f;
}

// Genz's BVNU: P(X > h, Y > k) for correlation r (Drezner-Wesolowsky with
// Gauss-Legendre abscissae and the high-correlation asymptotic split).
double bvn_upper(double h, double k, double r) {
  if (h == kInf || k == kInf) return 0.0;
  if (h == -kInf) return k == -kInf ? 1.0 : static_cast<double>(std_ccdf(k));
  if (k == -kInf) return std_ccdf(h);
  if (r == 0.0) return std_ccdf(h) * std_ccdf(k);

  std::array<double, 20> w{};
  std::array<double, 20> x{};
  int ng = 0;
  auto load = [&](const double* xs, const double* ws, int half) {
    for (int i = 0; i < half; ++i) {
      w[i] = ws[i];
      w[i + half] = ws[i];
      x[i] = 1.0 - xs[i];
      x[i + half] = 1.0 + xs[i];
    }
    ng = 2 * half;
  };
  const double ar = std::fabs(r);
  if (ar < 0.3) {
    static constexpr double xs[] = {0.9324695142031522, 0.6612093864662647, 0.2386191860831970};
    static constexpr double ws[] = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
    load(xs, ws, 3);
  } else if (ar < 0.75) {
    static constexpr double xs[] = {0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
                                    0.5873179542866171, 0.3678314989981802, 0.1252334085114692};
    static constexpr double ws[] = {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                                    0.2031674267230659,  0.2334925365383547, 0.2491470458134029};
    load(xs, ws, 6);
  } else {
    std::array<double, 10> xs{};
    std::array<double, 10> ws{};
    for (int i = 0; i < 10; ++i) {
      xs[i] = kGl20x[9 - i];
      ws[i] = kGl20w[9 - i];
    }
    load(xs.data(), ws.data(), 10);
  }

  double hk = h * k;
  double bvn = 0.0;
  if (ar < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(r) / 2.0;
    for (int i = 0; i < ng; ++i) {
      const double sn = std::sin(asr * x[i]);
      bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    bvn = bvn * asr / kTwoPi + std_ccdf(h) * std_ccdf(k);
  } else {
    if (r < 0.0) {
      k = -k;
      hk = -hk;
    }
    if (ar < 1.0) {
      const double as = (1.0 - r) * (1.0 + r);
      double a = std::sqrt(as);
      const double bs = (h - k) * (h - k);
      double asr = -(bs / as + hk) / 2.0;
      const double c = (4.0 - hk) / 8.0;
      const double d = (12.0 - hk) / 80.0;
      if (asr > -100.0) {
        bvn = a * std::exp(asr) * (1.0 - c * (bs - as) * (1.0 - d * bs) / 3.0 + c * d * as * as);
      }
      if (hk > -100.0) {
        const double b = std::sqrt(bs);
        const double sp = std::sqrt(kTwoPi) * std_ccdf(b / a);
        bvn -= std::exp(-hk / 2.0) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
      }
      a /= 2.0;
      double acc = 0.0;
      for (int i = 0; i < ng; ++i) {
        const double xs = (a * x[i]) * (a * x[i]);
        asr = -(bs / xs + hk) / 2.0;
        if (asr > -100.0) {
          const double sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
          const double rs = std::sqrt(1.0 - xs);
          const double ep = std::exp(-(hk / 2.0) * xs / ((1.0 + rs) * (1.0 + rs))) / rs;
          acc += w[i] * std::exp(asr) * (sp - ep);
        }
      }
      bvn = (a * acc - bvn) / kTwoPi;
    }
    if (r > 0.0) {
      bvn += std_ccdf(std::max(h, k));
    } else if (h >= k) {
      bvn = -bvn;
    } else {
      const double l = h < 0.0 ? std_cdf(k) - std_cdf(h) : std_ccdf(h) - std_ccdf(k);
      bvn = l - bvn;
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

}  // namespace

Prob::Prob(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError("probability outside [0,1]: " + std::to_string(value));
  }
}

LogProb::LogProb(double value) : value_(value) {
  if (!(value <= 0.0)) {
    throw DomainError("log-probability must be <= 0: " + std::to_string(value));
  }
}

double std_pdf(double x) {
  if (std::isinf(x)) return 0.0;
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double log_std_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

Prob std_cdf(double x) {
  if (std::isnan(x)) throw DomainError("std_cdf: NaN argument");
  return Prob(0.5 * std::erfc(-x / kSqrt2));
}

Prob std_ccdf(double x) {
  if (std::isnan(x)) throw DomainError("std_ccdf: NaN argument");
  return Prob(0.5 * std::erfc(x / kSqrt2));
}

double mills_ratio(double t) {
  if (t == kInf) return 0.0;
  if (t < 10.0) return 0.5 * std::erfc(t / kSqrt2) / std_pdf(t);
  return mills_ratio_cf(t);
}

LogProb log_std_cdf(double x) {
  if (std::isnan(x)) throw DomainError("log_std_cdf: NaN argument");
  if (x == -kInf) return LogProb(-kInf);
  if (x >= 0.0) return LogProb(std::log1p(-static_cast<double>(std_ccdf(x))));
  if (x > -30.0) return LogProb(std::log(static_cast<double>(std_cdf(x))));
  return LogProb(log_std_pdf(x) + std::log(mills_ratio(-x)));
}

double std_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError("std_quantile: q must lie in (0,1), got " + std::to_string(q));
  }
  double x = ppnd16(q);
  // One Newton step against the erfc-based Phi, using the complement above 1/2.
  const double err = q < 0.5 ? std_cdf(x) - q : (1.0 - q) - std_ccdf(x);
  const double dens = std_pdf(x);
  if (dens > 0.0) x -= err / dens;
  return x;
}

double std_quantile_from_log(double log_q) {
  if (!(log_q < 0.0)) {
    throw DomainError("std_quantile_from_log: log q must be < 0, got " + std::to_string(log_q));
  }
  if (log_q > -std::numbers::ln2) return -std_quantile(-std::expm1(log_q));
  double x;
  if (log_q > -700.0) {
    x = std_quantile(std::exp(log_q));
  } else {
    const double u = -2.0 * log_q;
    x = -std::sqrt(u - std::log(u) - std::log(kTwoPi));
  }
  // Newton on log Phi, whose derivative is 1 / mills_ratio(-x) for x < 0.
  for (int it = 0; it < 50; ++it) {
    const double g = log_std_cdf(x) - log_q;
    const double step = g * mills_ratio(-x);
    x -= step;
    if (std::fabs(step) <= 1e-15 * std::max(1.0, std::fabs(x))) break;
  }
  return x;
}

LogProb log_std_interval_mass(double alpha, double beta) {
  if (!(alpha < beta)) {
    throw ValidationError("interval mass: lower endpoint must be below upper endpoint");
  }
  // Reflect so that the interval lies mostly in the lower half-line.
  if (alpha + beta > 0.0) {
    const double t = alpha;
    alpha = -beta;
    beta = -t;
  }
  const double width = beta - alpha;
  if (width * (std::fabs(beta) + width) < 0.5) {
    // Narrow: phi(beta) * int_0^w exp(beta u - u^2/2) du by 20-point Gauss-Legendre.
    const double half = width / 2.0;
    double acc = 0.0;
    for (int i = 0; i < 10; ++i) {
      for (double sgn : {-1.0, 1.0}) {
        const double u = half * (1.0 + sgn * kGl20x[i]);
        acc += kGl20w[i] * std::exp(beta * u - 0.5 * u * u);
      }
    }
    return LogProb(std::min(0.0, log_std_pdf(beta) + std::log(acc * half)));
  }
  if (beta > 0.0) {
    // Straddles zero: both excluded tails are at most 1/2.
    const double out = static_cast<double>(std_cdf(alpha)) + static_cast<double>(std_ccdf(beta));
    return LogProb(std::log1p(-out));
  }
  const double lb = log_std_cdf(beta);
  if (alpha == -kInf) return LogProb(lb);
  const double la = log_std_cdf(alpha);
  return LogProb(std::min(0.0, lb + std::log1p(-std::exp(la - lb))));
}

LogProb log_interval_mass(double lo, double hi, double mean, double sd) {
  if (!(sd > 0.0)) throw DomainError("interval mass: sd must be positive");
  return log_std_interval_mass((lo - mean) / sd, (hi - mean) / sd);
}

Prob cdf_interval_mass(double lo, double hi, double mean, double sd) {
  if (!(sd > 0.0)) throw DomainError("interval mass: sd must be positive");
  if (!(lo < hi)) {
    throw ValidationError("interval mass: lower endpoint must be below upper endpoint");
  }
  const double alpha = (lo - mean) / sd;
  const double beta = (hi - mean) / sd;
  const bool same_tail = (alpha > 8.0) || (beta < -8.0);
  if (same_tail || beta - alpha < 1e-3) {
    return Prob(std::exp(log_std_interval_mass(alpha, beta)));
  }
  if (beta <= 0.0) return Prob(std_cdf(beta) - std_cdf(alpha));
  if (alpha >= 0.0) return Prob(std_ccdf(alpha) - std_ccdf(beta));
  return Prob(1.0 - std_cdf(alpha) - std_ccdf(beta));
}

Prob bvn_cdf(double h, double k, double corr) {
  if (!(std::fabs(corr) <= 1.0)) {
    throw DomainError("bvn_cdf: correlation must lie in [-1,1]");
  }
  if (std::isnan(h) || std::isnan(k)) throw DomainError("bvn_cdf: NaN argument");
  if (corr == 1.0) return std_cdf(std::min(h, k));
  if (corr == -1.0) return Prob(std::max(0.0, std_cdf(h) - std_ccdf(k)));
  return Prob(bvn_upper(-h, -k, corr));
}

}  // namespace selinf
