#include "cchr/normal.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cchr {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Upper bivariate normal probability P(X > h, Y > k).
double bvn_upper(double h, double k, double r) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (h == inf || k == inf) return 0.0;
  if (h == -inf) return k == -inf ? 1.0 : normal_sf(k);
  if (k == -inf) return normal_sf(h);
  if (r == 0.0) return normal_sf(h) * normal_sf(k);

  static constexpr double w6[] = {0.1713244923791705, 0.3607615730481384,
                                  0.4679139345726904};
  static constexpr double x6[] = {0.9324695142031522, 0.6612093864662647,
                                  0.2386191860831970};
  static constexpr double w12[] = {0.04717533638651177, 0.1069393259953183,
                                   0.1600783285433464,  0.2031674267230659,
                                   0.2334925365383547,  0.2491470458134029};
  static constexpr double x12[] = {0.9815606342467191, 0.9041172563704750,
                                   0.7699026741943050, 0.5873179542866171,
                                   0.3678314989981802, 0.1252334085114692};
  static constexpr double w20[] = {
      0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
      0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
      0.1316886384491766,  0.1420961093183821,  0.1491729864726037,
      0.1527533871307259};
  static constexpr double x20[] = {
      0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
      0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
      0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
      0.07652652113349733};

  const double* w;
  const double* x;
  int ng;
  if (std::abs(r) < 0.3) {
    w = w6; x = x6; ng = 3;
  } else if (std::abs(r) < 0.75) {
    w = w12; x = x12; ng = 6;
  } else {
    w = w20; x = x20; ng = 10;
  }

  constexpr double tp = 2.0 * std::numbers::pi;
  double hk = h * k;
  double bvn = 0.0;
  if (std::abs(r) < 0.925) {
    double hs = (h * h + k * k) / 2.0;
    double asr = std::asin(r) / 2.0;
    for (int i = 0; i < ng; ++i) {
      for (double xi : {1.0 - x[i], 1.0 + x[i]}) {
        double sn = std::sin(asr * xi);
        bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    bvn = bvn * asr / tp + normal_sf(h) * normal_sf(k);
  } else {
    if (r < 0.0) {
      k = -k;
      hk = -hk;
    }
    if (std::abs(r) < 1.0) {
      double as = 1.0 - r * r;
      double a = std::sqrt(as);
      double bs = (h - k) * (h - k);
      double asr = -(bs / as + hk) / 2.0;
      double c = (4.0 - hk) / 8.0;
      double d = (12.0 - hk) / 80.0;
      if (asr > -100.0)
        bvn = a * std::exp(asr) *
              (1.0 - c * (bs - as) * (1.0 - d * bs) / 3.0 + c * d * as * as);
      if (hk > -100.0) {
        double b = std::sqrt(bs);
        double sp = std::sqrt(tp) * normal_cdf(-b / a);
        bvn -= std::exp(-hk / 2.0) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
      }
      a /= 2.0;
      double sum = 0.0;
      for (int i = 0; i < ng; ++i) {
        for (double xi : {1.0 - x[i], 1.0 + x[i]}) {
          double xs = (a * xi) * (a * xi);
          double asr_i = -(bs / xs + hk) / 2.0;
          if (asr_i <= -100.0) continue;
          double sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
          double rs = std::sqrt(1.0 - xs);
          double ep = std::exp(-(hk / 2.0) * xs / ((1.0 + rs) * (1.0 + rs))) / rs;
          sum += w[i] * std::exp(asr_i) * (sp - ep);
        }
      }
      bvn = (a * sum - bvn) / tp;
    }
    if (r > 0.0) {
      bvn += normal_sf(std::max(h, k));
    } else if (h >= k) {
      bvn = -bvn;
    } else {
      double l = h < 0.0 ? normal_cdf(k) - normal_cdf(h) : normal_sf(h) - normal_sf(k);
      bvn = l - bvn;
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double normal_log_pdf(double x) {
  return -0.5 * x * x - 0.91893853320467274178;  // log(sqrt(2 pi))
}

double normal_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double bivariate_normal_cdf(double h, double k, double rho) {
  return bvn_upper(-h, -k, rho);
}

}  // namespace cchr
