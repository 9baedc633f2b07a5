#pragma once

#include <array>
#include <random>
#include <string_view>
#include <utility>

namespace cchr {

enum class CopulaFamily {
  independence,
  frank,
  gumbel,
  joe,
  gaussian,
  clayton90,
  clayton180,
  clayton270,
};

std::string_view to_string(CopulaFamily family);
/// Accepts the lowercase config names; throws std::invalid_argument otherwise.
CopulaFamily parse_copula_family(std::string_view name);

/// The seven one-parameter families used for model selection.
const std::array<CopulaFamily, 7>& parametric_copula_families();

/// A family together with its association parameter xi.
///   frank: any real (xi = 0 is the independence limit)
///   gumbel, joe: xi >= 1
///   gaussian: -1 < xi < 1 (the correlation)
///   clayton rotations: xi > 0
///   independence: xi ignored
struct CopulaSpec {
  CopulaFamily family = CopulaFamily::independence;
  double xi = 0.0;
  bool operator==(const CopulaSpec&) const = default;
};

/// Throws std::domain_error when xi is outside the family domain.
CopulaSpec make_copula(CopulaFamily family, double xi);
void validate(const CopulaSpec& spec);

/// Closed Kendall-tau interval the family can represent. Endpoints that the
/// family only reaches in a limit are excluded by `admissible_tau`.
struct TauInterval {
  double lower;
  double upper;
};
TauInterval tau_range(CopulaFamily family);
bool admissible_tau(CopulaFamily family, double tau);

// Distribution function and its partial derivatives (h-functions). The
// partials and the density clamp u, v to [1e-12, 1 - 1e-12].
double cdf(const CopulaSpec& spec, double u, double v);
double partial_u(const CopulaSpec& spec, double u, double v);
double partial_v(const CopulaSpec& spec, double u, double v);
double density(const CopulaSpec& spec, double u, double v);

// Variants taking the complements ubar = 1 - u and vbar = 1 - v as computed
// by the caller. They avoid cancellation in the upper tail, which matters
// for likelihood terms when F_T or F_C is close to one.

/// P(U > u, V > v) = 1 - u - v + C(u, v).
double joint_survival(const CopulaSpec& spec, double u, double v, double ubar,
                      double vbar);
/// 1 - partial_u(u, v).
double partial_u_complement(const CopulaSpec& spec, double u, double v,
                            double ubar, double vbar);
/// 1 - partial_v(u, v).
double partial_v_complement(const CopulaSpec& spec, double u, double v,
                            double ubar, double vbar);

/// Kendall's tau of the copula.
double tau_from_xi(const CopulaSpec& spec);
/// Inverse of tau_from_xi. Throws std::domain_error if tau is not
/// admissible for the family.
CopulaSpec xi_from_tau(CopulaFamily family, double tau);

/// Draws (u, v) from the copula by the conditional distribution method: u
/// and w uniform, then v solves partial_u(u, v) = w.
std::pair<double, double> sample_pair(const CopulaSpec& spec,
                                      std::mt19937_64& rng);

/// Debye function D1(x) = x^-1 * integral_0^x t / (e^t - 1) dt.
double debye1(double x);

}  // namespace cchr
