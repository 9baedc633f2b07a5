#include "cchr/theta.hpp"

#include <stdexcept>

namespace cchr {

Theta Theta::make(PHParams ph, CensoringModel cens, CopulaFamily family, double tau) {
  Theta t;
  t.ph = std::move(ph);
  t.cens = std::move(cens);
  t.tau = family == CopulaFamily::independence ? 0.0 : tau;
  t.copula = xi_from_tau(family, t.tau);
  if (t.cens.eta.size() != t.ph.beta.size() + 2)
    throw std::invalid_argument("Theta: eta must have length m + 2");
  return t;
}

std::vector<double> Theta::to_vector() const {
  std::vector<double> v;
  v.push_back(ph.alpha);
  v.insert(v.end(), ph.beta.begin(), ph.beta.end());
  v.insert(v.end(), cens.eta.begin(), cens.eta.end());
  v.push_back(cens.nu);
  if (copula.family != CopulaFamily::independence) v.push_back(tau);
  return v;
}

Theta Theta::from_vector(const std::vector<double>& values, std::size_t m,
                         CopulaFamily family, CensoringFamily censoring) {
  const std::size_t expected = 2 * m + 4 + (family == CopulaFamily::independence ? 0 : 1);
  if (values.size() != expected)
    throw std::invalid_argument("Theta::from_vector: wrong parameter count");
  PHParams ph;
  ph.alpha = values[0];
  ph.beta.assign(values.begin() + 1, values.begin() + 1 + m);
  CensoringModel cens;
  cens.family = censoring;
  cens.eta.assign(values.begin() + 1 + m, values.begin() + 3 + 2 * m);
  cens.nu = values[3 + 2 * m];
  double tau = family == CopulaFamily::independence ? 0.0 : values[4 + 2 * m];
  return make(std::move(ph), std::move(cens), family, tau);
}

std::vector<std::string> parameter_names(std::size_t m, CopulaFamily family) {
  std::vector<std::string> names{"alpha"};
  for (std::size_t j = 1; j <= m; ++j) names.push_back("beta" + std::to_string(j));
  for (std::size_t j = 0; j < m + 2; ++j) names.push_back("eta" + std::to_string(j));
  names.push_back("nu");
  if (family != CopulaFamily::independence) names.push_back("tau");
  return names;
}

}  // namespace cchr
