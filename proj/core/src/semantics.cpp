#include "clssr/semantics.hpp"

#include <algorithm>
#include <cmath>

#include "clssr/errors.hpp"

namespace clssr {

void SemanticConfig::validate() const {
  if (n <= 0) throw ConfigError("semantic message length n must be > 0");
  if (b_min < 1 || b_max < b_min)
    throw ConfigError("require 1 <= b_min <= b_max");
  if (b < b_min || b > b_max)
    throw ConfigError("bit depth b outside [b_min, b_max]");
  if (delta_z < 0.0 || delta_z > 1.0)
    throw ConfigError("delta_z must lie in [0, 1]");
  if (rho < 0.0) throw ConfigError("rho must be >= 0");
  if (kappa <= 0.0) throw ConfigError("kappa must be > 0");
  if (epsilon <= 0.0 || epsilon >= 1.0)
    throw ConfigError("epsilon must lie in (0, 1)");
}

SemanticConfig SemanticConfig::with_bits(int bits) const {
  SemanticConfig out = *this;
  out.b = bits;
  return out;
}

double distortion_user(double codeword_error, const SemanticConfig& cfg) {
  const double p = std::clamp(codeword_error, 0.0, 1.0);
  const double g =
      cfg.kappa * std::exp2(-cfg.b) + p + cfg.rho * cfg.delta_z;
  return std::min(1.0, g);
}

double distortion_eve(double codeword_error, const SemanticConfig& cfg) {
  const double p = std::clamp(codeword_error, 0.0, 1.0);
  const double g =
      cfg.kappa * std::exp2(-cfg.b) + p + cfg.delta_z * (1.0 - p);
  return std::min(1.0, g);
}

}  // namespace clssr
