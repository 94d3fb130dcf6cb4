#include "cmsent/linear.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cmsent {

std::string_view to_string(Loss loss) { return loss == Loss::Logistic ? "logistic" : "hinge"; }

Loss parse_loss(std::string_view s) {
  if (s == "logistic") return Loss::Logistic;
  if (s == "hinge") return Loss::Hinge;
  throw std::invalid_argument("unknown loss '" + std::string(s) + "'");
}

void TrainConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive");
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (!(tol >= 0.0)) throw std::invalid_argument("tol must be non-negative");
}

}  // namespace cmsent
