#include "simresnet/activation.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace simresnet {

double activation_eval(Activation kind, double x) {
  if (!std::isfinite(x)) throw std::domain_error("activation_eval: non-finite input");
  switch (kind) {
    case Activation::Sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
    case Activation::ReLU:
      return x > 0.0 ? x : 0.0;
  }
  throw std::logic_error("unknown activation");
}

double activation_deriv(Activation kind, double x) {
  if (!std::isfinite(x)) throw std::domain_error("activation_deriv: non-finite input");
  switch (kind) {
    case Activation::Sigmoid: {
      double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s);
    }
    case Activation::ReLU:
      return x > 0.0 ? 1.0 : 0.0;
  }
  throw std::logic_error("unknown activation");
}

const char* activation_name(Activation kind) {
  return kind == Activation::Sigmoid ? "sigmoid" : "relu";
}

Activation activation_from_name(const char* name) {
  if (std::strcmp(name, "sigmoid") == 0) return Activation::Sigmoid;
  if (std::strcmp(name, "relu") == 0) return Activation::ReLU;
  throw std::invalid_argument(std::string("unknown activation: ") + name);
}

}  // namespace simresnet
