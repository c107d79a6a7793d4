#pragma once

namespace simresnet {

enum class Activation { Sigmoid, ReLU };

// sigma(x): Sigmoid 1/(1+exp(-x)), ReLU max{0,x}. Throws std::domain_error
// on non-finite input.
double activation_eval(Activation kind, double x);

// sigma'(x). ReLU uses the subgradient 0 at x == 0.
double activation_deriv(Activation kind, double x);

const char* activation_name(Activation kind);
Activation activation_from_name(const char* name);

}  // namespace simresnet
