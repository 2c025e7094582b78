#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "presto/errors.hpp"

namespace presto {

/// Nonlinear generator g(t, y, z) with its Lipschitz constant in (y, z).
struct Driver {
  std::string name;
  std::map<std::string, double> params;
  double lipschitz = 0.0;
  std::function<double(double t, double y, double z)> g;

  double operator()(double t, double y, double z) const { return g(t, y, z); }
};

/// Registry names: "zero", "affine" (a + b*y + c*z), "discount" (-rho*y),
/// "ambiguity" (-rho*y + kappa*|z|).
std::vector<std::string> driver_registry();

/// Builds a registry driver; unknown names and unknown parameter keys are
/// rejected with the registry list in the message.
Driver make_driver(const std::string& name, const std::map<std::string, double>& params = {});

/// Two-point Lipschitz probe on a seeded grid plus a finiteness check of
/// g(t,0,0). Returns the worst relative excess over the declared constant
/// (<= ~1e-9 for a conforming driver).
double lipschitz_probe(const Driver& driver, std::uint64_t seed = 2025, int samples = 256);

}  // namespace presto
