#include "presto/driver.hpp"

#include <cmath>
#include <sstream>

#include "presto/rng.hpp"

namespace presto {

namespace {

double param(const std::map<std::string, double>& params, const std::string& key,
             double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::string& name, const std::map<std::string, double>& params,
                    std::initializer_list<const char*> known) {
  for (const auto& [key, _] : params) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok)
      throw Error(ErrorCode::BadArgument,
                  "driver '" + name + "' does not take parameter '" + key + "'");
  }
}

}  // namespace

std::vector<std::string> driver_registry() {
  return {"zero", "affine", "discount", "ambiguity"};
}

Driver make_driver(const std::string& name, const std::map<std::string, double>& params) {
  Driver d;
  d.name = name;
  d.params = params;
  if (name == "zero") {
    reject_unknown(name, params, {});
    d.lipschitz = 0.0;
    d.g = [](double, double, double) { return 0.0; };
  } else if (name == "affine") {
    reject_unknown(name, params, {"a", "b", "c"});
    const double a = param(params, "a", 0.0);
    const double b = param(params, "b", 0.0);
    const double c = param(params, "c", 0.0);
    d.lipschitz = std::abs(b) + std::abs(c);
    d.g = [a, b, c](double, double y, double z) { return a + b * y + c * z; };
  } else if (name == "discount") {
    reject_unknown(name, params, {"rho"});
    const double rho = param(params, "rho", 0.0);
    if (rho < 0.0) throw Error(ErrorCode::BadArgument, "discount rate must be >= 0");
    d.lipschitz = rho;
    d.g = [rho](double, double y, double) { return -rho * y; };
  } else if (name == "ambiguity") {
    reject_unknown(name, params, {"rho", "kappa"});
    const double rho = param(params, "rho", 0.0);
    const double kappa = param(params, "kappa", 0.0);
    if (rho < 0.0 || kappa < 0.0)
      throw Error(ErrorCode::BadArgument, "ambiguity parameters must be >= 0");
    d.lipschitz = rho + kappa;
    d.g = [rho, kappa](double, double y, double z) { return -rho * y + kappa * std::abs(z); };
  } else {
    std::ostringstream os;
    os << "no driver named '" << name << "'; registry:";
    for (const auto& known : driver_registry()) os << " " << known;
    throw Error(ErrorCode::UnknownDriver, os.str());
  }
  return d;
}

double lipschitz_probe(const Driver& driver, std::uint64_t seed, int samples) {
  if (!std::isfinite(driver.g(0.0, 0.0, 0.0)))
    throw Error(ErrorCode::BadArgument, "g(t,0,0) is not finite");
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = rng.uniform(0.0, 10.0);
    const double y1 = rng.uniform(-5.0, 5.0), z1 = rng.uniform(-5.0, 5.0);
    const double y2 = rng.uniform(-5.0, 5.0), z2 = rng.uniform(-5.0, 5.0);
    const double lhs = std::abs(driver.g(t, y1, z1) - driver.g(t, y2, z2));
    const double rhs = driver.lipschitz * (std::abs(y1 - y2) + std::abs(z1 - z2));
    if (lhs > rhs * (1.0 + 1e-9)) {
      const double denom = std::max(rhs, 1e-300);
      worst = std::max(worst, lhs / denom - 1.0);
    }
  }
  return worst;
}

}  // namespace presto
