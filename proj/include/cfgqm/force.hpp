#ifndef CFGQM_FORCE_HPP
#define CFGQM_FORCE_HPP

#include <cmath>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "cfgqm/errors.hpp"

namespace cfgqm {

struct FreeForce {
  bool operator==(const FreeForce&) const = default;
};

/// Constant force per mass g, V(x) = -m g x.
struct UniformForce {
  double g = 9.81;
  bool operator==(const UniformForce&) const = default;
};

/// V(x) = m omega^2 x^2 / 2, f(x) = -omega^2 x.
struct HarmonicForce {
  double omega = 1.0;
  bool operator==(const HarmonicForce&) const = default;
};

/// f(x) = sum_n c[n] x^n, V(x) = -m sum_n c[n] x^(n+1) / (n+1).
struct PolynomialForce {
  std::vector<double> c;
  bool operator==(const PolynomialForce&) const = default;
};

using ForceKind = std::variant<FreeForce, UniformForce, HarmonicForce, PolynomialForce>;

/// A potential family together with the particle mass. Dynamics only ever
/// see the force per mass f(x); the mass enters the classical energy and
/// the basic-QM Hamiltonian.
class ForceField {
public:
  static constexpr std::size_t kMaxPolynomialDegree = 8;

  ForceField() = default;
  ForceField(ForceKind kind, double mass) : kind_(std::move(kind)), mass_(mass) { validate(); }

  static ForceField free(double mass = 1.0) { return {FreeForce{}, mass}; }
  static ForceField uniform(double g, double mass = 1.0) { return {UniformForce{g}, mass}; }
  static ForceField harmonic(double omega, double mass = 1.0) { return {HarmonicForce{omega}, mass}; }
  static ForceField polynomial(std::vector<double> c, double mass = 1.0) {
    return {PolynomialForce{std::move(c)}, mass};
  }

  const ForceKind& kind() const { return kind_; }
  double mass() const { return mass_; }

  bool is_free() const {
    if (std::holds_alternative<FreeForce>(kind_)) return true;
    if (auto* p = std::get_if<PolynomialForce>(&kind_)) {
      for (double c : p->c)
        if (c != 0.0) return false;
      return true;
    }
    return false;
  }

  std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, FreeForce>) return "free";
          else if constexpr (std::is_same_v<K, UniformForce>) return "uniform";
          else if constexpr (std::is_same_v<K, HarmonicForce>) return "harmonic";
          else return "polynomial";
        },
        kind_);
  }

  /// Force per mass.
  double f(double x) const {
    return std::visit(
        [x](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, FreeForce>) return 0.0;
          else if constexpr (std::is_same_v<K, UniformForce>) return k.g;
          else if constexpr (std::is_same_v<K, HarmonicForce>) return -k.omega * k.omega * x;
          else {
            double acc = 0.0;
            for (auto it = k.c.rbegin(); it != k.c.rend(); ++it) acc = acc * x + *it;
            return acc;
          }
        },
        kind_);
  }

  double fprime(double x) const {
    return std::visit(
        [x](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, FreeForce> || std::is_same_v<K, UniformForce>) return 0.0;
          else if constexpr (std::is_same_v<K, HarmonicForce>) return -k.omega * k.omega;
          else {
            double acc = 0.0;
            for (std::size_t n = k.c.size(); n-- > 1;) acc = acc * x + static_cast<double>(n) * k.c[n];
            return acc;
          }
        },
        kind_);
  }

  double potential(double x) const {
    const double m = mass_;
    return std::visit(
        [x, m](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, FreeForce>) return 0.0;
          else if constexpr (std::is_same_v<K, UniformForce>) return -m * k.g * x;
          else if constexpr (std::is_same_v<K, HarmonicForce>) return 0.5 * m * k.omega * k.omega * x * x;
          else {
            double acc = 0.0;
            for (std::size_t n = k.c.size(); n-- > 0;)
              acc = acc * x + k.c[n] / static_cast<double>(n + 1);
            return -m * acc * x;
          }
        },
        kind_);
  }

  bool operator==(const ForceField&) const = default;

private:
  void validate() const {
    if (!(mass_ > 0.0) || !std::isfinite(mass_)) throw ConfigError("force.mass must be positive");
    std::visit(
        [](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, UniformForce>) {
            if (!std::isfinite(k.g)) throw ConfigError("force.g must be finite");
          } else if constexpr (std::is_same_v<K, HarmonicForce>) {
            if (!std::isfinite(k.omega) || !(k.omega > 0.0))
              throw ConfigError("force.omega must be positive");
          } else if constexpr (std::is_same_v<K, PolynomialForce>) {
            if (k.c.size() > kMaxPolynomialDegree + 1)
              throw ConfigError("force.coefficients: polynomial degree must be <= 8");
            for (double c : k.c)
              if (!std::isfinite(c)) throw ConfigError("force.coefficients must be finite");
          }
        },
        kind_);
  }

  ForceKind kind_ = FreeForce{};
  double mass_ = 1.0;
};

}  // namespace cfgqm

#endif  // CFGQM_FORCE_HPP
