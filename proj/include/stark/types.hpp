// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <variant>

namespace stark {

inline constexpr const char* kVersion = "0.1.0";

/// Monomial gradient potential V_i = h * i^gamma, sites i = 1..L.
struct Monomial {
    double h = 0.0;      ///< field strength, units of J
    double gamma = 1.0;  ///< nonlinearity exponent, dimensionless (> 0)
};

/// Parabolic potential V_i = h1*(i-1) - h2*(i-1)^2, offsets counted from 0.
/// Mirror-symmetric around the chain center iff h1 == h2*(L-1).
struct Parabolic {
    double h1 = 0.0;  ///< linear field, units of J
    double h2 = 0.0;  ///< quadratic field, units of J
};

using PotentialSpec = std::variant<Monomial, Parabolic>;

enum class Family { SingleParticle, ManyBodyHalfFilling };

/// Projective measurements with matching probe families: site occupation for
/// a single particle, spin configurations of the half-filling sector for the
/// interacting chain.
enum class Povm { PositionBasis, SpinConfigurationBasis };

/// Full physical configuration of a probe chain. Treated as an immutable
/// value everywhere: builders and sweep workers never mutate a spec.
struct ProbeSpec {
    int L = 2;         ///< site count
    double J = 1.0;    ///< hopping / coupling, the energy unit
    PotentialSpec potential = Monomial{};
    Family family = Family::SingleParticle;
};

/// gamma <= 0: the field couples to a conserved quantity, V is a uniform
/// shift per unit field and carries no signal.
class DegeneratePotentialError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class SectorError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Eigensolver failed to reach its residual contract.
class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(const std::string& what, int iterations)
        : std::runtime_error(what), iterations(iterations) {}
    int iterations = 0;
};

/// Ground state quasi-degenerate and the caller did not opt in.
class DegenerateGroundStateError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Adaptive finite-difference step search never landed in the
/// overlap-deficit window.
class StepSearchError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Fisher matrix numerically singular; carries the condition number.
class SingularFisherError : public std::runtime_error {
  public:
    SingularFisherError(const std::string& what, double condition)
        : std::runtime_error(what), condition(condition) {}
    double condition = 0.0;
};

}  // namespace stark
