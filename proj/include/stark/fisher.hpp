// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "stark/spectral.hpp"
#include "stark/types.hpp"

namespace stark {

/// Parameter being estimated: the monomial amplitude h, or one of the two
/// parabolic fields.
enum class Direction { FieldH, FieldH1, FieldH2 };

/// Outcomes with probability below this floor are dropped from classical
/// Fisher sums; their contribution is bounded by finite-difference noise.
inline constexpr double kProbabilityFloor = 1e-14;

/// Relative accuracy of finite-difference Fisher data, pinned by the
/// cross-validation against the closed-form oracle. PSD checks of
/// quantum-minus-classical matrices get 3x this slack.
inline constexpr double kFiniteDifferenceTol = 1e-3;

/// Adaptive central-difference policy. The step starts at
/// max(init_scale*|theta|, floor) and is adjusted until the overlap deficit
/// 1 - |<psi(-)|psi(+)>| lands inside [deficit_lo, deficit_hi]; the deficit
/// is ~ step^2 * F_Q / 8, so the window balances truncation against
/// cancellation across the many decades the Fisher information spans.
struct StepPolicy {
    double init_scale = 1e-6;
    double floor = 1e-13;
    double deficit_lo = 1e-10;
    double deficit_hi = 1e-4;
    int max_adjust = 40;
    /// Opt-in for quasi-degenerate ground states (the mirror-symmetric line
    /// deep in the localized phase): report data for the gauged lowest state
    /// and flag the result instead of refusing.
    bool allow_degenerate = false;
};

struct StateDerivative {
    Direction direction = Direction::FieldH;
    double step = 0.0;               ///< accepted central-difference step
    Eigen::VectorXd vector;          ///< raw derivative (psi+ - psi-)/step
    Eigen::VectorXd orthogonal;      ///< derivative orthogonalized against psi
    double overlap_deficit = 0.0;    ///< 1 - <psi(-)|psi(+)> at the accepted step
    bool degenerate_flagged = false;

    // Endpoint and center states, kept for probability derivatives and
    // downstream diagnostics.
    Eigen::VectorXd psi;
    Eigen::VectorXd psi_plus;
    Eigen::VectorXd psi_minus;
};

/// Field component `direction` of the potential; throws if the potential
/// kind has no such parameter.
double field_value(const ProbeSpec& spec, Direction direction);
ProbeSpec with_field(const ProbeSpec& spec, Direction direction, double value);

/// Central difference of sign-gauged ground vectors with the adaptive step
/// policy. Deterministic given spec and policy.
StateDerivative differentiate_ground_state(const ProbeSpec& spec, Direction direction,
                                           const StepPolicy& policy = {});

/// One-parameter family of probes, e.g. the mirror-symmetric line
/// h2 -> Parabolic{h2*(L-1), h2}.
using ParamPath = std::function<ProbeSpec(double)>;

/// Derivative along an arbitrary parameter path. A path that preserves a
/// symmetry (the mirror line) never couples the quasi-degenerate partner,
/// unlike the axis derivatives of qfi_matrix.
StateDerivative differentiate_along_path(const ParamPath& path, double theta,
                                         const StepPolicy& policy = {});

/// Pure-state quantum Fisher information
///   F_Q = 4 [ <dpsi|dpsi> - <psi|dpsi>^2 ]  (real vectors).
double qfi_scalar(const Eigen::VectorXd& psi, const Eigen::VectorXd& dpsi);

struct PerturbativeQfi {
    double total = 0.0;    ///< full sum over the L-1 excited states
    double k2_term = 0.0;  ///< lower-bound term from the first excited state
};

/// Closed-form small-field QFI of the single-particle monomial probe,
/// evaluated on the zero-field spectrum:
///   F_Q = 4/(J^2 (L+1)^2) * sum_k N(k)/D(k),
///   N(k) = [sum_i i^gamma sin(ik pi/(L+1)) sin(i pi/(L+1))]^2,
///   D(k) = [cos(k pi/(L+1)) - cos(pi/(L+1))]^2.
PerturbativeQfi qfi_perturbative(const ProbeSpec& spec);

enum class FisherKind { Quantum, Classical };
enum class FisherMethod { Perturbative, FiniteDifference };

struct FisherMatrix {
    int order = 1;  ///< 1 or 2 parameters
    Eigen::Matrix2d entries = Eigen::Matrix2d::Zero();  ///< top-left block used
    FisherKind kind = FisherKind::Quantum;
    FisherMethod method = FisherMethod::FiniteDifference;
    double weak_commutativity_residual = 0.0;  ///< Tr(rho [L1, L2]), order 2 quantum only
    double step1 = 0.0;  ///< accepted steps per direction (diagnostics)
    double step2 = 0.0;
    bool degenerate_flagged = false;
};

/// 2x2 quantum Fisher matrix of a parabolic probe from two state
/// derivatives; includes the weak-commutativity residual.
FisherMatrix qfi_matrix(const ProbeSpec& spec, const StepPolicy& policy = {});

/// Classical Fisher matrix for a projective measurement: position basis for
/// single-particle probes, spin configurations of the half-filling sector
/// for many-body probes. Probability derivatives reuse the central
/// difference policy.
FisherMatrix cfi_matrix(const ProbeSpec& spec, Povm povm, const StepPolicy& policy = {});

/// Classical Fisher matrix from explicit outcome probabilities and their
/// parameter derivatives (testable kernel).
Eigen::MatrixXd cfi_from_probabilities(const Eigen::VectorXd& p,
                                       const std::vector<Eigen::VectorXd>& dp,
                                       double floor = kProbabilityFloor);

struct FisherPair {
    FisherMatrix quantum;
    FisherMatrix classical;
};

/// Quantum and classical matrices from one set of solves; what grid sweeps
/// use when both are requested.
FisherPair fisher_matrices(const ProbeSpec& spec, Povm povm, const StepPolicy& policy = {});

struct SldPair {
    Eigen::MatrixXd L1;
    Eigen::MatrixXd L2;
    double trace_commutator = 0.0;  ///< Tr(rho [L1, L2])
};

/// Pure-state symmetric logarithmic derivatives
///   L_i = 2 (|dpsi_i><psi| + |psi><dpsi_i|),
/// built from derivatives orthogonalized against psi. Dense; intended for
/// moderate dimensions.
SldPair sld_pair(const Eigen::VectorXd& psi, const Eigen::VectorXd& dpsi1,
                 const Eigen::VectorXd& dpsi2);

/// Frobenius norm of d(rho) - (rho L + L rho)/2, the defining relation of
/// the symmetric logarithmic derivative.
double sld_defining_residual(const Eigen::VectorXd& psi, const Eigen::VectorXd& dpsi,
                             const Eigen::MatrixXd& sld);

/// Tr[W F^-1] via the explicit 2x2 inverse (or 1/F for order 1). The
/// identity weight bounds the summed variances of all parameters. Throws
/// SingularFisherError when F is not positive definite.
double total_uncertainty(const FisherMatrix& f,
                         const Eigen::Matrix2d& weight = Eigen::Matrix2d::Identity());

/// Figure of merit with state-preparation time priced in: t ~ 1/gap, so the
/// entries are multiplied by the gap (units J^-1 per entry of F*J).
FisherMatrix time_normalized(const FisherMatrix& f, const GapRecord& gap);

}  // namespace stark
