// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#include "stark/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace stark {

namespace {

// Ground-state solver shared by all derivative evaluations at one point:
// caches the sector basis and warm-starts neighbouring solves from the
// center vector, which keeps the Krylov solver in the few-iteration regime.
class DerivativeEngine {
  public:
    explicit DerivativeEngine(const ProbeSpec& spec) : spec_(spec) {
        validate(spec);
        if (spec.family == Family::ManyBodyHalfFilling)
            basis_ = enumerate_half_filling(spec.L);
    }

    GroundStates solve(const ProbeSpec& at, const Eigen::VectorXd* warm) const {
        if (at.family == Family::SingleParticle)
            return ground_pair(build_single_particle(at), 2);
        LanczosOptions opts;
        opts.warm_start = warm;
        return ground_pair(build_many_body(at, basis_), 2, opts);
    }

    const GroundStates& center() {
        if (!center_.has_value()) center_ = solve(spec_, nullptr);
        return *center_;
    }

    StateDerivative differentiate(const ParamPath& path, double theta, Direction label,
                                  const StepPolicy& policy);

    StateDerivative differentiate(Direction direction, const StepPolicy& policy) {
        const ProbeSpec spec = spec_;
        return differentiate(
            [spec, direction](double v) { return with_field(spec, direction, v); },
            field_value(spec_, direction), direction, policy);
    }

    const ProbeSpec& spec() const { return spec_; }

  private:
    ProbeSpec spec_;
    SectorBasis basis_;
    std::optional<GroundStates> center_;
};

StateDerivative DerivativeEngine::differentiate(const ParamPath& path, double theta,
                                                Direction label, const StepPolicy& policy) {
    const GroundStates& c = center();
    if (c.quasi_degenerate && !policy.allow_degenerate)
        throw DegenerateGroundStateError(
            "differentiate_ground_state: quasi-degenerate ground state (symmetric-line opt-in "
            "required)");

    const Eigen::VectorXd& psi = c.pairs[0].vector;

    struct Endpoint {
        GroundStates plus, minus;
        double deficit;
        double dot;
        double step_eff;
    };
    const auto evaluate = [&](double delta) {
        // The parameters actually solved are the rounded theta +/- delta/2;
        // the difference quotient must use their exact spacing, or steps in
        // the sub-ulp-of-theta regime mis-normalize the derivative.
        const double up = theta + 0.5 * delta;
        const double dn = theta - 0.5 * delta;
        Endpoint e{solve(path(up), &psi), solve(path(dn), &psi), 0.0, 0.0, up - dn};
        e.dot = e.plus.pairs[0].vector.dot(e.minus.pairs[0].vector);
        if (e.dot < 0.0) {
            // The per-vector sign gauge can flip across a symmetry point
            // (e.g. the step straddling h = 0); re-align the pair. A global
            // sign is pure gauge and changes no Fisher quantity.
            e.minus.pairs[0].vector = -e.minus.pairs[0].vector;
            e.dot = -e.dot;
        }
        e.deficit = 1.0 - e.dot;
        return e;
    };

    double delta = std::max(policy.init_scale * std::abs(theta), policy.floor);
    Endpoint ep = evaluate(delta);
    int adjustments = 0;
    const auto in_window = [&](const Endpoint& e) {
        return e.deficit >= policy.deficit_lo && e.deficit <= policy.deficit_hi && e.dot > 0.0 &&
               e.step_eff > 0.0;
    };
    bool landed = in_window(ep);

    if (!landed && ep.dot > 0.0 && ep.deficit > 0.0 && std::isfinite(ep.deficit)) {
        // One predictive jump: deficit ~ delta^2, so aim at the window center
        // before settling with halve/double probes.
        const double target = std::sqrt(policy.deficit_lo * policy.deficit_hi);
        double factor = std::sqrt(target / ep.deficit);
        factor = std::clamp(factor, std::pow(2.0, -policy.max_adjust),
                            std::pow(2.0, policy.max_adjust));
        if (factor != 1.0) {
            delta *= factor;
            ep = evaluate(delta);
            ++adjustments;
            landed = in_window(ep);
        }
    }
    while (!landed && adjustments < policy.max_adjust) {
        if (ep.step_eff > 0.0 && (ep.dot <= 0.0 || ep.deficit > policy.deficit_hi))
            delta *= 0.5;
        else
            delta *= 2.0;
        ep = evaluate(delta);
        ++adjustments;
        landed = in_window(ep);
    }
    if (!landed)
        throw StepSearchError(
            "differentiate_ground_state: no step lands in the overlap-deficit window");

    StateDerivative d;
    d.direction = label;
    d.step = ep.step_eff;
    d.vector = (ep.plus.pairs[0].vector - ep.minus.pairs[0].vector) / ep.step_eff;
    d.orthogonal = d.vector - psi.dot(d.vector) * psi;
    d.overlap_deficit = ep.deficit;
    d.degenerate_flagged = c.quasi_degenerate || ep.plus.quasi_degenerate ||
                           ep.minus.quasi_degenerate;
    d.psi = psi;
    d.psi_plus = ep.plus.pairs[0].vector;
    d.psi_minus = ep.minus.pairs[0].vector;
    return d;
}

Eigen::VectorXd probabilities(const Eigen::VectorXd& psi) { return psi.array().square(); }

// Tr(rho [L1, L2]) evaluated inside span{psi, d1, d2}: the SLDs act within
// that subspace, so a 3x3 representation is exact and the result is a real
// floating-point residual rather than an algebraic zero.
double weak_commutativity(const Eigen::VectorXd& psi, const Eigen::VectorXd& d1,
                          const Eigen::VectorXd& d2) {
    Eigen::MatrixXd b(psi.size(), 3);
    b.col(0) = psi;
    b.col(1) = d1;
    b.col(2) = d2;
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(psi.size(), 3);

    const Eigen::Vector3d q0 = q.transpose() * psi;
    const Eigen::Vector3d q1 = q.transpose() * d1;
    const Eigen::Vector3d q2 = q.transpose() * d2;
    const Eigen::Matrix3d l1 = 2.0 * (q1 * q0.transpose() + q0 * q1.transpose());
    const Eigen::Matrix3d l2 = 2.0 * (q2 * q0.transpose() + q0 * q2.transpose());
    return q0.dot((l1 * l2 - l2 * l1) * q0);
}

}  // namespace

double field_value(const ProbeSpec& spec, Direction direction) {
    if (const auto* mono = std::get_if<Monomial>(&spec.potential)) {
        if (direction != Direction::FieldH)
            throw std::invalid_argument("field_value: monomial potential has only h");
        return mono->h;
    }
    const auto& par = std::get<Parabolic>(spec.potential);
    switch (direction) {
        case Direction::FieldH1:
            return par.h1;
        case Direction::FieldH2:
            return par.h2;
        default:
            throw std::invalid_argument("field_value: parabolic potential has h1 and h2");
    }
}

ProbeSpec with_field(const ProbeSpec& spec, Direction direction, double value) {
    ProbeSpec out = spec;
    if (auto* mono = std::get_if<Monomial>(&out.potential)) {
        if (direction != Direction::FieldH)
            throw std::invalid_argument("with_field: monomial potential has only h");
        mono->h = value;
        return out;
    }
    auto& par = std::get<Parabolic>(out.potential);
    if (direction == Direction::FieldH1)
        par.h1 = value;
    else if (direction == Direction::FieldH2)
        par.h2 = value;
    else
        throw std::invalid_argument("with_field: parabolic potential has h1 and h2");
    return out;
}

StateDerivative differentiate_ground_state(const ProbeSpec& spec, Direction direction,
                                           const StepPolicy& policy) {
    DerivativeEngine engine(spec);
    return engine.differentiate(direction, policy);
}

StateDerivative differentiate_along_path(const ParamPath& path, double theta,
                                         const StepPolicy& policy) {
    DerivativeEngine engine(path(theta));
    return engine.differentiate(path, theta, Direction::FieldH, policy);
}

double qfi_scalar(const Eigen::VectorXd& psi, const Eigen::VectorXd& dpsi) {
    const double overlap = psi.dot(dpsi);
    return 4.0 * (dpsi.dot(dpsi) - overlap * overlap);
}

PerturbativeQfi qfi_perturbative(const ProbeSpec& spec) {
    validate(spec);
    if (spec.family != Family::SingleParticle)
        throw std::invalid_argument(
            "qfi_perturbative: no closed spectrum for the many-body family");
    const auto* mono = std::get_if<Monomial>(&spec.potential);
    if (mono == nullptr)
        throw std::invalid_argument("qfi_perturbative: requires a monomial potential");

    const int L = spec.L;
    const double theta = std::numbers::pi / (L + 1);
    const double cos1 = std::cos(theta);

    std::vector<double> weight(static_cast<std::size_t>(L));
    for (int i = 1; i <= L; ++i)
        weight[static_cast<std::size_t>(i - 1)] =
            std::pow(static_cast<double>(i), mono->gamma) * std::sin(i * theta);

    PerturbativeQfi out;
    const double prefactor = 4.0 / (spec.J * spec.J * (L + 1.0) * (L + 1.0));
    for (int k = 2; k <= L; ++k) {
        double s = 0.0;
        for (int i = 1; i <= L; ++i)
            s += weight[static_cast<std::size_t>(i - 1)] * std::sin(i * k * theta);
        const double d = std::cos(k * theta) - cos1;
        const double term = prefactor * (s * s) / (d * d);
        out.total += term;
        if (k == 2) out.k2_term = term;
    }
    return out;
}

namespace {

FisherMatrix build_qfi(const std::vector<StateDerivative>& ds) {
    const Eigen::VectorXd& psi = ds.front().psi;
    const auto entry = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        // Real gauge-fixed vectors make the real part of the covariance
        // formula a no-op; complex-capable ports must keep the Re[].
        return 4.0 * (a.dot(b) - a.dot(psi) * psi.dot(b));
    };

    FisherMatrix f;
    f.order = static_cast<int>(ds.size());
    f.kind = FisherKind::Quantum;
    f.method = FisherMethod::FiniteDifference;
    f.entries(0, 0) = entry(ds[0].vector, ds[0].vector);
    if (f.order == 2) {
        f.entries(1, 1) = entry(ds[1].vector, ds[1].vector);
        f.entries(0, 1) = f.entries(1, 0) = entry(ds[0].vector, ds[1].vector);
        f.weak_commutativity_residual = weak_commutativity(psi, ds[0].vector, ds[1].vector);
    }
    f.step1 = ds[0].step;
    f.step2 = ds.size() > 1 ? ds[1].step : 0.0;
    for (const StateDerivative& d : ds) f.degenerate_flagged |= d.degenerate_flagged;
    return f;
}

FisherMatrix build_cfi(const std::vector<StateDerivative>& ds) {
    const Eigen::VectorXd p = probabilities(ds.front().psi);
    std::vector<Eigen::VectorXd> dp;
    dp.reserve(ds.size());
    for (const StateDerivative& d : ds)
        dp.push_back((probabilities(d.psi_plus) - probabilities(d.psi_minus)) / d.step);

    FisherMatrix f;
    f.order = static_cast<int>(ds.size());
    f.kind = FisherKind::Classical;
    f.method = FisherMethod::FiniteDifference;
    f.entries.topLeftCorner(f.order, f.order) = cfi_from_probabilities(p, dp);
    f.step1 = ds[0].step;
    f.step2 = ds.size() > 1 ? ds[1].step : 0.0;
    for (const StateDerivative& d : ds) f.degenerate_flagged |= d.degenerate_flagged;
    return f;
}

std::vector<StateDerivative> all_directions(DerivativeEngine& engine, const StepPolicy& policy) {
    const bool parabolic = std::holds_alternative<Parabolic>(engine.spec().potential);
    std::vector<StateDerivative> ds;
    if (parabolic) {
        ds.push_back(engine.differentiate(Direction::FieldH1, policy));
        ds.push_back(engine.differentiate(Direction::FieldH2, policy));
    } else {
        ds.push_back(engine.differentiate(Direction::FieldH, policy));
    }
    return ds;
}

void check_povm(const ProbeSpec& spec, Povm povm) {
    const bool match = (povm == Povm::PositionBasis && spec.family == Family::SingleParticle) ||
                       (povm == Povm::SpinConfigurationBasis &&
                        spec.family == Family::ManyBodyHalfFilling);
    if (!match) throw std::invalid_argument("cfi_matrix: POVM does not match the probe family");
}

}  // namespace

FisherMatrix qfi_matrix(const ProbeSpec& spec, const StepPolicy& policy) {
    if (!std::holds_alternative<Parabolic>(spec.potential))
        throw std::invalid_argument("qfi_matrix: requires a parabolic potential");
    DerivativeEngine engine(spec);
    return build_qfi(all_directions(engine, policy));
}

Eigen::MatrixXd cfi_from_probabilities(const Eigen::VectorXd& p,
                                       const std::vector<Eigen::VectorXd>& dp, double floor) {
    const int order = static_cast<int>(dp.size());
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(order, order);
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        if (p[k] < floor) continue;
        for (int i = 0; i < order; ++i)
            for (int j = i; j < order; ++j) f(i, j) += dp[static_cast<std::size_t>(i)][k] *
                                                       dp[static_cast<std::size_t>(j)][k] / p[k];
    }
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < i; ++j) f(i, j) = f(j, i);
    return f;
}

FisherMatrix cfi_matrix(const ProbeSpec& spec, Povm povm, const StepPolicy& policy) {
    check_povm(spec, povm);
    DerivativeEngine engine(spec);
    return build_cfi(all_directions(engine, policy));
}

FisherPair fisher_matrices(const ProbeSpec& spec, Povm povm, const StepPolicy& policy) {
    check_povm(spec, povm);
    DerivativeEngine engine(spec);
    const std::vector<StateDerivative> ds = all_directions(engine, policy);
    return {build_qfi(ds), build_cfi(ds)};
}

SldPair sld_pair(const Eigen::VectorXd& psi, const Eigen::VectorXd& dpsi1,
                 const Eigen::VectorXd& dpsi2) {
    if (psi.size() > 4096)
        throw DimensionError("sld_pair: dense SLD construction capped at dimension 4096");
    const Eigen::VectorXd d1 = dpsi1 - psi.dot(dpsi1) * psi;
    const Eigen::VectorXd d2 = dpsi2 - psi.dot(dpsi2) * psi;

    SldPair out;
    out.L1 = 2.0 * (d1 * psi.transpose() + psi * d1.transpose());
    out.L2 = 2.0 * (d2 * psi.transpose() + psi * d2.transpose());
    // Tr(rho [L1, L2]) = psi^T (L1 L2 - L2 L1) psi via matrix-vector products.
    const Eigen::VectorXd u = out.L2 * psi;
    const Eigen::VectorXd v = out.L1 * psi;
    out.trace_commutator = psi.dot(out.L1 * u) - psi.dot(out.L2 * v);
    return out;
}

double sld_defining_residual(const Eigen::VectorXd& psi, const Eigen::VectorXd& dpsi,
                             const Eigen::MatrixXd& sld) {
    const Eigen::MatrixXd rho = psi * psi.transpose();
    const Eigen::MatrixXd drho = dpsi * psi.transpose() + psi * dpsi.transpose();
    const Eigen::MatrixXd lhs = drho - 0.5 * (rho * sld + sld * rho);
    return lhs.norm();
}

double total_uncertainty(const FisherMatrix& f, const Eigen::Matrix2d& weight) {
    if (f.order == 1) {
        const double a = f.entries(0, 0);
        if (!(a > 0.0))
            throw SingularFisherError("total_uncertainty: non-positive Fisher scalar", 0.0);
        return weight(0, 0) / a;
    }
    const double a = f.entries(0, 0);
    const double b = f.entries(1, 1);
    const double c = f.entries(0, 1);
    const double det = a * b - c * c;
    const double half_trace = 0.5 * (a + b);
    const double disc = std::sqrt(std::max(0.0, half_trace * half_trace - det));
    const double lam_min = half_trace - disc;
    const double lam_max = half_trace + disc;
    if (!(det > 0.0) || !(lam_min > 0.0))
        throw SingularFisherError("total_uncertainty: Fisher matrix not positive definite",
                                  lam_min != 0.0 ? std::abs(lam_max / lam_min)
                                                 : std::numeric_limits<double>::infinity());
    // Tr[W F^-1] with the explicit 2x2 inverse.
    const Eigen::Matrix2d inv = (Eigen::Matrix2d() << b, -c, -c, a).finished() / det;
    return (weight * inv).trace();
}

FisherMatrix time_normalized(const FisherMatrix& f, const GapRecord& gap) {
    if (!(gap.gap > 0.0))
        throw std::invalid_argument("time_normalized: gap must be positive");
    FisherMatrix out = f;
    out.entries *= gap.gap;
    return out;
}

}  // namespace stark
