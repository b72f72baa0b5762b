#pragma once

#include <memory>

#include "tsoest/so3.hpp"

namespace tsoest {

/// Attitude-dependent potential U : SO(3) -> R.
class PotentialModel {
public:
    virtual ~PotentialModel() = default;

    virtual double energy(const Rotation& R) const = 0;

    /// Element-wise partials dU/dR.
    virtual Mat3 gradient(const Rotation& R) const = 0;

    /// d M(R exp(hat(z))) / dz at z = 0, where M is the moment of the potential.
    /// The default differentiates moment numerically.
    virtual Mat3 moment_jacobian(const Rotation& R) const;
};

class FreeBody final : public PotentialModel {
public:
    double energy(const Rotation&) const override { return 0.0; }
    Mat3 gradient(const Rotation&) const override { return Mat3::Zero(); }
    Mat3 moment_jacobian(const Rotation&) const override { return Mat3::Zero(); }
};

/// Circular-orbit gravity gradient with the orbital rate normalized to one:
/// U(R) = 3/2 e3^T R J R^T e3, e3 the local vertical in the reference frame.
class GravityGradient final : public PotentialModel {
public:
    explicit GravityGradient(const Mat3& inertia) : J_(inertia) {}

    double energy(const Rotation& R) const override;
    Mat3 gradient(const Rotation& R) const override;
    Mat3 moment_jacobian(const Rotation& R) const override;

private:
    Mat3 J_;
};

/// Rigid body on a frictionless pivot: U(R) = -mg e3^T R rho.
class Pendulum3D final : public PotentialModel {
public:
    explicit Pendulum3D(double mg = 1.0, const Vec3& rho = Vec3::UnitZ()) : mg_(mg), rho_(rho) {}

    double energy(const Rotation& R) const override;
    Mat3 gradient(const Rotation& R) const override;
    Mat3 moment_jacobian(const Rotation& R) const override;

    double mg() const { return mg_; }
    const Vec3& rho() const { return rho_; }

private:
    double mg_;
    Vec3 rho_;
};

/// Inertia plus potential. J_d = tr(J)/2 I - J is derived, never set.
class RigidBodyModel {
public:
    /// Throws NotSPD if inertia is not symmetric positive definite.
    RigidBodyModel(const Mat3& inertia, std::shared_ptr<const PotentialModel> potential);

    const Mat3& J() const { return J_; }
    const Mat3& J_d() const { return J_d_; }
    const Mat3& J_inv() const { return J_inv_; }
    const PotentialModel& potential() const { return *potential_; }

private:
    Mat3 J_;
    Mat3 J_d_;
    Mat3 J_inv_;
    std::shared_ptr<const PotentialModel> potential_;
};

struct State {
    Rotation R;
    Vec3 Omega = Vec3::Zero();  ///< body frame, rad/s
};

/// M = r1 x v1 + r2 x v2 + r3 x v3 over the rows of R and dU/dR.
Vec3 moment(const RigidBodyModel& model, const Rotation& R);

/// 1/2 Omega^T J Omega + U(R)
double total_energy(const RigidBodyModel& model, const State& s);

struct NewtonOptions {
    int max_iter = 50;
    double tol = 1e-14;
};

/**
 * Solves h hat(J Omega + h/2 M) = F J_d - J_d F^T for F in SO(3).
 *
 * Newton on the Lie algebra with right updates F <- F exp(hat(d)). The
 * Jacobian of vee(F J_d - J_d F^T) under that update is
 * trace_deflate(F J_d) F. Throws NoConvergence after max_iter iterations.
 */
Rotation solve_relative_attitude(const RigidBodyModel& model, const Vec3& Omega, const Vec3& M,
                                 double h, const NewtonOptions& opts = {});

/// One step of the Lie group variational integrator.
State step(const RigidBodyModel& model, const State& s, double h);

struct StepLinearization {
    State next;
    Mat6 A;  ///< d[zeta'; dOmega'] / d[zeta; dOmega]
};

/// step() together with its Jacobian in the chart R = R_c exp(hat(zeta)), Omega = Omega_c + dOmega.
StepLinearization step_linearized(const RigidBodyModel& model, const State& s, double h);

Mat6 linearize_step(const RigidBodyModel& model, const State& s_center, double h);

}  // namespace tsoest
