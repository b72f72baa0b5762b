#include "tsoest/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "tsoest/errors.hpp"

namespace tsoest {

namespace {

Vec3 moment_of(const PotentialModel& potential, const Rotation& R) {
    const Mat3 G = potential.gradient(R);
    const Mat3& Rm = R.matrix();
    Vec3 M = Vec3::Zero();
    for (int i = 0; i < 3; ++i) {
        M += Rm.row(i).transpose().cross(G.row(i).transpose());
    }
    return M;
}

}  // namespace

Mat3 PotentialModel::moment_jacobian(const Rotation& R) const {
    constexpr double eps = 1e-6;
    Mat3 K;
    for (int j = 0; j < 3; ++j) {
        const Vec3 dz = eps * Vec3::Unit(j);
        const Vec3 Mp = moment_of(*this, R * exp_so3(dz));
        const Vec3 Mm = moment_of(*this, R * exp_so3(-dz));
        K.col(j) = (Mp - Mm) / (2.0 * eps);
    }
    return K;
}

double GravityGradient::energy(const Rotation& R) const {
    const Vec3 r = R.matrix().transpose() * Vec3::UnitZ();
    return 1.5 * r.dot(J_ * r);
}

Mat3 GravityGradient::gradient(const Rotation& R) const {
    const Vec3 e3 = Vec3::UnitZ();
    return 3.0 * e3 * e3.transpose() * R.matrix() * J_;
}

Mat3 GravityGradient::moment_jacobian(const Rotation& R) const {
    // M = 3 r x J r with r = R^T e3, and dr = hat(r) dz.
    const Vec3 r = R.matrix().transpose() * Vec3::UnitZ();
    return 3.0 * (hat(r) * J_ - hat(J_ * r)) * hat(r);
}

double Pendulum3D::energy(const Rotation& R) const {
    return -mg_ * Vec3::UnitZ().dot(R * rho_);
}

Mat3 Pendulum3D::gradient(const Rotation&) const {
    return -mg_ * Vec3::UnitZ() * rho_.transpose();
}

Mat3 Pendulum3D::moment_jacobian(const Rotation& R) const {
    // M = mg rho x r with r = R^T e3.
    const Vec3 r = R.matrix().transpose() * Vec3::UnitZ();
    return mg_ * hat(rho_) * hat(r);
}

RigidBodyModel::RigidBodyModel(const Mat3& inertia, std::shared_ptr<const PotentialModel> potential)
    : J_(inertia), potential_(std::move(potential)) {
    if (!potential_) {
        potential_ = std::make_shared<FreeBody>();
    }
    if ((J_ - J_.transpose()).norm() > 1e-12 * std::max(1.0, J_.norm())) {
        throw NotSPD("inertia matrix is not symmetric");
    }
    J_ = 0.5 * (J_ + J_.transpose());
    const Eigen::LLT<Mat3> llt(J_);
    if (llt.info() != Eigen::Success) {
        throw NotSPD("inertia matrix is not positive definite");
    }
    J_inv_ = llt.solve(Mat3::Identity());
    J_d_ = 0.5 * J_.trace() * Mat3::Identity() - J_;
}

Vec3 moment(const RigidBodyModel& model, const Rotation& R) {
    return moment_of(model.potential(), R);
}

double total_energy(const RigidBodyModel& model, const State& s) {
    return 0.5 * s.Omega.dot(model.J() * s.Omega) + model.potential().energy(s.R);
}

Rotation solve_relative_attitude(const RigidBodyModel& model, const Vec3& Omega, const Vec3& M,
                                 double h, const NewtonOptions& opts) {
    const Mat3& Jd = model.J_d();
    const Vec3 y = model.J() * Omega + 0.5 * h * M;
    const Vec3 target = h * y;
    const double tol = opts.tol * std::max(1.0, (model.J() * Omega).norm());

    Rotation F = exp_so3(model.J_inv() * target);
    double res_norm = 0.0;
    for (int it = 0; it <= opts.max_iter; ++it) {
        const Mat3 FJd = F.matrix() * Jd;
        const Mat3 skew = FJd - FJd.transpose();
        const Vec3 residual = Vec3(skew(2, 1), skew(0, 2), skew(1, 0)) - target;
        res_norm = residual.norm();
        if (res_norm <= tol) {
            return F;
        }
        if (it == opts.max_iter) {
            break;
        }
        const Mat3 jac = trace_deflate(FJd) * F.matrix();
        const Vec3 delta = -jac.partialPivLu().solve(residual);
        if (!delta.allFinite()) {
            break;
        }
        F = F * exp_so3(delta);
        // Roundoff floor: once the update is negligible accept a residual
        // within ten times the tolerance.
        if (delta.norm() < 1e-16 && res_norm <= 10.0 * tol) {
            return F;
        }
    }
    throw NoConvergence("relative attitude solve did not converge (residual " +
                        std::to_string(res_norm) + ")");
}

State step(const RigidBodyModel& model, const State& s, double h) {
    const Vec3 M0 = moment(model, s.R);
    const Rotation F = solve_relative_attitude(model, s.Omega, M0, h);
    State next;
    next.R = s.R * F;
    const Vec3 M1 = moment(model, next.R);
    const Mat3 Ft = F.matrix().transpose();
    const Vec3 Pi = Ft * (model.J() * s.Omega) + 0.5 * h * Ft * M0 + 0.5 * h * M1;
    next.Omega = model.J_inv() * Pi;
    return next;
}

StepLinearization step_linearized(const RigidBodyModel& model, const State& s, double h) {
    const PotentialModel& U = model.potential();
    const Mat3& J = model.J();

    const Vec3 M0 = moment(model, s.R);
    const Rotation F = solve_relative_attitude(model, s.Omega, M0, h);
    const Mat3& Fm = F.matrix();
    const Mat3 Ft = Fm.transpose();

    StepLinearization out;
    out.next.R = s.R * F;
    const Vec3 M1 = moment(model, out.next.R);
    const Vec3 y = J * s.Omega + 0.5 * h * M0;
    out.next.Omega = model.J_inv() * (Ft * y + 0.5 * h * M1);

    const Mat3 K0 = U.moment_jacobian(s.R);
    const Mat3 K1 = U.moment_jacobian(out.next.R);

    // F = F_c exp(hat(phi)) with phi = h B dy, B = (trace_deflate(F_c J_d) F_c)^-1.
    const Mat3 B = (trace_deflate(Fm * model.J_d()) * Fm).inverse();

    // dy = [h/2 K0, J] x
    Eigen::Matrix<double, 3, 6> dy;
    dy << 0.5 * h * K0, J;
    const Eigen::Matrix<double, 3, 6> dphi = h * B * dy;

    Eigen::Matrix<double, 3, 6> dzeta1 = dphi;
    dzeta1.leftCols<3>() += Ft;

    // J dOmega' = hat(F^T y) phi + F^T dy + h/2 K1 zeta'
    const Eigen::Matrix<double, 3, 6> dpi = hat(Ft * y) * dphi + Ft * dy + 0.5 * h * K1 * dzeta1;

    out.A.topRows<3>() = dzeta1;
    out.A.bottomRows<3>() = model.J_inv() * dpi;
    return out;
}

Mat6 linearize_step(const RigidBodyModel& model, const State& s_center, double h) {
    return step_linearized(model, s_center, h).A;
}

}  // namespace tsoest
