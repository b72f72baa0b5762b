#pragma once

#include <Eigen/Dense>

namespace tsoest {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/**
 * Attitude as an element of SO(3).
 *
 * The wrapped matrix maps body-frame vectors into the reference frame.
 * Construction from an arbitrary matrix is checked; products of rotations
 * are not re-checked.
 */
class Rotation {
public:
    static constexpr double kOrthogonalityTol = 1e-12;

    Rotation() : R_(Mat3::Identity()) {}

    /// Throws NotRotation unless ||R^T R - I||_F <= tol and det(R) > 0.
    static Rotation from_matrix(const Mat3& R, double tol = kOrthogonalityTol);

    /// Wraps R without validation. Caller guarantees R in SO(3).
    static Rotation unchecked(const Mat3& R) { return Rotation(R); }

    static Rotation identity() { return Rotation(); }

    const Mat3& matrix() const { return R_; }
    Rotation transpose() const { return Rotation(R_.transpose()); }

    /// ||R^T R - I||_F
    double orthogonality_residual() const;

    Rotation operator*(const Rotation& other) const { return Rotation(R_ * other.R_); }
    Vec3 operator*(const Vec3& v) const { return R_ * v; }

private:
    explicit Rotation(const Mat3& R) : R_(R) {}
    Mat3 R_;
};

/// Skew map: hat(v) * w == v.cross(w).
Mat3 hat(const Vec3& v);

/// Inverse of hat. Throws NotSkew when ||S + S^T||_F > tol.
Vec3 vee(const Mat3& S, double tol = 1e-9);

/// Rodrigues formula.
Rotation exp_so3(const Vec3& v);

/// Principal logarithm, ||result|| <= pi.
///
/// At exactly pi the axis sign is fixed so that its first nonzero
/// component is positive.
Vec3 log_so3(const Rotation& R);

/// tr(A) I - A. Satisfies hat(x) A + A^T hat(x) == hat(trace_deflate(A) x).
Mat3 trace_deflate(const Mat3& A);

/// Principal square root of a symmetric positive definite matrix.
Mat3 spd_sqrt(const Mat3& A);

}  // namespace tsoest
