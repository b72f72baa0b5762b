#include "tsoest/so3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tsoest/errors.hpp"

namespace tsoest {

namespace {

// Below this angle log_so3 uses a series for theta / sin(theta).
constexpr double kSmallAngle = 1e-4;

// Above pi - kNearPi the axis comes from the symmetric part of R.
constexpr double kNearPi = 1e-3;

}  // namespace

Rotation Rotation::from_matrix(const Mat3& R, double tol) {
    if (!R.allFinite()) {
        throw NotRotation("rotation matrix has non-finite entries");
    }
    const double residual = (R.transpose() * R - Mat3::Identity()).norm();
    if (residual > tol) {
        throw NotRotation("matrix is not orthogonal (residual " + std::to_string(residual) + ")");
    }
    if (R.determinant() <= 0.0) {
        throw NotRotation("matrix has non-positive determinant");
    }
    return Rotation(R);
}

double Rotation::orthogonality_residual() const {
    return (R_.transpose() * R_ - Mat3::Identity()).norm();
}

Mat3 hat(const Vec3& v) {
    Mat3 S;
    S << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return S;
}

Vec3 vee(const Mat3& S, double tol) {
    if ((S + S.transpose()).norm() > tol) {
        throw NotSkew("vee: matrix is not skew-symmetric");
    }
    const Mat3 K = 0.5 * (S - S.transpose());
    return Vec3(K(2, 1), K(0, 2), K(1, 0));
}

Rotation exp_so3(const Vec3& v) {
    const double theta2 = v.squaredNorm();
    const double theta = std::sqrt(theta2);
    const Mat3 K = hat(v);
    double a;  // sin(theta) / theta
    double b;  // (1 - cos(theta)) / theta^2
    if (theta < kSmallAngle) {
        a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
        b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
    } else {
        a = std::sin(theta) / theta;
        b = (1.0 - std::cos(theta)) / theta2;
    }
    return Rotation::unchecked(Mat3::Identity() + a * K + b * K * K);
}

Vec3 log_so3(const Rotation& rot) {
    const Mat3& R = rot.matrix();
    // 2 sin(theta) * axis
    const Vec3 w(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
    const double s = 0.5 * w.norm();
    const double c = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
    const double theta = std::atan2(s, c);

    if (theta < kSmallAngle) {
        const double t2 = theta * theta;
        // theta / (2 sin theta)
        const double k = 0.5 * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0);
        return k * w;
    }
    if (theta < std::numbers::pi - kNearPi) {
        return (theta / (2.0 * std::sin(theta))) * w;
    }

    // Near pi: (R + R^T)/2 = cos(theta) I + (1 - cos(theta)) a a^T.
    const Mat3 B = (0.5 * (R + R.transpose()) - c * Mat3::Identity()) / (1.0 - c);
    Eigen::Index i = 0;
    B.diagonal().maxCoeff(&i);
    Vec3 axis = B.col(i) / std::sqrt(std::max(B(i, i), 0.0));
    axis.normalize();

    if (w.norm() <= 1e-14) {
        // Exactly pi: both signs are valid; pick the first nonzero component positive.
        for (int k = 0; k < 3; ++k) {
            if (std::abs(axis[k]) > 1e-12) {
                if (axis[k] < 0.0) {
                    axis = -axis;
                }
                break;
            }
        }
    } else if (w.dot(axis) < 0.0) {
        axis = -axis;
    }
    return theta * axis;
}

Mat3 trace_deflate(const Mat3& A) {
    return A.trace() * Mat3::Identity() - A;
}

Mat3 spd_sqrt(const Mat3& A) {
    if ((A - A.transpose()).norm() > 1e-9) {
        throw NotSPD("spd_sqrt: matrix is not symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(0.5 * (A + A.transpose()));
    const Vec3 lambda = eig.eigenvalues();
    if (lambda.minCoeff() <= 0.0) {
        throw NotSPD("spd_sqrt: matrix is not positive definite");
    }
    const Mat3& Q = eig.eigenvectors();
    const Mat3 B = Q * lambda.cwiseSqrt().asDiagonal() * Q.transpose();
    return 0.5 * (B + B.transpose());
}

}  // namespace tsoest
