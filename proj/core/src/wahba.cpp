#include "tsoest/wahba.hpp"

#include <cmath>
#include <limits>

#include "tsoest/errors.hpp"

namespace tsoest {

namespace {

constexpr double kSingularRatio = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

AttitudeProfile profile_matrix(std::span<const DirectionObservation> obs) {
    AttitudeProfile profile;
    for (const auto& o : obs) {
        profile.L += o.weight * o.e_ref * o.b_meas.transpose();
    }
    return profile;
}

Rotation solve(const AttitudeProfile& profile) {
    const Mat3& L = profile.L;
    const double scale = L.norm();
    const double det = L.determinant();
    if (!(scale > 0.0) || std::abs(det) <= kSingularRatio * scale * scale * scale) {
        throw DegenerateProfile("attitude profile matrix is singular");
    }

    const Eigen::HouseholderQR<Mat3> qr(L);
    Mat3 Qq = qr.householderQ();
    Mat3 Qr = qr.matrixQR().triangularView<Eigen::Upper>();

    // Nonnegative diagonal on Q_r, then force det(Q_q) = +1.
    for (int i = 0; i < 3; ++i) {
        if (Qr(i, i) < 0.0) {
            Qq.col(i) *= -1.0;
            Qr.row(i) *= -1.0;
        }
    }
    if (Qq.determinant() < 0.0) {
        Qq.col(2) *= -1.0;
        Qr.row(2) *= -1.0;
    }

    const Mat3 QrQrT = Qr * Qr.transpose();
    const Mat3 inv_root = spd_sqrt(0.5 * (QrQrT + QrQrT.transpose())).inverse();
    Mat3 R = Qq * inv_root * Qq.transpose() * L;

    if (det < 0.0) {
        // R is a reflection here. With L = R S, S = (L^T L)^(1/2), the best
        // proper rotation is R (I - 2 v v^T), v the weakest eigenvector of S.
        const Eigen::SelfAdjointEigenSolver<Mat3> eig(L.transpose() * L);
        const Vec3 v = eig.eigenvectors().col(0);
        R = R * (Mat3::Identity() - 2.0 * v * v.transpose());
    }

    // One polar step removes the roundoff left by the square root.
    R = 0.5 * (R + R.transpose().inverse());

    // Newton steps on the stationarity condition skew(R^T L) = 0. The square
    // roots above lose accuracy as L becomes ill conditioned; this recovers it.
    for (int it = 0; it < 2; ++it) {
        const Mat3 M = R.transpose() * L;
        const Mat3 S = 0.5 * (M + M.transpose());
        const Vec3 g = vee(M - M.transpose(), kInf);
        const Vec3 w = (S.trace() * Mat3::Identity() - S).ldlt().solve(g);
        if (!w.allFinite()) break;
        R = R * exp_so3(w).matrix();
    }
    return Rotation::from_matrix(R);
}

double objective(const Rotation& R, std::span<const DirectionObservation> obs) {
    double J = 0.0;
    for (const auto& o : obs) {
        J += o.weight * (o.e_ref - R * o.b_meas).squaredNorm();
    }
    return 0.5 * J;
}

}  // namespace tsoest
