#pragma once

#include <span>

#include "tsoest/so3.hpp"

namespace tsoest {

/// One direction sensor reading: a known reference direction and the
/// same direction as measured in the body frame.
struct DirectionObservation {
    Vec3 e_ref;                           ///< unit, reference frame
    Vec3 b_meas;                          ///< unit, body frame
    double weight = 1.0;                  ///< w_i > 0
    Mat3 noise_bound = Mat3::Identity();  ///< S_i, rad^2; nu_i lies in E(0, S_i)
};

/// L = sum_i w_i e_i b_i^T.
struct AttitudeProfile {
    Mat3 L = Mat3::Zero();
};

AttitudeProfile profile_matrix(std::span<const DirectionObservation> obs);

/**
 * Attitude minimizing the weighted Wahba loss for the given profile.
 *
 * Uses the QR closed form R = (Q_q sqrt((Q_r Q_r^T)^-1) Q_q^T) L with
 * Q_q in SO(3). That form is the orthogonal polar factor of L and lies in
 * SO(3) only when det(L) > 0; for det(L) < 0 the polar factor is
 * composed with the reflection across the weakest principal direction,
 * which yields the constrained global minimizer.
 *
 * Throws DegenerateProfile when |det L| <= 1e-12 ||L||^3.
 */
Rotation solve(const AttitudeProfile& profile);

/// 1/2 sum_i w_i |e_i - R b_i|^2
double objective(const Rotation& R, std::span<const DirectionObservation> obs);

}  // namespace tsoest
