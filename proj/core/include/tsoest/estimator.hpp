#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tsoest/dynamics.hpp"
#include "tsoest/ellipsoid.hpp"
#include "tsoest/so3.hpp"
#include "tsoest/wahba.hpp"

namespace tsoest {

/**
 * Uncertainty ellipsoid on TSO(3):
 *   {(R_hat exp(hat(zeta)), Omega_hat + dOmega) : [zeta; dOmega]^T P^-1 [zeta; dOmega] <= 1}.
 */
struct StateEllipsoid {
    Rotation R_hat;
    Vec3 Omega_hat = Vec3::Zero();
    Mat6 P = Mat6::Identity();

    /// Chart coordinates [zeta; dOmega] of a state relative to the center.
    Vec6 coordinates(const State& s) const;

    /// True state inside the ellipsoid, with the usual containment slack.
    bool contains(const State& s, double slack = kContainmentSlack) const;

    /// Throws NotSPD if P is not symmetric positive definite.
    void validate() const;
};

/// Direction observations plus an optional angular velocity reading.
struct MeasurementSet {
    std::vector<DirectionObservation> observations;
    std::optional<Vec3> omega_meas;
    std::optional<Mat3> omega_bound;  ///< T; omega error lies in E(0, T)

    bool has_omega() const { return omega_meas.has_value(); }

    /// Throws std::invalid_argument if exactly one of omega_meas, omega_bound is set.
    void validate() const;
};

/// Embeddings of the attitude and angular velocity blocks into R^6.
struct Selector {
    static Eigen::Matrix<double, 6, 3> H1();
    static Eigen::Matrix<double, 6, 3> H2();
};

/// Propagates center and shape l steps; P <- A P A^T per step.
StateEllipsoid flow_update(const RigidBodyModel& model, const StateEllipsoid& E, double h, int l);

struct MeasuredCenter {
    Rotation R;
    std::optional<Vec3> Omega;
};

MeasuredCenter measurement_center(const MeasurementSet& meas);

/// First-order map from direction errors to attitude error: zeta = sum_i A_i nu_i.
std::vector<Mat3> measurement_sensitivities(const Rotation& R_m,
                                            std::span<const DirectionObservation> obs);

/// Measurement ellipsoid. P is 6x6 when angular velocity was measured,
/// otherwise 3x3 covering the attitude only.
struct MeasuredEllipsoid {
    MeasuredCenter center;
    Eigen::MatrixXd P;
};

MeasuredEllipsoid measurement_update(const MeasurementSet& meas);

/// Fuses a prediction with a full (attitude and angular velocity) measurement ellipsoid.
StateEllipsoid filter_step(const StateEllipsoid& pred, const Rotation& R_m, const Vec3& Omega_m,
                           const Mat6& Pm);

/// Fuses a prediction with an attitude-only measurement, a set unbounded in dOmega.
StateEllipsoid filter_step_attitude_only(const StateEllipsoid& pred, const Rotation& R_m,
                                         const Mat3& Pm_att);

/// Measurement update followed by the matching filter step.
StateEllipsoid assimilate(const StateEllipsoid& pred, const MeasurementSet& meas);

struct ScheduledMeasurement {
    double time = 0.0;
    MeasurementSet meas;
};

struct EstimateRecord {
    long step = 0;
    double time = 0.0;
    bool measured = false;
    StateEllipsoid E;
};

/**
 * Runs the filter from t = 0 through the last scheduled measurement, or
 * through n_steps if that is later.
 *
 * Returns one record per integrator step, the step-0 record holding E0.
 * Measurement times must be strictly increasing positive multiples of h;
 * std::invalid_argument otherwise.
 */
std::vector<EstimateRecord> estimate(const RigidBodyModel& model, const StateEllipsoid& E0,
                                     std::span<const ScheduledMeasurement> schedule, double h,
                                     long n_steps = 0);

}  // namespace tsoest
