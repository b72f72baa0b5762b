#include "tsoest/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tsoest/errors.hpp"

namespace tsoest {

namespace {

Mat6 symmetrized(const Mat6& P) {
    return 0.5 * (P + P.transpose());
}

Vec3 center_offset(const Rotation& R_m, const Rotation& R_f) {
    const Vec3 zeta = log_so3(R_m.transpose() * R_f);
    if (zeta.norm() >= std::numbers::pi * (1.0 - 1e-12)) {
        throw ChartOverflow("predicted and measured attitudes are antipodal");
    }
    return zeta;
}

}  // namespace

Vec6 StateEllipsoid::coordinates(const State& s) const {
    Vec6 x;
    x.head<3>() = log_so3(R_hat.transpose() * s.R);
    x.tail<3>() = s.Omega - Omega_hat;
    return x;
}

bool StateEllipsoid::contains(const State& s, double slack) const {
    const Vec6 x = coordinates(s);
    return x.dot(P.ldlt().solve(x)) <= 1.0 + slack;
}

void StateEllipsoid::validate() const {
    if (!P.allFinite() || (P - P.transpose()).norm() > 1e-9 * std::max(1.0, P.norm())) {
        throw NotSPD("state uncertainty matrix is not symmetric");
    }
    if (Eigen::LLT<Mat6>(symmetrized(P)).info() != Eigen::Success) {
        throw NotSPD("state uncertainty matrix is not positive definite");
    }
}

void MeasurementSet::validate() const {
    if (omega_meas.has_value() != omega_bound.has_value()) {
        throw std::invalid_argument("omega_meas and omega_bound must be given together");
    }
}

Eigen::Matrix<double, 6, 3> Selector::H1() {
    Eigen::Matrix<double, 6, 3> H = Eigen::Matrix<double, 6, 3>::Zero();
    H.topRows<3>().setIdentity();
    return H;
}

Eigen::Matrix<double, 6, 3> Selector::H2() {
    Eigen::Matrix<double, 6, 3> H = Eigen::Matrix<double, 6, 3>::Zero();
    H.bottomRows<3>().setIdentity();
    return H;
}

StateEllipsoid flow_update(const RigidBodyModel& model, const StateEllipsoid& E, double h, int l) {
    if (l < 1 || !(h > 0.0)) {
        throw std::invalid_argument("flow_update: need l >= 1 and h > 0");
    }
    StateEllipsoid out = E;
    State center{E.R_hat, E.Omega_hat};
    for (int k = 0; k < l; ++k) {
        const StepLinearization lin = step_linearized(model, center, h);
        out.P = symmetrized(lin.A * out.P * lin.A.transpose());
        center = lin.next;
    }
    out.R_hat = center.R;
    out.Omega_hat = center.Omega;
    return out;
}

MeasuredCenter measurement_center(const MeasurementSet& meas) {
    meas.validate();
    return {solve(profile_matrix(meas.observations)), meas.omega_meas};
}

std::vector<Mat3> measurement_sensitivities(const Rotation& R_m,
                                            std::span<const DirectionObservation> obs) {
    const Mat3& R = R_m.matrix();
    const Mat3 D = trace_deflate(R.transpose() * profile_matrix(obs).L);
    const Eigen::FullPivLU<Mat3> lu(D);
    if (!lu.isInvertible()) {
        throw DegenerateProfile("measurement sensitivity matrix is singular");
    }
    std::vector<Mat3> sens;
    sens.reserve(obs.size());
    for (const auto& o : obs) {
        sens.push_back(-o.weight * lu.solve(trace_deflate(o.b_meas * o.e_ref.transpose() * R)));
    }
    return sens;
}

MeasuredEllipsoid measurement_update(const MeasurementSet& meas) {
    MeasuredEllipsoid out{measurement_center(meas), {}};
    const auto sens = measurement_sensitivities(out.center.R, meas.observations);

    std::vector<Ellipsoid> parts;
    parts.reserve(meas.observations.size() + 1);
    if (meas.has_omega()) {
        const auto H1 = Selector::H1();
        const auto H2 = Selector::H2();
        for (std::size_t i = 0; i < sens.size(); ++i) {
            const Mat3 Pa = sens[i] * meas.observations[i].noise_bound * sens[i].transpose();
            parts.push_back(Ellipsoid::centered(H1 * Pa * H1.transpose()));
        }
        parts.push_back(Ellipsoid::centered(H2 * (*meas.omega_bound) * H2.transpose()));
    } else {
        for (std::size_t i = 0; i < sens.size(); ++i) {
            parts.push_back(Ellipsoid::centered(sens[i] * meas.observations[i].noise_bound *
                                                sens[i].transpose()));
        }
    }
    out.P = outer_sum(parts).shape();
    return out;
}

StateEllipsoid filter_step(const StateEllipsoid& pred, const Rotation& R_m, const Vec3& Omega_m,
                           const Mat6& Pm) {
    Vec6 x_mf;
    x_mf.head<3>() = center_offset(R_m, pred.R_hat);
    x_mf.tail<3>() = pred.Omega_hat - Omega_m;

    const FusionResult fused =
        fuse_intersection(Ellipsoid::centered(Pm), Ellipsoid(x_mf, pred.P));

    StateEllipsoid out;
    out.R_hat = R_m * exp_so3(fused.center.head<3>());
    out.Omega_hat = Omega_m + fused.center.tail<3>();
    out.P = symmetrized(fused.shape);
    return out;
}

StateEllipsoid filter_step_attitude_only(const StateEllipsoid& pred, const Rotation& R_m,
                                         const Mat3& Pm_att) {
    // Both charts share the predicted angular velocity, so the offset has no dOmega part.
    Vec6 x_mf = Vec6::Zero();
    x_mf.head<3>() = center_offset(R_m, pred.R_hat);

    const Eigen::LLT<Mat3> llt(Pm_att);
    if (llt.info() != Eigen::Success) {
        throw NotSPD("attitude measurement bound is not positive definite");
    }
    const auto H1 = Selector::H1();
    const InfoEllipsoid meas{Vec6::Zero(), H1 * llt.solve(Mat3::Identity()) * H1.transpose()};

    const FusionResult fused = fuse_intersection(Ellipsoid(x_mf, pred.P), meas);

    StateEllipsoid out;
    out.R_hat = R_m * exp_so3(fused.center.head<3>());
    out.Omega_hat = pred.Omega_hat + fused.center.tail<3>();
    out.P = symmetrized(fused.shape);
    return out;
}

StateEllipsoid assimilate(const StateEllipsoid& pred, const MeasurementSet& meas) {
    const MeasuredEllipsoid m = measurement_update(meas);
    if (m.center.Omega) {
        return filter_step(pred, m.center.R, *m.center.Omega, Mat6(m.P));
    }
    return filter_step_attitude_only(pred, m.center.R, Mat3(m.P));
}

std::vector<EstimateRecord> estimate(const RigidBodyModel& model, const StateEllipsoid& E0,
                                     std::span<const ScheduledMeasurement> schedule, double h,
                                     long n_steps) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("estimate: h must be positive");
    }
    std::vector<long> meas_steps;
    meas_steps.reserve(schedule.size());
    for (const auto& sm : schedule) {
        const double k = sm.time / h;
        const long ki = std::lround(k);
        if (std::abs(k - static_cast<double>(ki)) > 1e-9 * std::max(1.0, std::abs(k))) {
            throw std::invalid_argument("measurement time " + std::to_string(sm.time) +
                                        " is not a multiple of h");
        }
        if (ki < 1 || (!meas_steps.empty() && ki <= meas_steps.back())) {
            throw std::invalid_argument("measurement times must be positive and strictly increasing");
        }
        meas_steps.push_back(ki);
    }
    const long last = std::max(n_steps, meas_steps.empty() ? 0L : meas_steps.back());

    std::vector<EstimateRecord> records;
    records.reserve(static_cast<std::size_t>(last) + 1);
    records.push_back({0, 0.0, false, E0});

    StateEllipsoid E = E0;
    std::size_t next = 0;
    for (long k = 1; k <= last; ++k) {
        E = flow_update(model, E, h, 1);
        bool measured = false;
        if (next < meas_steps.size() && meas_steps[next] == k) {
            E = assimilate(E, schedule[next].meas);
            measured = true;
            ++next;
        }
        records.push_back({k, static_cast<double>(k) * h, measured, E});
    }
    return records;
}

}  // namespace tsoest
