#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsoest/dynamics.hpp"
#include "tsoest/estimator.hpp"

namespace tsoest {

enum class PotentialKind { Free, GravityGradient, Pendulum3D };
enum class EstimatorMode { Full, AttitudeOnly };
enum class NoiseKind { TruncatedGaussian, UniformEllipsoid, WorstCaseBoundary };

/// Simulation setup. All quantities are in normalized units (orbital rate = 1).
struct Scenario {
    std::string description;
    Vec3 inertia_diag{1.0, 2.8, 2.0};
    PotentialKind potential = PotentialKind::GravityGradient;
    double pendulum_mg = 1.0;
    Vec3 pendulum_rho = Vec3::UnitZ();

    double h = 0.0;
    long n_steps = 0;
    long meas_every = 1;

    std::vector<Vec3> reference_directions;
    std::vector<double> weights;  ///< empty means w_i = 1
    double attitude_noise_bound = 0.0;  ///< rad; S_i = bound^2 I
    double omega_noise_bound = 0.0;     ///< rad/s; T = bound^2 I

    Rotation truth_R0;
    Vec3 truth_Omega0 = Vec3::Zero();
    Rotation est_R0;
    Vec3 est_Omega0 = Vec3::Zero();
    Vec6 P0_diag = Vec6::Ones();

    EstimatorMode mode = EstimatorMode::Full;
    NoiseKind noise = NoiseKind::TruncatedGaussian;
    /// Sampled errors are scaled by this fraction of their bound, in [0, 1].
    double noise_utilization = 1.0;
    std::uint64_t seed = 0;
    int trials = 1;

    RigidBodyModel model() const;
    StateEllipsoid initial_estimate() const;
    State initial_truth() const;

    Mat3 attitude_bound() const;
    Mat3 omega_bound() const;

    /// x0^T P0^-1 x0 for x0 = [log(est_R0^T truth_R0); truth_Omega0 - est_Omega0].
    double initial_error_mahalanobis() const;

    /// Throws ConfigError on the first violated invariant.
    void validate() const;
};

/// Parses a scenario. Unknown keys, wrong types and invalid values raise ConfigError.
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);

std::string to_string(EstimatorMode mode);
EstimatorMode parse_mode(const std::string& s);

}  // namespace tsoest
