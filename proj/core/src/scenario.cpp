#include "tsoest/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "tsoest/errors.hpp"

namespace tsoest {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys = {
    "description", "inertia_diag", "potential", "h", "n_steps", "meas_every",
    "reference_directions", "weights", "attitude_noise_bound", "omega_noise_bound",
    "truth_R0", "truth_Omega0", "est_R0", "est_Omega0", "P0_diag", "mode", "noise",
    "noise_utilization", "seed", "trials"};

template <int N>
Eigen::Matrix<double, N, 1> read_vec(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != N) {
        throw ConfigError("'" + key + "' must be an array of " + std::to_string(N) + " numbers");
    }
    Eigen::Matrix<double, N, 1> v;
    for (int i = 0; i < N; ++i) {
        if (!j[i].is_number()) {
            throw ConfigError("'" + key + "' must contain numbers");
        }
        v[i] = j[i].get<double>();
    }
    if (!v.allFinite()) {
        throw ConfigError("'" + key + "' has non-finite entries");
    }
    return v;
}

double read_number(const json& j, const std::string& key) {
    if (!j.is_number()) {
        throw ConfigError("'" + key + "' must be a number");
    }
    return j.get<double>();
}

long read_integer(const json& j, const std::string& key) {
    if (!j.is_number_integer()) {
        throw ConfigError("'" + key + "' must be an integer");
    }
    return j.get<long>();
}

// Three entries: rotation vector (axis * angle). Nine: row-major matrix.
Rotation read_rotation(const json& j, const std::string& key) {
    if (j.is_array() && j.size() == 3) {
        return exp_so3(read_vec<3>(j, key));
    }
    if (j.is_array() && j.size() == 9) {
        const auto v = read_vec<9>(j, key);
        Mat3 R;
        R << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
        try {
            return Rotation::from_matrix(R, 1e-9);
        } catch (const NotRotation& e) {
            throw ConfigError("'" + key + "': " + e.what());
        }
    }
    throw ConfigError("'" + key + "' must be a rotation vector (3 numbers) or a row-major matrix (9 numbers)");
}

void read_potential(const json& j, Scenario& sc) {
    std::string type;
    if (j.is_string()) {
        type = j.get<std::string>();
    } else if (j.is_object()) {
        for (const auto& [k, _] : j.items()) {
            if (k != "type" && k != "mg" && k != "rho") {
                throw ConfigError("unknown key 'potential." + k + "'");
            }
        }
        if (!j.contains("type") || !j["type"].is_string()) {
            throw ConfigError("'potential.type' must be a string");
        }
        type = j["type"].get<std::string>();
        if (j.contains("mg")) {
            sc.pendulum_mg = read_number(j["mg"], "potential.mg");
        }
        if (j.contains("rho")) {
            sc.pendulum_rho = read_vec<3>(j["rho"], "potential.rho");
        }
    } else {
        throw ConfigError("'potential' must be a string or an object");
    }
    if (type == "free") {
        sc.potential = PotentialKind::Free;
    } else if (type == "gravity_gradient") {
        sc.potential = PotentialKind::GravityGradient;
    } else if (type == "pendulum3d") {
        sc.potential = PotentialKind::Pendulum3D;
    } else {
        throw ConfigError("unknown potential '" + type + "'");
    }
}

NoiseKind parse_noise(const std::string& s) {
    if (s == "truncated_gaussian") return NoiseKind::TruncatedGaussian;
    if (s == "uniform_ellipsoid") return NoiseKind::UniformEllipsoid;
    if (s == "worst_case_boundary") return NoiseKind::WorstCaseBoundary;
    throw ConfigError("unknown noise model '" + s + "'");
}

std::string read_string(const json& j, const std::string& key) {
    if (!j.is_string()) {
        throw ConfigError("'" + key + "' must be a string");
    }
    return j.get<std::string>();
}

}  // namespace

std::string to_string(EstimatorMode mode) {
    return mode == EstimatorMode::Full ? "full" : "attitude_only";
}

EstimatorMode parse_mode(const std::string& s) {
    if (s == "full") return EstimatorMode::Full;
    if (s == "attitude_only") return EstimatorMode::AttitudeOnly;
    throw ConfigError("unknown mode '" + s + "'");
}

RigidBodyModel Scenario::model() const {
    const Mat3 J = inertia_diag.asDiagonal();
    std::shared_ptr<const PotentialModel> U;
    switch (potential) {
        case PotentialKind::Free:
            U = std::make_shared<FreeBody>();
            break;
        case PotentialKind::GravityGradient:
            U = std::make_shared<GravityGradient>(J);
            break;
        case PotentialKind::Pendulum3D:
            U = std::make_shared<Pendulum3D>(pendulum_mg, pendulum_rho);
            break;
    }
    return RigidBodyModel(J, std::move(U));
}

StateEllipsoid Scenario::initial_estimate() const {
    StateEllipsoid E;
    E.R_hat = est_R0;
    E.Omega_hat = est_Omega0;
    E.P = P0_diag.asDiagonal();
    return E;
}

State Scenario::initial_truth() const {
    return {truth_R0, truth_Omega0};
}

Mat3 Scenario::attitude_bound() const {
    return attitude_noise_bound * attitude_noise_bound * Mat3::Identity();
}

Mat3 Scenario::omega_bound() const {
    return omega_noise_bound * omega_noise_bound * Mat3::Identity();
}

double Scenario::initial_error_mahalanobis() const {
    const Vec6 x = initial_estimate().coordinates(initial_truth());
    return x.dot(x.cwiseQuotient(P0_diag));
}

void Scenario::validate() const {
    if (!(h > 0.0)) throw ConfigError("h must be positive");
    if (n_steps < 1) throw ConfigError("n_steps must be at least 1");
    if (meas_every < 1 || meas_every > n_steps) {
        throw ConfigError("meas_every must lie in [1, n_steps]");
    }
    if ((inertia_diag.array() <= 0.0).any()) {
        throw ConfigError("inertia_diag entries must be positive");
    }
    if ((P0_diag.array() <= 0.0).any()) {
        throw ConfigError("P0_diag entries must be positive");
    }
    if (!(attitude_noise_bound > 0.0)) throw ConfigError("attitude_noise_bound must be positive");
    if (mode == EstimatorMode::Full && !(omega_noise_bound > 0.0)) {
        throw ConfigError("omega_noise_bound must be positive in full mode");
    }
    if (omega_noise_bound < 0.0) throw ConfigError("omega_noise_bound must be nonnegative");
    if (!(noise_utilization >= 0.0 && noise_utilization <= 1.0)) {
        throw ConfigError("noise_utilization must lie in [0, 1]");
    }
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (reference_directions.empty()) throw ConfigError("reference_directions must not be empty");
    for (const auto& e : reference_directions) {
        if (std::abs(e.norm() - 1.0) > 1e-9) {
            throw ConfigError("reference directions must be unit vectors");
        }
    }
    if (!weights.empty()) {
        if (weights.size() != reference_directions.size()) {
            throw ConfigError("weights must match reference_directions in length");
        }
        for (double w : weights) {
            if (!(w > 0.0)) throw ConfigError("weights must be positive");
        }
    }
    // Attitude must be observable from the reference directions.
    std::vector<DirectionObservation> obs;
    for (std::size_t i = 0; i < reference_directions.size(); ++i) {
        obs.push_back({reference_directions[i], reference_directions[i],
                       weights.empty() ? 1.0 : weights[i], attitude_bound()});
    }
    try {
        (void)solve(profile_matrix(obs));
    } catch (const DegenerateProfile&) {
        throw ConfigError("reference directions do not determine the attitude");
    }
    const double m = initial_error_mahalanobis();
    if (m > 1.0) {
        throw ConfigError("initial error lies outside the initial ellipsoid (x0^T P0^-1 x0 = " +
                          std::to_string(m) + ")");
    }
}

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) {
        throw ConfigError("scenario must be a JSON object");
    }
    for (const auto& [k, _] : j.items()) {
        if (!kKnownKeys.contains(k)) {
            throw ConfigError("unknown key '" + k + "'");
        }
    }
    for (const char* k : {"h", "n_steps", "meas_every", "reference_directions",
                          "attitude_noise_bound", "truth_R0", "truth_Omega0", "est_R0",
                          "est_Omega0", "P0_diag"}) {
        if (!j.contains(k)) {
            throw ConfigError(std::string("missing key '") + k + "'");
        }
    }

    Scenario sc;
    if (j.contains("description")) sc.description = read_string(j["description"], "description");
    if (j.contains("inertia_diag")) sc.inertia_diag = read_vec<3>(j["inertia_diag"], "inertia_diag");
    if (j.contains("potential")) read_potential(j["potential"], sc);
    sc.h = read_number(j["h"], "h");
    sc.n_steps = read_integer(j["n_steps"], "n_steps");
    sc.meas_every = read_integer(j["meas_every"], "meas_every");

    const json& dirs = j["reference_directions"];
    if (!dirs.is_array()) throw ConfigError("'reference_directions' must be an array");
    for (const auto& d : dirs) {
        sc.reference_directions.push_back(read_vec<3>(d, "reference_directions[]"));
    }
    if (j.contains("weights")) {
        const json& w = j["weights"];
        if (!w.is_array()) throw ConfigError("'weights' must be an array");
        for (const auto& x : w) sc.weights.push_back(read_number(x, "weights[]"));
    }
    sc.attitude_noise_bound = read_number(j["attitude_noise_bound"], "attitude_noise_bound");
    if (j.contains("omega_noise_bound")) {
        sc.omega_noise_bound = read_number(j["omega_noise_bound"], "omega_noise_bound");
    }
    sc.truth_R0 = read_rotation(j["truth_R0"], "truth_R0");
    sc.truth_Omega0 = read_vec<3>(j["truth_Omega0"], "truth_Omega0");
    sc.est_R0 = read_rotation(j["est_R0"], "est_R0");
    sc.est_Omega0 = read_vec<3>(j["est_Omega0"], "est_Omega0");
    sc.P0_diag = read_vec<6>(j["P0_diag"], "P0_diag");
    if (j.contains("mode")) sc.mode = parse_mode(read_string(j["mode"], "mode"));
    if (j.contains("noise")) sc.noise = parse_noise(read_string(j["noise"], "noise"));
    if (j.contains("noise_utilization")) {
        sc.noise_utilization = read_number(j["noise_utilization"], "noise_utilization");
    }
    if (j.contains("seed")) {
        const long seed = read_integer(j["seed"], "seed");
        if (seed < 0) throw ConfigError("seed must be nonnegative");
        sc.seed = static_cast<std::uint64_t>(seed);
    }
    if (j.contains("trials")) sc.trials = static_cast<int>(read_integer(j["trials"], "trials"));
    sc.validate();
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open scenario file " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

}  // namespace tsoest
