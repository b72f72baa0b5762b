#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsoest/scenario.hpp"

namespace tsoest {

/// One CSV row: estimation error and ellipsoid size after an integrator step.
struct StepRecord {
    long step = 0;
    double time = 0.0;
    double zeta_norm_deg = 0.0;
    double domega_norm = 0.0;
    double trace_P = 0.0;
    bool measured = false;
    std::optional<bool> contained;  ///< set at measurement instants only
};

struct TrialResult {
    int trial = 0;
    std::uint64_t seed = 0;
    std::vector<StepRecord> records;

    const StepRecord& terminal() const { return records.back(); }
    /// Truth inside the estimate at every measurement instant.
    bool contained_all() const;
};

/**
 * Bounded noisy measurements of the true state.
 *
 * Direction errors nu_i are drawn inside E(0, S_i) and applied as
 * b_meas = exp(-hat(nu_i)) R^T e_i, so that R^T e_i = exp(hat(nu_i)) b_meas.
 * In full mode the angular velocity reading is Omega - upsilon with
 * upsilon in E(0, T).
 */
MeasurementSet generate_measurements(const State& truth, const Scenario& scenario,
                                     std::mt19937_64& rng);

/// Single trial with the given seed.
TrialResult run_trial(const Scenario& scenario, int trial, std::uint64_t seed);

/// scenario.trials independent trials seeded seed + k.
std::vector<TrialResult> run(const Scenario& scenario);

struct Stats {
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
};

struct Summary {
    int trials = 0;
    EstimatorMode mode = EstimatorMode::Full;
    Stats terminal_zeta_deg;
    Stats terminal_domega;
    Stats terminal_trace_P;
    double containment_rate = 0.0;  ///< fraction of trials with contained_all()
};

Summary summarize(const std::vector<TrialResult>& results, EstimatorMode mode);
nlohmann::json to_json(const Summary& summary, const std::vector<TrialResult>& results);

/// Column order: step,time,zeta_norm_deg,domega_norm,trace_P,measured,contained
std::string to_csv(const TrialResult& result);

/// Writes trial_<k>.csv per trial and summary.json into dir. Throws IoError.
Summary report(const std::vector<TrialResult>& results, EstimatorMode mode,
               const std::filesystem::path& dir);

}  // namespace tsoest
