#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "tsoest/errors.hpp"
#include "tsoest/simulator.hpp"

using namespace tsoest;
using nlohmann::json;

namespace {

std::filesystem::path fixture(const char* name) {
    return std::filesystem::path(TSOEST_SCENARIO_DIR) / name;
}

json fixture_json(const char* name) {
    std::ifstream in(fixture(name));
    return json::parse(in);
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n' ? 1 : 0;
    return n;
}

}  // namespace

TEST(Scenario, FixturesLoadAndMatchInitialCondition) {
    for (const char* name : {"paper_sec5_full.json", "paper_sec5_attitude_only.json"}) {
        const Scenario sc = load_scenario(fixture(name));
        EXPECT_NEAR(sc.initial_error_mahalanobis(), 0.7553, 1e-3) << name;
        const Vec6 x0 = sc.initial_estimate().coordinates(sc.initial_truth());
        EXPECT_NEAR(x0.head<3>().norm(), std::numbers::pi, 1e-12);
        EXPECT_NEAR(x0.tail<3>().norm() * 180.0 / std::numbers::pi, 21.43, 0.01);
    }
    EXPECT_EQ(load_scenario(fixture("paper_sec5_attitude_only.json")).mode, EstimatorMode::AttitudeOnly);
}

TEST(Scenario, RejectsUnknownAndMissingKeys) {
    json j = fixture_json("paper_sec5_full.json");
    j["bogus"] = 1;
    EXPECT_THROW(scenario_from_json(j), ConfigError);

    j = fixture_json("paper_sec5_full.json");
    j.erase("h");
    EXPECT_THROW(scenario_from_json(j), ConfigError);

    j = fixture_json("paper_sec5_full.json");
    j["potential"] = {{"type", "pendulum3d"}, {"length", 2}};
    EXPECT_THROW(scenario_from_json(j), ConfigError);

    j = fixture_json("paper_sec5_full.json");
    j["n_steps"] = 1.5;
    EXPECT_THROW(scenario_from_json(j), ConfigError);

    EXPECT_THROW(load_scenario(fixture("does_not_exist.json")), ConfigError);
}

TEST(Scenario, RejectsInvalidValues) {
    json j = fixture_json("paper_sec5_full.json");
    j["P0_diag"] = {1e-3, 1e-3, 1e-3, 1e-3, 1e-3, 1e-3};
    EXPECT_THROW(scenario_from_json(j), ConfigError);  // x0 outside E0

    j = fixture_json("paper_sec5_full.json");
    j["reference_directions"] = {{1, 0, 0}, {0, 1, 0}};
    j["weights"] = {1, 1};
    EXPECT_THROW(scenario_from_json(j), ConfigError);  // unobservable

    j = fixture_json("paper_sec5_full.json");
    j["reference_directions"][0] = {2, 0, 0};
    EXPECT_THROW(scenario_from_json(j), ConfigError);

    j = fixture_json("paper_sec5_full.json");
    j["truth_R0"] = {1, 0, 0, 0, 1, 0, 0, 0, 2};
    EXPECT_THROW(scenario_from_json(j), ConfigError);

    j = fixture_json("paper_sec5_full.json");
    j["mode"] = "sometimes";
    EXPECT_THROW(scenario_from_json(j), ConfigError);

    j = fixture_json("paper_sec5_full.json");
    j["noise_utilization"] = 1.5;
    EXPECT_THROW(scenario_from_json(j), ConfigError);
}

TEST(GenerateMeasurements, SamplerContract) {
    Scenario sc = load_scenario(fixture("paper_sec5_full.json"));
    const State truth = sc.initial_truth();
    const double b = sc.attitude_noise_bound;
    for (NoiseKind kind : {NoiseKind::TruncatedGaussian, NoiseKind::UniformEllipsoid,
                           NoiseKind::WorstCaseBoundary}) {
        sc.noise = kind;
        std::mt19937_64 rng(5);
        for (int t = 0; t < 2000; ++t) {
            const MeasurementSet m = generate_measurements(truth, sc, rng);
            ASSERT_EQ(m.observations.size(), 3u);
            for (const auto& o : m.observations) {
                // The applied rotation angle is the noise magnitude.
                const Vec3 b_true = truth.R.transpose() * o.e_ref;
                const double angle = std::acos(std::clamp(b_true.dot(o.b_meas), -1.0, 1.0));
                ASSERT_LE(angle, b * (1.0 + 1e-12));
            }
            const double upsilon = (truth.Omega - *m.omega_meas).norm();
            ASSERT_LE(upsilon, sc.omega_noise_bound * (1.0 + 1e-12));
            if (kind == NoiseKind::WorstCaseBoundary) {
                ASSERT_NEAR(upsilon, sc.omega_noise_bound, 1e-14);
            }
        }
    }
}

TEST(GenerateMeasurements, ZeroUtilizationIsExact) {
    Scenario sc = load_scenario(fixture("paper_sec5_full.json"));
    sc.noise_utilization = 0.0;
    std::mt19937_64 rng(6);
    const State truth = sc.initial_truth();
    const MeasurementSet m = generate_measurements(truth, sc, rng);
    for (const auto& o : m.observations) {
        EXPECT_LE((o.b_meas - truth.R.transpose() * o.e_ref).norm(), 1e-15);
    }
    EXPECT_EQ(*m.omega_meas, truth.Omega);

    sc.mode = EstimatorMode::AttitudeOnly;
    EXPECT_FALSE(generate_measurements(truth, sc, rng).has_omega());
}

TEST(Run, ZeroNoiseConverges) {
    Scenario sc = load_scenario(fixture("paper_sec5_full.json"));
    sc.noise_utilization = 0.0;
    sc.attitude_noise_bound = 1e-6;
    sc.omega_noise_bound = 1e-6;
    const TrialResult r = run_trial(sc, 0, 1);
    ASSERT_EQ(r.records.size(), 101u);
    EXPECT_LT(r.terminal().zeta_norm_deg * std::numbers::pi / 180.0, 1e-6);
    EXPECT_LT(r.terminal().domega_norm, 1e-6);
    EXPECT_TRUE(r.contained_all());
}

TEST(Run, FullScenarioDropsAtFirstMeasurement) {
    const Scenario sc = load_scenario(fixture("paper_sec5_full.json"));
    const TrialResult r = run_trial(sc, 0, sc.seed);
    EXPECT_NEAR(r.records[0].zeta_norm_deg, 180.0, 1e-9);
    EXPECT_NEAR(r.records[0].trace_P, sc.P0_diag.sum(), 1e-12);
    ASSERT_TRUE(r.records[10].measured);
    EXPECT_FALSE(r.records[9].measured);
    EXPECT_LT(r.records[10].zeta_norm_deg, r.records[9].zeta_norm_deg / 10.0);
    EXPECT_LT(r.records[10].trace_P, r.records[9].trace_P / 10.0);
    for (const auto& rec : r.records) {
        EXPECT_EQ(rec.contained.has_value(), rec.measured);
    }
}

TEST(Run, BitReproducible) {
    Scenario sc = load_scenario(fixture("paper_sec5_full.json"));
    sc.trials = 2;
    const auto a = run(sc);
    const auto b = run(sc);
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(to_csv(a[0]), to_csv(b[0]));
    EXPECT_EQ(to_csv(a[1]), to_csv(b[1]));
    EXPECT_NE(to_csv(a[0]), to_csv(a[1]));
    EXPECT_EQ(a[1].seed, sc.seed + 1);
}

TEST(Report, CsvSchema) {
    const Scenario sc = load_scenario(fixture("paper_sec5_attitude_only.json"));
    const std::string csv = to_csv(run_trial(sc, 0, 3));
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "step,time,zeta_norm_deg,domega_norm,trace_P,measured,contained");
    EXPECT_EQ(count_lines(csv), 102u);
    std::getline(in, line);
    EXPECT_EQ(line.substr(0, 4), "0,0,");
    EXPECT_EQ(line.substr(line.size() - 3), ",0,");
}

TEST(Report, WritesFilesAndSummary) {
    Scenario sc = load_scenario(fixture("paper_sec5_full.json"));
    sc.trials = 3;
    const auto results = run(sc);
    const auto dir = std::filesystem::temp_directory_path() / "tsoest_report_test";
    std::filesystem::remove_all(dir);
    const Summary s = report(results, sc.mode, dir);
    EXPECT_EQ(s.trials, 3);
    EXPECT_GE(s.containment_rate, 0.0);
    EXPECT_LE(s.containment_rate, 1.0);
    EXPECT_LE(s.terminal_zeta_deg.min, s.terminal_zeta_deg.median);
    EXPECT_LE(s.terminal_zeta_deg.median, s.terminal_zeta_deg.max);
    for (int k = 0; k < 3; ++k) {
        EXPECT_TRUE(std::filesystem::exists(dir / ("trial_" + std::to_string(k) + ".csv")));
    }
    std::ifstream in(dir / "summary.json");
    const json j = json::parse(in);
    EXPECT_EQ(j["mode"], "full");
    EXPECT_DOUBLE_EQ(j["containment_rate"].get<double>(), s.containment_rate);
    std::filesystem::remove_all(dir);
}

TEST(Report, SingleTrialSummaryEqualsLastRecord) {
    const Scenario sc = load_scenario(fixture("paper_sec5_full.json"));
    const std::vector<TrialResult> results{run_trial(sc, 0, 9)};
    const Summary s = summarize(results, sc.mode);
    EXPECT_EQ(s.terminal_zeta_deg.median, results[0].terminal().zeta_norm_deg);
    EXPECT_EQ(s.terminal_trace_P.max, results[0].terminal().trace_P);
}

TEST(Report, UnwritableDirectoryRaises) {
    const Scenario sc = load_scenario(fixture("paper_sec5_full.json"));
    const std::vector<TrialResult> results{run_trial(sc, 0, 9)};
    EXPECT_THROW(report(results, sc.mode, "/proc/tsoest_cannot_write_here"), IoError);
}
