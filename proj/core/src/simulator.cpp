#include "tsoest/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "tsoest/errors.hpp"

namespace tsoest {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

Vec3 gaussian3(std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    const double x = n01(rng);
    const double y = n01(rng);
    const double z = n01(rng);
    return {x, y, z};
}

/// Point u with ||u|| <= 1 drawn per the noise model.
Vec3 sample_unit_ball(NoiseKind kind, std::mt19937_64& rng) {
    switch (kind) {
        case NoiseKind::TruncatedGaussian: {
            // N(0, I/9) rejected outside the unit ball.
            for (;;) {
                const Vec3 u = gaussian3(rng) / 3.0;
                if (u.squaredNorm() <= 1.0) return u;
            }
        }
        case NoiseKind::UniformEllipsoid: {
            Vec3 d;
            do {
                d = gaussian3(rng);
            } while (d.squaredNorm() == 0.0);
            std::uniform_real_distribution<double> u01(0.0, 1.0);
            return std::cbrt(u01(rng)) * d.normalized();
        }
        case NoiseKind::WorstCaseBoundary: {
            Vec3 d;
            do {
                d = gaussian3(rng);
            } while (d.squaredNorm() == 0.0);
            return d.normalized();
        }
    }
    return Vec3::Zero();
}

Vec3 sample_bounded(const Mat3& bound, double utilization, NoiseKind kind, std::mt19937_64& rng) {
    const Vec3 u = sample_unit_ball(kind, rng);
    const Eigen::LLT<Mat3> llt(bound);
    const Vec3 v = llt.matrixL() * u;
    return utilization * v;
}

Stats stats_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    const double median = n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    return {v.front(), median, v.back()};
}

nlohmann::json stats_json(const Stats& s) {
    return {{"min", s.min}, {"median", s.median}, {"max", s.max}};
}

}  // namespace

bool TrialResult::contained_all() const {
    return std::all_of(records.begin(), records.end(),
                       [](const StepRecord& r) { return !r.contained.has_value() || *r.contained; });
}

MeasurementSet generate_measurements(const State& truth, const Scenario& scenario,
                                     std::mt19937_64& rng) {
    MeasurementSet meas;
    const Mat3 S = scenario.attitude_bound();
    const Mat3 Rt = truth.R.matrix().transpose();
    for (std::size_t i = 0; i < scenario.reference_directions.size(); ++i) {
        const Vec3& e = scenario.reference_directions[i];
        const Vec3 nu = sample_bounded(S, scenario.noise_utilization, scenario.noise, rng);
        DirectionObservation o;
        o.e_ref = e;
        o.b_meas = (exp_so3(-nu) * (Rt * e)).normalized();
        o.weight = scenario.weights.empty() ? 1.0 : scenario.weights[i];
        o.noise_bound = S;
        meas.observations.push_back(o);
    }
    if (scenario.mode == EstimatorMode::Full) {
        const Mat3 T = scenario.omega_bound();
        const Vec3 upsilon = sample_bounded(T, scenario.noise_utilization, scenario.noise, rng);
        meas.omega_meas = truth.Omega - upsilon;
        meas.omega_bound = T;
    }
    return meas;
}

TrialResult run_trial(const Scenario& scenario, int trial, std::uint64_t seed) {
    const RigidBodyModel model = scenario.model();
    std::mt19937_64 rng(seed);

    // Truth trajectory and the measurement schedule it induces.
    std::vector<State> truth;
    truth.reserve(static_cast<std::size_t>(scenario.n_steps) + 1);
    truth.push_back(scenario.initial_truth());
    std::vector<ScheduledMeasurement> schedule;
    for (long k = 1; k <= scenario.n_steps; ++k) {
        try {
            truth.push_back(step(model, truth.back(), scenario.h));
        } catch (const Error& e) {
            throw SimulationError(k, std::string("truth propagation: ") + e.what());
        }
        if (k % scenario.meas_every == 0) {
            schedule.push_back({static_cast<double>(k) * scenario.h,
                                generate_measurements(truth.back(), scenario, rng)});
        }
    }

    std::vector<EstimateRecord> estimates;
    estimates.reserve(truth.size());
    estimates.push_back({0, 0.0, false, scenario.initial_estimate()});
    std::size_t next = 0;
    for (long k = 1; k <= scenario.n_steps; ++k) {
        EstimateRecord rec{k, static_cast<double>(k) * scenario.h, false, estimates.back().E};
        try {
            rec.E = flow_update(model, rec.E, scenario.h, 1);
            if (next < schedule.size() && k % scenario.meas_every == 0) {
                rec.E = assimilate(rec.E, schedule[next++].meas);
                rec.measured = true;
            }
        } catch (const Error& e) {
            throw SimulationError(k, e.what());
        }
        estimates.push_back(std::move(rec));
    }

    TrialResult result;
    result.trial = trial;
    result.seed = seed;
    result.records.reserve(estimates.size());
    for (const auto& est : estimates) {
        const State& s = truth[static_cast<std::size_t>(est.step)];
        const Vec6 x = est.E.coordinates(s);
        StepRecord r;
        r.step = est.step;
        r.time = est.time;
        r.zeta_norm_deg = x.head<3>().norm() * kRadToDeg;
        r.domega_norm = x.tail<3>().norm();
        r.trace_P = est.E.P.trace();
        r.measured = est.measured;
        if (est.measured) {
            r.contained = est.E.contains(s);
        }
        result.records.push_back(r);
    }
    return result;
}

std::vector<TrialResult> run(const Scenario& scenario) {
    scenario.validate();
    std::vector<TrialResult> results;
    results.reserve(static_cast<std::size_t>(scenario.trials));
    for (int k = 0; k < scenario.trials; ++k) {
        results.push_back(run_trial(scenario, k, scenario.seed + static_cast<std::uint64_t>(k)));
    }
    return results;
}

Summary summarize(const std::vector<TrialResult>& results, EstimatorMode mode) {
    Summary s;
    s.trials = static_cast<int>(results.size());
    s.mode = mode;
    if (results.empty()) {
        return s;
    }
    std::vector<double> zeta, domega, trace;
    int contained = 0;
    for (const auto& r : results) {
        zeta.push_back(r.terminal().zeta_norm_deg);
        domega.push_back(r.terminal().domega_norm);
        trace.push_back(r.terminal().trace_P);
        contained += r.contained_all() ? 1 : 0;
    }
    s.terminal_zeta_deg = stats_of(zeta);
    s.terminal_domega = stats_of(domega);
    s.terminal_trace_P = stats_of(trace);
    s.containment_rate = static_cast<double>(contained) / static_cast<double>(results.size());
    return s;
}

nlohmann::json to_json(const Summary& summary, const std::vector<TrialResult>& results) {
    nlohmann::json per_trial = nlohmann::json::array();
    for (const auto& r : results) {
        per_trial.push_back({{"trial", r.trial},
                             {"seed", r.seed},
                             {"terminal_zeta_deg", r.terminal().zeta_norm_deg},
                             {"terminal_domega", r.terminal().domega_norm},
                             {"terminal_trace_P", r.terminal().trace_P},
                             {"contained_all", r.contained_all()}});
    }
    return {{"trials", summary.trials},
            {"mode", to_string(summary.mode)},
            {"terminal_zeta_deg", stats_json(summary.terminal_zeta_deg)},
            {"terminal_domega", stats_json(summary.terminal_domega)},
            {"terminal_trace_P", stats_json(summary.terminal_trace_P)},
            {"containment_rate", summary.containment_rate},
            {"per_trial", per_trial}};
}

std::string to_csv(const TrialResult& result) {
    std::string out = "step,time,zeta_norm_deg,domega_norm,trace_P,measured,contained\n";
    char buf[256];
    for (const auto& r : result.records) {
        const char* contained = !r.contained ? "" : (*r.contained ? "1" : "0");
        std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g,%d,%s\n", r.step, r.time,
                      r.zeta_norm_deg, r.domega_norm, r.trace_P, r.measured ? 1 : 0, contained);
        out += buf;
    }
    return out;
}

Summary report(const std::vector<TrialResult>& results, EstimatorMode mode,
               const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    auto write = [](const std::filesystem::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        out << text;
        if (!out) {
            throw IoError("cannot write " + path.string());
        }
    };
    for (const auto& r : results) {
        write(dir / ("trial_" + std::to_string(r.trial) + ".csv"), to_csv(r));
    }
    const Summary summary = summarize(results, mode);
    write(dir / "summary.json", to_json(summary, results).dump(2) + "\n");
    return summary;
}

}  // namespace tsoest
