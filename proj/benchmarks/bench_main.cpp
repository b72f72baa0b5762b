#include <memory>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "tsoest/estimator.hpp"

using namespace tsoest;

namespace {

const Mat3 kJ = Vec3(1.0, 2.8, 2.0).asDiagonal();

RigidBodyModel gravity_gradient() {
    return RigidBodyModel(kJ, std::make_shared<GravityGradient>(kJ));
}

State sample_state() {
    return {exp_so3(Vec3(0.3, -0.4, 0.2)), Vec3(2.316, 0.446, -0.591)};
}

std::vector<DirectionObservation> observations(const Rotation& R) {
    std::vector<DirectionObservation> obs;
    const double b = 7.0 * 3.14159265358979 / 180.0;
    for (int i = 0; i < 3; ++i) {
        const Vec3 e = Vec3::Unit(i);
        obs.push_back({e, exp_so3(Vec3::Constant(0.01 * (i + 1))) * (R.transpose() * e), 1.0,
                       b * b * Mat3::Identity()});
    }
    return obs;
}

}  // namespace

static void BM_Step(benchmark::State& state) {
    const RigidBodyModel model = gravity_gradient();
    State s = sample_state();
    for (auto _ : state) {
        s = step(model, s, 0.01);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_Step);

static void BM_LinearizeStep(benchmark::State& state) {
    const RigidBodyModel model = gravity_gradient();
    const State s = sample_state();
    for (auto _ : state) {
        benchmark::DoNotOptimize(linearize_step(model, s, 0.01));
    }
}
BENCHMARK(BM_LinearizeStep);

static void BM_WahbaSolve(benchmark::State& state) {
    const auto obs = observations(exp_so3(Vec3(0.5, 1.0, -0.2)));
    const AttitudeProfile L = profile_matrix(obs);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve(L));
    }
}
BENCHMARK(BM_WahbaSolve);

static void BM_FuseIntersection(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n01;
    Mat6 G;
    for (int i = 0; i < 36; ++i) G(i / 6, i % 6) = n01(rng);
    const Ellipsoid Em = Ellipsoid::centered(G * G.transpose() + Mat6::Identity());
    const Ellipsoid Ef(Vec6::Constant(0.2), Mat6::Identity());
    for (auto _ : state) {
        benchmark::DoNotOptimize(fuse_intersection(Em, Ef));
    }
}
BENCHMARK(BM_FuseIntersection);

static void BM_FilterCycle(benchmark::State& state) {
    const RigidBodyModel model = gravity_gradient();
    const State truth = sample_state();
    const MeasurementSet meas{observations(truth.R), truth.Omega, 0.015 * Mat3::Identity()};
    const StateEllipsoid E0{truth.R, truth.Omega + Vec3(0.01, 0.0, 0.0), 0.01 * Mat6::Identity()};
    for (auto _ : state) {
        // Ten propagation steps and one measurement update.
        StateEllipsoid E = flow_update(model, E0, 0.01, 10);
        benchmark::DoNotOptimize(assimilate(E, meas));
    }
}
BENCHMARK(BM_FilterCycle);
BENCHMARK_MAIN();
