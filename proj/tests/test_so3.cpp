#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tsoest/errors.hpp"
#include "tsoest/so3.hpp"

using namespace tsoest;
using tsoest::testing::random_rotation;
using tsoest::testing::random_vec3;
using tsoest::testing::series_exp;

constexpr double kPi = std::numbers::pi;

TEST(Hat, ZeroAndCrossProduct) {
    EXPECT_TRUE(hat(Vec3::Zero()).isZero(0.0));
    EXPECT_TRUE((hat(Vec3::UnitX()) * Vec3::UnitY()).isApprox(Vec3::UnitZ()));
}

TEST(Hat, AntiCommutesAndSkew) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        const Vec3 a = random_vec3(rng);
        const Vec3 b = random_vec3(rng);
        EXPECT_LE((hat(a) * b - a.cross(b)).norm(), 1e-15);
        EXPECT_LE((hat(a) * b + hat(b) * a).norm(), 1e-15);
        EXPECT_TRUE((hat(a).transpose() + hat(a)).isZero(0.0));
    }
}

TEST(Vee, RoundTripAndErrors) {
    EXPECT_TRUE(vee(hat(Vec3(1, 2, 3))).isApprox(Vec3(1, 2, 3)));
    EXPECT_TRUE(vee(Mat3::Zero()).isZero(0.0));
    EXPECT_THROW(vee(Mat3::Identity()), NotSkew);
}

TEST(ExpSO3, KnownValues) {
    EXPECT_TRUE(exp_so3(Vec3::Zero()).matrix().isIdentity(0.0));
    const Mat3 half_turn = exp_so3(Vec3(0, 0, kPi)).matrix();
    EXPECT_LE((half_turn - Vec3(-1, -1, 1).asDiagonal().toDenseMatrix()).norm(), 1e-15);
}

TEST(ExpSO3, MatchesSeriesOracle) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> angle(0.0, kPi);
    for (int i = 0; i < 500; ++i) {
        const Vec3 v = tsoest::testing::random_unit(rng) * angle(rng);
        const Rotation R = exp_so3(v);
        EXPECT_LE((R.matrix() - series_exp(hat(v), 40)).norm(), 1e-12);
        EXPECT_LE(R.orthogonality_residual(), 1e-12);
        EXPECT_GT(R.matrix().determinant(), 0.0);
    }
}

TEST(ExpSO3, SmallAngleBranchContinuous) {
    for (double t : {1e-12, 1e-8, 5e-5, 9.99e-5, 1.01e-4, 1e-3}) {
        const Vec3 v = t * Vec3(0.3, -0.5, 0.8).normalized();
        EXPECT_LE((exp_so3(v).matrix() - series_exp(hat(v))).norm(), 1e-15) << t;
    }
}

TEST(LogSO3, KnownValues) {
    EXPECT_TRUE(log_so3(Rotation::identity()).isZero(0.0));
    const Vec3 v(0.1, -0.2, 0.3);
    EXPECT_LE((log_so3(exp_so3(v)) - v).norm(), 1e-12);

    const Vec3 w = log_so3(Rotation::from_matrix(Vec3(-1, -1, 1).asDiagonal().toDenseMatrix()));
    EXPECT_NEAR(w.norm(), kPi, 1e-12);
    // Sign convention at pi: first nonzero component positive.
    EXPECT_LE((w - Vec3(0, 0, kPi)).norm(), 1e-12);
}

TEST(LogSO3, PiBranchConvention) {
    // Half turns about axes whose first nonzero component is negative.
    for (const Vec3& axis : {Vec3(-1, 0, 0), Vec3(-1, 2, 2).normalized(), Vec3(0, -3, 4).normalized()}) {
        const Vec3 w = log_so3(exp_so3(kPi * axis));
        EXPECT_NEAR(w.norm(), kPi, 1e-10);
        EXPECT_LE((w + kPi * axis).norm(), 1e-7);
    }
}

TEST(LogSO3, RoundTripProperty) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> angle(0.0, kPi);
    for (int i = 0; i < 2000; ++i) {
        // Include angles close to pi and close to zero.
        double t = angle(rng);
        if (i % 4 == 1) t = kPi - std::pow(10.0, -1.0 - 10.0 * angle(rng) / kPi);
        if (i % 4 == 2) t = std::pow(10.0, -1.0 - 10.0 * angle(rng) / kPi);
        const Vec3 v = tsoest::testing::random_unit(rng) * t;
        EXPECT_LE((log_so3(exp_so3(v)) - v).norm(), 1e-10) << "angle " << t;
    }
    for (int i = 0; i < 1000; ++i) {
        const Rotation R = random_rotation(rng);
        const Vec3 w = log_so3(R);
        EXPECT_LE(w.norm(), kPi + 1e-15);
        EXPECT_LE((exp_so3(w).matrix() - R.matrix()).norm(), 1e-10);
    }
}

TEST(TraceDeflate, ValuesAndIdentity) {
    EXPECT_TRUE(trace_deflate(Mat3::Identity()).isApprox(2.0 * Mat3::Identity()));
    EXPECT_TRUE(trace_deflate(Mat3::Zero()).isZero(0.0));
    std::mt19937_64 rng(14);
    std::normal_distribution<double> n01;
    for (int i = 0; i < 500; ++i) {
        Mat3 A;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) A(r, c) = n01(rng);
        const Vec3 x = random_vec3(rng);
        const Mat3 lhs = hat(x) * A + A.transpose() * hat(x);
        EXPECT_LE((lhs - hat(trace_deflate(A) * x)).norm(), 1e-12);
    }
}

TEST(SpdSqrt, KnownValuesAndOracle) {
    EXPECT_TRUE(spd_sqrt(Mat3::Identity()).isApprox(Mat3::Identity()));
    EXPECT_TRUE(spd_sqrt(4.0 * Mat3::Identity()).isApprox(2.0 * Mat3::Identity()));
    std::mt19937_64 rng(15);
    for (int i = 0; i < 200; ++i) {
        const Mat3 Q = random_rotation(rng).matrix();
        const Mat3 A = Q * Vec3(1, 4, 9).asDiagonal() * Q.transpose();
        const Mat3 expected = Q * Vec3(1, 2, 3).asDiagonal() * Q.transpose();
        const Mat3 B = spd_sqrt(0.5 * (A + A.transpose()));
        EXPECT_LE((B - expected).norm(), 1e-12);
        EXPECT_LE((B * B - A).norm(), 1e-10);
    }
}

TEST(SpdSqrt, RejectsIndefinite) {
    EXPECT_THROW(spd_sqrt(Vec3(1, -1, 2).asDiagonal().toDenseMatrix()), NotSPD);
    EXPECT_THROW(spd_sqrt(Mat3::Zero()), NotSPD);
    Mat3 nonsym = Mat3::Identity();
    nonsym(0, 1) = 0.5;
    EXPECT_THROW(spd_sqrt(nonsym), NotSPD);
}

TEST(Rotation, FromMatrixValidates) {
    EXPECT_NO_THROW(Rotation::from_matrix(Mat3::Identity()));
    EXPECT_THROW(Rotation::from_matrix(Vec3(1, 1, -1).asDiagonal().toDenseMatrix()), NotRotation);
    EXPECT_THROW(Rotation::from_matrix(2.0 * Mat3::Identity()), NotRotation);
}
