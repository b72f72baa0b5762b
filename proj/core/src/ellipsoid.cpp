#include "tsoest/ellipsoid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <utility>

#include "tsoest/errors.hpp"

namespace tsoest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQMin = 1e-6;
constexpr double kQMax = 1e6;
constexpr int kScanProbes = 20;
constexpr double kSearchRelTol = 1e-8;

// beta in (-kBetaClamp, 0] is treated as roundoff at a near-tangent pair.
constexpr double kBetaClamp = 1e-9;
constexpr double kBetaFloor = 1e-12;

MatN symmetrized(const MatN& P) {
    return 0.5 * (P + P.transpose());
}

struct Candidate {
    double trace = kInf;
    VecN center;
    MatN shape;
};

double clamp_beta(double beta) {
    if (beta <= 0.0 && beta > -kBetaClamp) {
        std::clog << "tsoest: warning: fusion beta " << beta << " clamped to " << kBetaFloor << '\n';
        return kBetaFloor;
    }
    return beta;
}

/// Minimizes f(q) over [kQMin, kQMax] on a log scale. Returns the best q,
/// or NaN if f is infinite at every scan probe.
double minimize_log_scale(const std::function<double(double)>& f) {
    const double lo = std::log(kQMin);
    const double hi = std::log(kQMax);
    const double du = (hi - lo) / (kScanProbes - 1);

    int best = -1;
    double best_val = kInf;
    for (int i = 0; i < kScanProbes; ++i) {
        const double v = f(std::exp(lo + i * du));
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    if (best < 0) {
        return std::numeric_limits<double>::quiet_NaN();
    }

    double a = lo + std::max(best - 1, 0) * du;
    double b = lo + std::min(best + 1, kScanProbes - 1) * du;
    const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(std::exp(c));
    double fd = f(std::exp(d));
    // |du| in log q equals the relative tolerance in q
    while (b - a > kSearchRelTol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(std::exp(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(std::exp(d));
        }
    }
    const double u = fc < fd ? c : d;
    const double fu = std::min(fc, fd);
    return fu <= best_val ? std::exp(u) : std::exp(lo + best * du);
}

Candidate fuse_at(const Ellipsoid& Em, const Ellipsoid& Ef, double q) {
    const MatN& Pm = Em.shape();
    const MatN& Pf = Ef.shape();
    const VecN d = Ef.center() - Em.center();

    // L = P_m (P_m + P_f/q)^-1 = q P_m (q P_m + P_f)^-1
    const Eigen::LDLT<MatN> S(q * Pm + Pf);
    const MatN L = q * S.solve(Pm).transpose();
    const double beta = clamp_beta(1.0 + q - q * d.dot(S.solve(d)));

    Candidate out;
    if (!(beta > 0.0)) {
        return out;
    }
    // (I - L) P_m in Joseph form, which stays PSD when P_m >> P_f / q.
    const MatN I = MatN::Identity(Pm.rows(), Pm.cols());
    const MatN IL = I - L;
    const MatN core = IL * Pm * IL.transpose() + L * (Pf / q) * L.transpose();
    out.shape = symmetrized(beta * core);
    out.center = Em.center() + L * d;
    out.trace = out.shape.trace();
    return out;
}

Candidate fuse_info_at(const Ellipsoid& Ef, const MatN& Pf_inv, const InfoEllipsoid& Em, double q) {
    const MatN X = (1.0 - q) * Pf_inv + q * Em.information;
    const Eigen::LDLT<MatN> ldlt(symmetrized(X));
    const VecN rhs = (1.0 - q) * Pf_inv * Ef.center() + q * Em.information * Em.center;
    const VecN xc = ldlt.solve(rhs);
    const double beta = clamp_beta(1.0 - (1.0 - q) * Ef.center().dot(Pf_inv * Ef.center()) -
                                   q * Em.center.dot(Em.information * Em.center) + xc.dot(rhs));
    Candidate out;
    if (!(beta > 0.0)) {
        return out;
    }
    const MatN Xinv = ldlt.solve(MatN::Identity(X.rows(), X.cols()));
    out.shape = symmetrized(beta * Xinv);
    out.center = xc;
    out.trace = out.shape.trace();
    return out;
}

void require_same_dim(const Ellipsoid& a, Eigen::Index n) {
    if (a.dim() != n) {
        throw std::invalid_argument("ellipsoid dimension mismatch");
    }
}

}  // namespace

Ellipsoid::Ellipsoid(VecN center, MatN shape) : center_(std::move(center)), shape_(std::move(shape)) {
    const auto n = center_.size();
    if (shape_.rows() != n || shape_.cols() != n) {
        throw std::invalid_argument("ellipsoid shape does not match center dimension");
    }
    if (!shape_.allFinite() || !center_.allFinite()) {
        throw NotSPD("ellipsoid has non-finite entries");
    }
    const double scale = std::max(shape_.norm(), std::numeric_limits<double>::min());
    if ((shape_ - shape_.transpose()).norm() > 1e-12 * scale) {
        throw NotSPD("ellipsoid shape is not symmetric");
    }
    shape_ = symmetrized(shape_);
    if (n == 0) {
        return;
    }
    const Eigen::SelfAdjointEigenSolver<MatN> eig(shape_, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    if (lmin < -1e-12 * std::max(lmax, 0.0)) {
        throw NotSPD("ellipsoid shape has a negative eigenvalue");
    }
    degenerate_ = !(lmax > 0.0) || lmin <= 1e-12 * lmax;
}

Ellipsoid Ellipsoid::centered(MatN shape) {
    VecN c = VecN::Zero(shape.rows());
    return Ellipsoid(std::move(c), std::move(shape));
}

double mahalanobis2(const Ellipsoid& E, const VecN& x) {
    if (E.degenerate()) {
        throw Degenerate("membership test on a degenerate ellipsoid");
    }
    const VecN d = x - E.center();
    return d.dot(E.shape().ldlt().solve(d));
}

bool contains(const Ellipsoid& E, const VecN& x, double slack) {
    return mahalanobis2(E, x) <= 1.0 + slack;
}

bool contains(const InfoEllipsoid& E, const VecN& x, double slack) {
    const VecN d = x - E.center;
    return d.dot(E.information * d) <= 1.0 + slack;
}

double size(const Ellipsoid& E) {
    return E.shape().trace();
}

Ellipsoid linear_image(const Ellipsoid& E, const MatN& A) {
    if (A.cols() != E.dim()) {
        throw std::invalid_argument("linear_image: dimension mismatch");
    }
    return Ellipsoid(A * E.center(), symmetrized(A * E.shape() * A.transpose()));
}

Ellipsoid outer_sum(std::span<const Ellipsoid> parts) {
    if (parts.empty()) {
        throw EmptyInput("outer_sum: no parts");
    }
    const auto n = parts.front().dim();
    double root_sum = 0.0;
    MatN weighted = MatN::Zero(n, n);
    for (const auto& p : parts) {
        require_same_dim(p, n);
        const double tr = p.shape().trace();
        if (!(tr > 0.0)) {
            throw ZeroTrace("outer_sum: part with non-positive trace");
        }
        const double r = std::sqrt(tr);
        root_sum += r;
        weighted += p.shape() / r;
    }
    return Ellipsoid::centered(symmetrized(root_sum * weighted));
}

double fusion_trace(const Ellipsoid& Em, const Ellipsoid& Ef, double q) {
    return fuse_at(Em, Ef, q).trace;
}

FusionResult fuse_intersection(const Ellipsoid& Em, const Ellipsoid& Ef) {
    require_same_dim(Ef, Em.dim());
    if (Em.degenerate() || Ef.degenerate()) {
        throw Degenerate("fuse_intersection: degenerate operand");
    }
    const double q = minimize_log_scale([&](double qq) { return fuse_at(Em, Ef, qq).trace; });
    if (std::isnan(q)) {
        throw EmptyIntersection("ellipsoids do not intersect");
    }
    Candidate best = fuse_at(Em, Ef, q);
    return {std::move(best.center), std::move(best.shape), q};
}

double fusion_trace(const Ellipsoid& Ef, const InfoEllipsoid& Em, double q) {
    const MatN Pf_inv = Ef.shape().ldlt().solve(MatN::Identity(Ef.dim(), Ef.dim()));
    return fuse_info_at(Ef, symmetrized(Pf_inv), Em, q).trace;
}

FusionResult fuse_intersection(const Ellipsoid& Ef, const InfoEllipsoid& Em) {
    const auto n = Ef.dim();
    if (Em.center.size() != n || Em.information.rows() != n || Em.information.cols() != n) {
        throw std::invalid_argument("fuse_intersection: dimension mismatch");
    }
    if (Ef.degenerate()) {
        throw Degenerate("fuse_intersection: degenerate predicted ellipsoid");
    }
    const MatN Pf_inv = symmetrized(Ef.shape().ldlt().solve(MatN::Identity(n, n)));
    // Search over the odds t = q / (1 - q).
    auto at = [&](double t) { return fuse_info_at(Ef, Pf_inv, Em, t / (1.0 + t)); };
    const double t = minimize_log_scale([&](double tt) { return at(tt).trace; });
    if (std::isnan(t)) {
        throw EmptyIntersection("ellipsoid does not intersect the measurement set");
    }
    Candidate best = at(t);
    return {std::move(best.center), std::move(best.shape), t / (1.0 + t)};
}

}  // namespace tsoest
