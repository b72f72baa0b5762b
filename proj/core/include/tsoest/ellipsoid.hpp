#pragma once

#include <span>

#include <Eigen/Dense>

namespace tsoest {

using VecN = Eigen::VectorXd;
using MatN = Eigen::MatrixXd;

/**
 * {x : (x - c)^T P^-1 (x - c) <= 1} in R^n.
 *
 * The shape P is symmetric positive semidefinite. A singular P describes a
 * flat ellipsoid and is flagged degenerate; membership is undefined for it.
 */
class Ellipsoid {
public:
    /// Throws NotSPD if shape is not symmetric PSD, std::invalid_argument on size mismatch.
    Ellipsoid(VecN center, MatN shape);

    static Ellipsoid centered(MatN shape);

    const VecN& center() const { return center_; }
    const MatN& shape() const { return shape_; }
    Eigen::Index dim() const { return center_.size(); }
    bool degenerate() const { return degenerate_; }

private:
    VecN center_;
    MatN shape_;
    bool degenerate_ = false;
};

/**
 * Ellipsoid given by an information matrix: {x : (x - c)^T I (x - c) <= 1}.
 *
 * I may be singular, in which case the set is unbounded along ker(I). Used
 * for measurements that constrain only part of the state.
 */
struct InfoEllipsoid {
    VecN center;
    MatN information;
};

constexpr double kContainmentSlack = 1e-9;

/// Throws Degenerate if E is flagged degenerate.
bool contains(const Ellipsoid& E, const VecN& x, double slack = kContainmentSlack);
bool contains(const InfoEllipsoid& E, const VecN& x, double slack = kContainmentSlack);

/// (x - c)^T P^-1 (x - c). Throws Degenerate if E is flagged degenerate.
double mahalanobis2(const Ellipsoid& E, const VecN& x);

/// tr(P), the sum of squared semi-axes.
double size(const Ellipsoid& E);

/// Exact image under x -> A x.
Ellipsoid linear_image(const Ellipsoid& E, const MatN& A);

/**
 * Minimal-trace ellipsoid containing the Minkowski sum of origin-centered parts:
 * P = (sum_i sqrt(tr P_i)) (sum_i P_i / sqrt(tr P_i)).
 *
 * Throws EmptyInput for no parts and ZeroTrace if a part has tr <= 0.
 */
Ellipsoid outer_sum(std::span<const Ellipsoid> parts);

struct FusionResult {
    VecN center;
    MatN shape;
    double q = 0.0;  ///< optimizing parameter
};

/**
 * Outer bound of E(c_m, P_m) ∩ E(c_f, P_f) from the one-parameter family
 *   x = c_m + L (c_f - c_m),   P = beta(q) (I - L) P_m,
 *   L = P_m (P_m + P_f / q)^-1,
 *   beta(q) = 1 + q - d^T P_m^-1 L d,  d = c_f - c_m,
 * with q > 0 chosen to minimize tr(P).
 *
 * The search runs over q in [1e-6, 1e6] on a log scale: a 20-point scan
 * brackets the minimum, golden section refines it to 1e-8 relative.
 * Throws EmptyIntersection if beta(q) <= 0 at every probe.
 */
FusionResult fuse_intersection(const Ellipsoid& Em, const Ellipsoid& Ef);

/// tr(P(q)) of the family above, +inf where beta(q) <= 0.
double fusion_trace(const Ellipsoid& Em, const Ellipsoid& Ef, double q);

/**
 * Outer bound of E(c_f, P_f) ∩ M for a possibly degenerate M, via the
 * information-form convex combination
 *   X(q) = (1 - q) P_f^-1 + q I_m,   q in (0, 1),
 * normalized so that it contains the intersection. q minimizes tr(P).
 * The returned q is the weight on the measurement set.
 */
FusionResult fuse_intersection(const Ellipsoid& Ef, const InfoEllipsoid& Em);

/// tr(P(q)) of the information-form family, +inf where the bound is empty.
double fusion_trace(const Ellipsoid& Ef, const InfoEllipsoid& Em, double q);

}  // namespace tsoest
