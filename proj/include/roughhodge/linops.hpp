/**
 * Weighted inner-product linear algebra on finite-dimensional complex spaces.
 *
 * A metric is an SPD (Hermitian positive-definite) form B with
 * <u, v>_B = <Bu, v> = v^H B u. Subspaces carry B-orthonormal bases; all
 * rank decisions are made by SVD in the Cholesky frame u -> L^H u, B = L L^H,
 * so every decomposition runs in the standard inner product.
 */
#ifndef ROUGHHODGE_LINOPS_HPP
#define ROUGHHODGE_LINOPS_HPP

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "roughhodge/types.hpp"

namespace rhodge {

class MetricForm;
using MetricPtr = std::shared_ptr<const MetricForm>;

/// Certified SPD weight form. Immutable once built; construct through certify_metric.
class MetricForm {
public:
    Index dim() const { return form_.rows(); }
    const Matrix& form() const { return form_; }
    double lambda_min() const { return lambda_min_; }
    double lambda_max() const { return lambda_max_; }
    bool is_diagonal() const { return diagonal_; }
    std::uint64_t id() const { return id_; }

    /// B^{-1} X
    Matrix solve(const Matrix& x) const;
    /// L^H X, the map into the frame where B becomes the identity.
    Matrix to_frame(const Matrix& x) const;
    /// L^{-H} Y, inverse of to_frame.
    Matrix from_frame(const Matrix& y) const;
    /// L^{-1} S L^{-H} for a Hermitian form S; the pencil (S, B) in the standard frame.
    Matrix congruence(const Matrix& s) const;

    Scalar inner(const Vector& u, const Vector& v) const;
    double norm(const Vector& u) const;

    /// Same form (by fingerprint, then exact comparison).
    bool same_as(const MetricForm& other) const;

private:
    friend MetricForm certify_metric(const Matrix& b);

    Matrix form_;
    Matrix factor_;          // lower Cholesky factor L (dense case)
    RealVector sqrt_diag_;   // sqrt of the diagonal (diagonal case)
    double lambda_min_ = 0;
    double lambda_max_ = 0;
    bool diagonal_ = false;
    std::uint64_t id_ = 0;
};

/// Validate a Hermitian SPD matrix. Throws NotHermitian / NotPositiveDefinite.
MetricForm certify_metric(const Matrix& b);
MetricPtr make_metric(const Matrix& b);
MetricPtr make_diagonal_metric(const RealVector& weights);
MetricPtr identity_metric(Index n);

struct NilpotentOperator {
    Matrix map;
    double nilpotency_residual = 0;
    bool exact_integer = false;

    Index dim() const { return map.rows(); }
};

/// Accepts A iff ||A^2|| <= tol * max(1, ||A||^2) in the spectral norm.
NilpotentOperator certify_nilpotent(const Matrix& a, double tol = 1e-12);

/// ||A^2|| / max(1, ||A||^2); zero when A has integer entries and A^2 == 0 exactly.
double nilpotency_residual(const Matrix& a);

/// A^{*,B} = B_dom^{-1} A^H B_cod for A : (dom, B_dom) -> (cod, B_cod).
Matrix weighted_adjoint(const Matrix& a, const MetricForm& dom, const MetricForm& cod);

/**
 * Rank cut policy. With no explicit tolerance the cut is
 * max(rows, cols) * eps * sigma_max. A decision is ambiguous unless the
 * retained/discarded singular value ratio reaches `min_gap`.
 */
struct RankPolicy {
    std::optional<double> tol;
    double min_gap = 1e3;
};

struct RankDecision {
    Index rank = 0;
    double tol_used = 0;
    double singular_gap = 0;  // sigma_r / sigma_{r+1}, +inf when nothing is discarded or retained
    bool ambiguous = false;
};

/// Decide the numerical rank from a descending list of singular values.
RankDecision decide_rank(const RealVector& singular_values, Index rows, Index cols,
                         const RankPolicy& policy);

struct Subspace {
    Matrix basis;  // ambient x r, B-orthonormal columns
    MetricPtr metric;
    double tol_used = 0;
    double singular_gap = std::numeric_limits<double>::infinity();
    bool rank_ambiguous = false;

    Index ambient_dim() const { return basis.rows(); }
    Index dim() const { return basis.cols(); }
};

/// B-orthonormal basis for the column span of `vectors` (rank decided by `policy`).
Subspace span(const Matrix& vectors, MetricPtr metric, const RankPolicy& policy = {});
Subspace kernel(const Matrix& a, const RankPolicy& policy = {}, MetricPtr metric = nullptr);
Subspace range(const Matrix& a, const RankPolicy& policy = {}, MetricPtr metric = nullptr);

/// Eigen-decomposition of the Hermitian definite pencil S x = lambda B x.
struct PencilSpectrum {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // B-orthonormal columns
};
PencilSpectrum hermitian_pencil(const Matrix& s, const MetricForm& b);

/// Null space of the pencil: eigenvectors with |lambda| <= tol (default n * eps * max|lambda|).
Subspace pencil_kernel(const Matrix& s, MetricPtr metric, const RankPolicy& policy = {});

/// Principal-angle intersection; keeps directions whose cosine is >= cos_threshold.
Subspace intersect(const Subspace& s1, const Subspace& s2, double cos_threshold = 1.0 - 1e-10);

/// Largest principal cosine between two subspaces in their common metric (0 if either is trivial).
double max_principal_cosine(const Subspace& s1, const Subspace& s2);

/// Numerical rank of the stacked bases [S1 | S2 | ...].
Index stacked_rank(const std::vector<const Subspace*>& parts, const RankPolicy& policy = {});

struct ObliqueProjector {
    Matrix range_basis;
    Matrix nullspace_basis;
    Matrix matrix;
    double condition = 1;  // ||P||_2
};

/// Projector onto X along Y. Requires H = X (+) Y; throws NotComplementary otherwise.
ObliqueProjector oblique_projector(const Subspace& x, const Subspace& y);

struct MutualBound {
    double constant = 1;
    double lambda_min = 1;
    double lambda_max = 1;
};

/// Least C with C^{-1}|u|_{B1} <= |u|_{B2} <= C|u|_{B1}, from the pencil (B2, B1).
MutualBound mutual_bound(const MetricForm& b1, const MetricForm& b2);

/// Spectral norm.
double op_norm(const Matrix& a);

}  // namespace rhodge

#endif
