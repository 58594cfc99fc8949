/**
 * Hodge-Dirac operators Pi_B = Gamma + B^{-1} Gamma^H B for a nilpotent Gamma
 * and an SPD weight B, their Hodge decompositions, and the kernel
 * isomorphisms ker Pi_{B1} -> ker Pi_{B2} realized as oblique projections.
 */
#ifndef ROUGHHODGE_HODGE_HPP
#define ROUGHHODGE_HODGE_HPP

#include <string>
#include <vector>

#include "roughhodge/linops.hpp"

namespace rhodge {

/**
 * A partition of the ambient coordinates into degrees H_0 (+) ... (+) H_n.
 * Each degree is a sorted list of coordinate indices; the common case of
 * consecutive blocks comes from `from_sizes`.
 */
class GradedStructure {
public:
    GradedStructure() = default;
    explicit GradedStructure(std::vector<std::vector<Index>> degrees);
    static GradedStructure from_sizes(const std::vector<Index>& sizes);
    static GradedStructure single(Index n) { return from_sizes({n}); }

    Index degree_count() const { return static_cast<Index>(degrees_.size()); }
    Index total() const { return total_; }
    Index size(Index k) const { return static_cast<Index>(degrees_.at(static_cast<std::size_t>(k)).size()); }
    std::vector<Index> sizes() const;
    const std::vector<Index>& indices(Index k) const { return degrees_.at(static_cast<std::size_t>(k)); }

    /// Coordinate projector P_k (diagonal, 0/1).
    Matrix projector(Index k) const;
    /// Inclusion H_k -> H (columns of the identity).
    Matrix inclusion(Index k) const;
    /// The (row_degree, col_degree) block of an ambient matrix.
    Matrix block(const Matrix& a, Index row_degree, Index col_degree) const;
    /// Embed a degree-k block into the ambient space.
    Matrix embed(const Matrix& block, Index row_degree, Index col_degree) const;

private:
    std::vector<std::vector<Index>> degrees_;
    Index total_ = 0;
};

struct HodgeDiracOperator {
    NilpotentOperator gamma;
    MetricPtr metric;
    Matrix adjoint;      // Gamma^{*,B}
    Matrix pi;           // Gamma + Gamma^{*,B}
    Matrix symmetrized;  // S = B Gamma + Gamma^H B

    /// ||B Pi - (B Pi)^H|| / ||B Pi||: self-adjointness of Pi in <.,.>_B.
    double self_adjoint_residual = 0;
    /// ||B Pi - S|| / ||S||: Pi = B^{-1} S.
    double representation_residual = 0;
    double adjoint_nilpotency_residual = 0;

    Index dim() const { return pi.rows(); }
};

HodgeDiracOperator build_dirac(const NilpotentOperator& gamma, MetricPtr metric);

/// ker Pi_B from the Hermitian pencil S x = lambda B x.
Subspace dirac_kernel(const HodgeDiracOperator& op, const RankPolicy& policy = {});
/// Spectrum of Pi_B (real, ascending).
RealVector dirac_spectrum(const HodgeDiracOperator& op);

struct HodgeDecomposition {
    Subspace kernel;            // ker Gamma  cap  ker Gamma^{*,B}
    Subspace range_gamma;
    Subspace range_gamma_star;
    Index kernel_dim = 0;
    Index range_gamma_dim = 0;
    Index range_gamma_star_dim = 0;
    Index pencil_kernel_dim = 0;   // dim ker Pi_B from the pencil, cross-check
    Index kernel_gamma_dim = 0;    // dim ker Gamma
    double orthogonality_residual = 0;  // max pairwise principal cosine
    RealVector spectrum;
};

/// H = ker Pi_B (+) ran Gamma (+) ran Gamma^{*,B}, B-orthogonal. Throws RankAmbiguous.
HodgeDecomposition hodge_decompose(const HodgeDiracOperator& op, const RankPolicy& policy = {});

/// Per-degree cohomology dimensions dim ker(Gamma|_k) - rank(Gamma|_{k-1}). Throws GradingViolation.
std::vector<Index> cohomology_dims(const NilpotentOperator& gamma, const GradedStructure& grading,
                                   const RankPolicy& policy = {});

/// dim(ker Pi_B cap H_k) for each degree k.
std::vector<Index> spectral_betti(const HodgeDiracOperator& op, const GradedStructure& grading,
                                  const RankPolicy& policy = {});

enum class IsomorphismMode { AlongRanPi, AlongRanGamma };
std::string to_string(IsomorphismMode mode);

struct KernelIsomorphism {
    IsomorphismMode mode = IsomorphismMode::AlongRanPi;
    Subspace source;    // ker Pi_{B1} (or its degree-j part)
    Subspace target;    // ker Pi_{B2}
    Matrix forward;     // Phi in (source, target) coordinates
    Matrix inverse;     // Phi^{-1} in (target, source) coordinates
    double forward_inverse_residual = 0;  // ||Phi Phi^{-1} - I||
    double inverse_forward_residual = 0;  // ||Phi^{-1} Phi - I||
    double image_residual = 0;            // distance of Phi(source) from the target span
    double condition = 1;                 // kappa(Phi)
    double mutual_bound = 1;              // C(B1, B2)

    Index dim() const { return forward.cols(); }
};

/**
 * Phi = projection onto ker Pi_{B2} along ran Pi_{B1} (or along ran Gamma),
 * restricted to ker Pi_{B1}; Phi^{-1} projects back onto ker Pi_{B1} along
 * the same complement. Throws DimMismatchKernel / NotComplementary.
 */
KernelIsomorphism kernel_isomorphism(const NilpotentOperator& gamma, MetricPtr b1, MetricPtr b2,
                                     IsomorphismMode mode = IsomorphismMode::AlongRanPi,
                                     const RankPolicy& policy = {});

struct SplitCheck {
    bool passed = false;
    std::vector<double> residuals;  // ||[P_j, Pi_B^k]|| per degree
    double threshold = 0;           // tol * ||Pi_B||^k
};

SplitCheck graded_split_check(const HodgeDiracOperator& op, const GradedStructure& grading,
                              int power, double tol = 1e-10);

/// Per-degree isomorphisms ker(Pi_{B1}|H_j) -> ker(Pi_{B2}|H_j). Throws SplitCheckFailed.
std::vector<KernelIsomorphism> restricted_kernel_isomorphism(const NilpotentOperator& gamma,
                                                             MetricPtr b1, MetricPtr b2,
                                                             const GradedStructure& grading,
                                                             int power,
                                                             const RankPolicy& policy = {});

struct PowerKernelCheck {
    bool equal = false;
    Index kernel_dim = 0;
    Index power_kernel_dim = 0;
    Index rank = 0;
    Index power_rank = 0;
};

/// ker Pi_B^k == ker Pi_B and rank Pi_B^k == rank Pi_B.
PowerKernelCheck power_kernel_check(const HodgeDiracOperator& op, int power,
                                    const RankPolicy& policy = {});

/// Integer matrix power by repeated multiplication (power >= 1).
Matrix matrix_power(const Matrix& a, int power);

}  // namespace rhodge

#endif
