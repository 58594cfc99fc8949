/**
 * Rough metric fields on the top cells of a cubical or simplicial carrier and
 * the diagonal per-degree weights they induce on cochains.
 *
 * Cubical k-cell with axes I, adjacent top cell c:
 *   theta(sigma) = det([g_c^{-1}]_{II}) / prod_{i in I} h_i^2 * sqrt(det g_c) * vol(c).
 * Simplicial k-simplex inside top simplex c (c_0 at the origin, c_j at e_j),
 * with edge vectors W from its first vertex:
 *   theta(sigma) = det(W^T g_c^{-1} W) * sqrt(det g_c) * vol(c),  vol(c) = 1/n!.
 */
#ifndef ROUGHHODGE_ROUGHMETRICS_HPP
#define ROUGHHODGE_ROUGHMETRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "roughhodge/complexes.hpp"

namespace rhodge {

enum class MetricModel { Identity, LogGaussian, Weierstrass, Explicit };
std::string to_string(MetricModel model);
MetricModel parse_metric_model(const std::string& name);

struct SamplerConfig {
    std::uint64_t seed = 0;
    MetricModel model = MetricModel::Identity;
    double clamp = 4.0;          // C_max: per-cell spectra lie in [1/C_max, C_max]
    int weierstrass_terms = 24;  // K
    RealMatrix explicit_metric;  // constant g for the explicit model
};

struct MetricField {
    std::string carrier_id;
    Index dimension = 0;  // n: size of each g_c
    std::uint64_t seed = 0;
    std::string model;
    std::vector<RealMatrix> per_cell;
    double c_lo = 1;  // min eigenvalue over cells
    double c_hi = 1;  // max eigenvalue over cells

    Index cell_count() const { return static_cast<Index>(per_cell.size()); }
};

/// Stable identifier of the top-cell carrier of a complex ("cubical:8x8pp", "simplicial:...").
std::string carrier_id(const CochainComplex& c);
/// Manifold dimension n and number of top cells of the carrier. Throws CarrierMismatch.
Index carrier_dimension(const CochainComplex& c);
Index carrier_top_count(const CochainComplex& c);

/// Recompute c_lo, c_hi from the per-cell spectra; throws NotPositiveDefinite.
void refresh_ellipticity(MetricField& field);

/// Deterministic in config.seed. LogGaussian: g = exp(S), S symmetric Gaussian, spectrum clamped.
MetricField sample_metric_field(const CochainComplex& carrier, const SamplerConfig& config);

/// K-term partial sum of sum_k 2^{-k} cos(14^k pi x), with exact dyadic phase reduction.
double weierstrass_partial_sum(double x, int terms);

/// diag((2 + w_K(x_1))^{2/3}, 1, ...) at cell barycenters of a 1D or 2D cubical grid.
MetricField weierstrass_metric(const CochainComplex& grid, int terms = 24);

/// The same SPD matrix on every top cell.
MetricField constant_metric_field(const CochainComplex& carrier, const RealMatrix& g,
                                  const std::string& model = "explicit");

struct WeightSpec {
    GradedStructure grading;
    std::vector<Matrix> blocks;  // B_k on degree k (diagonal unless built from dense blocks)
    MetricPtr total;             // block-diagonal assembly
    std::string provenance;

    Index degree_count() const { return static_cast<Index>(blocks.size()); }
};

WeightSpec weights_from_blocks(const GradedStructure& grading, std::vector<Matrix> blocks,
                               std::string provenance);
WeightSpec identity_weights(const GradedStructure& grading);
/// Random dense SPD block per degree with spectrum in [1/clamp, clamp].
WeightSpec random_block_weights(const GradedStructure& grading, std::uint64_t seed, double clamp);

/// Diagonal weights induced by the field. Throws CarrierMismatch.
WeightSpec induce_weights(const MetricField& field, const CochainComplex& c);
/// Per-degree diagonal of induce_weights (one entry per carrier cell, before fiber expansion).
std::vector<RealVector> induced_cell_weights(const MetricField& field, const CochainComplex& c);

/// Per-cell factors with spectra in [1/F, F]; g'_c = g_c^{1/2} f_c g_c^{1/2}. Throws FactorNotElliptic.
MetricField perturb_metric(const MetricField& field, const std::vector<RealMatrix>& factors, double bound);
/// Scalar factor f > 0: g'_c = f g_c.
MetricField perturb_metric(const MetricField& field, double factor);

struct TransferReport {
    double c_field = 1;               // max over cells of mutual_bound(g1_c, g2_c)
    std::vector<double> constants;    // mutual_bound(B1_k, B2_k)
    std::vector<double> bounds;       // c_field^{(n+2k)/2}
    std::vector<double> exponents;    // (n+2k)/2
    bool passed = true;
};

TransferReport transfer_bound_check(const MetricField& f1, const MetricField& f2,
                                    const CochainComplex& c, double slack = 1e-9);

/// Header lines (carrier, n, cells, seed, model) then one row-major matrix per line, 17 digits.
std::string serialize_field(const MetricField& field);
MetricField parse_field(std::istream& in);

}  // namespace rhodge

#endif
