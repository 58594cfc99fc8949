/**
 * Grid-refinement study of the weighted codifferential of a fixed 1-form.
 *
 * On an N x N grid of [0,1]^2 the form is w = eta dx^1, sampled as
 * eta(edge midpoint) * h on x-edges. Each level reports
 * r = |B0^{-1} d0^T B1 w|_{B0} / |w|_{B1} with weights induced by the metric.
 *
 * eta(x) = phi(x_1) phi(x_2) where phi = 1 on [1/4, 3/4], 0 outside (1/8, 7/8)
 * and, on the ramps, phi = psi((x - 1/8) * 8) resp. psi((7/8 - x) * 8) with the
 * smoothstep psi(u) = f(u) / (f(u) + f(1 - u)), f(u) = exp(-1/u) for u > 0.
 */
#ifndef ROUGHHODGE_REFINE_HPP
#define ROUGHHODGE_REFINE_HPP

#include <string>
#include <vector>

#include "roughhodge/roughmetrics.hpp"

namespace rhodge {

enum class RefineModel { Weierstrass, Smooth, Constant };
std::string to_string(RefineModel model);
RefineModel parse_refine_model(const std::string& name);

enum class RefineForm { Bump, Constant };
std::string to_string(RefineForm form);
RefineForm parse_refine_form(const std::string& name);

struct RefineConfig {
    RefineModel model = RefineModel::Weierstrass;
    RefineForm form = RefineForm::Bump;  // Constant: w = dx^1 on the periodic grid
    Index base = 32;
    int levels = 4;
    int weierstrass_terms = 24;
};

struct RefineLevel {
    int level = 0;
    Index n = 0;
    double r = 0;
    double slope = 0;  // log2(r_j / r_{j-1}); 0 on the first level
};

struct RefineResult {
    RefineConfig config;
    std::vector<RefineLevel> levels;
    bool strictly_increasing = false;
    double final_ratio = 1;  // r_J / r_{J-1}
    bool stabilized = false;  // |final_ratio - 1| <= 0.05
};

/// Smooth plateau bump on [0,1]: 1 on [1/4, 3/4], 0 outside (1/8, 7/8).
double plateau(double x);

/// Codifferential ratio on one N x N grid.
double codifferential_ratio(RefineModel model, RefineForm form, Index n, int weierstrass_terms = 24);

RefineResult refine_divergence(const RefineConfig& config);

}  // namespace rhodge

#endif
