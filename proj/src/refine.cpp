#include "roughhodge/refine.hpp"

#include <cmath>

#include "roughhodge/errors.hpp"

namespace rhodge {

namespace {

double smoothstep(double u)
{
    if (u <= 0)
        return 0;
    if (u >= 1)
        return 1;
    const double a = std::exp(-1.0 / u);
    const double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

}  // namespace

std::string to_string(RefineModel model)
{
    switch (model) {
    case RefineModel::Weierstrass: return "weierstrass";
    case RefineModel::Smooth: return "smooth";
    case RefineModel::Constant: return "constant";
    }
    return "unknown";
}

RefineModel parse_refine_model(const std::string& name)
{
    for (RefineModel m : {RefineModel::Weierstrass, RefineModel::Smooth, RefineModel::Constant})
        if (to_string(m) == name)
            return m;
    throw Error(ErrorKind::ParseError, "unknown refinement model '" + name + "'");
}

std::string to_string(RefineForm form)
{
    return form == RefineForm::Bump ? "bump" : "constant";
}

RefineForm parse_refine_form(const std::string& name)
{
    if (name == "bump")
        return RefineForm::Bump;
    if (name == "constant")
        return RefineForm::Constant;
    throw Error(ErrorKind::ParseError, "unknown refinement form '" + name + "'");
}

double plateau(double x)
{
    if (x <= 0.5)
        return smoothstep((x - 0.125) * 8.0);
    return smoothstep((0.875 - x) * 8.0);
}

double codifferential_ratio(RefineModel model, RefineForm form, Index n, int weierstrass_terms)
{
    if (n < 1)
        throw Error(ErrorKind::EmptyGrid, "refinement grid size must be >= 1");
    const bool periodic = form == RefineForm::Constant;
    const CochainComplex grid = build_cubical({n, n}, {periodic, periodic}, {1.0, 1.0});
    MetricField field;
    switch (model) {
    case RefineModel::Weierstrass:
        field = weierstrass_metric(grid, weierstrass_terms);
        break;
    case RefineModel::Smooth: {
        RealMatrix g = RealMatrix::Identity(2, 2);
        g(0, 0) = 2.0;
        field = constant_metric_field(grid, g, "smooth");
        break;
    }
    case RefineModel::Constant:
        field = constant_metric_field(grid, RealMatrix::Identity(2, 2), "constant");
        break;
    }
    const std::vector<RealVector> theta = induced_cell_weights(field, grid);
    const CubicalLayout& layout = *grid.cubical;
    const double h = layout.spacing(0);

    const auto& edges = layout.cells[1];
    RealVector omega = RealVector::Zero(static_cast<Index>(edges.size()));
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e].axes[0] != 0)
            continue;
        const double x1 = (static_cast<double>(edges[e].position[0]) + 0.5) * h;
        const double x2 = static_cast<double>(edges[e].position[1]) * h;
        const double eta = periodic ? 1.0 : plateau(x1) * plateau(x2);
        omega(static_cast<Index>(e)) = eta * h;
    }
    const Eigen::SparseMatrix<double> d0 = grid.coboundaries[0].real();
    const RealVector weighted = theta[1].cwiseProduct(omega);
    const RealVector codiff = (d0.transpose() * weighted).cwiseQuotient(theta[0]);
    const double num = std::sqrt(codiff.cwiseAbs2().dot(theta[0]));
    const double den = std::sqrt(omega.cwiseAbs2().dot(theta[1]));
    return num / den;
}

RefineResult refine_divergence(const RefineConfig& config)
{
    if (config.levels < 1 || config.base < 1)
        throw Error(ErrorKind::ParseError, "refinement needs levels >= 1 and base >= 1");
    RefineResult result;
    result.config = config;
    for (int j = 0; j < config.levels; ++j) {
        RefineLevel level;
        level.level = j;
        level.n = config.base << j;
        level.r = codifferential_ratio(config.model, config.form, level.n, config.weierstrass_terms);
        if (j > 0)
            level.slope = std::log2(level.r / result.levels.back().r);
        result.levels.push_back(level);
    }
    result.strictly_increasing = true;
    for (std::size_t j = 1; j < result.levels.size(); ++j)
        if (!(result.levels[j].r > result.levels[j - 1].r))
            result.strictly_increasing = false;
    if (result.levels.size() >= 2)
        result.final_ratio = result.levels.back().r / result.levels[result.levels.size() - 2].r;
    result.stabilized = std::abs(result.final_ratio - 1.0) <= 0.05;
    return result;
}

}  // namespace rhodge
