#include "roughhodge/roughmetrics.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "roughhodge/errors.hpp"

namespace rhodge {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_spd(const RealMatrix& g, const char* what)
{
    if (g.rows() != g.cols() || g.rows() == 0)
        throw Error(ErrorKind::DimensionMismatch, std::string(what) + " must be square and non-empty");
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, g.cwiseAbs().maxCoeff()))
        throw Error(ErrorKind::NotHermitian, std::string(what) + " is not symmetric");
}

RealVector symmetric_spectrum(const RealMatrix& g)
{
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(g, Eigen::EigenvaluesOnly);
    return eig.eigenvalues();
}

RealMatrix spectral_map(const RealMatrix& s, double (*fn)(double))
{
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(s);
    const RealVector mapped = eig.eigenvalues().unaryExpr(fn);
    RealMatrix out = eig.eigenvectors() * mapped.asDiagonal() * eig.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
}

// exp(S) for symmetric Gaussian S, spectrum clamped to [1/clamp, clamp].
RealMatrix log_gaussian_cell(std::mt19937_64& rng, Index n, double clamp)
{
    if (clamp <= 1.0)
        return RealMatrix::Identity(n, n);
    const double sigma = std::log(clamp) / (2.0 * std::sqrt(static_cast<double>(n)));
    std::normal_distribution<double> normal(0.0, sigma);
    RealMatrix s(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = i; j < n; ++j)
            s(i, j) = s(j, i) = normal(rng);
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(s);
    const double lo = -std::log(clamp), hi = std::log(clamp);
    RealVector lam = eig.eigenvalues().unaryExpr([&](double v) { return std::exp(std::clamp(v, lo, hi)); });
    RealMatrix g = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
    return 0.5 * (g + g.transpose());
}

double factorial(Index n)
{
    double f = 1;
    for (Index i = 2; i <= n; ++i)
        f *= static_cast<double>(i);
    return f;
}

MetricPtr metric_of(const RealMatrix& g)
{
    return make_metric(g.cast<Scalar>());
}

std::uint64_t simplicial_hash(const SimplicialComplex& k)
{
    std::uint64_t h = 1469598103934665603ull;
    for (Index d = 0; d <= k.dimension(); ++d)
        for (const Simplex& s : k.simplices(d)) {
            for (Index v : s) {
                h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull;
                h *= 1099511628211ull;
            }
            h ^= 0xff;
            h *= 1099511628211ull;
        }
    return h;
}

}  // namespace

std::string to_string(MetricModel model)
{
    switch (model) {
    case MetricModel::Identity: return "identity";
    case MetricModel::LogGaussian: return "log_gaussian";
    case MetricModel::Weierstrass: return "weierstrass";
    case MetricModel::Explicit: return "explicit";
    }
    return "unknown";
}

MetricModel parse_metric_model(const std::string& name)
{
    for (MetricModel m : {MetricModel::Identity, MetricModel::LogGaussian, MetricModel::Weierstrass,
                          MetricModel::Explicit})
        if (to_string(m) == name)
            return m;
    throw Error(ErrorKind::ParseError, "unknown metric model '" + name + "'");
}

std::string carrier_id(const CochainComplex& c)
{
    std::ostringstream id;
    if (c.cubical) {
        id << "cubical:";
        for (std::size_t a = 0; a < c.cubical->sizes.size(); ++a)
            id << (a ? "x" : "") << c.cubical->sizes[a] << (c.cubical->periodic[a] ? "p" : "");
        return id.str();
    }
    if (c.simplicial) {
        const SimplicialComplex& k = *c.simplicial;
        id << "simplicial:";
        for (Index d = 0; d <= k.dimension(); ++d)
            id << (d ? "-" : "") << k.count(d);
        id << ":" << std::hex << std::setw(16) << std::setfill('0') << simplicial_hash(k);
        return id.str();
    }
    throw Error(ErrorKind::CarrierMismatch, "complex '" + c.name + "' has no geometric carrier");
}

Index carrier_dimension(const CochainComplex& c)
{
    if (c.cubical)
        return c.cubical->dimension();
    if (c.simplicial)
        return c.simplicial->dimension();
    throw Error(ErrorKind::CarrierMismatch, "complex '" + c.name + "' has no geometric carrier");
}

Index carrier_top_count(const CochainComplex& c)
{
    if (c.cubical)
        return c.cubical->top_count();
    if (c.simplicial)
        return c.simplicial->count(c.simplicial->dimension());
    throw Error(ErrorKind::CarrierMismatch, "complex '" + c.name + "' has no geometric carrier");
}

void refresh_ellipticity(MetricField& field)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0;
    for (const RealMatrix& g : field.per_cell) {
        require_spd(g, "cell metric");
        if (g.rows() != field.dimension)
            throw Error(ErrorKind::DimensionMismatch, "cell metric has the wrong size");
        const RealVector lam = symmetric_spectrum(g);
        if (!(lam.minCoeff() > 0))
            throw Error(ErrorKind::NotPositiveDefinite, "cell metric is not positive definite", lam.minCoeff());
        lo = std::min(lo, lam.minCoeff());
        hi = std::max(hi, lam.maxCoeff());
    }
    field.c_lo = field.per_cell.empty() ? 1 : lo;
    field.c_hi = field.per_cell.empty() ? 1 : hi;
}

MetricField sample_metric_field(const CochainComplex& carrier, const SamplerConfig& config)
{
    if (!std::isfinite(config.clamp) || config.clamp < 1)
        throw Error(ErrorKind::ParseError, "clamp C_max must be finite and >= 1");
    if (config.weierstrass_terms < 1)
        throw Error(ErrorKind::ParseError, "weierstrass_terms must be >= 1");
    if (config.model == MetricModel::Weierstrass) {
        MetricField f = weierstrass_metric(carrier, config.weierstrass_terms);
        f.seed = config.seed;
        return f;
    }
    const Index n = carrier_dimension(carrier);
    if (config.model == MetricModel::Explicit) {
        MetricField f = constant_metric_field(carrier, config.explicit_metric, "explicit");
        f.seed = config.seed;
        return f;
    }
    MetricField f;
    f.carrier_id = carrier_id(carrier);
    f.dimension = n;
    f.seed = config.seed;
    f.model = to_string(config.model);
    const Index cells = carrier_top_count(carrier);
    f.per_cell.reserve(static_cast<std::size_t>(cells));
    std::mt19937_64 rng(config.seed);
    for (Index c = 0; c < cells; ++c) {
        if (config.model == MetricModel::Identity)
            f.per_cell.push_back(RealMatrix::Identity(n, n));
        else
            f.per_cell.push_back(log_gaussian_cell(rng, n, config.clamp));
    }
    refresh_ellipticity(f);
    return f;
}

double weierstrass_partial_sum(double x, int terms)
{
    if (terms < 1)
        throw Error(ErrorKind::ParseError, "weierstrass_terms must be >= 1");
    x = std::fabs(x);
    if (!std::isfinite(x))
        throw Error(ErrorKind::ParseError, "weierstrass argument must be finite");
    double sum = 0;
    double weight = 1;
    if (x == 0) {
        for (int k = 0; k < terms; ++k, weight *= 0.5)
            sum += weight;
        return sum;
    }
    // x = m * 2^e exactly, m an integer; 14^k x = 7^k m 2^{k+e}, reduced mod 2.
    int exp2 = 0;
    const double frac = std::frexp(x, &exp2);
    const mpz_class m(std::ldexp(frac, 53));
    const long e = exp2 - 53;
    mpz_class seven_k = 1;
    for (int k = 0; k < terms; ++k, weight *= 0.5, seven_k *= 7) {
        const long shift = -(e + k);  // 14^k x = 7^k m / 2^shift
        double phase = 0;             // in [0, 2)
        if (shift > 0) {
            mpz_class r = seven_k * m;
            mpz_fdiv_r_2exp(r.get_mpz_t(), r.get_mpz_t(), static_cast<mp_bitcnt_t>(shift + 1));
            long r_exp = 0;
            const double mant = mpz_get_d_2exp(&r_exp, r.get_mpz_t());
            phase = std::ldexp(mant, static_cast<int>(r_exp - shift));
        }
        sum += weight * std::cos(kPi * phase);
    }
    return sum;
}

MetricField weierstrass_metric(const CochainComplex& grid, int terms)
{
    if (!grid.cubical || grid.cubical->dimension() > 2)
        throw Error(ErrorKind::CarrierMismatch, "the Weierstrass metric lives on a 1D or 2D cubical grid");
    const CubicalLayout& layout = *grid.cubical;
    const Index n = layout.dimension();
    MetricField f;
    f.carrier_id = carrier_id(grid);
    f.dimension = n;
    f.model = "weierstrass";
    for (Index c = 0; c < layout.top_count(); ++c) {
        const double x1 = layout.top_barycenter(c)[0];
        const double w = weierstrass_partial_sum(x1, terms);
        RealMatrix g = RealMatrix::Identity(n, n);
        g(0, 0) = std::pow(std::max(2.0 + w, 1e-6), 2.0 / 3.0);
        f.per_cell.push_back(g);
    }
    refresh_ellipticity(f);
    return f;
}

MetricField constant_metric_field(const CochainComplex& carrier, const RealMatrix& g, const std::string& model)
{
    const Index n = carrier_dimension(carrier);
    if (g.rows() != n || g.cols() != n)
        throw Error(ErrorKind::DimensionMismatch, "explicit metric must be n x n for the carrier dimension");
    require_spd(g, "explicit metric");
    MetricField f;
    f.carrier_id = carrier_id(carrier);
    f.dimension = n;
    f.model = model;
    f.per_cell.assign(static_cast<std::size_t>(carrier_top_count(carrier)), g);
    refresh_ellipticity(f);
    return f;
}

// ---------------------------------------------------------------------------
// Weights

WeightSpec weights_from_blocks(const GradedStructure& grading, std::vector<Matrix> blocks, std::string provenance)
{
    if (static_cast<Index>(blocks.size()) != grading.degree_count())
        throw Error(ErrorKind::DimensionMismatch, "one weight block per degree is required");
    const Index n = grading.total();
    Matrix total = Matrix::Zero(n, n);
    for (Index k = 0; k < grading.degree_count(); ++k) {
        const Matrix& b = blocks[static_cast<std::size_t>(k)];
        if (b.rows() != grading.size(k) || b.cols() != grading.size(k))
            throw Error(ErrorKind::DimensionMismatch, "weight block has the wrong size");
        total += grading.embed(b, k, k);
    }
    WeightSpec w;
    w.grading = grading;
    w.blocks = std::move(blocks);
    w.total = make_metric(total);
    w.provenance = std::move(provenance);
    return w;
}

WeightSpec identity_weights(const GradedStructure& grading)
{
    std::vector<Matrix> blocks;
    for (Index k = 0; k < grading.degree_count(); ++k)
        blocks.push_back(Matrix::Identity(grading.size(k), grading.size(k)));
    return weights_from_blocks(grading, std::move(blocks), "identity");
}

WeightSpec random_block_weights(const GradedStructure& grading, std::uint64_t seed, double clamp)
{
    std::mt19937_64 rng(seed);
    std::vector<Matrix> blocks;
    for (Index k = 0; k < grading.degree_count(); ++k)
        blocks.push_back(log_gaussian_cell(rng, grading.size(k), clamp).cast<Scalar>());
    std::ostringstream prov;
    prov << "block_spd(seed=" << seed << ", clamp=" << clamp << ")";
    return weights_from_blocks(grading, std::move(blocks), prov.str());
}

std::vector<RealVector> induced_cell_weights(const MetricField& field, const CochainComplex& c)
{
    if (field.carrier_id != carrier_id(c))
        throw Error(ErrorKind::CarrierMismatch,
                    "metric field on '" + field.carrier_id + "' used with carrier '" + carrier_id(c) + "'");
    const Index n = field.dimension;
    std::vector<RealMatrix> inverse;
    std::vector<double> density;  // sqrt(det g_c) * vol(c)
    inverse.reserve(field.per_cell.size());
    const double top_volume = c.cubical ? c.cubical->cell_volume() : 1.0 / factorial(n);
    for (const RealMatrix& g : field.per_cell) {
        Eigen::LLT<RealMatrix> llt(g);
        inverse.push_back(llt.solve(RealMatrix::Identity(n, n)));
        const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
        density.push_back(std::exp(0.5 * log_det) * top_volume);
    }

    std::vector<RealVector> out;
    for (Index k = 0; k < c.degree_count(); ++k) {
        const auto& cells = c.cells[static_cast<std::size_t>(k)];
        RealVector theta(static_cast<Index>(cells.size()));
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const Index cell = cells[i];
            Index top = 0;
            RealMatrix w;  // n x k edge frame
            if (c.cubical) {
                const CubicalLayout& layout = *c.cubical;
                const auto& geo = layout.cells[static_cast<std::size_t>(k)][static_cast<std::size_t>(cell)];
                top = layout.adjacent_top(geo);
                w = RealMatrix::Zero(n, k);
                for (Index j = 0; j < k; ++j) {
                    const Index axis = geo.axes[static_cast<std::size_t>(j)];
                    w(axis, j) = 1.0 / layout.spacing(axis);
                }
            } else {
                const SimplicialComplex& sk = *c.simplicial;
                const Simplex& s = sk.simplices(k)[static_cast<std::size_t>(cell)];
                const auto& tops = sk.simplices(n);
                bool found = false;
                for (std::size_t t = 0; t < tops.size() && !found; ++t) {
                    if (std::includes(tops[t].begin(), tops[t].end(), s.begin(), s.end())) {
                        top = static_cast<Index>(t);
                        found = true;
                    }
                }
                if (!found)
                    throw Error(ErrorKind::CarrierMismatch,
                                "simplex lies in no top-dimensional simplex; metric fields need a pure complex");
                const Simplex& ts = tops[static_cast<std::size_t>(top)];
                auto frame = [&](Index v) {
                    RealVector p = RealVector::Zero(n);
                    const auto pos = std::find(ts.begin(), ts.end(), v) - ts.begin();
                    if (pos > 0)
                        p(pos - 1) = 1.0;
                    return p;
                };
                w = RealMatrix(n, k);
                const RealVector base = frame(s[0]);
                for (Index j = 0; j < k; ++j)
                    w.col(j) = frame(s[static_cast<std::size_t>(j + 1)]) - base;
            }
            const RealMatrix gram = w.transpose() * inverse[static_cast<std::size_t>(top)] * w;
            const double lam = (k == 0) ? 1.0 : gram.determinant();
            theta(static_cast<Index>(i)) = lam * density[static_cast<std::size_t>(top)];
            if (!(theta(static_cast<Index>(i)) > 0))
                throw Error(ErrorKind::NotPositiveDefinite, "induced weight is not positive", theta(static_cast<Index>(i)));
        }
        out.push_back(std::move(theta));
    }
    return out;
}

WeightSpec induce_weights(const MetricField& field, const CochainComplex& c)
{
    const std::vector<RealVector> cell_weights = induced_cell_weights(field, c);
    std::vector<Matrix> blocks;
    for (const RealVector& theta : cell_weights) {
        RealVector expanded(theta.size() * c.fiber_rank);
        for (Index i = 0; i < theta.size(); ++i)
            expanded.segment(i * c.fiber_rank, c.fiber_rank).setConstant(theta(i));
        blocks.push_back(expanded.cast<Scalar>().asDiagonal());
    }
    return weights_from_blocks(c.grading, std::move(blocks),
                               "induced(" + field.model + ", seed=" + std::to_string(field.seed) + ")");
}

MetricField perturb_metric(const MetricField& field, const std::vector<RealMatrix>& factors, double bound)
{
    if (factors.size() != field.per_cell.size())
        throw Error(ErrorKind::DimensionMismatch, "one perturbation factor per cell is required");
    if (!(bound >= 1) || !std::isfinite(bound))
        throw Error(ErrorKind::FactorNotElliptic, "factor bound F must be finite and >= 1");
    MetricField out = field;
    out.model = field.model + "+perturbed";
    for (std::size_t c = 0; c < factors.size(); ++c) {
        const RealMatrix& f = factors[c];
        if (f.rows() != field.dimension || f.cols() != field.dimension)
            throw Error(ErrorKind::DimensionMismatch, "perturbation factor has the wrong size");
        if ((f - f.transpose()).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, f.cwiseAbs().maxCoeff()))
            throw Error(ErrorKind::FactorNotElliptic, "perturbation factor is not symmetric");
        const RealVector lam = symmetric_spectrum(f);
        const double slack = 1e-12;
        if (lam.minCoeff() < (1.0 / bound) * (1 - slack) || lam.maxCoeff() > bound * (1 + slack)) {
            std::ostringstream msg;
            msg << "factor spectrum [" << lam.minCoeff() << ", " << lam.maxCoeff() << "] leaves [1/F, F], F = "
                << bound;
            throw Error(ErrorKind::FactorNotElliptic, msg.str(), lam.maxCoeff());
        }
        const RealMatrix root = spectral_map(field.per_cell[c], [](double v) { return std::sqrt(v); });
        RealMatrix g = root * f * root;
        out.per_cell[c] = 0.5 * (g + g.transpose());
    }
    refresh_ellipticity(out);
    return out;
}

MetricField perturb_metric(const MetricField& field, double factor)
{
    if (!(factor > 0) || !std::isfinite(factor))
        throw Error(ErrorKind::FactorNotElliptic, "scalar factor must be positive and finite", factor);
    MetricField out = field;
    out.model = field.model + "+scaled";
    for (RealMatrix& g : out.per_cell)
        g *= factor;
    refresh_ellipticity(out);
    return out;
}

TransferReport transfer_bound_check(const MetricField& f1, const MetricField& f2, const CochainComplex& c,
                                    double slack)
{
    if (f1.carrier_id != f2.carrier_id || f1.per_cell.size() != f2.per_cell.size())
        throw Error(ErrorKind::CarrierMismatch, "transfer check needs fields on a common carrier");
    TransferReport report;
    for (std::size_t i = 0; i < f1.per_cell.size(); ++i)
        report.c_field = std::max(report.c_field,
                                  mutual_bound(*metric_of(f1.per_cell[i]), *metric_of(f2.per_cell[i])).constant);
    const WeightSpec w1 = induce_weights(f1, c);
    const WeightSpec w2 = induce_weights(f2, c);
    const double n = static_cast<double>(f1.dimension);
    for (Index k = 0; k < w1.degree_count(); ++k) {
        double constant = 1;
        if (w1.grading.size(k) > 0)
            constant = mutual_bound(*make_metric(w1.blocks[static_cast<std::size_t>(k)]),
                                    *make_metric(w2.blocks[static_cast<std::size_t>(k)]))
                           .constant;
        const double exponent = (n + 2.0 * static_cast<double>(k)) / 2.0;
        const double bound = std::pow(report.c_field, exponent);
        report.constants.push_back(constant);
        report.exponents.push_back(exponent);
        report.bounds.push_back(bound);
        if (constant > bound * (1 + slack))
            report.passed = false;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Text serialization

std::string serialize_field(const MetricField& field)
{
    std::ostringstream out;
    out << std::setprecision(17);
    out << "# roughhodge metric field\n";
    out << "carrier " << field.carrier_id << "\n";
    out << "dimension " << field.dimension << "\n";
    out << "cells " << field.per_cell.size() << "\n";
    out << "seed " << field.seed << "\n";
    out << "model " << field.model << "\n";
    for (const RealMatrix& g : field.per_cell) {
        for (Index i = 0; i < g.rows(); ++i)
            for (Index j = 0; j < g.cols(); ++j)
                out << ((i || j) ? " " : "") << g(i, j);
        out << "\n";
    }
    return out.str();
}

MetricField parse_field(std::istream& in)
{
    MetricField f;
    std::string line;
    Index cells = -1;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        throw Error(ErrorKind::ParseError, "metric field line " + std::to_string(line_no) + ": " + what);
    };
    bool have[5] = {false, false, false, false, false};
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream fields(line);
        std::string key;
        fields >> key;
        if (key == "carrier") {
            fields >> f.carrier_id;
            have[0] = true;
        } else if (key == "dimension") {
            fields >> f.dimension;
            have[1] = true;
        } else if (key == "cells") {
            fields >> cells;
            have[2] = true;
        } else if (key == "seed") {
            fields >> f.seed;
            have[3] = true;
        } else if (key == "model") {
            fields >> f.model;
            have[4] = true;
        } else {
            if (!std::all_of(std::begin(have), std::end(have), [](bool b) { return b; }))
                fail("matrix rows before a complete header");
            std::istringstream values(line);
            RealMatrix g(f.dimension, f.dimension);
            for (Index i = 0; i < f.dimension; ++i)
                for (Index j = 0; j < f.dimension; ++j)
                    if (!(values >> g(i, j)))
                        fail("expected " + std::to_string(f.dimension * f.dimension) + " entries");
            std::string extra;
            if (values >> extra)
                fail("trailing entries");
            f.per_cell.push_back(std::move(g));
            continue;
        }
        if (fields.fail())
            fail("malformed header value for '" + key + "'");
    }
    if (cells < 0 || static_cast<Index>(f.per_cell.size()) != cells)
        throw Error(ErrorKind::ParseError, "metric field declares " + std::to_string(cells) + " cells but lists " +
                                               std::to_string(f.per_cell.size()));
    refresh_ellipticity(f);
    return f;
}

}  // namespace rhodge
