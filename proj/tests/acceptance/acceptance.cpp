// Acceptance run: one PASS/FAIL line per criterion, INFO lines for supporting measurements.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "roughhodge/complexes.hpp"
#include "roughhodge/errors.hpp"
#include "roughhodge/hodge.hpp"
#include "roughhodge/refine.hpp"
#include "roughhodge/roughmetrics.hpp"

using namespace rhodge;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> info;

    void require(bool ok, const std::string& what)
    {
        if (!ok && pass) {
            pass = false;
            detail = what;
        } else if (!ok) {
            info.push_back("also failed: " + what);
        }
    }
};

template <class... Args>
std::string fmt(const char* f, Args... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string list(const std::vector<Index>& v)
{
    std::ostringstream s;
    s << "(";
    for (std::size_t i = 0; i < v.size(); ++i)
        s << (i ? "," : "") << v[i];
    s << ")";
    return s.str();
}

// ---------------------------------------------------------------------------
// Fixtures with rough metric fields

constexpr int kSeeds = 20;
constexpr double kClamp = 4.0;

struct Case {
    std::string label;
    CochainComplex complex;
    CochainComplex carrier;  // the complex the field lives on
    std::vector<Index> expected;
};

std::vector<Case> betti_cases()
{
    std::vector<Case> out;
    const auto add = [&](std::string label, CochainComplex c, std::vector<Index> expected) {
        out.push_back({std::move(label), c, c, std::move(expected)});
    };
    add("cycle_3", build_fixture("cycle_3"), {1, 1});
    add("octahedron", build_fixture("octahedron"), {1, 0, 1});
    add("torus 4x4", build_cubical({4, 4}, {true, true}), {1, 2, 1});
    const CochainComplex ball = build_fixture("ball_cone_octahedron");
    add("ball_cone abs", ball, {1, 0, 0, 0});
    out.push_back({"ball_cone rel", relative_complex(ball, topological_boundary(*ball.simplicial)), ball, {0, 0, 0, 1}});
    return out;
}

struct Sample {
    MetricField field;
    WeightSpec weights;
};

Sample sample(const Case& c, std::uint64_t seed)
{
    SamplerConfig cfg;
    cfg.seed = seed;
    cfg.model = MetricModel::LogGaussian;
    cfg.clamp = kClamp;
    MetricField field = sample_metric_field(c.carrier, cfg);
    WeightSpec weights = induce_weights(field, c.complex);
    return {std::move(field), std::move(weights)};
}

/// Visit every (case, seed) with its Dirac operator.
void for_each_run(const std::function<void(const Case&, int, const Sample&, const HodgeDiracOperator&)>& f)
{
    for (const Case& c : betti_cases()) {
        const NilpotentOperator gamma = c.complex.total_gamma();
        for (int s = 0; s < kSeeds; ++s) {
            const Sample m = sample(c, 1000 + static_cast<std::uint64_t>(s));
            f(c, s, m, build_dirac(gamma, m.weights.total));
        }
    }
}

// ---------------------------------------------------------------------------

Outcome betti_invariance()
{
    Outcome o;
    const auto t0 = Clock::now();
    int runs = 0;
    for_each_run([&](const Case& c, int s, const Sample&, const HodgeDiracOperator& op) {
        const std::vector<Index> smith = betti_smith(c.complex).betti;
        const std::vector<Index> spectral = spectral_betti(op, c.complex.grading);
        o.require(smith == c.expected, c.label + ": Smith oracle gives " + list(smith));
        o.require(spectral == smith,
                  fmt("%s seed %d: spectral %s vs Smith %s", c.label.c_str(), s, list(spectral).c_str(),
                      list(smith).c_str()));
        ++runs;
    });
    const double elapsed = seconds_since(t0);
    o.require(elapsed < 60.0, fmt("runtime %.1f s exceeds 60 s", elapsed));
    if (o.pass)
        o.detail = fmt("%d runs (5 fixtures x %d fields, C_max = 4) match Smith exactly; %.2f s", runs, kSeeds, elapsed);
    return o;
}

Outcome kernel_isomorphism_both_modes()
{
    Outcome o;
    double worst = 0, worst_mode_gap = 0, worst_kappa = 1;
    int count = 0;
    for (const Case& c : betti_cases()) {
        const NilpotentOperator gamma = c.complex.total_gamma();
        std::vector<Sample> samples;
        for (int s = 0; s < kSeeds; ++s)
            samples.push_back(sample(c, 1000 + static_cast<std::uint64_t>(s)));
        Index total = 0;
        for (Index b : c.expected)
            total += b;
        for (int s = 0; s < kSeeds; ++s) {
            const MetricPtr b1 = samples[static_cast<std::size_t>(s)].weights.total;
            const MetricPtr b2 = samples[static_cast<std::size_t>((s + 1) % kSeeds)].weights.total;
            Matrix maps[2];
            int m = 0;
            for (IsomorphismMode mode : {IsomorphismMode::AlongRanPi, IsomorphismMode::AlongRanGamma}) {
                try {
                    const KernelIsomorphism phi = kernel_isomorphism(gamma, b1, b2, mode);
                    const double r = std::max(phi.forward_inverse_residual, phi.inverse_forward_residual);
                    worst = std::max(worst, r);
                    worst_kappa = std::max(worst_kappa, phi.condition);
                    o.require(phi.dim() == total, fmt("%s pair %d: kernel dim %ld, expected %ld", c.label.c_str(), s,
                                                      static_cast<long>(phi.dim()), static_cast<long>(total)));
                    o.require(r <= 1e-8, fmt("%s pair %d %s: residual %.3g", c.label.c_str(), s,
                                             to_string(mode).c_str(), r));
                    maps[m] = phi.target.basis * phi.forward;
                } catch (const Error& e) {
                    o.require(false, c.label + " pair " + std::to_string(s) + " " + to_string(mode) + ": " + e.what());
                }
                ++m;
                ++count;
            }
            if (maps[0].size() && maps[1].size())
                worst_mode_gap = std::max(worst_mode_gap, (maps[0] - maps[1]).norm());
        }
    }
    o.info.push_back(fmt("largest |Phi Phi^-1 - I|, |Phi^-1 Phi - I| = %.3g; largest kappa(Phi) = %.3g", worst,
                         worst_kappa));
    o.info.push_back(fmt("largest difference between the two modes' maps = %.3g", worst_mode_gap));
    if (o.pass)
        o.detail = fmt("%d isomorphisms over 5 fixtures x %d pairs x 2 modes, worst residual %.2g <= 1e-8", count,
                       kSeeds, worst);
    return o;
}

Outcome decomposition_exactness()
{
    Outcome o;
    double worst = 0;
    int runs = 0;
    for_each_run([&](const Case& c, int s, const Sample&, const HodgeDiracOperator& op) {
        const HodgeDecomposition h = hodge_decompose(op);
        o.require(h.kernel_dim + h.range_gamma_dim + h.range_gamma_star_dim == c.complex.total_dim(),
                  fmt("%s seed %d: %ld + %ld + %ld != %ld", c.label.c_str(), s, static_cast<long>(h.kernel_dim),
                      static_cast<long>(h.range_gamma_dim), static_cast<long>(h.range_gamma_star_dim),
                      static_cast<long>(c.complex.total_dim())));
        o.require(h.pencil_kernel_dim == h.kernel_dim, c.label + ": pencil kernel differs from ker Gamma cap ker Gamma*");
        o.require(h.kernel_gamma_dim == h.kernel_dim + h.range_gamma_dim, c.label + ": ker Gamma != ker Pi + ran Gamma");
        worst = std::max(worst, h.orthogonality_residual);
        o.require(h.orthogonality_residual <= 1e-10,
                  fmt("%s seed %d: orthogonality %.3g", c.label.c_str(), s, h.orthogonality_residual));
        ++runs;
    });
    if (o.pass)
        o.detail = fmt("%d runs, dimensions exact, worst B-orthogonality residual %.2g <= 1e-10", runs, worst);
    return o;
}

double hermitian_defect(const Matrix& s)
{
    const double n = op_norm(s);
    return n == 0 ? 0 : op_norm(s - s.adjoint()) / n;
}

Outcome self_adjointness()
{
    Outcome o;
    double worst = 0, worst_bpi = 0;
    int count = 0;
    const auto record = [&](const std::string& label, const HodgeDiracOperator& op) {
        const double d = hermitian_defect(op.symmetrized);
        worst = std::max(worst, d);
        worst_bpi = std::max(worst_bpi, op.self_adjoint_residual);
        o.require(d <= 1e-12, fmt("%s: |S - S^H| / |S| = %.3g", label.c_str(), d));
        ++count;
    };
    for_each_run([&](const Case& c, int s, const Sample&, const HodgeDiracOperator& op) {
        record(c.label + " seed " + std::to_string(s), op);
    });
    // Twisted and Koszul operators with dense random weights.
    const CochainComplex cyc = build_fixture("cycle_5");
    std::vector<Scalar> t(5, Scalar(1));
    t[0] = std::polar(1.0, 1.3);
    const CochainComplex twisted = twisted_coboundary(cyc, LocalSystem::scalar(t));
    const KoszulModel kz = koszul_wedge(4, ExteriorElement::basis({0}) + ExteriorElement::basis({1, 2, 3}) * Scalar(2));
    for (std::uint64_t s = 0; s < 5; ++s) {
        record("twisted cycle_5", build_dirac(twisted.total_gamma(), random_block_weights(twisted.grading, s, kClamp).total));
        record("Koszul n=4", build_dirac(kz.op, random_block_weights(kz.parity_grading(), s, kClamp).total));
    }
    o.info.push_back(fmt("largest |B Pi - (B Pi)^H| / |B Pi| = %.3g", worst_bpi));
    if (o.pass)
        o.detail = fmt("%d operators, worst |S - S^H| / |S| = %.2g <= 1e-12", count, worst);
    return o;
}

Outcome power_kernel_stability()
{
    Outcome o;
    int count = 0;
    for_each_run([&](const Case& c, int s, const Sample&, const HodgeDiracOperator& op) {
        for (int k : {2, 3}) {
            const PowerKernelCheck p = power_kernel_check(op, k);
            o.require(p.equal, fmt("%s seed %d k=%d: dim ker Pi^k %ld vs dim ker Pi %ld", c.label.c_str(), s, k,
                                   static_cast<long>(p.power_kernel_dim), static_cast<long>(p.kernel_dim)));
            ++count;
        }
    });
    if (o.pass)
        o.detail = fmt("%d checks (k = 2, 3): dim ker Pi^k = dim ker Pi and rank Pi^k = rank Pi", count);
    return o;
}

Outcome graded_commutation()
{
    Outcome o;
    double worst = 0;
    int count = 0;
    for_each_run([&](const Case& c, int s, const Sample&, const HodgeDiracOperator& op) {
        const SplitCheck check = graded_split_check(op, c.complex.grading, 2, 1e-12);
        const double scale = op_norm(op.pi) * op_norm(op.pi);
        for (double r : check.residuals)
            worst = std::max(worst, r / scale);
        o.require(check.passed, fmt("%s seed %d: commutator exceeds 1e-12 |Pi|^2", c.label.c_str(), s));
        ++count;
    });
    if (o.pass)
        o.detail = fmt("%d operators, worst |[P_j, Pi^2]| / |Pi|^2 = %.2g <= 1e-12", count, worst);
    return o;
}

Outcome flat_local_systems()
{
    Outcome o;
    const double pi = std::acos(-1.0);
    const std::vector<Scalar> lambdas = {Scalar(1), Scalar(-1), std::polar(1.0, pi / 3), std::polar(1.0, 2.0),
                                         Scalar(0.5), Scalar(1.0 + 1e-6)};
    int count = 0;
    for (int n : {3, 5, 8}) {
        const CochainComplex c = build_fixture("cycle_" + std::to_string(n));
        const SimplicialComplex& k = *c.simplicial;
        for (Scalar lambda : lambdas) {
            // Transport lambda on the edge 0 -> 1, identity elsewhere.
            std::vector<Scalar> values(static_cast<std::size_t>(k.count(1)), Scalar(1));
            values[static_cast<std::size_t>(*k.index_of({0, 1}))] = lambda;
            const CochainComplex t = twisted_coboundary(c, LocalSystem::scalar(values));
            const std::vector<Index> betti = cohomology_dims(t.total_gamma(), t.grading);
            const std::vector<Index> spectral = spectral_betti(
                build_dirac(t.total_gamma(), random_block_weights(t.grading, 7, kClamp).total), t.grading);

            // Circulant oracle: rows i -> i+1 (mod n), entry lambda on the 0 -> 1 row.
            std::vector<std::vector<std::complex<double>>> m(static_cast<std::size_t>(n),
                                                             std::vector<std::complex<double>>(static_cast<std::size_t>(n)));
            for (int i = 0; i < n; ++i) {
                const int j = (i + 1) % n;
                const int lo = std::min(i, j), hi = std::max(i, j);
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(lo)] = i == 0 ? lambda : Scalar(1);
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(hi)] = -1.0;
            }
            const long free = n - oracle::rank_gauss(m);
            const bool trivial = std::abs(lambda - Scalar(1)) == 0;
            const std::vector<Index> expected = trivial ? std::vector<Index>{1, 1} : std::vector<Index>{0, 0};
            o.require(betti == expected && spectral == expected && free == expected[0],
                      fmt("cycle_%d lambda=(%.3g,%.3g): algebraic %s spectral %s oracle %ld", n, lambda.real(),
                          lambda.imag(), list(betti).c_str(), list(spectral).c_str(), free));
            ++count;
        }
    }
    // Non-flat: holonomy -1 around a filled triangle and around an octahedron face.
    int rejected = 0;
    for (const char* name : {"triangle", "octahedron"}) {
        const CochainComplex c = build_fixture(name);
        std::vector<Scalar> values(static_cast<std::size_t>(c.simplicial->count(1)), Scalar(1));
        values[0] = Scalar(-1);
        try {
            twisted_coboundary(c, LocalSystem::scalar(values));
            o.require(false, std::string(name) + ": non-flat system accepted");
        } catch (const Error& e) {
            o.require(e.kind() == ErrorKind::NotFlat, std::string(name) + ": wrong error " + e.what());
            o.info.push_back(fmt("%s with holonomy -1 rejected NotFlat, defect %.3g", name, e.diagnostic()));
            ++rejected;
        }
    }
    if (o.pass)
        o.detail = fmt("%d twisted circles match the circulant oracle; %d non-flat systems rejected NotFlat", count,
                       rejected);
    return o;
}

Outcome magnet_gate()
{
    Outcome o;
    // Koszul magnets: Gamma = e(v), W = e(omega) with integer coefficients.
    int accepted = 0;
    const std::vector<std::pair<int, std::vector<std::vector<unsigned>>>> omegas = {
        {3, {{1}, {0, 1, 2}}},
        {4, {{1, 2, 3}}},
        {4, {{2}, {0, 1, 3}, {1, 2, 3}}},
        {5, {{1, 2, 3}, {0, 2, 4}, {0, 1, 2, 3, 4}}},
    };
    for (const auto& [n, terms] : omegas) {
        ExteriorElement v = ExteriorElement::basis({0}) + ExteriorElement::basis({static_cast<unsigned>(n - 1)}) * Scalar(3);
        ExteriorElement omega;
        int coefficient = 1;
        for (const auto& t : terms)
            omega = omega + ExteriorElement::basis(t) * Scalar(coefficient++);
        try {
            const NilpotentOperator m = magnet_operator(koszul_wedge(n, v).op, koszul_wedge(n, omega).op.map);
            o.require(m.nilpotency_residual == 0, fmt("Koszul n=%d: residual %.3g", n, m.nilpotency_residual));
            ++accepted;
        } catch (const Error& e) {
            o.require(false, fmt("Koszul n=%d rejected: %s", n, e.what()));
        }
    }
    o.info.push_back(fmt("%d Koszul magnets e(v) + e(omega) with odd omega accepted with residual 0", accepted));
    // Cup-product magnet with a generic closed 1-cochain.
    const auto cup_attempt = [&](const char* name, const std::vector<Scalar>& alpha, bool gate) {
        const CochainComplex c = build_fixture(name);
        const Matrix w = cup_product_operator(c, alpha);
        const double closed = c.coboundaries.size() > 1
                                  ? (Matrix(c.coboundaries[1]) * Eigen::Map<const Vector>(alpha.data(),
                                                                                        static_cast<Index>(alpha.size())))
                                        .norm()
                                  : 0.0;
        try {
            const NilpotentOperator m = magnet_operator(c.total_gamma(), w);
            const std::string msg = fmt("%s cup magnet accepted: (d + W)^2 residual %.3g (|d alpha| = %.2g)", name,
                                        m.nilpotency_residual, closed);
            if (gate)
                o.require(false, msg);
            else
                o.info.push_back(msg);
        } catch (const Error& e) {
            const std::string msg =
                fmt("%s cup magnet rejected %s, residual %.3g (|d alpha| = %.2g)", name,
                    std::string(to_string(e.kind())).c_str(), e.diagnostic(), closed);
            if (gate)
                o.require(e.kind() == ErrorKind::NotNilpotent, msg);
            o.info.push_back(msg);
        }
    };
    cup_attempt("cycle_3", {Scalar(0.3), Scalar(-1.7), Scalar(2.2)}, true);
    o.info.push_back("cycle_3 has cochains in degrees 0 and 1 only, so any degree-raising W gives (d + W)^2 = 0");
    // Where 2-cochains exist a closed alpha gives (d + W)^2 = alpha cup alpha cup (.), which is nonzero.
    cup_attempt("triangle", {Scalar(1), Scalar(2), Scalar(1)}, false);
    {
        const CochainComplex oct = build_fixture("octahedron");
        Vector f(6);
        f << 0.0, 1.0, 0.3, -0.8, 2.0, 0.5;
        const Vector alpha = Matrix(oct.coboundaries[0]) * f;
        cup_attempt("octahedron", std::vector<Scalar>(alpha.data(), alpha.data() + alpha.size()), false);
    }
    if (o.pass)
        o.detail = fmt("%d Koszul magnets exact; cup magnet on cycle_3 rejected NotNilpotent", accepted);
    return o;
}

/// Least C with C^-1 g1 <= g2 <= C g1 for SPD matrices (square root of the pencil extremes).
double pair_bound(const RealMatrix& g1, const RealMatrix& g2)
{
    const Eigen::GeneralizedSelfAdjointEigenSolver<RealMatrix> es(g2, g1);
    const RealVector ev = es.eigenvalues();
    return std::max(std::sqrt(ev.maxCoeff()), 1.0 / std::sqrt(ev.minCoeff()));
}

Outcome mutual_bound_transfer()
{
    Outcome o;
    const CochainComplex grid = build_cubical({8, 8}, {false, false});
    double worst_ratio = 0, worst_field = 0;
    for (int s = 0; s < kSeeds; ++s) {
        SamplerConfig cfg;
        cfg.model = MetricModel::LogGaussian;
        cfg.seed = 5000 + static_cast<std::uint64_t>(s);
        cfg.clamp = kClamp;
        const MetricField f1 = sample_metric_field(grid, cfg);
        cfg.seed += 1000;
        cfg.clamp = 9.0;
        const MetricField factors = sample_metric_field(grid, cfg);
        const MetricField f2 = perturb_metric(f1, factors.per_cell, 9.0);

        double c_field = 1;
        for (Index i = 0; i < f1.cell_count(); ++i)
            c_field = std::max(c_field, pair_bound(f1.per_cell[static_cast<std::size_t>(i)],
                                                   f2.per_cell[static_cast<std::size_t>(i)]));
        worst_field = std::max(worst_field, c_field);
        o.require(c_field <= 3.0 * (1 + 1e-12), fmt("pair %d: C_field %.6g exceeds 3", s, c_field));

        const auto t1 = induced_cell_weights(f1, grid);
        const auto t2 = induced_cell_weights(f2, grid);
        const TransferReport report = transfer_bound_check(f1, f2, grid);
        o.require(std::abs(report.c_field - c_field) <= 1e-9 * c_field,
                  fmt("pair %d: library C_field %.12g vs %.12g", s, report.c_field, c_field));
        for (std::size_t k = 0; k < t1.size(); ++k) {
            // Diagonal weights: the mutual bound is the extreme square-root ratio.
            double constant = 1;
            for (Index i = 0; i < t1[k].size(); ++i) {
                const double q = t2[k](i) / t1[k](i);
                constant = std::max({constant, std::sqrt(q), 1 / std::sqrt(q)});
            }
            const double exponent = (2.0 + 2.0 * static_cast<double>(k)) / 2.0;
            const double bound = std::pow(c_field, exponent);
            worst_ratio = std::max(worst_ratio, constant / bound);
            o.require(constant <= bound * (1 + 1e-9),
                      fmt("pair %d degree %zu: constant %.6g > C_field^%.1f = %.6g", s, k, constant, exponent, bound));
            o.require(std::abs(report.constants[k] - constant) <= 1e-9 * constant,
                      fmt("pair %d degree %zu: library constant %.12g vs %.12g", s, k, report.constants[k], constant));
        }
    }
    o.info.push_back(fmt("largest C_field = %.4g; largest constant / bound = %.4g", worst_field, worst_ratio));
    if (o.pass)
        o.detail = fmt("%d pairs on the 8x8 grid, constants <= C_field^((n+2k)/2) (tightest ratio %.3g)", kSeeds,
                       worst_ratio);
    return o;
}

Outcome weierstrass_divergence()
{
    Outcome o;
    const auto t0 = Clock::now();
    RefineConfig config;
    config.base = 32;
    config.levels = 4;
    config.model = RefineModel::Weierstrass;
    const RefineResult rough = refine_divergence(config);
    config.model = RefineModel::Smooth;
    const RefineResult smooth = refine_divergence(config);
    const double elapsed = seconds_since(t0);
    for (const RefineResult* r : {&rough, &smooth}) {
        std::string line = to_string(r->config.model) + ":";
        for (const RefineLevel& l : r->levels)
            line += fmt(" N=%ld r=%.5g", static_cast<long>(l.n), l.r);
        o.info.push_back(line);
    }
    o.require(rough.strictly_increasing, "Weierstrass ratios are not strictly increasing");
    o.require(smooth.stabilized, fmt("smooth final ratio %.4f is not within 5%% of 1", smooth.final_ratio));
    o.require(elapsed < 120.0, fmt("runtime %.1f s exceeds 120 s", elapsed));
    if (o.pass)
        o.detail = fmt("Weierstrass r strictly increasing (%.3g -> %.3g); smooth final ratio %.4f; %.1f s",
                       rough.levels.front().r, rough.levels.back().r, smooth.final_ratio, elapsed);
    return o;
}

Outcome oracle_consistency()
{
    Outcome o;
    std::vector<std::pair<std::string, CochainComplex>> complexes;
    for (const char* name : {"path_2", "cycle_3", "cycle_5", "cycle_8", "triangle", "octahedron",
                             "ball_cone_octahedron", "torus_triangulated", "torus_4x4", "grid_3x3"})
        complexes.emplace_back(name, build_fixture(name));
    complexes.emplace_back("cube torus 2x2x2", build_cubical({2, 2, 2}, {true, true, true}));
    complexes.emplace_back("box 3x2 rel", [] {
        const CochainComplex b = build_cubical({3, 2}, {false, false});
        return relative_complex(b, topological_boundary(*b.cubical));
    }());
    const CochainComplex ball = build_fixture("ball_cone_octahedron");
    complexes.emplace_back("ball_cone rel", relative_complex(ball, topological_boundary(*ball.simplicial)));

    for (const auto& [name, c] : complexes) {
        const SmithHomology smith = betti_smith(c);
        const std::vector<Index> spectral =
            spectral_betti(build_dirac(c.total_gamma(), identity_metric(c.total_dim())), c.grading);
        o.require(spectral == smith.betti,
                  name + ": spectral " + list(spectral) + " vs Smith " + list(smith.betti));
        o.require(euler_characteristic(c.dims()) == euler_characteristic(smith.betti),
                  name + ": Euler characteristic mismatch");
        // Second oracle: exact fraction-free ranks.
        std::vector<long> counts, ranks;
        for (Index k = 0; k < c.degree_count(); ++k)
            counts.push_back(static_cast<long>(c.grading.size(k)));
        for (const SparseMatrix& d : c.coboundaries) {
            std::vector<std::vector<long long>> m(static_cast<std::size_t>(d.rows()),
                                                  std::vector<long long>(static_cast<std::size_t>(d.cols()), 0));
            for (int j = 0; j < d.outerSize(); ++j)
                for (SparseMatrix::InnerIterator it(d, j); it; ++it)
                    m[static_cast<std::size_t>(it.row())][static_cast<std::size_t>(it.col())] =
                        static_cast<long long>(it.value().real());
            ranks.push_back(oracle::rank_bareiss(m));
        }
        const std::vector<long> bareiss = oracle::betti_from_ranks(counts, ranks);
        o.require(std::vector<long>(smith.betti.begin(), smith.betti.end()) == bareiss,
                  name + ": Smith disagrees with fraction-free elimination");
        o.info.push_back(name + " " + list(smith.betti) + fmt(" chi=%d", euler_characteristic(smith.betti)));
    }
    if (o.pass)
        o.detail = fmt("%zu untwisted complexes: Smith = spectral (B = I) = Bareiss, Euler characteristics agree",
                       complexes.size());
    return o;
}

struct Criterion {
    const char* title;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"Betti invariance under rough metrics", betti_invariance},
    {"kernel isomorphism, both modes", kernel_isomorphism_both_modes},
    {"Hodge decomposition exactness", decomposition_exactness},
    {"self-adjointness of S = B Gamma + Gamma^H B", self_adjointness},
    {"power-kernel stability", power_kernel_stability},
    {"graded commutation [P_j, Pi^2]", graded_commutation},
    {"flat local systems on cycles", flat_local_systems},
    {"Hodge-magnet nilpotency gate", magnet_gate},
    {"mutual-bound transfer", mutual_bound_transfer},
    {"Weierstrass divergence study", weierstrass_divergence},
    {"oracle self-consistency", oracle_consistency},
};

}  // namespace

int main(int argc, char** argv)
{
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }
    const int count = static_cast<int>(std::size(kCriteria));
    if (only < 0 || only > count) {
        std::fprintf(stderr, "criterion must be in 1..%d\n", count);
        return 2;
    }
    bool all = true;
    for (int n = 1; n <= count; ++n) {
        if (only && n != only)
            continue;
        Outcome o;
        try {
            o = kCriteria[n - 1].run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s  %2d  %s: %s\n", o.pass ? "PASS" : "FAIL", n, kCriteria[n - 1].title, o.detail.c_str());
        for (const std::string& line : o.info)
            std::printf("INFO  %2d  %s\n", n, line.c_str());
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
