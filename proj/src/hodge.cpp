#include "roughhodge/hodge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "roughhodge/errors.hpp"

namespace rhodge {

namespace {

void require_unambiguous(const Subspace& s, const char* what)
{
    if (s.rank_ambiguous) {
        std::ostringstream msg;
        msg << what << ": no singular-value gap >= threshold at the rank cut (gap " << s.singular_gap
            << ")";
        throw Error(ErrorKind::RankAmbiguous, msg.str(), s.singular_gap);
    }
}

double relative(double num, double den)
{
    return den > 0 ? num / den : num;
}

// Coordinates of the columns of `x` in the B-orthonormal basis of `t`,
// plus the relative distance of `x` from span(t).
std::pair<Matrix, double> coordinates_in(const Subspace& t, const Matrix& x)
{
    const Matrix coords = t.metric->to_frame(t.basis).adjoint() * t.metric->to_frame(x);
    const double residual = relative(op_norm(x - t.basis * coords), std::max(1.0, op_norm(x)));
    return {coords, residual};
}

double identity_residual(const Matrix& m)
{
    return op_norm(m - Matrix::Identity(m.rows(), m.cols()));
}

double condition_number(const Matrix& m)
{
    if (m.size() == 0)
        return 1;
    Eigen::BDCSVD<Matrix> svd(m);
    const RealVector& sv = svd.singularValues();
    return sv(0) / sv(sv.size() - 1);
}

// Image of `source` under the projection onto `target_full` along `complement`.
Matrix project_along_complement(const Subspace& target_full, const Subspace& complement,
                                const Matrix& source)
{
    if (source.cols() == 0)
        return Matrix(source.rows(), 0);
    const ObliqueProjector p = oblique_projector(target_full, complement);
    return p.matrix * source;
}

// Same map, but with a complement that only splits the subspace ker Gamma:
// solve [T | G] c = X (consistent because X lies in T (+) G) and keep T c_T.
Matrix project_within_kernel(const Subspace& target_full, const Subspace& ran_gamma,
                             const Matrix& source, double& consistency)
{
    consistency = 0;
    if (source.cols() == 0)
        return Matrix(source.rows(), 0);
    Matrix stacked(source.rows(), target_full.dim() + ran_gamma.dim());
    stacked << target_full.basis, ran_gamma.basis;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(stacked);
    const Matrix c = cod.solve(source);
    consistency = relative(op_norm(stacked * c - source), std::max(1.0, op_norm(source)));
    if (cod.rank() != stacked.cols()) {
        throw Error(ErrorKind::NotComplementary,
                    "ker Pi_B and ran Gamma intersect; they do not split ker Gamma");
    }
    return target_full.basis * c.topRows(target_full.dim());
}

void finish(KernelIsomorphism& iso)
{
    iso.forward_inverse_residual = identity_residual(iso.forward * iso.inverse);
    iso.inverse_forward_residual = identity_residual(iso.inverse * iso.forward);
    iso.condition = condition_number(iso.forward);
}

Subspace degree_kernel(const Matrix& pi, const GradedStructure& grading, Index k,
                       const MetricPtr& metric, const RankPolicy& policy)
{
    const Matrix inc = grading.inclusion(k);
    const Subspace local = kernel(pi * inc, policy);
    require_unambiguous(local, "degree kernel");
    Subspace out = span(inc * local.basis, metric);
    out.rank_ambiguous = local.rank_ambiguous;
    out.singular_gap = local.singular_gap;
    out.tol_used = local.tol_used;
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// GradedStructure

GradedStructure::GradedStructure(std::vector<std::vector<Index>> degrees)
    : degrees_(std::move(degrees))
{
    std::vector<Index> all;
    for (auto& d : degrees_) {
        std::sort(d.begin(), d.end());
        all.insert(all.end(), d.begin(), d.end());
    }
    std::sort(all.begin(), all.end());
    total_ = static_cast<Index>(all.size());
    for (Index i = 0; i < total_; ++i) {
        if (all[static_cast<std::size_t>(i)] != i)
            throw Error(ErrorKind::GradingViolation, "degree index sets must partition 0..n-1");
    }
}

GradedStructure GradedStructure::from_sizes(const std::vector<Index>& sizes)
{
    std::vector<std::vector<Index>> degrees;
    Index at = 0;
    for (Index s : sizes) {
        std::vector<Index> d(static_cast<std::size_t>(s));
        std::iota(d.begin(), d.end(), at);
        at += s;
        degrees.push_back(std::move(d));
    }
    return GradedStructure(std::move(degrees));
}

std::vector<Index> GradedStructure::sizes() const
{
    std::vector<Index> out;
    for (const auto& d : degrees_)
        out.push_back(static_cast<Index>(d.size()));
    return out;
}

Matrix GradedStructure::projector(Index k) const
{
    Matrix p = Matrix::Zero(total_, total_);
    for (Index i : indices(k))
        p(i, i) = 1;
    return p;
}

Matrix GradedStructure::inclusion(Index k) const
{
    const auto& idx = indices(k);
    Matrix e = Matrix::Zero(total_, static_cast<Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c)
        e(idx[c], static_cast<Index>(c)) = 1;
    return e;
}

Matrix GradedStructure::block(const Matrix& a, Index row_degree, Index col_degree) const
{
    return a(indices(row_degree), indices(col_degree));
}

Matrix GradedStructure::embed(const Matrix& blk, Index row_degree, Index col_degree) const
{
    Matrix out = Matrix::Zero(total_, total_);
    out(indices(row_degree), indices(col_degree)) = blk;
    return out;
}

// ---------------------------------------------------------------------------
// Hodge-Dirac operator

HodgeDiracOperator build_dirac(const NilpotentOperator& gamma, MetricPtr metric)
{
    if (!metric)
        metric = identity_metric(gamma.dim());
    if (metric->dim() != gamma.dim())
        throw Error(ErrorKind::DimensionMismatch, "metric and operator dimensions differ");

    HodgeDiracOperator op;
    op.gamma = gamma;
    op.metric = metric;
    op.adjoint = weighted_adjoint(gamma.map, *metric, *metric);
    op.pi = gamma.map + op.adjoint;
    const Matrix bg = metric->form() * gamma.map;
    op.symmetrized = bg + gamma.map.adjoint() * metric->form();

    const Matrix bpi = metric->form() * op.pi;
    op.self_adjoint_residual = relative(op_norm(bpi - bpi.adjoint()), op_norm(bpi));
    op.representation_residual = relative(op_norm(bpi - op.symmetrized), op_norm(op.symmetrized));
    op.adjoint_nilpotency_residual = nilpotency_residual(op.adjoint);
    return op;
}

Subspace dirac_kernel(const HodgeDiracOperator& op, const RankPolicy& policy)
{
    return pencil_kernel(op.symmetrized, op.metric, policy);
}

RealVector dirac_spectrum(const HodgeDiracOperator& op)
{
    return hermitian_pencil(op.symmetrized, *op.metric).eigenvalues;
}

HodgeDecomposition hodge_decompose(const HodgeDiracOperator& op, const RankPolicy& policy)
{
    HodgeDecomposition h;
    const Subspace ker_gamma = kernel(op.gamma.map, policy, op.metric);
    const Subspace ker_star = kernel(op.adjoint, policy, op.metric);
    h.range_gamma = range(op.gamma.map, policy, op.metric);
    h.range_gamma_star = range(op.adjoint, policy, op.metric);
    const Subspace pencil = dirac_kernel(op, policy);
    require_unambiguous(ker_gamma, "ker Gamma");
    require_unambiguous(ker_star, "ker Gamma*");
    require_unambiguous(h.range_gamma, "ran Gamma");
    require_unambiguous(h.range_gamma_star, "ran Gamma*");
    require_unambiguous(pencil, "ker Pi_B");

    h.kernel = intersect(ker_gamma, ker_star);
    h.kernel_dim = h.kernel.dim();
    h.range_gamma_dim = h.range_gamma.dim();
    h.range_gamma_star_dim = h.range_gamma_star.dim();
    h.pencil_kernel_dim = pencil.dim();
    h.kernel_gamma_dim = ker_gamma.dim();
    h.orthogonality_residual = std::max({max_principal_cosine(h.kernel, h.range_gamma),
                                         max_principal_cosine(h.kernel, h.range_gamma_star),
                                         max_principal_cosine(h.range_gamma, h.range_gamma_star)});
    h.spectrum = dirac_spectrum(op);
    return h;
}

std::vector<Index> cohomology_dims(const NilpotentOperator& gamma, const GradedStructure& grading,
                                   const RankPolicy& policy)
{
    if (grading.total() != gamma.dim())
        throw Error(ErrorKind::DimensionMismatch, "grading does not cover the operator");
    const Index n = grading.degree_count();
    const double scale = gamma.map.size() ? gamma.map.cwiseAbs().maxCoeff() : 0.0;
    const double allowed = gamma.exact_integer ? 0.0 : 1e-12 * std::max(1.0, scale);
    for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < n; ++c) {
            if (r == c + 1)
                continue;
            const Matrix blk = grading.block(gamma.map, r, c);
            const double off = blk.size() ? blk.cwiseAbs().maxCoeff() : 0.0;
            if (off > allowed) {
                std::ostringstream msg;
                msg << "operator maps degree " << c << " into degree " << r;
                throw Error(ErrorKind::GradingViolation, msg.str(), off);
            }
        }
    }

    std::vector<Index> ranks(static_cast<std::size_t>(n), 0);  // rank of d_k : k -> k+1
    for (Index k = 0; k + 1 < n; ++k) {
        const Matrix d = grading.block(gamma.map, k + 1, k);
        if (d.size() == 0)
            continue;
        Eigen::BDCSVD<Matrix> svd(d);
        const RankDecision dec = decide_rank(svd.singularValues(), d.rows(), d.cols(), policy);
        if (dec.ambiguous)
            throw Error(ErrorKind::RankAmbiguous, "coboundary rank decision is ambiguous", dec.singular_gap);
        ranks[static_cast<std::size_t>(k)] = dec.rank;
    }
    std::vector<Index> betti;
    for (Index k = 0; k < n; ++k) {
        Index b = grading.size(k) - ranks[static_cast<std::size_t>(k)];
        if (k > 0)
            b -= ranks[static_cast<std::size_t>(k - 1)];
        betti.push_back(b);
    }
    return betti;
}

std::vector<Index> spectral_betti(const HodgeDiracOperator& op, const GradedStructure& grading,
                                  const RankPolicy& policy)
{
    if (grading.total() != op.dim())
        throw Error(ErrorKind::DimensionMismatch, "grading does not cover the operator");
    std::vector<Index> dims;
    for (Index k = 0; k < grading.degree_count(); ++k) {
        const Subspace s = kernel(op.pi * grading.inclusion(k), policy);
        require_unambiguous(s, "degree kernel");
        dims.push_back(s.dim());
    }
    return dims;
}

// ---------------------------------------------------------------------------
// Kernel isomorphisms

std::string to_string(IsomorphismMode mode)
{
    return mode == IsomorphismMode::AlongRanPi ? "along_ran_Pi" : "along_ran_Gamma";
}

KernelIsomorphism kernel_isomorphism(const NilpotentOperator& gamma, MetricPtr b1, MetricPtr b2,
                                     IsomorphismMode mode, const RankPolicy& policy)
{
    const HodgeDiracOperator op1 = build_dirac(gamma, std::move(b1));
    const HodgeDiracOperator op2 = build_dirac(gamma, std::move(b2));

    KernelIsomorphism iso;
    iso.mode = mode;
    iso.source = dirac_kernel(op1, policy);
    iso.target = dirac_kernel(op2, policy);
    require_unambiguous(iso.source, "ker Pi_B1");
    require_unambiguous(iso.target, "ker Pi_B2");
    if (iso.source.dim() != iso.target.dim()) {
        std::ostringstream msg;
        msg << "dim ker Pi_B1 = " << iso.source.dim() << " but dim ker Pi_B2 = " << iso.target.dim();
        throw Error(ErrorKind::DimMismatchKernel, msg.str());
    }
    iso.mutual_bound = mutual_bound(*op1.metric, *op2.metric).constant;

    Matrix image, back;
    double consistency_fwd = 0, consistency_back = 0;
    if (mode == IsomorphismMode::AlongRanPi) {
        const Subspace complement = range(op1.pi, policy);
        require_unambiguous(complement, "ran Pi_B1");
        image = project_along_complement(iso.target, complement, iso.source.basis);
        back = project_along_complement(iso.source, complement, iso.target.basis);
    } else {
        const Subspace ran_gamma = range(gamma.map, policy);
        require_unambiguous(ran_gamma, "ran Gamma");
        image = project_within_kernel(iso.target, ran_gamma, iso.source.basis, consistency_fwd);
        back = project_within_kernel(iso.source, ran_gamma, iso.target.basis, consistency_back);
    }
    auto [fwd, res_fwd] = coordinates_in(iso.target, image);
    auto [inv, res_inv] = coordinates_in(iso.source, back);
    iso.forward = std::move(fwd);
    iso.inverse = std::move(inv);
    iso.image_residual = std::max({res_fwd, res_inv, consistency_fwd, consistency_back});
    finish(iso);
    return iso;
}

Matrix matrix_power(const Matrix& a, int power)
{
    if (power < 1)
        throw Error(ErrorKind::DimensionMismatch, "matrix power must be >= 1");
    Matrix out = a;
    for (int i = 1; i < power; ++i)
        out = out * a;
    return out;
}

SplitCheck graded_split_check(const HodgeDiracOperator& op, const GradedStructure& grading,
                              int power, double tol)
{
    if (grading.total() != op.dim())
        throw Error(ErrorKind::DimensionMismatch, "grading does not cover the operator");
    SplitCheck check;
    const Matrix pk = matrix_power(op.pi, power);
    check.threshold = tol * std::pow(op_norm(op.pi), power);
    check.passed = true;
    for (Index j = 0; j < grading.degree_count(); ++j) {
        RealVector mask = RealVector::Zero(op.dim());
        for (Index i : grading.indices(j))
            mask(i) = 1;
        Matrix comm(pk.rows(), pk.cols());
        for (Index c = 0; c < pk.cols(); ++c)
            for (Index r = 0; r < pk.rows(); ++r)
                comm(r, c) = (mask(r) - mask(c)) * pk(r, c);
        const double res = op_norm(comm);
        check.residuals.push_back(res);
        check.passed = check.passed && res <= check.threshold;
    }
    return check;
}

std::vector<KernelIsomorphism> restricted_kernel_isomorphism(const NilpotentOperator& gamma,
                                                             MetricPtr b1, MetricPtr b2,
                                                             const GradedStructure& grading,
                                                             int power, const RankPolicy& policy)
{
    const HodgeDiracOperator op1 = build_dirac(gamma, std::move(b1));
    const HodgeDiracOperator op2 = build_dirac(gamma, std::move(b2));
    for (const HodgeDiracOperator* op : {&op1, &op2}) {
        const SplitCheck check = graded_split_check(*op, grading, power);
        if (!check.passed) {
            const double worst = *std::max_element(check.residuals.begin(), check.residuals.end());
            std::ostringstream msg;
            msg << "[P_j, Pi_B^" << power << "] = " << worst << " exceeds " << check.threshold;
            throw Error(ErrorKind::SplitCheckFailed, msg.str(), worst);
        }
    }

    const Subspace k1 = dirac_kernel(op1, policy);
    const Subspace k2 = dirac_kernel(op2, policy);
    require_unambiguous(k1, "ker Pi_B1");
    require_unambiguous(k2, "ker Pi_B2");
    if (k1.dim() != k2.dim())
        throw Error(ErrorKind::DimMismatchKernel, "total kernel dimensions differ");
    const Subspace complement = range(matrix_power(op1.pi, power), policy);
    require_unambiguous(complement, "ran Pi_B1^k");
    const double c = mutual_bound(*op1.metric, *op2.metric).constant;

    std::vector<KernelIsomorphism> out;
    for (Index j = 0; j < grading.degree_count(); ++j) {
        KernelIsomorphism iso;
        iso.mode = IsomorphismMode::AlongRanPi;
        iso.source = degree_kernel(op1.pi, grading, j, op1.metric, policy);
        iso.target = degree_kernel(op2.pi, grading, j, op2.metric, policy);
        if (iso.source.dim() != iso.target.dim()) {
            std::ostringstream msg;
            msg << "degree " << j << ": kernel dimensions " << iso.source.dim() << " vs "
                << iso.target.dim();
            throw Error(ErrorKind::DimMismatchKernel, msg.str());
        }
        auto [fwd, res_fwd] = coordinates_in(iso.target, project_along_complement(k2, complement, iso.source.basis));
        auto [inv, res_inv] = coordinates_in(iso.source, project_along_complement(k1, complement, iso.target.basis));
        iso.forward = std::move(fwd);
        iso.inverse = std::move(inv);
        iso.image_residual = std::max(res_fwd, res_inv);
        iso.mutual_bound = c;
        finish(iso);
        out.push_back(std::move(iso));
    }
    return out;
}

PowerKernelCheck power_kernel_check(const HodgeDiracOperator& op, int power, const RankPolicy& policy)
{
    PowerKernelCheck check;
    const Matrix pk = matrix_power(op.pi, power);
    const Subspace ker = dirac_kernel(op, policy);
    const Matrix bpk = op.metric->form() * pk;
    const Subspace ker_k = pencil_kernel((bpk + bpk.adjoint()) * 0.5, op.metric, policy);
    require_unambiguous(ker, "ker Pi_B");
    require_unambiguous(ker_k, "ker Pi_B^k");
    check.kernel_dim = ker.dim();
    check.power_kernel_dim = ker_k.dim();

    auto rank_of = [&](const Matrix& m) {
        if (m.size() == 0)
            return Index{0};
        Eigen::BDCSVD<Matrix> svd(m);
        const RankDecision d = decide_rank(svd.singularValues(), m.rows(), m.cols(), policy);
        if (d.ambiguous)
            throw Error(ErrorKind::RankAmbiguous, "rank of Pi_B power is ambiguous", d.singular_gap);
        return d.rank;
    };
    check.rank = rank_of(op.pi);
    check.power_rank = rank_of(pk);
    check.equal = check.kernel_dim == check.power_kernel_dim && check.rank == check.power_rank &&
                  check.kernel_dim + check.rank == op.dim();
    return check;
}

}  // namespace rhodge
