#include "roughhodge/linops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "roughhodge/errors.hpp"

namespace rhodge {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::uint64_t fingerprint(const Matrix& m)
{
    // FNV-1a over the raw entries
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    };
    const Index rows = m.rows();
    mix(&rows, sizeof rows);
    mix(m.data(), sizeof(Scalar) * static_cast<std::size_t>(m.size()));
    return h;
}

bool is_offdiagonal_zero(const Matrix& b)
{
    for (Index j = 0; j < b.cols(); ++j)
        for (Index i = 0; i < b.rows(); ++i)
            if (i != j && b(i, j) != Scalar(0))
                return false;
    return true;
}

RealVector singular_values(const Matrix& a)
{
    if (a.size() == 0)
        return RealVector(0);
    Eigen::BDCSVD<Matrix> svd(a);
    return svd.singularValues();
}

// Orthonormal basis (standard inner product) of a full-column-rank matrix.
Matrix orthonormal_columns(const Matrix& w)
{
    if (w.cols() == 0)
        return Matrix(w.rows(), 0);
    Eigen::HouseholderQR<Matrix> qr(w);
    return qr.householderQ() * Matrix::Identity(w.rows(), w.cols());
}

MetricPtr resolve(MetricPtr metric, Index n)
{
    if (!metric)
        return identity_metric(n);
    if (metric->dim() != n)
        throw Error(ErrorKind::DimensionMismatch, "metric dimension does not match the ambient space");
    return metric;
}

// B-orthonormalize the columns of a full-column-rank matrix.
Matrix b_orthonormalize(const Matrix& v, const MetricForm& metric)
{
    return metric.from_frame(orthonormal_columns(metric.to_frame(v)));
}

void require_common_metric(const Subspace& s1, const Subspace& s2)
{
    if (s1.ambient_dim() != s2.ambient_dim())
        throw Error(ErrorKind::DimensionMismatch, "subspaces live in different ambient spaces");
    if (!s1.metric || !s2.metric || !s1.metric->same_as(*s2.metric))
        throw Error(ErrorKind::MetricMismatch, "subspaces are orthonormalized in different metrics");
}

}  // namespace

// ---------------------------------------------------------------------------
// MetricForm

Matrix MetricForm::solve(const Matrix& x) const
{
    if (diagonal_) {
        Matrix out = x;
        for (Index i = 0; i < out.rows(); ++i)
            out.row(i) /= form_(i, i).real();
        return out;
    }
    Matrix y = factor_.triangularView<Eigen::Lower>().solve(x);
    return factor_.adjoint().triangularView<Eigen::Upper>().solve(y);
}

Matrix MetricForm::to_frame(const Matrix& x) const
{
    if (diagonal_)
        return sqrt_diag_.asDiagonal() * x;
    return factor_.adjoint().triangularView<Eigen::Upper>() * x;
}

Matrix MetricForm::from_frame(const Matrix& y) const
{
    if (diagonal_)
        return sqrt_diag_.cwiseInverse().asDiagonal() * y;
    return factor_.adjoint().triangularView<Eigen::Upper>().solve(y);
}

Matrix MetricForm::congruence(const Matrix& s) const
{
    Matrix m;
    if (diagonal_) {
        const RealVector inv = sqrt_diag_.cwiseInverse();
        m = inv.asDiagonal() * s * inv.asDiagonal();
    } else {
        Matrix t = factor_.triangularView<Eigen::Lower>().solve(s);
        m = factor_.triangularView<Eigen::Lower>().solve(t.adjoint()).adjoint();
    }
    return (m + m.adjoint()) * 0.5;
}

Scalar MetricForm::inner(const Vector& u, const Vector& v) const
{
    return v.dot(form_ * u);
}

double MetricForm::norm(const Vector& u) const
{
    return std::sqrt(std::max(0.0, inner(u, u).real()));
}

bool MetricForm::same_as(const MetricForm& other) const
{
    if (this == &other)
        return true;
    return id_ == other.id_ && form_ == other.form_;
}

MetricForm certify_metric(const Matrix& b)
{
    if (b.rows() != b.cols() || b.rows() == 0)
        throw Error(ErrorKind::DimensionMismatch, "metric must be a non-empty square matrix");
    if (!b.allFinite())
        throw Error(ErrorKind::NotPositiveDefinite, "metric has non-finite entries");

    const double scale = b.cwiseAbs().maxCoeff();
    const double asym = (b - b.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-14 * scale) {
        std::ostringstream msg;
        msg << "max |B - B^H| = " << asym << " exceeds 1e-14 * max|B|";
        throw Error(ErrorKind::NotHermitian, msg.str(), asym);
    }

    MetricForm m;
    m.form_ = (b + b.adjoint()) * 0.5;
    m.diagonal_ = is_offdiagonal_zero(m.form_);
    if (m.diagonal_) {
        const RealVector d = m.form_.diagonal().real();
        m.lambda_min_ = d.minCoeff();
        m.lambda_max_ = d.maxCoeff();
        if (!(m.lambda_min_ > 0))
            throw Error(ErrorKind::NotPositiveDefinite, "diagonal weight is not positive", m.lambda_min_);
        m.sqrt_diag_ = d.cwiseSqrt();
    } else {
        Eigen::LLT<Matrix> llt(m.form_);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(m.form_, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        if (llt.info() != Eigen::Success || !(lo > 0))
            throw Error(ErrorKind::NotPositiveDefinite, "Cholesky factorization failed", lo);
        m.factor_ = llt.matrixL();
        m.lambda_min_ = lo;
        m.lambda_max_ = eig.eigenvalues().maxCoeff();
    }
    m.id_ = fingerprint(m.form_);
    return m;
}

MetricPtr make_metric(const Matrix& b)
{
    return std::make_shared<const MetricForm>(certify_metric(b));
}

MetricPtr make_diagonal_metric(const RealVector& weights)
{
    return make_metric(weights.cast<Scalar>().asDiagonal().toDenseMatrix());
}

MetricPtr identity_metric(Index n)
{
    return make_metric(Matrix::Identity(n, n));
}

// ---------------------------------------------------------------------------
// Nilpotency and adjoints

double nilpotency_residual(const Matrix& a)
{
    const Matrix sq = a * a;
    bool integral = a.allFinite();
    for (Index i = 0; integral && i < a.size(); ++i) {
        const Scalar z = a.data()[i];
        integral = z.imag() == 0 && z.real() == std::round(z.real());
    }
    if (integral && sq.isZero(0))
        return 0;
    return op_norm(sq) / std::max(1.0, std::pow(op_norm(a), 2));
}

NilpotentOperator certify_nilpotent(const Matrix& a, double tol)
{
    if (a.rows() != a.cols())
        throw Error(ErrorKind::DimensionMismatch, "nilpotent operator must be square");
    NilpotentOperator op;
    op.map = a;
    op.nilpotency_residual = nilpotency_residual(a);
    if (!(op.nilpotency_residual <= tol)) {
        std::ostringstream msg;
        msg << "||A^2|| / max(1, ||A||^2) = " << op.nilpotency_residual << " > " << tol;
        throw Error(ErrorKind::NotNilpotent, msg.str(), op.nilpotency_residual);
    }
    bool integral = true;
    for (Index i = 0; integral && i < a.size(); ++i) {
        const Scalar z = a.data()[i];
        integral = z.imag() == 0 && z.real() == std::round(z.real());
    }
    op.exact_integer = integral && op.nilpotency_residual == 0;
    return op;
}

Matrix weighted_adjoint(const Matrix& a, const MetricForm& dom, const MetricForm& cod)
{
    if (a.cols() != dom.dim() || a.rows() != cod.dim())
        throw Error(ErrorKind::DimensionMismatch, "operator shape does not match the metrics");
    return dom.solve(a.adjoint() * cod.form());
}

// ---------------------------------------------------------------------------
// Rank decisions and subspaces

RankDecision decide_rank(const RealVector& sv, Index rows, Index cols, const RankPolicy& policy)
{
    RankDecision d;
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    d.tol_used = policy.tol ? *policy.tol
                            : static_cast<double>(std::max(rows, cols)) * kEps * smax;
    while (d.rank < sv.size() && sv(d.rank) > d.tol_used)
        ++d.rank;
    if (d.rank == 0 || d.rank == sv.size() || sv(d.rank) == 0)
        d.singular_gap = std::numeric_limits<double>::infinity();
    else
        d.singular_gap = sv(d.rank - 1) / sv(d.rank);
    d.ambiguous = d.singular_gap < policy.min_gap;
    return d;
}

Subspace span(const Matrix& vectors, MetricPtr metric, const RankPolicy& policy)
{
    metric = resolve(std::move(metric), vectors.rows());
    Subspace s;
    s.metric = metric;
    if (vectors.cols() == 0 || vectors.rows() == 0) {
        s.basis = Matrix(vectors.rows(), 0);
        return s;
    }
    const Matrix w = metric->to_frame(vectors);
    Eigen::BDCSVD<Matrix> svd(w, Eigen::ComputeThinU);
    const RankDecision d = decide_rank(svd.singularValues(), w.rows(), w.cols(), policy);
    s.basis = metric->from_frame(svd.matrixU().leftCols(d.rank));
    s.tol_used = d.tol_used;
    s.singular_gap = d.singular_gap;
    s.rank_ambiguous = d.ambiguous;
    return s;
}

Subspace kernel(const Matrix& a, const RankPolicy& policy, MetricPtr metric)
{
    const Index n = a.cols();
    metric = resolve(std::move(metric), n);
    Subspace s;
    s.metric = metric;
    if (a.rows() == 0 || n == 0) {
        s.basis = metric->from_frame(Matrix::Identity(n, n));
        return s;
    }
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const RankDecision d = decide_rank(svd.singularValues(), a.rows(), a.cols(), policy);
    const Matrix null = svd.matrixV().rightCols(n - d.rank);
    s.basis = b_orthonormalize(null, *metric);
    s.tol_used = d.tol_used;
    s.singular_gap = d.singular_gap;
    s.rank_ambiguous = d.ambiguous;
    return s;
}

Subspace range(const Matrix& a, const RankPolicy& policy, MetricPtr metric)
{
    const Index m = a.rows();
    metric = resolve(std::move(metric), m);
    Subspace s;
    s.metric = metric;
    if (m == 0 || a.cols() == 0) {
        s.basis = Matrix(m, 0);
        return s;
    }
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU);
    const RankDecision d = decide_rank(svd.singularValues(), a.rows(), a.cols(), policy);
    s.basis = b_orthonormalize(svd.matrixU().leftCols(d.rank), *metric);
    s.tol_used = d.tol_used;
    s.singular_gap = d.singular_gap;
    s.rank_ambiguous = d.ambiguous;
    return s;
}

PencilSpectrum hermitian_pencil(const Matrix& s, const MetricForm& b)
{
    if (s.rows() != b.dim() || s.cols() != b.dim())
        throw Error(ErrorKind::DimensionMismatch, "pencil matrices differ in size");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(b.congruence(s));
    return {eig.eigenvalues(), b.from_frame(eig.eigenvectors())};
}

Subspace pencil_kernel(const Matrix& s, MetricPtr metric, const RankPolicy& policy)
{
    const Index n = s.rows();
    metric = resolve(std::move(metric), n);
    const PencilSpectrum spec = hermitian_pencil(s, *metric);

    // Order by magnitude so the rank machinery sees a descending list.
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](Index x, Index y) {
        return std::abs(spec.eigenvalues(x)) > std::abs(spec.eigenvalues(y));
    });
    RealVector mags(n);
    for (Index i = 0; i < n; ++i)
        mags(i) = std::abs(spec.eigenvalues(order[static_cast<std::size_t>(i)]));

    const RankDecision d = decide_rank(mags, n, n, policy);
    Subspace out;
    out.metric = metric;
    out.basis = Matrix(n, n - d.rank);
    for (Index i = d.rank; i < n; ++i)
        out.basis.col(i - d.rank) = spec.eigenvectors.col(order[static_cast<std::size_t>(i)]);
    out.tol_used = d.tol_used;
    out.singular_gap = d.singular_gap;
    out.rank_ambiguous = d.ambiguous;
    return out;
}

Subspace intersect(const Subspace& s1, const Subspace& s2, double cos_threshold)
{
    require_common_metric(s1, s2);
    Subspace out;
    out.metric = s1.metric;
    out.tol_used = std::max(s1.tol_used, s2.tol_used);
    out.singular_gap = std::min(s1.singular_gap, s2.singular_gap);
    out.rank_ambiguous = s1.rank_ambiguous || s2.rank_ambiguous;
    if (s1.dim() == 0 || s2.dim() == 0) {
        out.basis = Matrix(s1.ambient_dim(), 0);
        return out;
    }
    const Matrix m = s1.metric->to_frame(s1.basis).adjoint() * s2.metric->to_frame(s2.basis);
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const RealVector& cosines = svd.singularValues();
    Index count = 0;
    while (count < cosines.size() && cosines(count) >= cos_threshold)
        ++count;
    out.basis = b_orthonormalize(s1.basis * svd.matrixU().leftCols(count), *s1.metric);
    return out;
}

double max_principal_cosine(const Subspace& s1, const Subspace& s2)
{
    require_common_metric(s1, s2);
    if (s1.dim() == 0 || s2.dim() == 0)
        return 0;
    const Matrix m = s1.metric->to_frame(s1.basis).adjoint() * s2.metric->to_frame(s2.basis);
    return singular_values(m)(0);
}

Index stacked_rank(const std::vector<const Subspace*>& parts, const RankPolicy& policy)
{
    if (parts.empty())
        return 0;
    const Index n = parts.front()->ambient_dim();
    Index cols = 0;
    for (const Subspace* p : parts) {
        if (p->ambient_dim() != n)
            throw Error(ErrorKind::DimensionMismatch, "stacked subspaces differ in ambient dimension");
        cols += p->dim();
    }
    Matrix stacked(n, cols);
    Index at = 0;
    for (const Subspace* p : parts) {
        stacked.middleCols(at, p->dim()) = p->basis;
        at += p->dim();
    }
    if (cols == 0)
        return 0;
    return decide_rank(singular_values(stacked), n, cols, policy).rank;
}

ObliqueProjector oblique_projector(const Subspace& x, const Subspace& y)
{
    const Index n = x.ambient_dim();
    if (y.ambient_dim() != n)
        throw Error(ErrorKind::DimensionMismatch, "projector subspaces differ in ambient dimension");
    if (x.dim() + y.dim() != n) {
        std::ostringstream msg;
        msg << "dim X + dim Y = " << x.dim() + y.dim() << " but ambient dimension is " << n;
        throw Error(ErrorKind::NotComplementary, msg.str());
    }
    ObliqueProjector p;
    p.range_basis = x.basis;
    p.nullspace_basis = y.basis;
    if (n == 0) {
        p.matrix = Matrix(0, 0);
        return p;
    }
    Matrix stacked(n, n);
    stacked << x.basis, y.basis;
    const RealVector sv = singular_values(stacked);
    const double ratio = sv(n - 1) / sv(0);
    if (!(ratio > 1e-10)) {
        std::ostringstream msg;
        msg << "stacked basis [X|Y] is singular (sigma_min / sigma_max = " << ratio << ")";
        throw Error(ErrorKind::NotComplementary, msg.str(), ratio);
    }
    const Matrix inv = Eigen::PartialPivLU<Matrix>(stacked).inverse();
    p.matrix = x.basis * inv.topRows(x.dim());
    p.condition = op_norm(p.matrix);
    return p;
}

MutualBound mutual_bound(const MetricForm& b1, const MetricForm& b2)
{
    if (b1.dim() != b2.dim())
        throw Error(ErrorKind::DimensionMismatch, "mutual bound needs metrics of equal dimension");
    MutualBound mb;
    if (b1.is_diagonal() && b2.is_diagonal()) {
        const RealVector ratio =
            b2.form().diagonal().real().cwiseQuotient(b1.form().diagonal().real());
        mb.lambda_min = ratio.minCoeff();
        mb.lambda_max = ratio.maxCoeff();
    } else {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(b1.congruence(b2.form()), Eigen::EigenvaluesOnly);
        mb.lambda_min = eig.eigenvalues().minCoeff();
        mb.lambda_max = eig.eigenvalues().maxCoeff();
    }
    mb.constant = std::max(std::sqrt(mb.lambda_max), 1.0 / std::sqrt(mb.lambda_min));
    return mb;
}

double op_norm(const Matrix& a)
{
    if (a.size() == 0)
        return 0;
    return singular_values(a)(0);
}

}  // namespace rhodge
