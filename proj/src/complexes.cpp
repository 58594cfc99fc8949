#include "roughhodge/complexes.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "roughhodge/errors.hpp"

namespace rhodge {

namespace {

std::vector<Index> identity_indices(Index n)
{
    std::vector<Index> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), Index{0});
    return v;
}

Simplex drop(const Simplex& s, std::size_t i)
{
    Simplex out;
    out.reserve(s.size() - 1);
    for (std::size_t j = 0; j < s.size(); ++j)
        if (j != i)
            out.push_back(s[j]);
    return out;
}

Simplex canonical(Simplex s)
{
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
        throw Error(ErrorKind::NotAComplex, "simplex repeats a vertex");
    if (!s.empty() && s.front() < 0)
        throw Error(ErrorKind::NotAComplex, "vertex labels must be non-negative");
    return s;
}

bool is_simplicial_carrier(const CochainComplex& c)
{
    if (!c.simplicial || c.fiber_rank != 1)
        return false;
    for (Index k = 0; k < c.degree_count(); ++k)
        if (c.cells[static_cast<std::size_t>(k)] != identity_indices(c.simplicial->count(k)))
            return false;
    return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// SimplicialComplex

SimplicialComplex SimplicialComplex::from_top(const std::vector<Simplex>& tops)
{
    std::vector<std::set<Simplex>> sets;
    for (const Simplex& raw : tops) {
        const Simplex top = canonical(raw);
        if (top.empty())
            continue;
        const std::size_t n = top.size();
        if (sets.size() < n)
            sets.resize(n);
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            Simplex face;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i))
                    face.push_back(top[i]);
            sets[face.size() - 1].insert(face);
        }
    }
    SimplicialComplex k;
    for (auto& s : sets)
        k.simplices_.emplace_back(s.begin(), s.end());
    k.finalize();
    return k;
}

SimplicialComplex SimplicialComplex::from_simplices(const std::vector<Simplex>& all)
{
    std::vector<std::set<Simplex>> sets;
    for (const Simplex& raw : all) {
        const Simplex s = canonical(raw);
        if (s.empty())
            continue;
        if (sets.size() < s.size())
            sets.resize(s.size());
        sets[s.size() - 1].insert(s);
    }
    for (std::size_t d = 1; d < sets.size(); ++d) {
        for (const Simplex& s : sets[d]) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (!sets[d - 1].count(drop(s, i))) {
                    std::ostringstream msg;
                    msg << "a face of a " << d << "-simplex is missing";
                    throw Error(ErrorKind::NotAComplex, msg.str());
                }
            }
        }
    }
    SimplicialComplex k;
    for (auto& s : sets)
        k.simplices_.emplace_back(s.begin(), s.end());
    k.finalize();
    return k;
}

void SimplicialComplex::finalize()
{
    while (!simplices_.empty() && simplices_.back().empty())
        simplices_.pop_back();
    lookup_.assign(simplices_.size(), {});
    for (std::size_t d = 0; d < simplices_.size(); ++d)
        for (std::size_t i = 0; i < simplices_[d].size(); ++i)
            lookup_[d][simplices_[d][i]] = static_cast<Index>(i);
}

Index SimplicialComplex::count(Index k) const
{
    if (k < 0 || k >= static_cast<Index>(simplices_.size()))
        return 0;
    return static_cast<Index>(simplices_[static_cast<std::size_t>(k)].size());
}

std::optional<Index> SimplicialComplex::index_of(const Simplex& s) const
{
    if (s.empty() || s.size() > lookup_.size())
        return std::nullopt;
    const auto& table = lookup_[s.size() - 1];
    const auto it = table.find(s);
    if (it == table.end())
        return std::nullopt;
    return it->second;
}

std::vector<Index> SimplicialComplex::counts() const
{
    std::vector<Index> out;
    for (const auto& s : simplices_)
        out.push_back(static_cast<Index>(s.size()));
    return out;
}

// ---------------------------------------------------------------------------
// Fixtures and parsing

SimplicialComplex fixture(std::string_view name)
{
    if (name == "path_2")
        return SimplicialComplex::from_top({{0, 1}});
    if (name == "triangle")
        return SimplicialComplex::from_top({{0, 1, 2}});
    if (name.rfind("cycle_", 0) == 0) {
        Index n = 0;
        const auto digits = name.substr(6);
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec != std::errc() || ptr != digits.data() + digits.size() || n < 3)
            throw Error(ErrorKind::ParseError, "cycle fixture needs n >= 3: " + std::string(name));
        std::vector<Simplex> edges;
        for (Index i = 0; i < n; ++i)
            edges.push_back({i, (i + 1) % n});
        return SimplicialComplex::from_top(edges);
    }
    if (name == "octahedron" || name == "ball_cone_octahedron") {
        // vertices: 0 = +x, 1 = -x, 2 = +y, 3 = -y, 4 = +z, 5 = -z; apex 6 for the cone
        std::vector<Simplex> tops;
        for (Index x : {0, 1})
            for (Index y : {2, 3})
                for (Index z : {4, 5}) {
                    if (name == "octahedron")
                        tops.push_back({x, y, z});
                    else
                        tops.push_back({x, y, z, 6});
                }
        return SimplicialComplex::from_top(tops);
    }
    if (name == "torus_triangulated") {
        // Seven-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7.
        std::vector<Simplex> tops;
        for (Index i = 0; i < 7; ++i) {
            tops.push_back({i, (i + 1) % 7, (i + 3) % 7});
            tops.push_back({i, (i + 2) % 7, (i + 3) % 7});
        }
        return SimplicialComplex::from_top(tops);
    }
    throw Error(ErrorKind::ParseError, "unknown fixture: " + std::string(name));
}

std::vector<std::string> fixture_names()
{
    return {"path_2", "cycle_<n>", "triangle", "octahedron", "ball_cone_octahedron",
            "torus_triangulated", "torus_<a>x<b>", "grid_<a>x<b>"};
}

SimplicialComplex parse_simplices(std::istream& in)
{
    std::vector<Simplex> tops;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        Simplex s;
        std::string tok;
        while (fields >> tok) {
            Index v = 0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 0) {
                std::ostringstream msg;
                msg << "line " << line_no << ": '" << tok << "' is not a vertex label";
                throw Error(ErrorKind::ParseError, msg.str());
            }
            s.push_back(v);
        }
        if (!s.empty())
            tops.push_back(std::move(s));
    }
    if (tops.empty())
        throw Error(ErrorKind::ParseError, "complex file lists no simplices");
    return SimplicialComplex::from_top(tops);
}

SimplicialComplex parse_simplices_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::IoError, "cannot open complex file " + path);
    return parse_simplices(in);
}

// ---------------------------------------------------------------------------
// CochainComplex

Matrix CochainComplex::gamma_matrix() const
{
    const Index n = total_dim();
    Matrix g = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < coboundaries.size(); ++k) {
        const auto& rows = grading.indices(static_cast<Index>(k + 1));
        const auto& cols = grading.indices(static_cast<Index>(k));
        const SparseMatrix& d = coboundaries[k];
        for (Index outer = 0; outer < d.outerSize(); ++outer)
            for (SparseMatrix::InnerIterator it(d, outer); it; ++it)
                g(rows[static_cast<std::size_t>(it.row())], cols[static_cast<std::size_t>(it.col())]) += it.value();
    }
    return g;
}

NilpotentOperator CochainComplex::total_gamma() const
{
    return certify_nilpotent(gamma_matrix());
}

bool CochainComplex::exactly_nilpotent() const
{
    for (std::size_t k = 0; k + 1 < coboundaries.size(); ++k) {
        const SparseMatrix prod = coboundaries[k + 1] * coboundaries[k];
        for (Index outer = 0; outer < prod.outerSize(); ++outer)
            for (SparseMatrix::InnerIterator it(prod, outer); it; ++it)
                if (it.value() != Scalar(0))
                    return false;
    }
    return true;
}

CochainComplex build_simplicial(const SimplicialComplex& k, std::string name)
{
    CochainComplex c;
    c.name = std::move(name);
    c.grading = GradedStructure::from_sizes(k.counts());
    for (Index d = 0; d < k.dimension(); ++d) {
        std::vector<Eigen::Triplet<Scalar>> trips;
        const auto& upper = k.simplices(d + 1);
        for (std::size_t row = 0; row < upper.size(); ++row) {
            const Simplex& s = upper[row];
            for (std::size_t i = 0; i < s.size(); ++i) {
                const Index col = *k.index_of(drop(s, i));
                trips.emplace_back(static_cast<Index>(row), col, (i % 2 == 0) ? 1.0 : -1.0);
            }
        }
        SparseMatrix m(k.count(d + 1), k.count(d));
        m.setFromTriplets(trips.begin(), trips.end());
        c.coboundaries.push_back(std::move(m));
    }
    for (Index d = 0; d <= k.dimension(); ++d)
        c.cells.push_back(identity_indices(k.count(d)));
    c.simplicial = k;
    return c;
}

CochainComplex build_fixture(std::string_view name)
{
    // torus_AxB[xC...]: periodic cubical grid; grid_AxB...: non-periodic
    for (const std::string_view prefix : {std::string_view("torus_"), std::string_view("grid_")}) {
        if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size() ||
            !std::isdigit(static_cast<unsigned char>(name[prefix.size()])))
            continue;
        std::vector<Index> sizes;
        std::string_view rest = name.substr(prefix.size());
        while (true) {
            Index v = 0;
            const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
            if (ec != std::errc() || v < 1)
                throw Error(ErrorKind::ParseError, "malformed grid fixture name: " + std::string(name));
            sizes.push_back(v);
            rest.remove_prefix(static_cast<std::size_t>(ptr - rest.data()));
            if (rest.empty())
                break;
            if (rest.front() != 'x')
                throw Error(ErrorKind::ParseError, "malformed grid fixture name: " + std::string(name));
            rest.remove_prefix(1);
        }
        CochainComplex c = build_cubical(sizes, std::vector<bool>(sizes.size(), prefix == "torus_"));
        c.name = std::string(name);
        return c;
    }
    return build_simplicial(fixture(name), std::string(name));
}

// ---------------------------------------------------------------------------
// Cubical grids

double CubicalLayout::spacing(Index axis) const
{
    return lengths[static_cast<std::size_t>(axis)] / static_cast<double>(sizes[static_cast<std::size_t>(axis)]);
}

double CubicalLayout::cell_volume() const
{
    double v = 1;
    for (Index a = 0; a < dimension(); ++a)
        v *= spacing(a);
    return v;
}

Index CubicalLayout::vertex_extent(Index axis) const
{
    const auto a = static_cast<std::size_t>(axis);
    return periodic[a] ? sizes[a] : sizes[a] + 1;
}

Index CubicalLayout::top_index(const std::vector<Index>& position) const
{
    Index idx = 0;
    for (std::size_t a = 0; a < sizes.size(); ++a)
        idx = idx * sizes[a] + position[a];
    return idx;
}

Index CubicalLayout::top_count() const
{
    Index n = 1;
    for (Index s : sizes)
        n *= s;
    return n;
}

Index CubicalLayout::adjacent_top(const Cell& cell) const
{
    const std::size_t dim = sizes.size();
    std::vector<std::vector<Index>> choices(dim);
    for (std::size_t a = 0; a < dim; ++a) {
        const Index p = cell.position[a];
        if (std::find(cell.axes.begin(), cell.axes.end(), static_cast<Index>(a)) != cell.axes.end()) {
            choices[a] = {p};
            continue;
        }
        const Index s = sizes[a];
        if (periodic[a]) {
            choices[a] = {(p - 1 + s) % s, p % s};
        } else {
            if (p - 1 >= 0)
                choices[a].push_back(p - 1);
            if (p < s)
                choices[a].push_back(p);
        }
    }
    Index best = std::numeric_limits<Index>::max();
    std::vector<Index> pos(dim);
    std::function<void(std::size_t)> walk = [&](std::size_t a) {
        if (a == dim) {
            best = std::min(best, top_index(pos));
            return;
        }
        for (Index v : choices[a]) {
            pos[a] = v;
            walk(a + 1);
        }
    };
    walk(0);
    return best;
}

std::vector<double> CubicalLayout::top_barycenter(Index top) const
{
    std::vector<double> x(sizes.size());
    for (std::size_t a = sizes.size(); a-- > 0;) {
        const Index q = top % sizes[a];
        top /= sizes[a];
        x[a] = (static_cast<double>(q) + 0.5) * spacing(static_cast<Index>(a));
    }
    return x;
}

CochainComplex build_cubical(const std::vector<Index>& sizes, const std::vector<bool>& periodic,
                             const std::vector<double>& lengths)
{
    const std::size_t dim = sizes.size();
    if (dim == 0)
        throw Error(ErrorKind::EmptyGrid, "grid needs at least one axis");
    for (Index s : sizes)
        if (s < 1)
            throw Error(ErrorKind::EmptyGrid, "every grid size must be >= 1");
    if (periodic.size() != dim || (!lengths.empty() && lengths.size() != dim))
        throw Error(ErrorKind::DimensionMismatch, "grid flags must match the number of axes");

    CubicalLayout layout;
    layout.sizes = sizes;
    layout.periodic = periodic;
    if (lengths.empty()) {
        for (Index s : sizes)
            layout.lengths.push_back(static_cast<double>(s));
    } else {
        layout.lengths = lengths;
    }

    // Cell tables: for each degree, for each axis subset (combination order), row-major positions.
    struct Block {
        std::vector<Index> axes;
        std::vector<Index> extent;
        Index offset;
    };
    std::vector<std::vector<Block>> blocks(dim + 1);
    layout.cells.assign(dim + 1, {});
    for (std::size_t k = 0; k <= dim; ++k) {
        std::vector<bool> pick(dim, false);
        std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
        // prev_permutation over a descending-sorted selector enumerates subsets in lexicographic order
        do {
            Block b;
            for (std::size_t a = 0; a < dim; ++a)
                if (pick[a])
                    b.axes.push_back(static_cast<Index>(a));
            for (std::size_t a = 0; a < dim; ++a)
                b.extent.push_back(pick[a] ? sizes[a] : layout.vertex_extent(static_cast<Index>(a)));
            b.offset = static_cast<Index>(layout.cells[k].size());
            Index count = 1;
            for (Index e : b.extent)
                count *= e;
            std::vector<Index> pos(dim, 0);
            for (Index lin = 0; lin < count; ++lin) {
                Index rem = lin;
                for (std::size_t a = dim; a-- > 0;) {
                    pos[a] = rem % b.extent[a];
                    rem /= b.extent[a];
                }
                layout.cells[k].push_back({pos, b.axes});
            }
            blocks[k].push_back(std::move(b));
        } while (std::prev_permutation(pick.begin(), pick.end()));
    }

    auto locate = [&](std::size_t k, const std::vector<Index>& pos, const std::vector<Index>& axes) {
        for (const Block& b : blocks[k]) {
            if (b.axes != axes)
                continue;
            Index lin = 0;
            for (std::size_t a = 0; a < dim; ++a)
                lin = lin * b.extent[a] + pos[a];
            return b.offset + lin;
        }
        throw Error(ErrorKind::NotAComplex, "cubical face lookup failed");
    };

    CochainComplex c;
    std::vector<Index> counts;
    for (const auto& cells : layout.cells)
        counts.push_back(static_cast<Index>(cells.size()));
    c.grading = GradedStructure::from_sizes(counts);
    for (std::size_t k = 0; k < dim; ++k) {
        std::vector<Eigen::Triplet<Scalar>> trips;
        const auto& upper = layout.cells[k + 1];
        for (std::size_t row = 0; row < upper.size(); ++row) {
            const auto& cell = upper[row];
            for (std::size_t m = 0; m < cell.axes.size(); ++m) {
                const Index axis = cell.axes[m];
                std::vector<Index> face_axes = cell.axes;
                face_axes.erase(face_axes.begin() + static_cast<std::ptrdiff_t>(m));
                const double sign = (m % 2 == 0) ? 1.0 : -1.0;
                std::vector<Index> lo = cell.position;
                std::vector<Index> hi = cell.position;
                hi[static_cast<std::size_t>(axis)] += 1;
                if (layout.periodic[static_cast<std::size_t>(axis)])
                    hi[static_cast<std::size_t>(axis)] %= sizes[static_cast<std::size_t>(axis)];
                trips.emplace_back(static_cast<Index>(row), locate(k, hi, face_axes), sign);
                trips.emplace_back(static_cast<Index>(row), locate(k, lo, face_axes), -sign);
            }
        }
        SparseMatrix m(counts[k + 1], counts[k]);
        m.setFromTriplets(trips.begin(), trips.end());
        m.prune(Scalar(0));
        c.coboundaries.push_back(std::move(m));
    }
    for (Index n : counts)
        c.cells.push_back(identity_indices(n));

    std::ostringstream name;
    name << "cubical";
    for (std::size_t a = 0; a < dim; ++a)
        name << (a ? "x" : "_") << sizes[a] << (periodic[a] ? "p" : "");
    c.name = name.str();
    c.cubical = std::move(layout);
    return c;
}

// ---------------------------------------------------------------------------
// Boundary conditions

bool BoundaryMarking::empty() const
{
    for (const auto& m : marked)
        if (!m.empty())
            return false;
    return true;
}

BoundaryMarking topological_boundary(const SimplicialComplex& k)
{
    const Index n = k.dimension();
    std::vector<Simplex> faces;
    if (n >= 1) {
        std::map<Simplex, int> cofaces;
        for (const Simplex& top : k.simplices(n))
            for (std::size_t i = 0; i < top.size(); ++i)
                ++cofaces[drop(top, i)];
        for (const auto& [face, count] : cofaces)
            if (count == 1)
                faces.push_back(face);
    }
    BoundaryMarking marking;
    marking.marked.assign(static_cast<std::size_t>(n + 1), {});
    if (faces.empty())
        return marking;
    return marking_from_subcomplex(k, SimplicialComplex::from_top(faces));
}

BoundaryMarking topological_boundary(const CubicalLayout& layout)
{
    BoundaryMarking marking;
    marking.marked.assign(layout.cells.size(), {});
    for (std::size_t k = 0; k < layout.cells.size(); ++k) {
        for (std::size_t i = 0; i < layout.cells[k].size(); ++i) {
            const auto& cell = layout.cells[k][i];
            for (Index a = 0; a < layout.dimension(); ++a) {
                const auto axis = static_cast<std::size_t>(a);
                if (layout.periodic[axis] ||
                    std::find(cell.axes.begin(), cell.axes.end(), a) != cell.axes.end())
                    continue;
                if (cell.position[axis] == 0 || cell.position[axis] == layout.sizes[axis]) {
                    marking.marked[k].push_back(static_cast<Index>(i));
                    break;
                }
            }
        }
    }
    return marking;
}

BoundaryMarking marking_from_subcomplex(const SimplicialComplex& k, const SimplicialComplex& sub)
{
    BoundaryMarking marking;
    marking.marked.assign(static_cast<std::size_t>(std::max<Index>(k.dimension() + 1, 0)), {});
    for (Index d = 0; d <= sub.dimension(); ++d) {
        for (const Simplex& s : sub.simplices(d)) {
            const auto idx = k.index_of(s);
            if (!idx)
                throw Error(ErrorKind::NotSubcomplex, "marked simplex is not in the complex");
            marking.marked[static_cast<std::size_t>(d)].push_back(*idx);
        }
    }
    for (auto& m : marking.marked)
        std::sort(m.begin(), m.end());
    return marking;
}

CochainComplex relative_complex(const CochainComplex& c, const BoundaryMarking& marking)
{
    if (marking.empty())
        return c;
    const Index degrees = c.degree_count();
    const Index r = c.fiber_rank;
    if (static_cast<Index>(marking.marked.size()) > degrees)
        throw Error(ErrorKind::NotSubcomplex, "marking has more degrees than the complex");

    std::vector<std::vector<bool>> is_marked(static_cast<std::size_t>(degrees));
    for (Index k = 0; k < degrees; ++k) {
        const Index cells = static_cast<Index>(c.cells[static_cast<std::size_t>(k)].size());
        is_marked[static_cast<std::size_t>(k)].assign(static_cast<std::size_t>(cells), false);
        if (k < static_cast<Index>(marking.marked.size())) {
            for (Index i : marking.marked[static_cast<std::size_t>(k)]) {
                if (i < 0 || i >= cells)
                    throw Error(ErrorKind::NotSubcomplex, "marked cell index out of range");
                is_marked[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = true;
            }
        }
    }

    // Closed under faces: every face of a marked cell (nonzero incidence) is marked.
    for (Index k = 0; k + 1 < degrees; ++k) {
        const SparseMatrix& d = c.coboundaries[static_cast<std::size_t>(k)];
        for (Index outer = 0; outer < d.outerSize(); ++outer) {
            for (SparseMatrix::InnerIterator it(d, outer); it; ++it) {
                const auto upper = static_cast<std::size_t>(it.row() / r);
                const auto lower = static_cast<std::size_t>(it.col() / r);
                if (is_marked[static_cast<std::size_t>(k + 1)][upper] &&
                    !is_marked[static_cast<std::size_t>(k)][lower]) {
                    std::ostringstream msg;
                    msg << "a face of marked cell " << upper << " in degree " << k + 1
                        << " is not marked";
                    throw Error(ErrorKind::NotSubcomplex, msg.str());
                }
            }
        }
    }

    CochainComplex out;
    out.name = c.name + "_rel";
    out.integral = c.integral;
    out.fiber_rank = r;
    out.simplicial = c.simplicial;
    out.cubical = c.cubical;
    std::vector<std::vector<Index>> keep(static_cast<std::size_t>(degrees));
    std::vector<Index> sizes;
    for (Index k = 0; k < degrees; ++k) {
        const auto& cells = c.cells[static_cast<std::size_t>(k)];
        std::vector<Index> kept_cells;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (is_marked[static_cast<std::size_t>(k)][i])
                continue;
            kept_cells.push_back(cells[i]);
            for (Index f = 0; f < r; ++f)
                keep[static_cast<std::size_t>(k)].push_back(static_cast<Index>(i) * r + f);
        }
        out.cells.push_back(std::move(kept_cells));
        sizes.push_back(static_cast<Index>(keep[static_cast<std::size_t>(k)].size()));
    }
    out.grading = GradedStructure::from_sizes(sizes);
    for (Index k = 0; k + 1 < degrees; ++k) {
        const Matrix dense = Matrix(c.coboundaries[static_cast<std::size_t>(k)]);
        const Matrix sub = dense(keep[static_cast<std::size_t>(k + 1)], keep[static_cast<std::size_t>(k)]);
        out.coboundaries.push_back(sub.sparseView());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Local systems

LocalSystem LocalSystem::scalar(const std::vector<Scalar>& values)
{
    LocalSystem l;
    l.rank = 1;
    for (Scalar v : values)
        l.transports.push_back(Matrix::Constant(1, 1, v));
    return l;
}

double holonomy_defect(const SimplicialComplex& k, const LocalSystem& l)
{
    if (static_cast<Index>(l.transports.size()) != k.count(1))
        throw Error(ErrorKind::DimensionMismatch, "local system needs one transport per edge");
    double worst = 0;
    if (k.dimension() < 2)
        return worst;
    const Matrix id = Matrix::Identity(l.rank, l.rank);
    for (const Simplex& t : k.simplices(2)) {
        const Matrix& ab = l.transports[static_cast<std::size_t>(*k.index_of({t[0], t[1]}))];
        const Matrix& bc = l.transports[static_cast<std::size_t>(*k.index_of({t[1], t[2]}))];
        const Matrix& ac = l.transports[static_cast<std::size_t>(*k.index_of({t[0], t[2]}))];
        const Matrix hol = ac.partialPivLu().solve(bc * ab);
        worst = std::max(worst, op_norm(hol - id));
    }
    return worst;
}

CochainComplex twisted_coboundary(const CochainComplex& c, const LocalSystem& l, double tol)
{
    if (!is_simplicial_carrier(c))
        throw Error(ErrorKind::CarrierMismatch, "twisting needs an untwisted simplicial cochain complex");
    const SimplicialComplex& k = *c.simplicial;
    const Index r = l.rank;
    for (const Matrix& t : l.transports) {
        if (t.rows() != r || t.cols() != r)
            throw Error(ErrorKind::DimensionMismatch, "transport has the wrong rank");
        if (std::abs(t.determinant()) == 0.0)
            throw Error(ErrorKind::NotFlat, "transport is not invertible");
    }
    const double defect = holonomy_defect(k, l);
    if (defect > tol) {
        std::ostringstream msg;
        msg << "holonomy defect " << defect << " exceeds " << tol;
        throw Error(ErrorKind::NotFlat, msg.str(), defect);
    }

    CochainComplex out;
    out.name = c.name + "_twisted";
    out.integral = false;
    out.fiber_rank = r;
    out.simplicial = k;
    out.cells = c.cells;
    std::vector<Index> sizes;
    for (Index n : k.counts())
        sizes.push_back(n * r);
    out.grading = GradedStructure::from_sizes(sizes);

    const Matrix id = Matrix::Identity(r, r);
    for (Index d = 0; d < k.dimension(); ++d) {
        std::vector<Eigen::Triplet<Scalar>> trips;
        const auto& upper = k.simplices(d + 1);
        for (std::size_t row = 0; row < upper.size(); ++row) {
            const Simplex& s = upper[row];
            const std::size_t last = s.size() - 1;
            for (std::size_t i = 0; i < s.size(); ++i) {
                const Index col = *k.index_of(drop(s, i));
                const double sign = (i % 2 == 0) ? 1.0 : -1.0;
                Matrix coeff = id;
                if (i == last)
                    coeff = l.transports[static_cast<std::size_t>(*k.index_of({s[last - 1], s[last]}))];
                // overall sign flip so that degree 0 reads rho u(v) - u(w)
                coeff *= -sign;
                for (Index a = 0; a < r; ++a)
                    for (Index b = 0; b < r; ++b)
                        if (coeff(a, b) != Scalar(0))
                            trips.emplace_back(static_cast<Index>(row) * r + a, col * r + b, coeff(a, b));
            }
        }
        SparseMatrix m(k.count(d + 1) * r, k.count(d) * r);
        m.setFromTriplets(trips.begin(), trips.end());
        out.coboundaries.push_back(std::move(m));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exterior algebra

ExteriorElement ExteriorElement::basis(const std::vector<unsigned>& idx)
{
    // sign of the sorting permutation
    int inversions = 0;
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j)
            if (idx[i] > idx[j])
                ++inversions;
    unsigned mask = 0;
    for (unsigned i : idx) {
        if (mask & (1u << i))
            return {};
        mask |= 1u << i;
    }
    ExteriorElement e;
    e.terms[mask] = (inversions % 2 == 0) ? 1.0 : -1.0;
    return e;
}

ExteriorElement ExteriorElement::operator+(const ExteriorElement& other) const
{
    ExteriorElement out = *this;
    for (const auto& [mask, c] : other.terms)
        out.terms[mask] += c;
    return out;
}

ExteriorElement ExteriorElement::operator*(Scalar s) const
{
    ExteriorElement out = *this;
    for (auto& [mask, c] : out.terms)
        c *= s;
    return out;
}

bool ExteriorElement::is_odd() const
{
    for (const auto& [mask, c] : terms)
        if (c != Scalar(0) && std::popcount(mask) % 2 == 0)
            return false;
    return true;
}

namespace {

std::vector<unsigned> exterior_basis(int n)
{
    std::vector<unsigned> masks(1u << n);
    std::iota(masks.begin(), masks.end(), 0u);
    std::stable_sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) {
        const int pa = std::popcount(a), pb = std::popcount(b);
        return pa != pb ? pa < pb : a < b;
    });
    return masks;
}

}  // namespace

GradedStructure KoszulModel::degree_grading() const
{
    std::vector<std::vector<Index>> degrees(static_cast<std::size_t>(n + 1));
    for (std::size_t i = 0; i < basis.size(); ++i)
        degrees[static_cast<std::size_t>(std::popcount(basis[i]))].push_back(static_cast<Index>(i));
    return GradedStructure(std::move(degrees));
}

GradedStructure KoszulModel::parity_grading() const
{
    std::vector<std::vector<Index>> degrees(2);
    for (std::size_t i = 0; i < basis.size(); ++i)
        degrees[static_cast<std::size_t>(std::popcount(basis[i]) % 2)].push_back(static_cast<Index>(i));
    return GradedStructure(std::move(degrees));
}

Matrix wedge_matrix(int n, const ExteriorElement& omega)
{
    if (n < 0 || n > 16)
        throw Error(ErrorKind::DimensionMismatch, "exterior algebra rank out of range");
    const std::vector<unsigned> basis = exterior_basis(n);
    std::vector<Index> position(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i)
        position[basis[i]] = static_cast<Index>(i);

    const Index dim = static_cast<Index>(basis.size());
    Matrix m = Matrix::Zero(dim, dim);
    for (const auto& [s, coeff] : omega.terms) {
        if (s >= (1u << n))
            throw Error(ErrorKind::DimensionMismatch, "omega uses a covector outside C^n");
        for (std::size_t col = 0; col < basis.size(); ++col) {
            const unsigned t = basis[col];
            if (s & t)
                continue;
            // e_S ^ e_T = (-1)^{#{(a in S, b in T): a > b}} e_{S u T}
            int swaps = 0;
            for (int a = 0; a < n; ++a)
                if (s & (1u << a))
                    swaps += std::popcount(t & ((1u << a) - 1));
            const double sign = (swaps % 2 == 0) ? 1.0 : -1.0;
            m(position[s | t], static_cast<Index>(col)) += sign * coeff;
        }
    }
    return m;
}

KoszulModel koszul_wedge(int n, const ExteriorElement& omega)
{
    if (!omega.is_odd())
        throw Error(ErrorKind::NotOdd, "omega has an even-degree component; omega ^ omega need not vanish");
    KoszulModel model;
    model.n = n;
    model.basis = exterior_basis(n);
    model.omega = omega;
    model.op = certify_nilpotent(wedge_matrix(n, omega));
    return model;
}

NilpotentOperator magnet_operator(const NilpotentOperator& gamma, const Matrix& w, double tol)
{
    if (w.rows() != gamma.dim() || w.cols() != gamma.dim())
        throw Error(ErrorKind::DimensionMismatch, "magnet term has the wrong shape");
    if (w.isZero(0))
        return gamma;
    return certify_nilpotent(gamma.map + w, tol);
}

Matrix cup_product_operator(const CochainComplex& c, const std::vector<Scalar>& alpha)
{
    if (!is_simplicial_carrier(c))
        throw Error(ErrorKind::CarrierMismatch, "cup products need an untwisted simplicial complex");
    const SimplicialComplex& k = *c.simplicial;
    if (static_cast<Index>(alpha.size()) != k.count(1))
        throw Error(ErrorKind::DimensionMismatch, "1-cochain needs one value per edge");
    const Index n = c.total_dim();
    Matrix w = Matrix::Zero(n, n);
    // (alpha cup u)[v0 .. v_{k+1}] = alpha[v0 v1] * u[v1 .. v_{k+1}]
    for (Index d = 0; d < k.dimension(); ++d) {
        const auto& rows = c.grading.indices(d + 1);
        const auto& cols = c.grading.indices(d);
        const auto& upper = k.simplices(d + 1);
        for (std::size_t i = 0; i < upper.size(); ++i) {
            const Simplex& s = upper[i];
            const Index edge = *k.index_of({s[0], s[1]});
            const Index back = *k.index_of(drop(s, 0));
            w(rows[i], cols[static_cast<std::size_t>(back)]) += alpha[static_cast<std::size_t>(edge)];
        }
    }
    return w;
}

int euler_characteristic(const std::vector<Index>& values)
{
    long long chi = 0;
    for (std::size_t k = 0; k < values.size(); ++k)
        chi += (k % 2 == 0 ? 1 : -1) * static_cast<long long>(values[k]);
    return static_cast<int>(chi);
}

}  // namespace rhodge
