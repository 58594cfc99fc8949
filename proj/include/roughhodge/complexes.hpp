/**
 * Graded nilpotent operators from combinatorial data: simplicial and cubical
 * cochain complexes, relative subcomplexes, flat local-system twists and
 * wedge operators on the exterior algebra.
 *
 * Conventions: simplices are strictly increasing vertex tuples and carry the
 * orientation of that order; d_k uses alternating-sign face maps. The total
 * operator Gamma places d_k in the (k+1, k) block of the degree grading.
 */
#ifndef ROUGHHODGE_COMPLEXES_HPP
#define ROUGHHODGE_COMPLEXES_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "roughhodge/hodge.hpp"
#include "roughhodge/linops.hpp"

namespace rhodge {

using Simplex = std::vector<Index>;

class SimplicialComplex {
public:
    SimplicialComplex() = default;

    /// Closure of a list of (top) simplices. Vertex labels are kept as given.
    static SimplicialComplex from_top(const std::vector<Simplex>& tops);
    /// Validated complex from a full simplex list; throws NotAComplex on a missing face.
    static SimplicialComplex from_simplices(const std::vector<Simplex>& all);

    Index vertex_count() const { return count(0); }
    Index dimension() const { return static_cast<Index>(simplices_.size()) - 1; }
    Index count(Index k) const;
    const std::vector<Simplex>& simplices(Index k) const { return simplices_.at(static_cast<std::size_t>(k)); }
    std::optional<Index> index_of(const Simplex& s) const;
    std::vector<Index> counts() const;

private:
    void finalize();

    std::vector<std::vector<Simplex>> simplices_;
    std::vector<std::map<Simplex, Index>> lookup_;
};

/// Names understood by `fixture`: path_2, cycle_<n>, triangle, octahedron,
/// ball_cone_octahedron, torus_triangulated.
SimplicialComplex fixture(std::string_view name);
std::vector<std::string> fixture_names();

/// Top simplices, one whitespace-separated vertex tuple per line; `#` starts a comment.
SimplicialComplex parse_simplices(std::istream& in);
SimplicialComplex parse_simplices_file(const std::string& path);

/// Regular cubical grid. A k-cell is (position, axes) with |axes| = k.
struct CubicalLayout {
    std::vector<Index> sizes;
    std::vector<bool> periodic;
    std::vector<double> lengths;  // physical extent per axis

    struct Cell {
        std::vector<Index> position;
        std::vector<Index> axes;  // increasing
    };

    Index dimension() const { return static_cast<Index>(sizes.size()); }
    double spacing(Index axis) const;
    double cell_volume() const;
    Index vertex_extent(Index axis) const;
    /// Row-major index of a top cell (axis 0 slowest).
    Index top_index(const std::vector<Index>& position) const;
    Index top_count() const;
    /// Smallest-index top cell containing the given cell.
    Index adjacent_top(const Cell& cell) const;
    std::vector<double> top_barycenter(Index top) const;

    std::vector<std::vector<Cell>> cells;  // per degree, in cochain order
};

struct CochainComplex {
    std::string name;
    GradedStructure grading;
    std::vector<SparseMatrix> coboundaries;  // d_k : C^k -> C^{k+1}
    bool integral = true;   // untwisted integer coboundaries
    Index fiber_rank = 1;   // coefficient rank (local systems)

    // Carrier cells behind each cochain coordinate block (original indices).
    std::vector<std::vector<Index>> cells;
    std::optional<SimplicialComplex> simplicial;
    std::optional<CubicalLayout> cubical;

    Index degree_count() const { return grading.degree_count(); }
    Index total_dim() const { return grading.total(); }
    std::vector<Index> dims() const { return grading.sizes(); }
    /// Dense Gamma with d_k in the (k+1, k) block.
    Matrix gamma_matrix() const;
    /// Gamma certified nilpotent (exactly, for integral complexes).
    NilpotentOperator total_gamma() const;
    /// True iff d_{k+1} d_k == 0 entrywise with no tolerance.
    bool exactly_nilpotent() const;
};

CochainComplex build_simplicial(const SimplicialComplex& k, std::string name = "simplicial");
/// Simplicial fixtures by name, plus cubical grids "torus_AxB" (periodic) and "grid_AxB".
CochainComplex build_fixture(std::string_view name);

/// Throws EmptyGrid when a size is < 1 or the grid has no axes.
CochainComplex build_cubical(const std::vector<Index>& sizes, const std::vector<bool>& periodic,
                             const std::vector<double>& lengths = {});

struct BoundaryMarking {
    std::vector<std::vector<Index>> marked;  // per degree, cell indices of the complex
    bool empty() const;
};

/// Closure of the codimension-one faces that have exactly one coface.
BoundaryMarking topological_boundary(const SimplicialComplex& k);
/// Cells of a grid lying on a non-periodic face of the box.
BoundaryMarking topological_boundary(const CubicalLayout& layout);
BoundaryMarking marking_from_subcomplex(const SimplicialComplex& k, const SimplicialComplex& sub);

/// Cochains vanishing on the marked cells (row/column deletion). Throws NotSubcomplex.
CochainComplex relative_complex(const CochainComplex& c, const BoundaryMarking& marking);

struct LocalSystem {
    Index rank = 1;
    std::vector<Matrix> transports;  // per edge (low -> high vertex), r x r invertible

    static LocalSystem scalar(const std::vector<Scalar>& values);
};

/// Max over 2-simplices (a<b<c) of ||rho(a->c)^{-1} rho(b->c) rho(a->b) - I||.
double holonomy_defect(const SimplicialComplex& k, const LocalSystem& l);

/**
 * Twisted coboundary with values in C^r. On edges
 * (d u)(v->w) = rho(v->w) u(v) - u(w); in higher degrees the face opposite the
 * last vertex is transported along the final edge. Throws NotFlat.
 */
CochainComplex twisted_coboundary(const CochainComplex& c, const LocalSystem& l, double tol = 1e-12);

/// Element of the exterior algebra of C^n: bitmask of basis covectors -> coefficient.
struct ExteriorElement {
    std::map<unsigned, Scalar> terms;

    /// e_{i1} ^ e_{i2} ^ ... for 0-based indices in any order (sign of the sort applied).
    static ExteriorElement basis(const std::vector<unsigned>& indices);
    ExteriorElement operator+(const ExteriorElement& other) const;
    ExteriorElement operator*(Scalar s) const;
    bool is_odd() const;
};

struct KoszulModel {
    int n = 0;
    std::vector<unsigned> basis;  // masks, ordered by degree then value
    ExteriorElement omega;
    NilpotentOperator op;

    Index dim() const { return static_cast<Index>(basis.size()); }
    GradedStructure degree_grading() const;
    GradedStructure parity_grading() const;
};

/// Matrix of x -> omega ^ x on the exterior algebra (basis ordered as in KoszulModel).
Matrix wedge_matrix(int n, const ExteriorElement& omega);
/// Throws NotOdd when omega has an even-degree component.
KoszulModel koszul_wedge(int n, const ExteriorElement& omega);

/// Gamma + W certified nilpotent; throws NotNilpotent with the residual.
NilpotentOperator magnet_operator(const NilpotentOperator& gamma, const Matrix& w, double tol = 1e-12);

/// Cup product with a 1-cochain, u -> alpha cup u, on a simplicial cochain complex.
Matrix cup_product_operator(const CochainComplex& c, const std::vector<Scalar>& alpha);

struct SmithHomology {
    std::vector<Index> betti;
    std::vector<Index> ranks;                       // rank_Z d_k
    std::vector<std::vector<std::string>> torsion;  // invariant factors > 1 of d_k
};

/// Exact integer homology ranks via Smith normal form. Throws NonIntegerEntries.
SmithHomology betti_smith(const CochainComplex& c);

/// Invariant factors (nonzero diagonal of the Smith form) of an integer matrix, as decimal strings.
std::vector<std::string> smith_invariants(const std::vector<std::vector<long long>>& matrix);

int euler_characteristic(const std::vector<Index>& values);

}  // namespace rhodge

#endif
