#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <utility>

#include "roughhodge/complexes.hpp"
#include "roughhodge/errors.hpp"

namespace rhodge {

namespace {

using BigMatrix = std::vector<std::vector<mpz_class>>;

/// Diagonal of the Smith normal form (nonzero entries, each dividing the next).
std::vector<mpz_class> smith_diagonal(BigMatrix a)
{
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    std::vector<mpz_class> diag;
    std::size_t t = 0;
    while (t < rows && t < cols) {
        // pivot of minimal magnitude in the trailing block
        std::size_t pr = rows, pc = cols;
        for (std::size_t i = t; i < rows; ++i)
            for (std::size_t j = t; j < cols; ++j)
                if (a[i][j] != 0 && (pr == rows || abs(a[i][j]) < abs(a[pr][pc]))) {
                    pr = i;
                    pc = j;
                }
        if (pr == rows)
            break;
        std::swap(a[t], a[pr]);
        for (auto& row : a)
            std::swap(row[t], row[pc]);

        bool clean = false;
        while (!clean) {
            clean = true;
            for (std::size_t i = t + 1; i < rows; ++i) {
                if (a[i][t] == 0)
                    continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), a[i][t].get_mpz_t(), a[t][t].get_mpz_t());
                for (std::size_t j = t; j < cols; ++j)
                    a[i][j] -= q * a[t][j];
                if (a[i][t] != 0) {
                    std::swap(a[t], a[i]);
                    clean = false;
                }
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (a[t][j] == 0)
                    continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), a[t][j].get_mpz_t(), a[t][t].get_mpz_t());
                for (std::size_t i = t; i < rows; ++i)
                    a[i][j] -= q * a[i][t];
                if (a[t][j] != 0) {
                    for (auto& row : a)
                        std::swap(row[t], row[j]);
                    clean = false;
                }
            }
            if (!clean)
                continue;
            // divisibility: the pivot must divide the whole trailing block
            for (std::size_t i = t + 1; i < rows && clean; ++i)
                for (std::size_t j = t + 1; j < cols; ++j)
                    if (a[i][j] % a[t][t] != 0) {
                        for (std::size_t c = t; c < cols; ++c)
                            a[t][c] += a[i][c];
                        clean = false;
                        break;
                    }
        }
        diag.push_back(abs(a[t][t]));
        ++t;
    }
    return diag;
}

}  // namespace

std::vector<std::string> smith_invariants(const std::vector<std::vector<long long>>& matrix)
{
    BigMatrix a;
    for (const auto& row : matrix) {
        if (!a.empty() && row.size() != a[0].size())
            throw Error(ErrorKind::DimensionMismatch, "ragged integer matrix");
        std::vector<mpz_class> big;
        for (long long v : row)
            big.emplace_back(static_cast<signed long>(v));
        a.push_back(std::move(big));
    }
    std::vector<std::string> out;
    for (const mpz_class& d : smith_diagonal(std::move(a)))
        out.push_back(d.get_str());
    return out;
}

SmithHomology betti_smith(const CochainComplex& c)
{
    if (!c.integral || c.fiber_rank != 1)
        throw Error(ErrorKind::NonIntegerEntries, "Smith form needs an untwisted integer complex");
    SmithHomology h;
    const Index degrees = c.degree_count();
    for (const SparseMatrix& d : c.coboundaries) {
        std::vector<std::vector<long long>> m(static_cast<std::size_t>(d.rows()),
                                              std::vector<long long>(static_cast<std::size_t>(d.cols()), 0));
        for (Index outer = 0; outer < d.outerSize(); ++outer) {
            for (SparseMatrix::InnerIterator it(d, outer); it; ++it) {
                const Scalar v = it.value();
                if (v.imag() != 0 || v.real() != std::round(v.real()) || std::abs(v.real()) > 9e15)
                    throw Error(ErrorKind::NonIntegerEntries, "coboundary has a non-integer entry");
                m[static_cast<std::size_t>(it.row())][static_cast<std::size_t>(it.col())] =
                    static_cast<long long>(v.real());
            }
        }
        const auto invariants = smith_invariants(m);
        h.ranks.push_back(static_cast<Index>(invariants.size()));
        std::vector<std::string> torsion;
        for (const auto& s : invariants)
            if (s != "1")
                torsion.push_back(s);
        h.torsion.push_back(std::move(torsion));
    }
    for (Index k = 0; k < degrees; ++k) {
        Index b = c.grading.size(k);
        if (k < static_cast<Index>(h.ranks.size()))
            b -= h.ranks[static_cast<std::size_t>(k)];
        if (k > 0)
            b -= h.ranks[static_cast<std::size_t>(k - 1)];
        h.betti.push_back(b);
    }
    return h;
}

}  // namespace rhodge
