// Independent reference computations for the tests. Nothing here calls the library's rank,
// Smith or wedge code.
#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <vector>

namespace oracle {

/// Exact rank of an integer matrix by fraction-free (Bareiss) elimination in __int128.
inline long rank_bareiss(std::vector<std::vector<long long>> m)
{
    const std::size_t rows = m.size();
    if (rows == 0)
        return 0;
    const std::size_t cols = m[0].size();
    std::vector<std::vector<__int128>> a(rows, std::vector<__int128>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            a[i][j] = m[i][j];
    __int128 prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0)
            ++p;
        if (p == rows)
            continue;
        std::swap(a[p], a[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j)
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) / prev;
            a[i][c] = 0;
        }
        prev = a[r][c];
        ++r;
    }
    return static_cast<long>(r);
}

/// Rank of a small complex matrix by Gaussian elimination with partial pivoting.
inline long rank_gauss(std::vector<std::vector<std::complex<double>>> a, double tol = 1e-9)
{
    const std::size_t rows = a.size();
    if (rows == 0)
        return 0;
    const std::size_t cols = a[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        for (std::size_t i = r + 1; i < rows; ++i)
            if (std::abs(a[i][c]) > std::abs(a[p][c]))
                p = i;
        if (std::abs(a[p][c]) <= tol)
            continue;
        std::swap(a[p], a[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            const auto f = a[i][c] / a[r][c];
            for (std::size_t j = c; j < cols; ++j)
                a[i][j] -= f * a[r][j];
        }
        ++r;
    }
    return static_cast<long>(r);
}

/// Betti numbers from integer coboundary ranks: b_k = n_k - rank d_k - rank d_{k-1}.
inline std::vector<long> betti_from_ranks(const std::vector<long>& counts, const std::vector<long>& ranks)
{
    std::vector<long> b;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        long v = counts[k];
        if (k < ranks.size())
            v -= ranks[k];
        if (k > 0)
            v -= ranks[k - 1];
        b.push_back(v);
    }
    return b;
}

/// Sign and merged index list of e_S ^ e_T by explicit bubble sort (0 when they overlap).
inline int wedge_sign(const std::vector<unsigned>& s, const std::vector<unsigned>& t, std::vector<unsigned>& merged)
{
    merged = s;
    merged.insert(merged.end(), t.begin(), t.end());
    int sign = 1;
    for (std::size_t i = 0; i < merged.size(); ++i)
        for (std::size_t j = 0; j + 1 < merged.size() - i; ++j) {
            if (merged[j] == merged[j + 1])
                return 0;
            if (merged[j] > merged[j + 1]) {
                std::swap(merged[j], merged[j + 1]);
                sign = -sign;
            }
        }
    for (std::size_t j = 0; j + 1 < merged.size(); ++j)
        if (merged[j] == merged[j + 1])
            return 0;
    return sign;
}

/// Weierstrass partial sum at a dyadic rational p / 2^m via integer phase arithmetic.
inline double weierstrass_dyadic(std::uint64_t p, int m, int terms)
{
    const std::uint64_t mod = std::uint64_t{1} << (m + 1);  // 14^k p / 2^m taken mod 2
    std::uint64_t phase = p % mod;                           // 14^k p mod 2^{m+1}
    double sum = 0, weight = 1;
    for (int k = 0; k < terms; ++k) {
        sum += weight * std::cos(3.14159265358979323846 * static_cast<double>(phase) / static_cast<double>(mod >> 1));
        phase = static_cast<std::uint64_t>((static_cast<unsigned __int128>(phase) * 14u) % mod);
        weight *= 0.5;
    }
    return sum;
}

}  // namespace oracle
