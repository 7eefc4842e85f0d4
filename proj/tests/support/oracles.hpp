#pragma once

// Independent reference computations used by the tests. Nothing here calls into the
// library's geometry code, so agreement is meaningful.

#include "hyperslice/complex.hpp"
#include "hyperslice/ndvec.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// Determinant by Laplace expansion along the first row. Fine for n <= 5.
inline double det(const Matrix& m)
{
    const std::size_t n = m.size();
    if (n == 1) return m[0][0];
    if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    double sum = 0.0;
    for (std::size_t col = 0; col < n; ++col) {
        Matrix minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<double> row;
            for (std::size_t c = 0; c < n; ++c)
                if (c != col) row.push_back(m[r][c]);
            minor.push_back(row);
        }
        const double sign = (col % 2 == 0) ? 1.0 : -1.0;
        sum += sign * m[0][col] * det(minor);
    }
    return sum;
}

// Cofactors of the first row of the 5x5 matrix whose other rows are (1, p_k) for the
// four points, expressed in the points' active coordinates. The plane through the
// points is {X : sum_k c_k X_k = 0} with X = (1, x1..x4).
inline std::array<double, 5> plane_cofactors(const std::array<std::array<double, 4>, 4>& pts)
{
    std::array<double, 5> c{};
    for (std::size_t col = 0; col < 5; ++col) {
        Matrix minor;
        for (const auto& p : pts) {
            const std::array<double, 5> row{1.0, p[0], p[1], p[2], p[3]};
            std::vector<double> r;
            for (std::size_t k = 0; k < 5; ++k)
                if (k != col) r.push_back(row[k]);
            minor.push_back(r);
        }
        c[col] = ((col % 2 == 0) ? 1.0 : -1.0) * det(minor);
    }
    return c;
}

// Scales so the normal has unit length and its first nonzero entry is positive.
inline std::array<double, 5> canonical(std::array<double, 5> c)
{
    const double len = std::sqrt(c[1] * c[1] + c[2] * c[2] + c[3] * c[3] + c[4] * c[4]);
    for (auto& e : c) e /= len;
    for (std::size_t i = 1; i < 5; ++i) {
        if (std::abs(c[i]) > 1e-12) {
            if (c[i] < 0)
                for (auto& e : c) e = -e;
            break;
        }
    }
    return c;
}

// Unsigned volume of a tetrahedron in 3-space: |det[b-a, c-a, d-a]| / 6.
inline double tet_volume3(const std::array<double, 3>& a, const std::array<double, 3>& b,
                          const std::array<double, 3>& c, const std::array<double, 3>& d)
{
    const Matrix m{{b[0] - a[0], b[1] - a[1], b[2] - a[2]},
                   {c[0] - a[0], c[1] - a[1], c[2] - a[2]},
                   {d[0] - a[0], d[1] - a[1], d[2] - a[2]}};
    return std::abs(det(m)) / 6.0;
}

// Strict interior membership via barycentric coordinates (Cramer's rule).
inline bool strictly_inside(const std::array<std::array<double, 3>, 4>& t, const std::array<double, 3>& p,
                            double margin = 1e-12)
{
    const auto col = [&](std::size_t k) {
        return std::array<double, 3>{t[k][0] - t[0][0], t[k][1] - t[0][1], t[k][2] - t[0][2]};
    };
    const auto e1 = col(1), e2 = col(2), e3 = col(3);
    const std::array<double, 3> r{p[0] - t[0][0], p[1] - t[0][1], p[2] - t[0][2]};
    const auto d3 = [](const std::array<double, 3>& a, const std::array<double, 3>& b, const std::array<double, 3>& c) {
        return det({{a[0], b[0], c[0]}, {a[1], b[1], c[1]}, {a[2], b[2], c[2]}});
    };
    const double d = d3(e1, e2, e3);
    const double l1 = d3(r, e2, e3) / d;
    const double l2 = d3(e1, r, e3) / d;
    const double l3 = d3(e1, e2, r) / d;
    const double l0 = 1.0 - l1 - l2 - l3;
    return l0 > margin && l1 > margin && l2 > margin && l3 > margin;
}

// Edge -> incident triangle count, straight from the triangle list.
inline std::map<std::pair<hyperslice::Index, hyperslice::Index>, int> edge_counts(const hyperslice::TriMesh& m)
{
    std::map<std::pair<hyperslice::Index, hyperslice::Index>, int> e;
    for (const auto& t : m.triangles)
        for (int k = 0; k < 3; ++k) {
            auto a = t.v[static_cast<std::size_t>(k)];
            auto b = t.v[static_cast<std::size_t>((k + 1) % 3)];
            if (a > b) std::swap(a, b);
            ++e[{a, b}];
        }
    return e;
}

// Euler characteristic counted directly: referenced vertices - edges + faces.
inline long euler(const hyperslice::TriMesh& m)
{
    std::set<hyperslice::Index> verts;
    for (const auto& t : m.triangles) verts.insert(t.v.begin(), t.v.end());
    return static_cast<long>(verts.size()) - static_cast<long>(edge_counts(m).size()) +
           static_cast<long>(m.triangles.size());
}

struct Rng {
    std::mt19937_64 g;
    explicit Rng(std::uint64_t seed) : g(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }

    // Random point with the given active coordinates drawn from [lo, hi].
    hyperslice::VecN point(const hyperslice::ActiveAxes& axes, double lo, double hi)
    {
        hyperslice::VecN p;
        for (int a : axes) p[static_cast<std::size_t>(a)] = uniform(lo, hi);
        return p;
    }

    hyperslice::VecN any7(double lo, double hi)
    {
        hyperslice::VecN p;
        for (auto& c : p.c) c = uniform(lo, hi);
        return p;
    }

    // Uniformly random unit normal in 4D plus an offset.
    std::array<double, 5> plane(double offset_lo, double offset_hi)
    {
        std::normal_distribution<double> n(0.0, 1.0);
        std::array<double, 5> c{};
        double len = 0.0;
        do {
            len = 0.0;
            for (std::size_t i = 1; i < 5; ++i) {
                c[i] = n(g);
                len += c[i] * c[i];
            }
        } while (len < 1e-6);
        len = std::sqrt(len);
        for (std::size_t i = 1; i < 5; ++i) c[i] /= len;
        c[0] = uniform(offset_lo, offset_hi);
        return c;
    }
};

// Regular octahedron with outward winding.
inline hyperslice::TriMesh octahedron()
{
    const std::vector<hyperslice::Point3> p{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    const std::vector<std::array<hyperslice::Index, 3>> t{{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                                                          {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
    return hyperslice::TriMesh::from_arrays(p, t);
}

// n x m grid on a flat torus, every quad split in two.
inline hyperslice::TriMesh torus_grid(int n, int m, double big = 3.0, double small = 1.0)
{
    std::vector<hyperslice::Point3> p;
    std::vector<std::array<hyperslice::Index, 3>> t;
    const double tau = 2.0 * 3.14159265358979323846;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            const double u = tau * i / n, v = tau * j / m;
            p.push_back({(big + small * std::cos(v)) * std::cos(u), (big + small * std::cos(v)) * std::sin(u),
                         small * std::sin(v)});
        }
    const auto id = [&](int i, int j) { return static_cast<hyperslice::Index>(((i + n) % n) * m + (j + m) % m); };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            t.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            t.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return hyperslice::TriMesh::from_arrays(p, t);
}

// Two tori glued along a removed triangle pair gives a genus-2 surface; here it is
// built as the connected sum of two grids by deleting one triangle from each and
// bridging the holes with a triangular prism tube.
inline hyperslice::TriMesh genus2()
{
    auto a = torus_grid(6, 4);
    auto b = torus_grid(6, 4);
    std::vector<hyperslice::Point3> p;
    std::vector<std::array<hyperslice::Index, 3>> t;
    for (hyperslice::Index i = 0; i < a.pool.size(); ++i) p.push_back(a.position(i));
    const auto offset = static_cast<hyperslice::Index>(p.size());
    for (hyperslice::Index i = 0; i < b.pool.size(); ++i) {
        auto q = b.position(i);
        q[0] += 20.0;
        p.push_back(q);
    }
    const auto ta = a.triangles[0].v;
    auto tb = b.triangles[0].v;
    for (auto& v : tb) v += offset;
    for (std::size_t k = 1; k < a.triangles.size(); ++k) t.push_back(a.triangles[k].v);
    for (std::size_t k = 1; k < b.triangles.size(); ++k) {
        auto v = b.triangles[k].v;
        for (auto& x : v) x += offset;
        t.push_back(v);
    }
    // Tube: hole boundary ta (oriented as in a) joined to tb traversed in reverse.
    const std::array<hyperslice::Index, 3> r{tb[0], tb[2], tb[1]};
    for (int k = 0; k < 3; ++k) {
        const auto a0 = ta[static_cast<std::size_t>(k)], a1 = ta[static_cast<std::size_t>((k + 1) % 3)];
        const auto b0 = r[static_cast<std::size_t>(k)], b1 = r[static_cast<std::size_t>((k + 1) % 3)];
        t.push_back({a1, a0, b0});
        t.push_back({a1, b0, b1});
    }
    return hyperslice::TriMesh::from_arrays(p, t);
}

} // namespace oracle
