#include "hyperslice/complex.hpp"

#include "hyperslice/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace hyperslice {

VertexPool::VertexPool(double merge_tolerance) : merge_tolerance_(merge_tolerance)
{
    if (!(merge_tolerance >= 0.0))
        throw Error(ErrorCode::InvalidParams, "merge tolerance must be >= 0");
}

std::optional<Index> VertexPool::find(const VecN& p) const
{
    Key lo;
    Key hi;
    for (std::size_t i = 0; i < kComponents; ++i) {
        lo[i] = p.c[i] - merge_tolerance_;
        hi[i] = p.c[i] + merge_tolerance_;
    }

    std::optional<Index> best;
    double best_dist = std::numeric_limits<double>::infinity();

    auto it = index_.lower_bound(lo);
    while (it != index_.end()) {
        const Key& k = it->first;
        std::size_t d = 0;
        while (d < kComponents && lo[d] <= k[d] && k[d] <= hi[d]) ++d;

        if (d == kComponents) {
            const double dist = chebyshev_distance(p, vertices_[it->second]);
            if (dist < best_dist || (dist == best_dist && best && it->second < *best)) {
                best_dist = dist;
                best = it->second;
            }
            ++it;
            continue;
        }

        Key target = k;
        if (k[d] < lo[d]) {
            // same prefix, skip ahead to the box's lower edge in component d
            for (std::size_t e = d; e < kComponents; ++e) target[e] = lo[e];
        } else {
            if (d == 0) break;
            // every key sharing this prefix is past the box; move to the next prefix
            target[d - 1] = std::nextafter(k[d - 1], std::numeric_limits<double>::infinity());
            for (std::size_t e = d; e < kComponents; ++e) target[e] = lo[e];
        }
        it = index_.lower_bound(target);
    }
    return best;
}

Index VertexPool::put(const VecN& p)
{
    if (auto hit = find(p)) return *hit;
    return append(p);
}

Index VertexPool::append(const VecN& p)
{
    const auto idx = static_cast<Index>(vertices_.size());
    vertices_.push_back(p);
    index_.emplace(p.c, idx);
    return idx;
}

bool Complex3::has_velocities() const
{
    return std::any_of(tets.begin(), tets.end(), [](const Tetrahedron& t) { return t.velocity.has_value(); });
}

std::map<Face, int> face_incidence(const Complex3& cx)
{
    std::vector<Face> all;
    all.reserve(cx.tets.size() * 4);
    for (const auto& t : cx.tets) {
        auto v = t.v;
        std::sort(v.begin(), v.end());
        all.push_back({v[1], v[2], v[3]});
        all.push_back({v[0], v[2], v[3]});
        all.push_back({v[0], v[1], v[3]});
        all.push_back({v[0], v[1], v[2]});
    }
    std::sort(all.begin(), all.end());

    std::map<Face, int> counts;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j] == all[i]) ++j;
        counts.emplace_hint(counts.end(), all[i], static_cast<int>(j - i));
        i = j;
    }
    return counts;
}

ClosedReport validate_closed(const Complex3& cx)
{
    ClosedReport r;
    for (const auto& [face, count] : face_incidence(cx)) {
        ++r.faces;
        if (count < 2) ++r.boundary_faces;
        if (count > 2) ++r.overshared_faces;
    }
    r.is_closed = r.faces > 0 && r.boundary_faces == 0 && r.overshared_faces == 0;
    return r;
}

double tet_volume(const VecN& a, const VecN& b, const VecN& c, const VecN& d)
{
    const std::array<VecN, 3> e{b - a, c - a, d - a};
    double g[3][3];
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) g[i][j] = dot(e[i], e[j]);
    const double det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
                       g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
                       g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    return std::sqrt(std::max(det, 0.0)) / 6.0;
}

namespace {

Point3 sub(const Point3& a, const Point3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

Point3 cross(const Point3& a, const Point3& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

std::uint64_t edge_key(Index a, Index b)
{
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

struct DisjointSets {
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t root(std::size_t i)
    {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void unite(std::size_t a, std::size_t b)
    {
        a = root(a);
        b = root(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::size_t> parent;
};

} // namespace

Point3 triangle_normal(const Point3& a, const Point3& b, const Point3& c)
{
    const Point3 n = cross(sub(b, a), sub(c, a));
    const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    if (len == 0.0) return {0.0, 0.0, 0.0};
    return {n[0] / len, n[1] / len, n[2] / len};
}

double triangle_area(const Point3& a, const Point3& b, const Point3& c)
{
    const Point3 n = cross(sub(b, a), sub(c, a));
    return 0.5 * std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
}

TriMesh TriMesh::from_arrays(std::span<const Point3> positions, std::span<const std::array<Index, 3>> triangles)
{
    TriMesh m;
    for (const auto& p : positions) m.pool.append(VecN(0.0, p[0], p[1], p[2]));
    for (const auto& t : triangles) {
        for (Index i : t)
            if (i >= positions.size()) throw Error(ErrorCode::IndexOutOfRange, "triangle index out of range");
        MeshTriangle tri;
        tri.v = t;
        tri.normal = triangle_normal(positions[t[0]], positions[t[1]], positions[t[2]]);
        m.triangles.push_back(tri);
    }
    return m;
}

TopologyReport mesh_topology(const TriMesh& mesh)
{
    TopologyReport r;
    const std::size_t nt = mesh.triangles.size();
    r.faces = nt;
    if (nt == 0) return r;

    std::unordered_map<std::uint64_t, std::uint32_t> edge_use;
    edge_use.reserve(nt * 2);
    for (const auto& t : mesh.triangles)
        for (int k = 0; k < 3; ++k) ++edge_use[edge_key(t.v[k], t.v[(k + 1) % 3])];

    DisjointSets sets(nt);
    std::unordered_map<Index, std::size_t> first_triangle_of_vertex;
    for (std::size_t i = 0; i < nt; ++i)
        for (Index v : mesh.triangles[i].v) {
            auto [it, inserted] = first_triangle_of_vertex.emplace(v, i);
            if (!inserted) sets.unite(it->second, i);
        }

    // component id per triangle, numbered by first appearance
    std::vector<std::size_t> comp_of(nt);
    std::unordered_map<std::size_t, std::size_t> comp_id;
    for (std::size_t i = 0; i < nt; ++i) {
        auto [it, inserted] = comp_id.emplace(sets.root(i), comp_id.size());
        comp_of[i] = it->second;
    }
    r.components = comp_id.size();
    r.per_component.resize(r.components);
    for (auto& c : r.per_component) c.closed = true;

    for (std::size_t i = 0; i < nt; ++i) ++r.per_component[comp_of[i]].faces;
    for (const auto& [v, tri] : first_triangle_of_vertex) ++r.per_component[comp_of[tri]].vertices;

    std::unordered_map<std::uint64_t, bool> edge_seen;
    edge_seen.reserve(edge_use.size());
    for (std::size_t i = 0; i < nt; ++i) {
        const auto& t = mesh.triangles[i];
        for (int k = 0; k < 3; ++k) {
            const auto key = edge_key(t.v[k], t.v[(k + 1) % 3]);
            if (!edge_seen.emplace(key, true).second) continue;
            auto& comp = r.per_component[comp_of[i]];
            ++comp.edges;
            const auto uses = edge_use[key];
            if (uses != 2) comp.closed = false;
            if (uses < 2) ++r.boundary_edges;
            if (uses > 2) ++r.non_manifold_edges;
        }
    }

    r.vertices = first_triangle_of_vertex.size();
    r.edges = edge_use.size();
    r.euler = static_cast<long>(r.vertices) - static_cast<long>(r.edges) + static_cast<long>(r.faces);
    r.closed = r.boundary_edges == 0 && r.non_manifold_edges == 0;
    for (auto& c : r.per_component) {
        c.euler = static_cast<long>(c.vertices) - static_cast<long>(c.edges) + static_cast<long>(c.faces);
        if (c.closed && c.euler % 2 == 0) c.genus = static_cast<int>((2 - c.euler) / 2);
    }
    return r;
}

} // namespace hyperslice
