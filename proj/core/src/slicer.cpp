#include "hyperslice/slicer.hpp"

#include "hyperslice/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace hyperslice {

namespace {

// Debug colours per outcome, matching the usual purple/blue/green/red scheme.
constexpr Rgba kTriangleColor{0.62f, 0.2f, 0.8f, 1.0f};
constexpr Rgba kQuadFirstColor{0.2f, 0.35f, 0.95f, 1.0f};
constexpr Rgba kQuadSecondColor{0.2f, 0.8f, 0.35f, 1.0f};
constexpr Rgba kCoplanarColor{0.9f, 0.15f, 0.15f, 1.0f};

constexpr Index kNoVelocity = std::numeric_limits<Index>::max();

double dot4(const Vec4& a, const Vec4& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]; }

double det4(const std::array<Vec4, 4>& m)
{
    // rows are the four vectors
    double det = 0.0;
    for (int c = 0; c < 4; ++c) {
        double minor[3][3];
        for (int r = 1; r < 4; ++r) {
            int cc = 0;
            for (int k = 0; k < 4; ++k) {
                if (k == c) continue;
                minor[r - 1][cc++] = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
            }
        }
        const double d3 = minor[0][0] * (minor[1][1] * minor[2][2] - minor[1][2] * minor[2][1]) -
                          minor[0][1] * (minor[1][0] * minor[2][2] - minor[1][2] * minor[2][0]) +
                          minor[0][2] * (minor[1][0] * minor[2][1] - minor[1][1] * minor[2][0]);
        det += ((c % 2) ? -1.0 : 1.0) * m[0][static_cast<std::size_t>(c)] * d3;
    }
    return det;
}

Point3 sub3(const Point3& a, const Point3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Point3 cross3(const Point3& a, const Point3& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot3(const Point3& a, const Point3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// A crossing point is identified by where it came from: a tetrahedron vertex (a == b)
// or the interior of edge (a, b) with a < b, under a given velocity.
struct PointKey {
    Index a = 0;
    Index b = 0;
    Index velocity = kNoVelocity;

    friend bool operator==(const PointKey&, const PointKey&) = default;
};

struct PointKeyHash {
    std::size_t operator()(const PointKey& k) const noexcept
    {
        std::uint64_t h = (static_cast<std::uint64_t>(k.a) << 32) ^ k.b;
        h ^= static_cast<std::uint64_t>(k.velocity) * 0x9E3779B97F4A7C15ull;
        h ^= h >> 29;
        h *= 0xBF58476D1CE4E5B9ull;
        return static_cast<std::size_t>(h ^ (h >> 32));
    }
};

struct LocalPoint {
    PointKey key;
    VecN world;
    Point3 frame{};
};

struct LocalSlice {
    std::size_t tet = 0;
    SliceKind kind = SliceKind::Empty;
    std::uint8_t point_count = 0;
    std::array<LocalPoint, 6> points{};
    std::uint8_t triangle_count = 0;
    std::array<std::array<std::uint8_t, 3>, 4> triangles{};
    std::array<TriangleSource, 4> sources{};
    bool five_plus = false;
};

struct Prepared {
    Hyperplane3Flat plane;
    PlaneFrame frame;
    std::optional<double> time;
};

Prepared prepare(const Hyperplane3Flat& plane, std::optional<double> time)
{
    const Hyperplane3Flat unit = plane.normalized();
    return Prepared{unit, plane_frame(unit), time};
}

void add_point(LocalSlice& s, const PointKey& key, const VecN& world, const Prepared& pp, double merge_tolerance)
{
    for (std::uint8_t i = 0; i < s.point_count; ++i) {
        if (s.points[i].key == key) return;
        if (chebyshev_distance(s.points[i].world, world) <= merge_tolerance) return;
    }
    if (s.point_count == s.points.size()) return;
    LocalPoint& p = s.points[s.point_count++];
    p.key = key;
    p.world = world;
    p.frame = pp.frame.to_frame(gather4(world, pp.plane.axes()));
}

// Orders four coplanar points by angle about their centroid.
std::array<std::uint8_t, 4> order_quad(const LocalSlice& s)
{
    Point3 c{0.0, 0.0, 0.0};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 3; ++k) c[static_cast<std::size_t>(k)] += 0.25 * s.points[static_cast<std::size_t>(i)].frame[static_cast<std::size_t>(k)];
    std::array<Point3, 4> r{};
    for (std::size_t i = 0; i < 4; ++i) r[i] = sub3(s.points[i].frame, c);

    Point3 m{0.0, 0.0, 0.0};
    double best = -1.0;
    for (std::size_t k = 1; k < 4; ++k) {
        const Point3 x = cross3(r[0], r[k]);
        const double len = dot3(x, x);
        if (len > best) {
            best = len;
            m = x;
        }
    }
    const double r0 = std::sqrt(dot3(r[0], r[0]));
    Point3 u{1.0, 0.0, 0.0};
    if (r0 > 0.0) u = {r[0][0] / r0, r[0][1] / r0, r[0][2] / r0};
    const Point3 v = cross3(m, u);

    std::array<std::pair<double, std::uint8_t>, 4> angles{};
    for (std::uint8_t i = 0; i < 4; ++i) angles[i] = {std::atan2(dot3(r[i], v), dot3(r[i], u)), i};
    std::stable_sort(angles.begin(), angles.end());
    return {angles[0].second, angles[1].second, angles[2].second, angles[3].second};
}

std::uint8_t find_key(const LocalSlice& s, const PointKey& key)
{
    for (std::uint8_t i = 0; i < s.point_count; ++i)
        if (s.points[i].key == key) return i;
    return 0xFF;
}

// Returns false for tetrahedra that cannot touch the flat.
bool classify(const Prepared& pp, const Complex3& cx, std::size_t ti, LocalSlice& out)
{
    const Tetrahedron& tet = cx.tets[ti];
    const bool moving = pp.time.has_value() && tet.velocity.has_value();
    const VecN shift = moving ? cx.vectors[*tet.velocity] * *pp.time : VecN{};
    const Index vel = tet.velocity.value_or(kNoVelocity);

    std::array<VecN, 4> p;
    std::array<double, 4> f{};
    for (std::size_t k = 0; k < 4; ++k) {
        p[k] = cx.pool[tet.v[k]];
        if (moving) p[k] += shift;
        f[k] = pp.plane.incidence(p[k]);
    }

    // No edge test can report anything when all four vertices sit strictly on one side
    // and the nearest is beyond both the flat tolerance and the edge-parameter slack.
    const auto [lo_it, hi_it] = std::minmax_element(f.begin(), f.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (lo > 0.0 || hi < 0.0) {
        const double nearest = lo > 0.0 ? lo : -hi;
        const double farthest = lo > 0.0 ? hi : -lo;
        if (nearest > kPlaneEpsilon && nearest > kParamEpsilon * farthest) return false;
    }

    out = LocalSlice{};
    out.tet = ti;
    const double tol = cx.pool.merge_tolerance();
    static constexpr std::array<std::array<std::size_t, 2>, 6> kEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
    for (const auto& e : kEdges) {
        std::size_t i = e[0];
        std::size_t j = e[1];
        if (tet.v[i] > tet.v[j]) std::swap(i, j); // evaluate from the lower global index
        const EdgeHit hit = intersect_edge(pp.plane, p[i], p[j]);
        const PointKey key_i{tet.v[i], tet.v[i], vel};
        const PointKey key_j{tet.v[j], tet.v[j], vel};
        switch (hit.status) {
        case EdgeStatus::None: break;
        case EdgeStatus::Contained:
            add_point(out, key_i, p[i], pp, tol);
            add_point(out, key_j, p[j], pp, tol);
            break;
        case EdgeStatus::Crossing:
            if (hit.s <= kParamEpsilon)
                add_point(out, key_i, p[i], pp, tol);
            else if (hit.s >= 1.0 - kParamEpsilon)
                add_point(out, key_j, p[j], pp, tol);
            else
                add_point(out, PointKey{tet.v[i], tet.v[j], vel}, hit.point, pp, tol);
            break;
        }
    }

    int on_flat = 0;
    for (double fk : f)
        if (std::abs(fk) <= kPlaneEpsilon) ++on_flat;

    const auto vertex_point = [&](std::size_t k) { return find_key(out, PointKey{tet.v[k], tet.v[k], vel}); };

    if (out.point_count == 0) {
        out.kind = SliceKind::Empty;
    } else if (on_flat == 4) {
        out.kind = SliceKind::Contained;
        static constexpr std::array<std::array<std::size_t, 3>, 4> kFaces{{{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};
        for (const auto& face : kFaces) {
            std::array<std::uint8_t, 3> t{vertex_point(face[0]), vertex_point(face[1]), vertex_point(face[2])};
            if (t[0] == 0xFF || t[1] == 0xFF || t[2] == 0xFF) continue;
            out.sources[out.triangle_count] = TriangleSource::CoplanarFace;
            out.triangles[out.triangle_count++] = t;
        }
    } else if (on_flat == 3) {
        out.kind = SliceKind::DegenerateFace;
        std::array<std::uint8_t, 3> t{};
        std::size_t n = 0;
        for (std::size_t k = 0; k < 4; ++k)
            if (std::abs(f[k]) <= kPlaneEpsilon) t[n++] = vertex_point(k);
        if (t[0] != 0xFF && t[1] != 0xFF && t[2] != 0xFF) {
            out.sources[0] = TriangleSource::CoplanarFace;
            out.triangles[0] = t;
            out.triangle_count = 1;
        }
    } else {
        switch (out.point_count) {
        case 1: out.kind = SliceKind::Point; break;
        case 2: out.kind = SliceKind::Edge; break;
        case 3:
            out.kind = SliceKind::Triangle;
            out.triangles[0] = {0, 1, 2};
            out.sources[0] = TriangleSource::Triangle;
            out.triangle_count = 1;
            break;
        case 4: {
            out.kind = SliceKind::Quad;
            const auto q = order_quad(out);
            out.triangles[0] = {q[0], q[1], q[2]};
            out.triangles[1] = {q[0], q[2], q[3]};
            out.sources[0] = TriangleSource::QuadFirst;
            out.sources[1] = TriangleSource::QuadSecond;
            out.triangle_count = 2;
            break;
        }
        default:
            out.kind = SliceKind::DegenerateFace;
            out.five_plus = true;
            break;
        }
    }
    return true;
}

std::uint64_t edge_key(Index a, Index b)
{
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Makes winding consistent across shared edges, then flips each connected component
// so that its signed volume about its centroid is positive.
void orient(TriMesh& mesh)
{
    auto& tris = mesh.triangles;
    const std::size_t nt = tris.size();
    if (nt == 0) return;

    std::vector<std::pair<std::uint64_t, std::uint32_t>> edges;
    edges.reserve(nt * 3);
    for (std::uint32_t i = 0; i < nt; ++i)
        for (int k = 0; k < 3; ++k) edges.emplace_back(edge_key(tris[i].v[k], tris[i].v[(k + 1) % 3]), i);
    std::sort(edges.begin(), edges.end());

    const auto neighbours = [&](std::uint64_t key) {
        auto first = std::lower_bound(edges.begin(), edges.end(), std::make_pair(key, std::uint32_t{0}));
        auto last = first;
        while (last != edges.end() && last->first == key) ++last;
        return std::make_pair(first, last);
    };
    const auto has_directed = [](const MeshTriangle& t, Index a, Index b) {
        for (int k = 0; k < 3; ++k)
            if (t.v[k] == a && t.v[(k + 1) % 3] == b) return true;
        return false;
    };

    std::vector<bool> visited(nt, false);
    std::vector<std::uint32_t> component;
    std::deque<std::uint32_t> queue;
    for (std::uint32_t seed = 0; seed < nt; ++seed) {
        if (visited[seed]) continue;
        component.clear();
        visited[seed] = true;
        queue.push_back(seed);
        while (!queue.empty()) {
            const std::uint32_t cur = queue.front();
            queue.pop_front();
            component.push_back(cur);
            for (int k = 0; k < 3; ++k) {
                const Index a = tris[cur].v[k];
                const Index b = tris[cur].v[(k + 1) % 3];
                auto [first, last] = neighbours(edge_key(a, b));
                for (auto it = first; it != last; ++it) {
                    const std::uint32_t nb = it->second;
                    if (visited[nb]) continue;
                    if (has_directed(tris[nb], a, b)) std::swap(tris[nb].v[1], tris[nb].v[2]);
                    visited[nb] = true;
                    queue.push_back(nb);
                }
            }
        }

        Point3 c{0.0, 0.0, 0.0};
        std::unordered_set<Index> verts;
        for (std::uint32_t t : component)
            for (Index v : tris[t].v)
                if (verts.insert(v).second) {
                    const Point3 p = mesh.position(v);
                    for (std::size_t k = 0; k < 3; ++k) c[k] += p[k];
                }
        for (auto& ck : c) ck /= static_cast<double>(verts.size());
        double volume = 0.0;
        for (std::uint32_t t : component) {
            const Point3 a = sub3(mesh.position(tris[t].v[0]), c);
            const Point3 b = sub3(mesh.position(tris[t].v[1]), c);
            const Point3 d = sub3(mesh.position(tris[t].v[2]), c);
            volume += dot3(a, cross3(b, d));
        }
        if (volume < 0.0)
            for (std::uint32_t t : component) std::swap(tris[t].v[1], tris[t].v[2]);
    }
}

Rgba colour_for(TriangleSource src, const Rgba& base, bool diagnostic)
{
    if (!diagnostic) return base;
    switch (src) {
    case TriangleSource::Triangle: return kTriangleColor;
    case TriangleSource::QuadFirst: return kQuadFirstColor;
    case TriangleSource::QuadSecond: return kQuadSecondColor;
    case TriangleSource::CoplanarFace: return kCoplanarColor;
    }
    return base;
}

void check_time(const SliceRequest& req, const Complex3& cx)
{
    const bool moving = cx.has_velocities();
    if (req.time && !moving)
        throw Error(ErrorCode::InvalidRequest, "a slice time was given for a model without velocities");
    if (!req.time && moving)
        throw Error(ErrorCode::InvalidRequest, "this model is extruded; a slice time is required");
}

} // namespace

std::string_view to_string(SliceKind kind)
{
    switch (kind) {
    case SliceKind::Empty: return "empty";
    case SliceKind::Point: return "point";
    case SliceKind::Edge: return "edge";
    case SliceKind::Triangle: return "triangle";
    case SliceKind::Quad: return "quad";
    case SliceKind::DegenerateFace: return "degenerate_face";
    case SliceKind::Contained: return "contained";
    }
    return "unknown";
}

EdgeHit intersect_edge(const Hyperplane3Flat& plane, const VecN& a, const VecN& b)
{
    const double n = plane.incidence(a);
    const VecN dir = b - a;
    const double d = plane.along(dir);
    EdgeHit hit;
    if (std::abs(d) <= kPlaneEpsilon) {
        hit.status = std::abs(n) <= kPlaneEpsilon ? EdgeStatus::Contained : EdgeStatus::None;
        return hit;
    }
    const double s = -n / d;
    if (s < -kParamEpsilon || s > 1.0 + kParamEpsilon) return hit;
    hit.status = EdgeStatus::Crossing;
    hit.s = std::clamp(s, 0.0, 1.0);
    hit.point = a + hit.s * dir;
    return hit;
}

Point3 PlaneFrame::to_frame(const Vec4& p) const
{
    return {dot4(basis[0], p), dot4(basis[1], p), dot4(basis[2], p)};
}

PlaneFrame plane_frame(const Hyperplane3Flat& plane)
{
    PlaneFrame fr;
    fr.normal = plane.canonical().normal();

    std::size_t dominant = 0;
    for (std::size_t k = 1; k < 4; ++k)
        if (std::abs(fr.normal[k]) > std::abs(fr.normal[dominant])) dominant = k;

    std::size_t filled = 0;
    for (std::size_t k = 0; k < 4 && filled < 3; ++k) {
        if (k == dominant) continue;
        Vec4 e{0.0, 0.0, 0.0, 0.0};
        e[k] = 1.0;
        const double along_n = dot4(e, fr.normal);
        for (std::size_t i = 0; i < 4; ++i) e[i] -= along_n * fr.normal[i];
        for (std::size_t prev = 0; prev < filled; ++prev) {
            const double along_b = dot4(e, fr.basis[prev]);
            for (std::size_t i = 0; i < 4; ++i) e[i] -= along_b * fr.basis[prev][i];
        }
        const double len = std::sqrt(dot4(e, e));
        for (auto& x : e) x /= len;
        fr.basis[filled++] = e;
    }
    if (det4({fr.basis[0], fr.basis[1], fr.basis[2], fr.normal}) < 0.0)
        for (auto& x : fr.basis[2]) x = -x;
    return fr;
}

Point3 triangle_normal_and_frame(const Hyperplane3Flat& plane, const VecN& p0, const VecN& p1, const VecN& p2)
{
    const PlaneFrame fr = plane_frame(plane);
    const Point3 a = fr.to_frame(gather4(p0, plane.axes()));
    const Point3 b = fr.to_frame(gather4(p1, plane.axes()));
    const Point3 c = fr.to_frame(gather4(p2, plane.axes()));
    if (triangle_area(a, b, c) < kAreaFloor) throw Error(ErrorCode::CollinearPoints, "triangle has no area");
    return triangle_normal(a, b, c);
}

TetSliceOutcome slice_tet(const Hyperplane3Flat& plane, const Complex3& cx, std::size_t tet_index,
                          std::optional<double> time, TriMesh& out)
{
    if (tet_index >= cx.tets.size()) throw Error(ErrorCode::IndexOutOfRange, "tetrahedron index out of range");
    const Prepared pp = prepare(plane, time);
    LocalSlice local;
    TetSliceOutcome outcome;
    if (!classify(pp, cx, tet_index, local)) return outcome;
    outcome.kind = local.kind;

    std::array<Index, 6> ids{};
    for (std::uint8_t i = 0; i < local.point_count; ++i) {
        const auto& f = local.points[i].frame;
        const std::size_t before = out.pool.size();
        ids[i] = out.pool.put(VecN(0.0, f[0], f[1], f[2]));
        if (out.pool.size() > before) out.world.push_back(local.points[i].world);
    }
    if (local.kind == SliceKind::Triangle || local.kind == SliceKind::Quad || local.kind == SliceKind::DegenerateFace)
        for (std::uint8_t t = 0; t < local.triangle_count; ++t) {
            const auto& lt = local.triangles[t];
            outcome.triangles.push_back({ids[lt[0]], ids[lt[1]], ids[lt[2]]});
        }
    return outcome;
}

SliceResult slice_complex(const SliceRequest& request, const Complex3& cx, const SliceConfig& config)
{
    check_time(request, cx);
    SliceResult result;
    result.mesh.pool = VertexPool(cx.pool.merge_tolerance());
    auto& diag = result.diagnostics;
    const std::size_t nt = cx.tets.size();

    if (request.time && cx.time && (*request.time < cx.time->t_min || *request.time > cx.time->t_max)) {
        diag.outside_time_extent = true;
        diag.kinds[static_cast<std::size_t>(SliceKind::Empty)] = nt;
        return result;
    }

    const Prepared pp = prepare(request.plane, request.time);

    unsigned workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
    const std::size_t min_chunk = std::max<std::size_t>(1, config.min_chunk);
    workers = static_cast<unsigned>(std::clamp<std::size_t>((nt + min_chunk - 1) / min_chunk, 1, workers));

    std::vector<std::vector<LocalSlice>> buffers(workers);
    std::vector<char> aborted(workers, 0);
    const auto run = [&](unsigned w) {
        const std::size_t begin = nt * w / workers;
        const std::size_t end = nt * (w + 1) / workers;
        auto& buf = buffers[w];
        LocalSlice local;
        for (std::size_t i = begin; i < end; ++i) {
            if ((i & 0x3FF) == 0 && config.stop.stop_requested()) {
                aborted[w] = 1;
                return;
            }
            if (classify(pp, cx, i, local)) buf.push_back(local);
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::jthread> threads;
        threads.reserve(workers - 1);
        for (unsigned w = 1; w < workers; ++w) threads.emplace_back(run, w);
        run(0);
    }
    if (config.stop.stop_requested() || std::any_of(aborted.begin(), aborted.end(), [](char a) { return a != 0; })) {
        result.cancelled = true;
        return result;
    }

    // Merge in tetrahedron order.
    TriMesh& mesh = result.mesh;
    std::unordered_map<PointKey, Index, PointKeyHash> shared;
    std::set<std::array<Index, 3>> coplanar_seen;
    std::size_t touched = 0;
    for (const auto& buf : buffers) {
        touched += buf.size();
        for (const LocalSlice& local : buf) {
            ++diag.kinds[static_cast<std::size_t>(local.kind)];
            if (local.five_plus) ++diag.five_plus;
            const bool displayed = local.kind == SliceKind::Triangle || local.kind == SliceKind::Quad ||
                                   local.kind == SliceKind::DegenerateFace || local.kind == SliceKind::Contained;
            if (!displayed || local.triangle_count == 0) continue;

            std::array<Index, 6> ids{};
            for (std::uint8_t i = 0; i < local.point_count; ++i) {
                const auto& lp = local.points[i];
                auto it = shared.find(lp.key);
                if (it == shared.end()) {
                    const std::size_t before = mesh.pool.size();
                    const Index id = mesh.pool.put(VecN(0.0, lp.frame[0], lp.frame[1], lp.frame[2]));
                    if (mesh.pool.size() > before) mesh.world.push_back(lp.world);
                    it = shared.emplace(lp.key, id).first;
                }
                ids[i] = it->second;
            }

            for (std::uint8_t t = 0; t < local.triangle_count; ++t) {
                const auto& lt = local.triangles[t];
                std::array<Index, 3> v{ids[lt[0]], ids[lt[1]], ids[lt[2]]};
                if (local.kind == SliceKind::Contained) {
                    result.diagnostic_faces.push_back(v);
                    ++diag.contained_faces;
                    continue;
                }
                if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2]) {
                    ++diag.dropped_small;
                    continue;
                }
                if (local.sources[t] == TriangleSource::CoplanarFace) {
                    auto key = v;
                    std::sort(key.begin(), key.end());
                    if (!coplanar_seen.insert(key).second) continue;
                    ++diag.coplanar_faces;
                }
                if (triangle_area(mesh.position(v[0]), mesh.position(v[1]), mesh.position(v[2])) < kAreaFloor) {
                    ++diag.dropped_small;
                    continue;
                }
                MeshTriangle tri;
                tri.v = v;
                tri.source = local.sources[t];
                tri.color = colour_for(tri.source, cx.color, request.diagnostic_colors);
                mesh.triangles.push_back(tri);
            }
        }
    }
    diag.kinds[static_cast<std::size_t>(SliceKind::Empty)] += nt - touched;

    orient(mesh);
    for (auto& t : mesh.triangles)
        t.normal = triangle_normal(mesh.position(t.v[0]), mesh.position(t.v[1]), mesh.position(t.v[2]));
    return result;
}

} // namespace hyperslice
