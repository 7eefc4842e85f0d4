#pragma once

#include "hyperslice/complex.hpp"
#include "hyperslice/ndvec.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <stop_token>
#include <string_view>
#include <vector>

namespace hyperslice {

inline constexpr double kParamEpsilon = 1e-9; // tolerance on the edge parameter s
inline constexpr double kAreaFloor = 1e-12;

enum class EdgeStatus { None, Crossing, Contained };

struct EdgeHit {
    EdgeStatus status = EdgeStatus::None;
    VecN point; // valid for Crossing
    double s = 0.0;
};

/// Intersection of segment a->b with the flat: n = plane(a), d = plane's rate along
/// b - a, s = -n/d, accepted for s in [-eps_s, 1 + eps_s] and clamped to [0, 1].
EdgeHit intersect_edge(const Hyperplane3Flat& plane, const VecN& a, const VecN& b);

enum class SliceKind { Empty, Point, Edge, Triangle, Quad, DegenerateFace, Contained };
inline constexpr std::size_t kSliceKindCount = 7;
std::string_view to_string(SliceKind kind);

/// Orthonormal basis (e1, e2, e3) of the flat's direction space in active coordinates,
/// right-handed together with the canonical normal.
struct PlaneFrame {
    std::array<Vec4, 3> basis{};
    Vec4 normal{};

    Point3 to_frame(const Vec4& p) const;
};

PlaneFrame plane_frame(const Hyperplane3Flat& plane);

/// Unit normal of the triangle expressed in the flat's frame. Throws CollinearPoints.
Point3 triangle_normal_and_frame(const Hyperplane3Flat& plane, const VecN& p0, const VecN& p1, const VecN& p2);

struct TetSliceOutcome {
    SliceKind kind = SliceKind::Empty;
    std::vector<std::array<Index, 3>> triangles; // into the output mesh pool
};

/// Slices one tetrahedron of `cx`, inserting its crossing points into `out.pool`.
TetSliceOutcome slice_tet(const Hyperplane3Flat& plane, const Complex3& cx, std::size_t tet_index,
                          std::optional<double> time, TriMesh& out);

struct SliceRequest {
    Hyperplane3Flat plane;
    std::optional<double> time; // required iff the complex carries velocities
    bool diagnostic_colors = false;
};

struct SliceConfig {
    unsigned workers = 0; // 0: hardware concurrency
    std::stop_token stop;
    std::size_t min_chunk = 4096;
};

struct SliceDiagnostics {
    std::array<std::size_t, kSliceKindCount> kinds{};
    std::size_t five_plus = 0;        // more than four distinct crossing points
    std::size_t dropped_small = 0;    // triangles under the area floor
    std::size_t coplanar_faces = 0;   // tetrahedron faces lying in the flat, emitted once
    std::size_t contained_faces = 0;  // faces of fully contained tetrahedra, not displayed
    bool outside_time_extent = false;

    std::size_t count(SliceKind k) const { return kinds[static_cast<std::size_t>(k)]; }
};

struct SliceResult {
    TriMesh mesh;
    SliceDiagnostics diagnostics;
    std::vector<std::array<Index, 3>> diagnostic_faces; // contained-tetrahedron faces
    bool cancelled = false;
};

/// Slices every tetrahedron and assembles an oriented mesh in the flat's frame.
/// Output is identical for any worker count.
SliceResult slice_complex(const SliceRequest& request, const Complex3& cx, const SliceConfig& config = {});

} // namespace hyperslice
