#pragma once

#include "hyperslice/ndvec.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hyperslice {

using Index = std::uint32_t;

inline constexpr double kDefaultMergeTolerance = 1e-6;

/// Indexed vertex storage that merges points closer than the merge tolerance.
///
/// Points are kept in a map ordered lexicographically over the seven components.
/// A lookup scans the Chebyshev box of half-width fClose around the query, jumping
/// over key prefixes that have already left the box, and then returns the nearest
/// stored vertex (ties go to the lower index). Indices never change once handed out.
class VertexPool {
public:
    VertexPool() : VertexPool(kDefaultMergeTolerance) {}
    explicit VertexPool(double merge_tolerance);

    /// Index of the nearest stored vertex within tolerance, appending p if none exists.
    Index put(const VecN& p);
    /// Appends p without merging. Used when loading files, which are authoritative.
    Index append(const VecN& p);
    std::optional<Index> find(const VecN& p) const;

    std::size_t size() const { return vertices_.size(); }
    bool empty() const { return vertices_.empty(); }
    const VecN& operator[](Index i) const { return vertices_[i]; }
    const std::vector<VecN>& vertices() const { return vertices_; }
    double merge_tolerance() const { return merge_tolerance_; }
    void reserve(std::size_t n) { vertices_.reserve(n); }

private:
    using Key = std::array<double, kComponents>;

    double merge_tolerance_;
    std::vector<VecN> vertices_;
    std::map<Key, Index> index_;
};

struct Rgba {
    float r = 0.8f;
    float g = 0.8f;
    float b = 0.8f;
    float a = 1.0f;

    friend bool operator==(const Rgba&, const Rgba&) = default;
};

struct Tetrahedron {
    std::array<Index, 4> v{};
    std::optional<Index> velocity; // into Complex3::vectors
    std::optional<Index> origin;   // opaque metadata, into Complex3::vectors

    friend bool operator==(const Tetrahedron&, const Tetrahedron&) = default;
};

struct TimeExtent {
    double t_min = 0.0;
    double t_max = 0.0;
    int steps = 1;

    friend bool operator==(const TimeExtent&, const TimeExtent&) = default;
};

/// A pure simplicial 3-complex over a shared vertex pool.
struct Complex3 {
    VertexPool pool;
    VertexPool vectors; // velocity and origin vectors referenced by tetrahedra
    std::vector<Tetrahedron> tets;
    ActiveAxes axes;
    std::string name;
    std::map<std::string, std::string> metadata;
    std::optional<TimeExtent> time;
    Rgba color;

    bool has_velocities() const;
};

using Face = std::array<Index, 3>; // sorted ascending

std::map<Face, int> face_incidence(const Complex3& cx);

struct ClosedReport {
    bool is_closed = false;
    std::size_t faces = 0;
    std::size_t boundary_faces = 0;
    std::size_t overshared_faces = 0;
};

ClosedReport validate_closed(const Complex3& cx);

/// 3-volume of the tetrahedron spanned by four points, from the Gram determinant
/// of its edge vectors (valid in any embedding dimension).
double tet_volume(const VecN& a, const VecN& b, const VecN& c, const VecN& d);

enum class TriangleSource : std::uint8_t {
    Triangle,      // three-crossing tetrahedron
    QuadFirst,     // first half of a four-crossing tetrahedron
    QuadSecond,    // second half
    CoplanarFace,  // tetrahedron face lying in the slicing flat
};

struct MeshTriangle {
    std::array<Index, 3> v{};
    Rgba color;
    std::array<double, 3> normal{};
    TriangleSource source = TriangleSource::Triangle;
};

using Point3 = std::array<double, 3>;

/// Indexed triangle mesh in 3-space. Positions live in the (x,y,z) slots of the pool.
struct TriMesh {
    VertexPool pool;
    std::vector<MeshTriangle> triangles;
    std::vector<VecN> world; // optional: the original point for every pool vertex

    Point3 position(Index i) const { return {pool[i].x(), pool[i].y(), pool[i].z()}; }

    /// Builds a mesh from raw arrays; normals come from the triangle winding.
    static TriMesh from_arrays(std::span<const Point3> positions,
                               std::span<const std::array<Index, 3>> triangles);
};

/// Unit normal of (a,b,c) by the right-hand rule, or zero for a degenerate triangle.
Point3 triangle_normal(const Point3& a, const Point3& b, const Point3& c);
double triangle_area(const Point3& a, const Point3& b, const Point3& c);

struct ComponentTopology {
    std::size_t vertices = 0;
    std::size_t edges = 0;
    std::size_t faces = 0;
    long euler = 0;
    bool closed = false;
    std::optional<int> genus; // when closed and euler is even
};

struct TopologyReport {
    std::size_t vertices = 0; // referenced by at least one triangle
    std::size_t edges = 0;
    std::size_t faces = 0;
    long euler = 0;
    std::size_t components = 0;
    bool closed = false;
    std::size_t boundary_edges = 0;
    std::size_t non_manifold_edges = 0;
    std::vector<ComponentTopology> per_component; // ordered by lowest triangle index
};

TopologyReport mesh_topology(const TriMesh& mesh);

} // namespace hyperslice
