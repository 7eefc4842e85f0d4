#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hyperslice {

inline constexpr std::size_t kComponents = 7;

// Tolerances for unit-normalized cofactors.
inline constexpr double kPlaneEpsilon = 1e-9;
inline constexpr double kRankEpsilon = 1e-12;

// Component indices in the fixed (t,x,y,z,w,v,u) order.
namespace axis {
inline constexpr int t = 0;
inline constexpr int x = 1;
inline constexpr int y = 2;
inline constexpr int z = 3;
inline constexpr int w = 4;
inline constexpr int v = 5;
inline constexpr int u = 6;
} // namespace axis

char axis_name(int index);
std::optional<int> parse_axis(std::string_view name);

struct VecN {
    std::array<double, kComponents> c{};

    constexpr VecN() = default;
    constexpr VecN(double t, double x, double y, double z, double w = 0.0, double v = 0.0,
                   double u = 0.0)
        : c{t, x, y, z, w, v, u}
    {
    }

    static constexpr VecN unit(int index)
    {
        VecN r;
        r.c[static_cast<std::size_t>(index)] = 1.0;
        return r;
    }

    constexpr double& operator[](std::size_t i) { return c[i]; }
    constexpr double operator[](std::size_t i) const { return c[i]; }

    constexpr double t() const { return c[0]; }
    constexpr double x() const { return c[1]; }
    constexpr double y() const { return c[2]; }
    constexpr double z() const { return c[3]; }
    constexpr double w() const { return c[4]; }
    constexpr double v() const { return c[5]; }
    constexpr double u() const { return c[6]; }

    constexpr VecN& operator+=(const VecN& o)
    {
        for (std::size_t i = 0; i < kComponents; ++i) c[i] += o.c[i];
        return *this;
    }
    constexpr VecN& operator-=(const VecN& o)
    {
        for (std::size_t i = 0; i < kComponents; ++i) c[i] -= o.c[i];
        return *this;
    }
    constexpr VecN& operator*=(double s)
    {
        for (auto& e : c) e *= s;
        return *this;
    }

    friend constexpr bool operator==(const VecN&, const VecN&) = default;
};

constexpr VecN operator+(VecN a, const VecN& b) { return a += b; }
constexpr VecN operator-(VecN a, const VecN& b) { return a -= b; }
constexpr VecN operator*(VecN a, double s) { return a *= s; }
constexpr VecN operator*(double s, VecN a) { return a *= s; }
constexpr VecN operator-(VecN a) { return a *= -1.0; }

/// Linear blend a + s*(b - a); s = 0 gives a, s = 1 gives b.
constexpr VecN blend(const VecN& a, const VecN& b, double s)
{
    VecN r;
    for (std::size_t i = 0; i < kComponents; ++i) r.c[i] = a.c[i] + s * (b.c[i] - a.c[i]);
    return r;
}

double dot(const VecN& a, const VecN& b);
double norm(const VecN& a);
double chebyshev_distance(const VecN& a, const VecN& b);

/// The ordered subset of components that take part in slicing and projection.
/// Indices are distinct and kept sorted ascending; 3 to 5 entries.
class ActiveAxes {
public:
    ActiveAxes(); // (x,y,z,w)
    ActiveAxes(std::initializer_list<int> indices);
    explicit ActiveAxes(const std::vector<int>& indices);

    static ActiveAxes txyz() { return {axis::t, axis::x, axis::y, axis::z}; }
    static ActiveAxes xyzw() { return {axis::x, axis::y, axis::z, axis::w}; }
    static ActiveAxes txyzw() { return {axis::t, axis::x, axis::y, axis::z, axis::w}; }

    std::size_t size() const { return size_; }
    int operator[](std::size_t i) const { return indices_[i]; }
    const int* begin() const { return indices_.data(); }
    const int* end() const { return indices_.data() + size_; }

    bool contains(int index) const;
    std::optional<std::size_t> slot(int index) const;
    std::string to_string() const;

    friend bool operator==(const ActiveAxes& a, const ActiveAxes& b)
    {
        return a.size_ == b.size_ && a.indices_ == b.indices_;
    }

private:
    void assign(const int* first, const int* last);

    std::array<int, 5> indices_{};
    std::size_t size_ = 0;
};

using Row5 = std::array<double, 5>;
using Vec4 = std::array<double, 4>;

double dot5(const Row5& a, const Row5& b);

/// Active 4-subspace coordinates of p.
Vec4 gather4(const VecN& p, const ActiveAxes& axes);

/// A 3-flat c0 + c1*p1 + c2*p2 + c3*p3 + c4*p4 = 0 over four active coordinates.
class Hyperplane3Flat {
public:
    /// Throws InvalidPlane for a zero normal or when `axes` does not have 4 entries.
    Hyperplane3Flat(const Row5& cofactors, const ActiveAxes& axes = {});

    const Row5& cofactors() const { return cofactors_; }
    const ActiveAxes& axes() const { return axes_; }
    Vec4 normal() const { return {cofactors_[1], cofactors_[2], cofactors_[3], cofactors_[4]}; }

    /// Signed incidence: cofactors . (1, p_active).
    double incidence(const VecN& p) const;
    /// Rate of change along a direction: cofactors . (0, d_active).
    double along(const VecN& d) const;

    Hyperplane3Flat scaled(double k) const;
    /// Unit normal, orientation kept.
    Hyperplane3Flat normalized() const;
    /// Unit normal with the first nonzero normal component positive.
    Hyperplane3Flat canonical() const;

private:
    Row5 cofactors_;
    ActiveAxes axes_;
};

/// Plane through four affinely independent points. The result is canonical().
/// Throws DegeneratePoints when the points span less than a 3-flat.
Hyperplane3Flat hyperplane_from_points(const std::array<VecN, 4>& points,
                                       const ActiveAxes& axes = {});

struct AxisRotation {
    int axis_i = axis::x;
    int axis_j = axis::w;
    double radians = 0.0;
};

struct PlanePose {
    VecN anchor;
    std::vector<AxisRotation> angles; // applied in listed order
    int normal_axis = axis::w;
};

/// Throws BadAxisPair when a rotation names an axis outside `axes` or repeats an axis.
Hyperplane3Flat pose_to_hyperplane(const PlanePose& pose, const ActiveAxes& axes = {});

/// Givens rotation of the (axis_i, axis_j) coordinate plane by theta.
VecN rotate_in_plane(const VecN& p, int axis_i, int axis_j, double theta);

} // namespace hyperslice
