#include "hyperslice/ndvec.hpp"

#include "hyperslice/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace hyperslice {

namespace {

constexpr std::string_view kAxisNames = "txyzwvu";

double det3(const Vec4& a, const Vec4& b, const Vec4& c, int i, int j, int k)
{
    return a[i] * (b[j] * c[k] - b[k] * c[j]) - a[j] * (b[i] * c[k] - b[k] * c[i]) +
           a[k] * (b[i] * c[j] - b[j] * c[i]);
}

void check_axis(int a)
{
    if (a < 0 || a >= static_cast<int>(kComponents))
        throw Error(ErrorCode::BadAxisPair, "axis index " + std::to_string(a) + " out of range");
}

} // namespace

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::DegeneratePoints: return "DegeneratePoints";
    case ErrorCode::BadAxisPair: return "BadAxisPair";
    case ErrorCode::InvalidPlane: return "InvalidPlane";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::DegenerateCell: return "DegenerateCell";
    case ErrorCode::OriginVertex: return "OriginVertex";
    case ErrorCode::BadVelocity: return "BadVelocity";
    case ErrorCode::CollinearPoints: return "CollinearPoints";
    case ErrorCode::BadViewSpec: return "BadViewSpec";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::Io: return "Io";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::Superseded: return "Superseded";
    }
    return "Unknown";
}

char axis_name(int index)
{
    if (index < 0 || index >= static_cast<int>(kComponents)) return '?';
    return kAxisNames[static_cast<std::size_t>(index)];
}

std::optional<int> parse_axis(std::string_view name)
{
    if (name.size() != 1) return std::nullopt;
    const char ch = static_cast<char>(std::tolower(static_cast<unsigned char>(name[0])));
    const auto pos = kAxisNames.find(ch);
    if (pos == std::string_view::npos) return std::nullopt;
    return static_cast<int>(pos);
}

double dot(const VecN& a, const VecN& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < kComponents; ++i) s += a.c[i] * b.c[i];
    return s;
}

double norm(const VecN& a) { return std::sqrt(dot(a, a)); }

double chebyshev_distance(const VecN& a, const VecN& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < kComponents; ++i) m = std::max(m, std::abs(a.c[i] - b.c[i]));
    return m;
}

ActiveAxes::ActiveAxes() : ActiveAxes{axis::x, axis::y, axis::z, axis::w} {}

ActiveAxes::ActiveAxes(std::initializer_list<int> indices) { assign(indices.begin(), indices.end()); }

ActiveAxes::ActiveAxes(const std::vector<int>& indices)
{
    assign(indices.data(), indices.data() + indices.size());
}

void ActiveAxes::assign(const int* first, const int* last)
{
    const auto n = static_cast<std::size_t>(last - first);
    if (n < 3 || n > indices_.size())
        throw Error(ErrorCode::InvalidParams, "active axes need 3 to 5 entries, got " + std::to_string(n));
    std::copy(first, last, indices_.begin());
    std::sort(indices_.begin(), indices_.begin() + static_cast<std::ptrdiff_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (indices_[i] < 0 || indices_[i] >= static_cast<int>(kComponents))
            throw Error(ErrorCode::InvalidParams, "active axis index out of range");
        if (i > 0 && indices_[i] == indices_[i - 1])
            throw Error(ErrorCode::InvalidParams, "active axes must be distinct");
    }
    size_ = n;
}

bool ActiveAxes::contains(int index) const { return slot(index).has_value(); }

std::optional<std::size_t> ActiveAxes::slot(int index) const
{
    for (std::size_t i = 0; i < size_; ++i)
        if (indices_[i] == index) return i;
    return std::nullopt;
}

std::string ActiveAxes::to_string() const
{
    std::string s;
    for (std::size_t i = 0; i < size_; ++i) {
        if (i) s += ' ';
        s += axis_name(indices_[i]);
    }
    return s;
}

double dot5(const Row5& a, const Row5& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < 5; ++i) s += a[i] * b[i];
    return s;
}

Vec4 gather4(const VecN& p, const ActiveAxes& axes)
{
    return {p[static_cast<std::size_t>(axes[0])], p[static_cast<std::size_t>(axes[1])],
            p[static_cast<std::size_t>(axes[2])], p[static_cast<std::size_t>(axes[3])]};
}

Hyperplane3Flat::Hyperplane3Flat(const Row5& cofactors, const ActiveAxes& axes)
    : cofactors_(cofactors), axes_(axes)
{
    if (axes_.size() != 4)
        throw Error(ErrorCode::InvalidPlane, "a 3-flat needs exactly 4 active axes");
    double n2 = 0.0;
    for (std::size_t i = 1; i < 5; ++i) {
        if (!std::isfinite(cofactors_[i])) throw Error(ErrorCode::InvalidPlane, "non-finite cofactor");
        n2 += cofactors_[i] * cofactors_[i];
    }
    if (!std::isfinite(cofactors_[0])) throw Error(ErrorCode::InvalidPlane, "non-finite cofactor");
    if (n2 == 0.0) throw Error(ErrorCode::InvalidPlane, "normal (c1..c4) is the zero vector");
}

double Hyperplane3Flat::incidence(const VecN& p) const
{
    const Vec4 a = gather4(p, axes_);
    return dot5(cofactors_, {1.0, a[0], a[1], a[2], a[3]});
}

double Hyperplane3Flat::along(const VecN& d) const
{
    const Vec4 a = gather4(d, axes_);
    return dot5(cofactors_, {0.0, a[0], a[1], a[2], a[3]});
}

Hyperplane3Flat Hyperplane3Flat::scaled(double k) const
{
    Row5 c = cofactors_;
    for (auto& e : c) e *= k;
    return {c, axes_};
}

Hyperplane3Flat Hyperplane3Flat::normalized() const
{
    const Vec4 n = normal();
    const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2] + n[3] * n[3]);
    return scaled(1.0 / len);
}

Hyperplane3Flat Hyperplane3Flat::canonical() const
{
    Hyperplane3Flat unit = normalized();
    for (std::size_t i = 1; i < 5; ++i) {
        const double ci = unit.cofactors_[i];
        if (std::abs(ci) > kRankEpsilon) return ci < 0.0 ? unit.scaled(-1.0) : unit;
    }
    return unit;
}

Hyperplane3Flat hyperplane_from_points(const std::array<VecN, 4>& points, const ActiveAxes& axes)
{
    if (axes.size() != 4) throw Error(ErrorCode::InvalidPlane, "a 3-flat needs exactly 4 active axes");
    const Vec4 p0 = gather4(points[0], axes);
    std::array<Vec4, 3> d{};
    double scale = 1.0;
    for (std::size_t k = 0; k < 3; ++k) {
        const Vec4 pk = gather4(points[k + 1], axes);
        double len2 = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            d[k][i] = pk[i] - p0[i];
            len2 += d[k][i] * d[k][i];
        }
        scale *= std::sqrt(len2);
    }
    if (scale == 0.0) throw Error(ErrorCode::DegeneratePoints, "coincident points");

    // Cofactor expansion of the homogeneous 5x5 determinant with rows (1, p_k);
    // after subtracting the p0 row the minors reduce to 3x3 minors of the differences.
    Vec4 n{det3(d[0], d[1], d[2], 1, 2, 3), -det3(d[0], d[1], d[2], 0, 2, 3),
           det3(d[0], d[1], d[2], 0, 1, 3), -det3(d[0], d[1], d[2], 0, 1, 2)};
    const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2] + n[3] * n[3]);
    if (len / scale < kRankEpsilon)
        throw Error(ErrorCode::DegeneratePoints, "points are affinely dependent");

    Row5 c{0.0, n[0] / len, n[1] / len, n[2] / len, n[3] / len};
    c[0] = -(c[1] * p0[0] + c[2] * p0[1] + c[3] * p0[2] + c[4] * p0[3]);
    return Hyperplane3Flat(c, axes).canonical();
}

VecN rotate_in_plane(const VecN& p, int axis_i, int axis_j, double theta)
{
    check_axis(axis_i);
    check_axis(axis_j);
    if (axis_i == axis_j) throw Error(ErrorCode::BadAxisPair, "rotation axes must differ");
    const double cs = std::cos(theta);
    const double sn = std::sin(theta);
    VecN r = p;
    const auto i = static_cast<std::size_t>(axis_i);
    const auto j = static_cast<std::size_t>(axis_j);
    r.c[i] = p.c[i] * cs - p.c[j] * sn;
    r.c[j] = p.c[i] * sn + p.c[j] * cs;
    return r;
}

Hyperplane3Flat pose_to_hyperplane(const PlanePose& pose, const ActiveAxes& axes)
{
    if (axes.size() != 4) throw Error(ErrorCode::InvalidPlane, "a 3-flat needs exactly 4 active axes");
    if (!axes.contains(pose.normal_axis))
        throw Error(ErrorCode::BadAxisPair,
                    std::string("normal axis ") + axis_name(pose.normal_axis) + " is not active");
    VecN normal = VecN::unit(pose.normal_axis);
    for (const auto& rot : pose.angles) {
        if (!axes.contains(rot.axis_i) || !axes.contains(rot.axis_j))
            throw Error(ErrorCode::BadAxisPair, std::string("rotation (") + axis_name(rot.axis_i) + "," +
                                                    axis_name(rot.axis_j) + ") leaves the active axes");
        normal = rotate_in_plane(normal, rot.axis_i, rot.axis_j, rot.radians);
    }
    const Vec4 n = gather4(normal, axes);
    const Vec4 a = gather4(pose.anchor, axes);
    Row5 c{-(n[0] * a[0] + n[1] * a[1] + n[2] * a[2] + n[3] * a[3]), n[0], n[1], n[2], n[3]};
    return Hyperplane3Flat(c, axes).normalized();
}

} // namespace hyperslice
