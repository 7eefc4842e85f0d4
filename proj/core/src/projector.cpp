#include "hyperslice/projector.hpp"

#include "hyperslice/error.hpp"

#include <algorithm>
#include <cctype>
#include <numbers>

namespace hyperslice {

void validate_view(const ViewSpec& view, const ActiveAxes& axes)
{
    if (view.drop.empty() || view.drop.size() > 2)
        throw Error(ErrorCode::BadViewSpec, "a view drops one or two axes");
    for (std::size_t i = 0; i < view.drop.size(); ++i) {
        if (!axes.contains(view.drop[i]))
            throw Error(ErrorCode::BadViewSpec, std::string("drop axis ") + axis_name(view.drop[i]) + " is not active");
        for (std::size_t j = 0; j < i; ++j)
            if (view.drop[i] == view.drop[j]) throw Error(ErrorCode::BadViewSpec, "drop axes must be distinct");
    }
    if (axes.size() - view.drop.size() != 3)
        throw Error(ErrorCode::BadViewSpec, "exactly three axes must remain after dropping, active axes are " +
                                                axes.to_string());
    for (const auto& r : view.rotations)
        if (r.axis_i == r.axis_j || !axes.contains(r.axis_i) || !axes.contains(r.axis_j))
            throw Error(ErrorCode::BadViewSpec, "rotation plane must be two distinct active axes");
}

std::array<int, 3> surviving_axes(const ViewSpec& view, const ActiveAxes& axes)
{
    validate_view(view, axes);
    std::array<int, 3> keep{};
    std::size_t n = 0;
    for (int a : axes)
        if (std::find(view.drop.begin(), view.drop.end(), a) == view.drop.end()) keep[n++] = a;
    return keep;
}

std::vector<Point3> project(std::span<const VecN> points, const ViewSpec& view, const ActiveAxes& axes)
{
    const auto keep = surviving_axes(view, axes);
    std::vector<Point3> out;
    out.reserve(points.size());
    for (VecN p : points) {
        for (const auto& r : view.rotations) p = rotate_in_plane(p, r.axis_i, r.axis_j, r.radians);
        out.push_back({p[static_cast<std::size_t>(keep[0])], p[static_cast<std::size_t>(keep[1])],
                       p[static_cast<std::size_t>(keep[2])]});
    }
    return out;
}

TriMesh project_complex(const Complex3& cx, const ViewSpec& view)
{
    const auto positions = project(cx.pool.vertices(), view, cx.axes);
    std::vector<std::array<Index, 3>> faces;
    for (const auto& [face, count] : face_incidence(cx)) faces.push_back(face);
    TriMesh mesh = TriMesh::from_arrays(positions, faces);
    mesh.world = cx.pool.vertices();
    for (auto& t : mesh.triangles) t.color = cx.color;
    return mesh;
}

ActiveAxes standard_viewport_axes(std::size_t active_count)
{
    if (active_count == 5) return ActiveAxes::txyzw();
    return ActiveAxes::xyzw();
}

std::vector<ViewSpec> standard_viewports(std::size_t active_count)
{
    using namespace axis;
    constexpr double quarter = std::numbers::pi / 2.0;
    if (active_count != 4 && active_count != 5)
        throw Error(ErrorCode::BadViewSpec, "standard viewports exist for 4 or 5 active axes");

    const std::vector<int> primary = active_count == 5 ? std::vector<int>{t, w} : std::vector<int>{w};
    std::vector<ViewSpec> views{
        {primary, {{x, z, quarter}}, "front"},
        {primary, {{x, z, -quarter}}, "side"},
        {primary, {{y, z, quarter}}, "top"},
    };
    if (active_count == 4) {
        for (int a : {x, y, z, w}) views.push_back({{a}, {}, std::string("drop-") + axis_name(a)});
        return views;
    }
    const std::array<std::array<int, 2>, 9> pairs{{{w, x}, {w, y}, {w, z}, {t, x}, {t, y}, {t, z}, {z, y}, {z, x}, {y, x}}};
    for (const auto& p : pairs)
        views.push_back({{p[0], p[1]}, {},
                         std::string("drop-") + static_cast<char>(std::toupper(axis_name(p[0]))) +
                             static_cast<char>(std::toupper(axis_name(p[1])))});
    return views;
}

} // namespace hyperslice
