#pragma once

#include "hyperslice/complex.hpp"
#include "hyperslice/ndvec.hpp"

#include <span>
#include <string>
#include <vector>

namespace hyperslice {

/// Orthographic view: rotate, then discard one or two active components.
struct ViewSpec {
    std::vector<int> drop;
    std::vector<AxisRotation> rotations; // applied in listed order before dropping
    std::string label;
};

/// Throws BadViewSpec unless the drop axes are distinct active axes leaving exactly
/// three survivors and every rotation stays inside the active axes.
void validate_view(const ViewSpec& view, const ActiveAxes& axes);

/// The three active axes that survive `view`, ascending.
std::array<int, 3> surviving_axes(const ViewSpec& view, const ActiveAxes& axes);

std::vector<Point3> project(std::span<const VecN> points, const ViewSpec& view, const ActiveAxes& axes);

/// Every distinct tetrahedron face of the complex, projected through `view`.
TriMesh project_complex(const Complex3& cx, const ViewSpec& view);

/// Default viewport sets: 7 views for (x,y,z,w), 12 for (t,x,y,z,w).
std::vector<ViewSpec> standard_viewports(std::size_t active_count);

/// Active axes the standard viewport sets are defined over.
ActiveAxes standard_viewport_axes(std::size_t active_count);

} // namespace hyperslice
