#pragma once

#include "hyperslice/complex.hpp"
#include "hyperslice/ndvec.hpp"

#include <array>
#include <numbers>
#include <optional>
#include <vector>

namespace hyperslice {

struct TorusParams {
    double radius = 5.0;
    double tube = 2.0;
    double depth = 1.0;
    double delta_ang = std::numbers::pi / 8.0;

    /// Number of grid steps per angle, 2*pi / delta_ang.
    int steps() const;
    /// Throws InvalidParams. Requires radius > tube + depth, tube > depth > 0 and an
    /// even integer number of steps per turn.
    void validate() const;
};

struct SphereParams {
    double radius = 1.0;
    int chi_steps = 8;   // chi in [0, pi]
    int phi_steps = 8;   // phi in [0, pi]
    int theta_steps = 16; // theta in [0, 2*pi), even

    void validate() const;
};

struct ExtrudeParams {
    VecN velocity{1.0, 0.0, 0.0, 0.0};
    double t_min = 0.0;
    double t_max = 1.0;
    int t_steps = 8;

    void validate() const;
};

/// Point of the 3-torus T^3 -> R^4 at angles (Phi, Psi, Theta); t stays 0.
VecN three_torus_point(double phi, double psi, double theta, const TorusParams& p = {});

/// What tessellate_cell does with a tetrahedron of (near) zero volume.
enum class DegenerateTets { Reject, Drop };

inline constexpr double kTetVolumeFloor = 1e-12;

/// Splits a hexahedral cell into two prisms and each prism into three tetrahedra.
///
/// Corners follow the generator's row layout: V0..V3 are one quad face, row-major over
/// two parameters, V4..V7 the opposite face. The prisms are (V0,V1,V2 | V4,V5,V6) and
/// (V1,V3,V2 | V5,V7,V6); a prism (P0..P5) yields P0P1P2P3, P1P2P3P4 and P2P3P4P5.
/// Corners go through the pool, so shared corners merge with neighbouring cells.
std::vector<Tetrahedron> tessellate_cell(const std::array<VecN, 8>& corners,
                                         std::optional<Index> velocity, VertexPool& pool,
                                         DegenerateTets policy = DegenerateTets::Reject);

Complex3 make_3torus(const TorusParams& p);
Complex3 make_3sphere(const SphereParams& p);

/// Radially rescales every vertex so its active coordinates have norm `radius`.
Complex3 project_to_3sphere(const Complex3& cx, double radius);

/// Attaches a shared velocity to every tetrahedron; slicing at time tau then sees
/// each vertex displaced by tau * velocity.
Complex3 extrude_along_t(const Complex3& cx, const ExtrudeParams& p);

} // namespace hyperslice
