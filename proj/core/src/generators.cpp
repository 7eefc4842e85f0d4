#include "hyperslice/generators.hpp"

#include "hyperslice/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace hyperslice {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string number(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Corner order of a generator cell: bit 0 steps the second parameter, bit 1 the
// third and bit 2 the first. Odd cells along the third parameter are mirrored so the
// face diagonals of neighbouring cells line up.
template <typename PointFn>
std::array<VecN, 8> cell_corners(PointFn&& point, int i, int j, int k)
{
    std::array<VecN, 8> c;
    const bool mirror = (k % 2) != 0;
    for (int bits = 0; bits < 8; ++bits) {
        const int dj = bits & 1;
        int dk = (bits >> 1) & 1;
        const int di = (bits >> 2) & 1;
        if (mirror) dk = 1 - dk;
        c[static_cast<std::size_t>(bits)] = point(i + di, j + dj, k + dk);
    }
    return c;
}

} // namespace

int TorusParams::steps() const
{
    if (!(delta_ang > 0.0)) return 0;
    return static_cast<int>(std::lround(kTwoPi / delta_ang));
}

void TorusParams::validate() const
{
    if (!(tube > depth && depth > 0.0))
        throw Error(ErrorCode::InvalidParams, "torus needs tube > depth > 0");
    if (!(radius > tube + depth))
        throw Error(ErrorCode::InvalidParams, "torus needs radius > tube + depth");
    if (!(delta_ang > 0.0) || !std::isfinite(delta_ang))
        throw Error(ErrorCode::InvalidParams, "delta angle must be positive");
    const double turns = kTwoPi / delta_ang;
    const int n = steps();
    if (n < 2 || std::abs(turns - n) > 1e-9 * turns)
        throw Error(ErrorCode::InvalidParams, "2*pi / delta angle must be a positive integer");
    if (n % 2 != 0)
        throw Error(ErrorCode::InvalidParams, "2*pi / delta angle must be even for the grid to close");
}

void SphereParams::validate() const
{
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw Error(ErrorCode::InvalidParams, "sphere radius must be positive");
    if (chi_steps < 2 || phi_steps < 2)
        throw Error(ErrorCode::InvalidParams, "chi and phi need at least 2 steps");
    if (theta_steps < 4 || theta_steps % 2 != 0)
        throw Error(ErrorCode::InvalidParams, "theta steps must be even and at least 4");
}

void ExtrudeParams::validate() const
{
    if (!(t_max > t_min)) throw Error(ErrorCode::InvalidParams, "extrusion needs t_max > t_min");
    if (t_steps < 1) throw Error(ErrorCode::InvalidParams, "extrusion needs t_steps >= 1");
    if (norm(velocity) == 0.0) throw Error(ErrorCode::BadVelocity, "velocity must be nonzero");
}

VecN three_torus_point(double phi, double psi, double theta, const TorusParams& p)
{
    const double ring = p.tube + p.depth * std::cos(phi);
    const double reach = p.radius + ring * std::cos(psi);
    return VecN(0.0, reach * std::cos(theta), reach * std::sin(theta), ring * std::sin(psi),
                p.depth * std::sin(phi));
}

std::vector<Tetrahedron> tessellate_cell(const std::array<VecN, 8>& corners, std::optional<Index> velocity,
                                         VertexPool& pool, DegenerateTets policy)
{
    std::array<Index, 8> id{};
    for (std::size_t i = 0; i < 8; ++i) id[i] = pool.put(corners[i]);

    const std::array<std::array<int, 6>, 2> prisms{{{0, 1, 2, 4, 5, 6}, {1, 3, 2, 5, 7, 6}}};
    std::vector<Tetrahedron> out;
    out.reserve(6);
    for (const auto& pr : prisms) {
        for (int first = 0; first < 3; ++first) {
            Tetrahedron t;
            for (int k = 0; k < 4; ++k) t.v[static_cast<std::size_t>(k)] = id[static_cast<std::size_t>(pr[static_cast<std::size_t>(first + k)])];
            t.velocity = velocity;

            auto sorted = t.v;
            std::sort(sorted.begin(), sorted.end());
            const bool repeated = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
            const bool flat =
                repeated || tet_volume(pool[t.v[0]], pool[t.v[1]], pool[t.v[2]], pool[t.v[3]]) < kTetVolumeFloor;
            if (flat) {
                if (policy == DegenerateTets::Reject)
                    throw Error(ErrorCode::DegenerateCell, "cell produces a zero-volume tetrahedron");
                continue;
            }
            out.push_back(t);
        }
    }
    return out;
}

Complex3 make_3torus(const TorusParams& p)
{
    p.validate();
    const int n = p.steps();
    const auto angle = [n](int i) { return kTwoPi * static_cast<double>(i) / static_cast<double>(n); };
    const auto point = [&](int i, int j, int k) { return three_torus_point(angle(i), angle(j), angle(k), p); };

    Complex3 cx;
    cx.name = "3torus";
    cx.axes = ActiveAxes::xyzw();
    cx.color = {0.85f, 0.55f, 0.25f, 1.0f};
    cx.metadata["radius"] = number(p.radius);
    cx.metadata["tube"] = number(p.tube);
    cx.metadata["depth"] = number(p.depth);
    cx.metadata["delta_ang"] = number(p.delta_ang);
    cx.tets.reserve(static_cast<std::size_t>(6) * n * n * n);

    for (int i = 0; i < n; ++i)          // Phi
        for (int j = 0; j < n; ++j)      // Psi
            for (int k = 0; k < n; ++k) { // Theta
                const auto tets = tessellate_cell(cell_corners(point, i, j, k), std::nullopt, cx.pool);
                cx.tets.insert(cx.tets.end(), tets.begin(), tets.end());
            }
    return cx;
}

Complex3 make_3sphere(const SphereParams& p)
{
    p.validate();
    const double pi = std::numbers::pi;
    const auto point = [&](int i, int j, int k) {
        const double chi = pi * i / p.chi_steps;
        const double phi = pi * j / p.phi_steps;
        const double theta = kTwoPi * k / p.theta_steps;
        const double rs = p.radius * std::sin(chi);
        return VecN(0.0, rs * std::sin(phi) * std::cos(theta), rs * std::sin(phi) * std::sin(theta),
                    rs * std::cos(phi), p.radius * std::cos(chi));
    };

    Complex3 cx;
    cx.name = "3sphere";
    cx.axes = ActiveAxes::xyzw();
    cx.color = {0.3f, 0.6f, 0.9f, 1.0f};
    cx.metadata["radius"] = number(p.radius);

    std::vector<Tetrahedron> raw;
    for (int i = 0; i < p.chi_steps; ++i)
        for (int j = 0; j < p.phi_steps; ++j)
            for (int k = 0; k < p.theta_steps; ++k) {
                const auto tets =
                    tessellate_cell(cell_corners(point, i, j, k), std::nullopt, cx.pool, DegenerateTets::Drop);
                raw.insert(raw.end(), tets.begin(), tets.end());
            }

    // Collapsed pole cells can produce the same tetrahedron twice, folded back on
    // itself; such copies cancel in pairs.
    std::map<std::array<Index, 4>, int> multiplicity;
    const auto key = [](const Tetrahedron& t) {
        auto v = t.v;
        std::sort(v.begin(), v.end());
        return v;
    };
    for (const auto& t : raw) ++multiplicity[key(t)];
    for (const auto& t : raw) {
        auto it = multiplicity.find(key(t));
        if (it->second % 2 == 1) {
            cx.tets.push_back(t);
            it->second = 0;
        }
    }
    return cx;
}

Complex3 project_to_3sphere(const Complex3& cx, double radius)
{
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidParams, "projection radius must be positive");
    Complex3 out;
    out.vectors = cx.vectors;
    out.tets = cx.tets;
    out.axes = cx.axes;
    out.name = cx.name;
    out.metadata = cx.metadata;
    out.metadata["radius"] = number(radius);
    out.time = cx.time;
    out.color = cx.color;
    out.pool = VertexPool(cx.pool.merge_tolerance());
    out.pool.reserve(cx.pool.size());
    for (const auto& v : cx.pool.vertices()) {
        double n2 = 0.0;
        for (int a : cx.axes) n2 += v[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(a)];
        const double len = std::sqrt(n2);
        if (len < kPlaneEpsilon) throw Error(ErrorCode::OriginVertex, "vertex at the origin has no direction");
        VecN r = v;
        for (int a : cx.axes) r[static_cast<std::size_t>(a)] = v[static_cast<std::size_t>(a)] * (radius / len);
        out.pool.append(r);
    }
    return out;
}

Complex3 extrude_along_t(const Complex3& cx, const ExtrudeParams& p)
{
    p.validate();
    for (int a : cx.axes)
        if (p.velocity[static_cast<std::size_t>(a)] != 0.0)
            throw Error(ErrorCode::BadVelocity,
                        std::string("velocity has a component along active axis ") + axis_name(a));
    Complex3 out = cx;
    const Index vel = out.vectors.put(p.velocity);
    for (auto& t : out.tets) t.velocity = vel;
    out.time = TimeExtent{p.t_min, p.t_max, p.t_steps};
    out.metadata["extruded"] = "t";
    return out;
}

} // namespace hyperslice
