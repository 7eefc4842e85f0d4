#include "hyperslice/error.hpp"
#include "hyperslice/ndvec.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hyperslice;

namespace {

constexpr double pi = std::numbers::pi;

VecN wpoint(double w) { return VecN(0, 0, 0, 0, w); }

} // namespace

TEST_SUITE("ndvec") {

TEST_CASE("component order is t x y z w v u")
{
    const VecN p(1, 2, 3, 4, 5, 6, 7);
    CHECK(p.t() == 1);
    CHECK(p.x() == 2);
    CHECK(p.y() == 3);
    CHECK(p.z() == 4);
    CHECK(p.w() == 5);
    CHECK(p.v() == 6);
    CHECK(p.u() == 7);
    for (std::size_t i = 0; i < kComponents; ++i) CHECK(p[i] == static_cast<double>(i + 1));
    CHECK(VecN(1, 2, 3, 4)[6] == 0.0);
    CHECK(parse_axis("w") == axis::w);
    CHECK(parse_axis("T") == axis::t);
    CHECK_FALSE(parse_axis("q"));
    CHECK(axis_name(axis::u) == 'u');
}

TEST_CASE("vector arithmetic")
{
    CHECK(blend(wpoint(-1), wpoint(1), 0.5) == VecN{});
    CHECK(VecN(1, 2, 3, 4, 5, 6, 7) * 0.0 == VecN{});
    oracle::Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        const VecN a = rng.any7(-10, 10);
        CHECK(a - a == VecN{});
        CHECK(blend(a, a * 3.0, 0.0) == a);
    }
    CHECK(dot(VecN(1, 2, 0, 0), VecN(3, 4, 0, 0)) == 11.0);
    CHECK(norm(VecN(0, 3, 4, 0)) == 5.0);
    CHECK(chebyshev_distance(VecN(0, 1, 0, 0), VecN(0, 0, -2, 0)) == 2.0);
}

TEST_CASE("dot5")
{
    CHECK(dot5({0, 0, 0, 0, 1}, {1, 0, 0, 0, 0}) == 0.0);
    CHECK(dot5({0, 0, 0, 0, 1}, {1, 0, 0, 0, 0.7}) == 0.7);
    CHECK(dot5({2, 0, 0, 0, 2}, {1, 0, 0, 0, -1}) == 0.0);
}

TEST_CASE("active axes validation")
{
    const ActiveAxes def;
    CHECK(def == ActiveAxes::xyzw());
    const ActiveAxes unsorted{axis::w, axis::x, axis::z, axis::y};
    CHECK(unsorted == ActiveAxes::xyzw());
    CHECK(ActiveAxes::txyzw().size() == 5);
    CHECK_THROWS_AS(ActiveAxes({axis::x, axis::y}), Error);
    CHECK_THROWS_AS(ActiveAxes({axis::x, axis::x, axis::y, axis::z}), Error);
    CHECK(def.slot(axis::w) == 3u);
    CHECK_FALSE(def.contains(axis::t));
}

TEST_CASE("hyperplane from coordinate points")
{
    const std::array<VecN, 4> basis{VecN(0, 0, 0, 0), VecN(0, 1, 0, 0), VecN(0, 0, 1, 0), VecN(0, 0, 0, 1)};
    const auto h = hyperplane_from_points(basis);
    CHECK(h.normal() == Vec4{0, 0, 0, 1});
    CHECK(h.cofactors()[0] == 0.0);

    std::array<VecN, 4> shifted = basis;
    for (auto& p : shifted) p[axis::w] = 0.3;
    const auto h2 = hyperplane_from_points(shifted);
    CHECK(h2.normal()[3] == doctest::Approx(1.0));
    CHECK(h2.incidence(VecN{}) == doctest::Approx(-0.3).epsilon(1e-15));

    std::array<VecN, 4> dup = basis;
    dup[2] = dup[1];
    try {
        (void)hyperplane_from_points(dup);
        FAIL("expected DegeneratePoints");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegeneratePoints);
    }
}

TEST_CASE("hyperplane from points matches the 5x5 determinant expansion")
{
    oracle::Rng rng(2024);
    const ActiveAxes axes = ActiveAxes::xyzw();
    for (int trial = 0; trial < 500; ++trial) {
        std::array<VecN, 4> pts;
        std::array<std::array<double, 4>, 4> raw{};
        for (std::size_t k = 0; k < 4; ++k) {
            pts[k] = rng.point(axes, -5, 5);
            pts[k][axis::t] = rng.uniform(-3, 3); // inactive, must be ignored
            raw[k] = gather4(pts[k], axes);
        }
        const auto expect = oracle::canonical(oracle::plane_cofactors(raw));
        const auto got = hyperplane_from_points(pts, axes).cofactors();
        for (std::size_t i = 0; i < 5; ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-9));
        for (const auto& p : pts) CHECK(std::abs(hyperplane_from_points(pts, axes).incidence(p)) < 1e-9);
    }
}

TEST_CASE("hyperplane from points is order insensitive after normalization")
{
    oracle::Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::array<VecN, 4> pts;
        for (auto& p : pts) p = rng.point(ActiveAxes::xyzw(), -2, 2);
        const auto ref = hyperplane_from_points(pts).cofactors();
        std::array<VecN, 4> perm = pts;
        std::swap(perm[0], perm[3]);
        std::swap(perm[1], perm[2]);
        const auto got = hyperplane_from_points(perm).cofactors();
        for (std::size_t i = 0; i < 5; ++i) CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-9));
    }
}

TEST_CASE("hyperplane on other active axes")
{
    const ActiveAxes txyz = ActiveAxes::txyz();
    const std::array<VecN, 4> pts{VecN(0.5, 0, 0, 0), VecN(0.5, 1, 0, 0), VecN(0.5, 0, 1, 0), VecN(0.5, 0, 0, 1)};
    const auto h = hyperplane_from_points(pts, txyz);
    CHECK(h.normal()[0] == doctest::Approx(1.0));
    CHECK(h.incidence(VecN(0.5, 9, 9, 9, 123)) == doctest::Approx(0.0));
}

TEST_CASE("invalid planes")
{
    CHECK_THROWS_AS(Hyperplane3Flat({1, 0, 0, 0, 0}), Error);
    CHECK_THROWS_AS(Hyperplane3Flat({0, 1, 0, 0, 0}, ActiveAxes::txyzw()), Error);
    CHECK_THROWS_AS(Hyperplane3Flat({0, NAN, 0, 0, 1}), Error);
}

TEST_CASE("cofactor scaling leaves sides and edge parameters unchanged")
{
    oracle::Rng rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const auto c = rng.plane(-1, 1);
        const Hyperplane3Flat h({c[0], c[1], c[2], c[3], c[4]});
        double k = rng.uniform(-50, 50);
        if (std::abs(k) < 1e-3) k = 2.0;
        const auto hk = h.scaled(k);
        const VecN a = rng.point(ActiveAxes::xyzw(), -2, 2);
        const VecN b = rng.point(ActiveAxes::xyzw(), -2, 2);
        const double fa = h.incidence(a), fka = hk.incidence(a);
        if (std::abs(fa) > 1e-12) CHECK((fa > 0) == ((fka > 0) == (k > 0)));
        const double d = h.along(b - a);
        if (std::abs(d) > 1e-9) {
            const double s = -fa / d;
            const double sk = -fka / hk.along(b - a);
            CHECK(sk == doctest::Approx(s).epsilon(1e-12));
        }
        const auto n1 = h.canonical().cofactors();
        const auto n2 = hk.canonical().cofactors();
        for (std::size_t i = 0; i < 5; ++i) CHECK(n1[i] == doctest::Approx(n2[i]).epsilon(1e-12));
    }
}

TEST_CASE("pose to hyperplane")
{
    const auto origin = pose_to_hyperplane(PlanePose{});
    CHECK(origin.cofactors() == Row5{0, 0, 0, 0, 1});

    PlanePose up;
    up.anchor = wpoint(0.5);
    const auto h = pose_to_hyperplane(up);
    CHECK(h.cofactors()[0] == doctest::Approx(-0.5));
    CHECK(h.incidence(wpoint(0.5)) == doctest::Approx(0.0));

    PlanePose turned;
    turned.angles.push_back({axis::x, axis::w, pi / 2});
    const auto n = pose_to_hyperplane(turned).canonical().normal();
    CHECK(std::abs(n[0]) == doctest::Approx(1.0));
    CHECK(std::abs(n[3]) < 1e-12);

    PlanePose bad;
    bad.angles.push_back({axis::t, axis::w, 0.1});
    try {
        (void)pose_to_hyperplane(bad);
        FAIL("expected BadAxisPair");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadAxisPair);
    }
    PlanePose same;
    same.angles.push_back({axis::x, axis::x, 0.1});
    CHECK_THROWS_AS(pose_to_hyperplane(same), Error);
}

TEST_CASE("pose anchor lies on the plane for random poses")
{
    oracle::Rng rng(5);
    const int ax[4] = {axis::x, axis::y, axis::z, axis::w};
    for (int trial = 0; trial < 200; ++trial) {
        PlanePose pose;
        pose.anchor = rng.point(ActiveAxes::xyzw(), -3, 3);
        pose.normal_axis = ax[rng.integer(0, 3)];
        for (int k = 0; k < 3; ++k) {
            int i = rng.integer(0, 3), j = rng.integer(0, 3);
            if (i == j) j = (i + 1) % 4;
            pose.angles.push_back({ax[i], ax[j], rng.uniform(-pi, pi)});
        }
        const auto h = pose_to_hyperplane(pose);
        CHECK(std::abs(h.incidence(pose.anchor)) < 1e-9);
        const Vec4 n = h.normal();
        CHECK(std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2] + n[3] * n[3]) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rotate in plane")
{
    const VecN r = rotate_in_plane(VecN(0, 1, 0, 0), axis::x, axis::w, pi / 2);
    CHECK(std::abs(r.x()) < 1e-15);
    CHECK(r.w() == doctest::Approx(1.0));

    oracle::Rng rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        const VecN p = rng.any7(-10, 10);
        const int i = rng.integer(0, 6);
        int j = rng.integer(0, 6);
        if (i == j) j = (i + 1) % 7;
        const double th = rng.uniform(-2 * pi, 2 * pi);
        CHECK(rotate_in_plane(p, i, j, 0.0) == p);
        const VecN q = rotate_in_plane(p, i, j, th);
        CHECK(std::abs(norm(q) - norm(p)) < 1e-12 * std::max(1.0, norm(p)));
        const VecN back = rotate_in_plane(q, i, j, -th);
        for (std::size_t k = 0; k < kComponents; ++k) CHECK(std::abs(back[k] - p[k]) < 1e-12 * 10);
    }
    CHECK_THROWS_AS(rotate_in_plane(VecN{}, axis::x, axis::x, 1.0), Error);
}

} // TEST_SUITE
