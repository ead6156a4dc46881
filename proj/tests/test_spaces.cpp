#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "divcol/errors.hpp"
#include "divcol/spaces.hpp"

#include <cmath>
#include <random>

using namespace divcol;

namespace {

std::vector<double> uniform_breaks(int elements) {
    std::vector<double> bp(elements + 1);
    for (int i = 0; i <= elements; ++i)
        bp[i] = static_cast<double>(i) / elements;
    return bp;
}

std::vector<double> random_coeffs(long n, std::mt19937& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> c(n);
    for (double& v : c)
        v = d(rng);
    return c;
}

} // namespace

TEST_CASE("2D complex dimensions") {
    const auto bp = uniform_breaks(4);
    const ComplexSpaces2D s = build_complex_2d(1, bp, bp);
    CHECK(s.psi.dim() == 36);
    CHECK(s.vel_x.dim() == 30);
    CHECK(s.vel_y.dim() == 30);
    CHECK(s.pres.dim() == 25);
    CHECK(s.vel_x.dim() + s.vel_y.dim() == 60);

    const auto one = uniform_breaks(1);
    const ComplexSpaces2D b = build_complex_2d(2, one, one);
    CHECK(b.pres.dim() == 9);
    CHECK(b.pres.kv[0].degree == 2);

    CHECK_THROWS_AS(build_complex_2d(0, bp, bp), UnsupportedDegree);
}

TEST_CASE("3D complex dimensions and degree patterns") {
    const auto bp = uniform_breaks(2);
    const ComplexSpaces3D s = build_complex_3d(1, bp, bp, bp);
    CHECK(s.pres.dim() == 27);
    CHECK(s.vel[0].dim() == 4 * 3 * 3);
    for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) {
            // vorticity degree pattern complements the matching velocity component
            const int vd = s.vel[c].kv[d].degree;
            const int wd = s.omega[c].kv[d].degree;
            if (d == c) {
                CHECK(vd == s.kprime + 1);
                CHECK(wd == s.kprime);
            } else {
                CHECK(vd == s.kprime);
                CHECK(wd == s.kprime + 1);
            }
        }
}

TEST_CASE("eval_field partition of unity and linear reproduction") {
    std::mt19937 rng(5);
    const auto bp = uniform_breaks(3);
    const ComplexSpaces2D s = build_complex_2d(2, bp, bp);

    std::vector<double> ones(s.psi.dim(), 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const std::array<double, 2> p{unit(rng), unit(rng)};
        const FieldSample f = eval_field(s.psi, ones, p, 2);
        CHECK(f.value == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(std::abs(f.gradient[0]) < 1e-11);
        CHECK(std::abs(f.gradient[1]) < 1e-11);
    }

    // coefficients = x-direction Greville abscissae reproduce the linear x
    const auto gx = greville_abscissae(s.psi.kv[0]);
    std::vector<double> lin(s.psi.dim());
    for (int j = 0; j < s.psi.count(1); ++j)
        for (int i = 0; i < s.psi.count(0); ++i)
            lin[i + static_cast<long>(s.psi.count(0)) * j] = gx[i];
    for (int rep = 0; rep < 10; ++rep) {
        const std::array<double, 2> p{unit(rng), unit(rng)};
        const FieldSample f = eval_field(s.psi, lin, p, 1);
        CHECK(f.value == doctest::Approx(p[0]).epsilon(1e-12));
        CHECK(f.gradient[0] == doctest::Approx(1.0).epsilon(1e-12));
    }

    std::vector<double> zeros(s.psi.dim(), 0.0);
    const FieldSample f0 = eval_field(s.psi, zeros, std::array<double, 2>{0.3, 0.4}, 0);
    CHECK(f0.value == 0.0);

    CHECK_THROWS_AS(eval_field(s.psi, ones, std::array<double, 2>{1.5, 0.0}, 0), OutOfDomain);
    CHECK_THROWS_AS(eval_field(s.psi, zeros, std::array<double, 2>{0.3, 0.4}, 3), InvalidInput);
    std::vector<double> bad(3, 0.0);
    CHECK_THROWS_AS(eval_field(s.psi, bad, std::array<double, 2>{0.3, 0.4}, 0), InvalidInput);
}

TEST_CASE("eval_field gradient matches finite differences") {
    std::mt19937 rng(7);
    const auto bp = uniform_breaks(4);
    const ComplexSpaces2D s2 = build_complex_2d(2, bp, bp);
    const auto c2 = random_coeffs(s2.psi.dim(), rng);
    std::uniform_real_distribution<double> inner(0.1, 0.9);
    const double h = 1e-6;
    for (int rep = 0; rep < 20; ++rep) {
        const double x = inner(rng), y = inner(rng);
        const FieldSample f = eval_field(s2.psi, c2, std::array<double, 2>{x, y}, 1);
        const double fxp = eval_field(s2.psi, c2, std::array<double, 2>{x + h, y}, 0).value;
        const double fxm = eval_field(s2.psi, c2, std::array<double, 2>{x - h, y}, 0).value;
        const double fyp = eval_field(s2.psi, c2, std::array<double, 2>{x, y + h}, 0).value;
        const double fym = eval_field(s2.psi, c2, std::array<double, 2>{x, y - h}, 0).value;
        CHECK(f.gradient[0] == doctest::Approx((fxp - fxm) / (2 * h)).epsilon(1e-6));
        CHECK(f.gradient[1] == doctest::Approx((fyp - fym) / (2 * h)).epsilon(1e-6));
    }

    const ComplexSpaces3D s3 = build_complex_3d(2, bp, bp, bp);
    const auto c3 = random_coeffs(s3.phi.dim(), rng);
    for (int rep = 0; rep < 10; ++rep) {
        const double x = inner(rng), y = inner(rng), z = inner(rng);
        const FieldSample f = eval_field(s3.phi, c3, std::array<double, 3>{x, y, z}, 1);
        const double fzp = eval_field(s3.phi, c3, std::array<double, 3>{x, y, z + h}, 0).value;
        const double fzm = eval_field(s3.phi, c3, std::array<double, 3>{x, y, z - h}, 0).value;
        CHECK(f.gradient[2] == doctest::Approx((fzp - fzm) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("Greville grid layout and classification") {
    std::vector<double> one{0.0, 1.0};
    TensorSpace sp;
    sp.kv = {make_open_knot_vector(2, one), make_open_knot_vector(1, one)};
    const auto grid = greville_grid(sp);
    REQUIRE(grid.size() == 6);
    CHECK(grid[0].x == std::array<double, 3>{0.0, 0.0, 0.0});
    CHECK(grid[1].x == std::array<double, 3>{0.5, 0.0, 0.0});
    CHECK(grid[2].x == std::array<double, 3>{1.0, 0.0, 0.0});
    CHECK(grid[3].x == std::array<double, 3>{0.0, 1.0, 0.0});
    // corners carry both face tags
    CHECK(grid[0].on_face(0, 0));
    CHECK(grid[0].on_face(1, 0));
    CHECK_FALSE(grid[0].on_face(0, 1));
    CHECK(grid[1].on_face(1, 0));
    CHECK_FALSE(grid[1].on_face(0, 0));
    CHECK(grid[1].interior() == false);
    CHECK(grid[5].on_face(0, 1));
    CHECK(grid[5].on_face(1, 1));
}

TEST_CASE("2D complex exactness: div(rot(psi)) = 0 at coefficient level") {
    std::mt19937 rng(13);
    for (auto [ne, kprime] : {std::pair{2, 1}, {4, 1}, {2, 2}}) {
        const auto bp = uniform_breaks(ne);
        const ComplexSpaces2D s = build_complex_2d(kprime, bp, bp);
        for (int rep = 0; rep < 100; ++rep) {
            const auto psi = random_coeffs(s.psi.dim(), rng);
            const auto [ux, uy] = rotor_coeffs_2d(s, psi);
            const auto div = divergence_coeffs_2d(s, ux, uy);
            for (double v : div)
                CHECK(std::abs(v) <= 1e-13);
        }
    }
    // larger derivative scales leave (k/h)^2 * eps roundoff in the cancellation
    const auto bpo = uniform_breaks(10);
    const auto bpt = uniform_breaks(6);
    for (int kprime : {1, 2, 3}) {
        const ComplexSpaces2D s = build_complex_2d(kprime, bpo, bpt);
        for (int rep = 0; rep < 50; ++rep) {
            const auto psi = random_coeffs(s.psi.dim(), rng);
            const auto [ux, uy] = rotor_coeffs_2d(s, psi);
            const auto div = divergence_coeffs_2d(s, ux, uy);
            const double scale = 1.0 + std::pow((kprime + 2) * 10.0, 2);
            for (double v : div)
                CHECK(std::abs(v) <= 4e-16 * scale);
        }
    }
}

TEST_CASE("rotor and divergence agree with pointwise derivatives") {
    std::mt19937 rng(19);
    const auto bp = uniform_breaks(4);
    const ComplexSpaces2D s = build_complex_2d(2, bp, bp);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const auto psi = random_coeffs(s.psi.dim(), rng);
    const auto [ux, uy] = rotor_coeffs_2d(s, psi);
    for (int rep = 0; rep < 50; ++rep) {
        const std::array<double, 2> p{unit(rng), unit(rng)};
        const FieldSample fpsi = eval_field(s.psi, psi, p, 1);
        const FieldSample fx = eval_field(s.vel_x, ux, p, 0);
        const FieldSample fy = eval_field(s.vel_y, uy, p, 0);
        CHECK(fx.value == doctest::Approx(fpsi.gradient[1]).epsilon(1e-12));
        CHECK(fy.value == doctest::Approx(-fpsi.gradient[0]).epsilon(1e-12));
    }

    const auto vx = random_coeffs(s.vel_x.dim(), rng);
    const auto vy = random_coeffs(s.vel_y.dim(), rng);
    const auto div = divergence_coeffs_2d(s, vx, vy);
    for (int rep = 0; rep < 50; ++rep) {
        const std::array<double, 2> p{unit(rng), unit(rng)};
        const FieldSample fx = eval_field(s.vel_x, vx, p, 1);
        const FieldSample fy = eval_field(s.vel_y, vy, p, 1);
        const FieldSample fd = eval_field(s.pres, div, p, 0);
        CHECK(fd.value == doctest::Approx(fx.gradient[0] + fy.gradient[1]).epsilon(1e-12));
    }

    // constant psi has zero rotor; zero velocity has zero divergence
    std::vector<double> cpsi(s.psi.dim(), 3.25);
    const auto [cx, cy] = rotor_coeffs_2d(s, cpsi);
    for (double v : cx)
        CHECK(v == 0.0);
    for (double v : cy)
        CHECK(v == 0.0);
}

TEST_CASE("3D complex exactness") {
    std::mt19937 rng(37);
    const auto bp = uniform_breaks(2);
    const ComplexSpaces3D s = build_complex_3d(2, bp, bp, bp);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // div(curl(w)) = 0 at coefficient level
    for (int rep = 0; rep < 20; ++rep) {
        const auto wx = random_coeffs(s.omega[0].dim(), rng);
        const auto wy = random_coeffs(s.omega[1].dim(), rng);
        const auto wz = random_coeffs(s.omega[2].dim(), rng);
        const auto u = curl_coeffs_3d(s, wx, wy, wz);
        const auto div = divergence_coeffs_3d(s, u[0], u[1], u[2]);
        for (double v : div)
            CHECK(std::abs(v) <= 1e-13);
    }

    // grad(phi) lands in the omega spaces, matching pointwise derivatives
    const auto phi = random_coeffs(s.phi.dim(), rng);
    const auto g = gradient_coeffs_3d(s, phi);
    for (int rep = 0; rep < 20; ++rep) {
        const std::array<double, 3> p{unit(rng), unit(rng), unit(rng)};
        const FieldSample fphi = eval_field(s.phi, phi, p, 1);
        for (int d = 0; d < 3; ++d) {
            const FieldSample fg = eval_field(s.omega[d], g[d], p, 0);
            CHECK(fg.value == doctest::Approx(fphi.gradient[d]).epsilon(1e-12));
        }
    }

    // curl(grad(phi)) = 0 pointwise
    const auto cg = curl_coeffs_3d(s, g[0], g[1], g[2]);
    for (int rep = 0; rep < 20; ++rep) {
        const std::array<double, 3> p{unit(rng), unit(rng), unit(rng)};
        for (int d = 0; d < 3; ++d) {
            const FieldSample f = eval_field(s.vel[d], cg[d], p, 0);
            CHECK(std::abs(f.value) <= 1e-12);
        }
    }
}

TEST_CASE("Greville interpolation is exact on space members") {
    std::mt19937 rng(41);
    const auto bp = uniform_breaks(3);
    const ComplexSpaces2D s = build_complex_2d(2, bp, bp);
    const auto grid = greville_grid(s.vel_x);

    const auto ref = random_coeffs(s.vel_x.dim(), rng);
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        vals[i] = eval_field(s.vel_x, ref, std::span(grid[i].x.data(), 2), 0).value;
    const auto rec = greville_interpolate(s.vel_x, grid, vals);
    for (std::size_t i = 0; i < rec.size(); ++i)
        CHECK(rec[i] == doctest::Approx(ref[i]).epsilon(1e-10));
}
