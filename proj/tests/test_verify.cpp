#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "divcol/errors.hpp"
#include "divcol/quadrature.hpp"
#include "divcol/verify.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

using namespace divcol;

TEST_CASE("vortex manufactured fields match the symbolic oracle") {
    const ManufacturedCase2D mc = vortex_2d(0.1, 3.0);
    const double x = 0.37, y = 0.71;

    const auto u = mc.exact.velocity(x, y);
    CHECK(u[0] == doctest::Approx(-0.0136053318133016183).epsilon(1e-13));
    CHECK(u[1] == doctest::Approx(-0.0107744862848165241).epsilon(1e-13));
    CHECK(mc.exact.velocity(0.5, 0.5)[0] == doctest::Approx(0.0));
    CHECK(mc.exact.velocity(0.5, 0.5)[1] ==
          doctest::Approx(-0.00644031746367237557).epsilon(1e-13));

    const auto du = mc.exact.velocity_grad(x, y);
    CHECK(du[0] == doctest::Approx(-0.0439561363732194282).epsilon(1e-12));
    CHECK(du[1] == doctest::Approx(-0.0370347962354726166).epsilon(1e-12));
    CHECK(du[2] == doctest::Approx(0.0307152465272710486).epsilon(1e-12));
    CHECK(du[3] == doctest::Approx(0.0439561363732194282).epsilon(1e-12));

    // sigma scales the pressure
    CHECK(mc.exact.pressure(x, y) == doctest::Approx(3.0 * 0.0340550964577594719).epsilon(1e-12));
    const auto dp = mc.exact.pressure_grad(x, y);
    CHECK(dp[0] == doctest::Approx(3.0 * -0.225077129574437024).epsilon(1e-12));
    CHECK(dp[1] == doctest::Approx(3.0 * 0.0145554923980665492).epsilon(1e-12));

    CHECK(mc.exact.vorticity(x, y) == doctest::Approx(0.0677500427627436652).epsilon(1e-12));
    const auto dw = mc.exact.vorticity_grad(x, y);
    CHECK(dw[0] == doctest::Approx(0.432280848582029631).epsilon(1e-12));
    CHECK(dw[1] == doctest::Approx(-0.521771723956859594).epsilon(1e-12));

    const auto f = mc.forcing_vp(x, y);
    CHECK(f[0] == doctest::Approx(-0.726411492394308570).epsilon(1e-12));
    CHECK(f[1] == doctest::Approx(-0.000453103573220975879).epsilon(1e-9));
}

TEST_CASE("vortex invariants: solenoidal, boundary zero, forcing consistency") {
    const ManufacturedCase2D mc = vortex_2d(0.25, 10.0);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const double x = unit(rng), y = unit(rng);
        const auto du = mc.exact.velocity_grad(x, y);
        CHECK(std::abs(du[0] + du[3]) <= 1e-10); // div u = 0

        // both forcing conventions describe the same physical problem
        const auto fvp = mc.forcing_vp(x, y);
        const auto fvvp = mc.forcing_vvp(x, y);
        CHECK(std::abs(fvp[0] - fvvp[0]) <= 1e-10);
        CHECK(std::abs(fvp[1] - fvvp[1]) <= 1e-10);
    }
    for (double t : {0.0, 0.3, 0.62, 1.0}) {
        for (auto pt : {std::array<double, 2>{t, 0.0}, {t, 1.0}, {0.0, t}, {1.0, t}}) {
            const auto u = mc.exact.velocity(pt[0], pt[1]);
            CHECK(std::abs(u[0]) <= 1e-14);
            CHECK(std::abs(u[1]) <= 1e-14);
        }
    }
}

TEST_CASE("analytic derivatives match finite differences") {
    const ManufacturedCase2D mc = vortex_2d(1.0, 1.0);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unit(0.01, 0.99);
    const double h = 1e-6;
    for (int rep = 0; rep < 100; ++rep) {
        const double x = unit(rng), y = unit(rng);
        const auto du = mc.exact.velocity_grad(x, y);
        const auto uxp = mc.exact.velocity(x + h, y), uxm = mc.exact.velocity(x - h, y);
        const auto uyp = mc.exact.velocity(x, y + h), uym = mc.exact.velocity(x, y - h);
        CHECK(du[0] == doctest::Approx((uxp[0] - uxm[0]) / (2 * h)).epsilon(1e-6));
        CHECK(du[1] == doctest::Approx((uyp[0] - uym[0]) / (2 * h)).epsilon(1e-6));
        CHECK(du[2] == doctest::Approx((uxp[1] - uxm[1]) / (2 * h)).epsilon(1e-6));
        CHECK(du[3] == doctest::Approx((uyp[1] - uym[1]) / (2 * h)).epsilon(1e-6));

        const auto dp = mc.exact.pressure_grad(x, y);
        CHECK(dp[0] == doctest::Approx((mc.exact.pressure(x + h, y) - mc.exact.pressure(x - h, y)) /
                                       (2 * h)).epsilon(1e-6));
        CHECK(dp[1] == doctest::Approx((mc.exact.pressure(x, y + h) - mc.exact.pressure(x, y - h)) /
                                       (2 * h)).epsilon(1e-6));

        const auto dw = mc.exact.vorticity_grad(x, y);
        CHECK(dw[0] == doctest::Approx((mc.exact.vorticity(x + h, y) - mc.exact.vorticity(x - h, y)) /
                                       (2 * h)).epsilon(1e-6));
        CHECK(dw[1] == doctest::Approx((mc.exact.vorticity(x, y + h) - mc.exact.vorticity(x, y - h)) /
                                       (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("filament manufactured fields match the symbolic oracle") {
    const ManufacturedCase3D mc = filament_3d(1.0);
    const double x = 0.3, y = 0.4, z = 0.6;

    const auto u = mc.exact.velocity(x, y, z);
    CHECK(u[0] == doctest::Approx(-0.001016064).epsilon(1e-12));
    CHECK(u[1] == doctest::Approx(0.003483648).epsilon(1e-12));
    CHECK(u[2] == doctest::Approx(0.0011612160).epsilon(1e-12));

    const auto w = mc.exact.vorticity(x, y, z);
    CHECK(w[0] == doctest::Approx(-0.0193536).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(-0.00136512).epsilon(1e-12));
    CHECK(w[2] == doctest::Approx(-0.01429056).epsilon(1e-12));

    CHECK(mc.exact.pressure(x, y, z) == doctest::Approx(0.364136149724462265).epsilon(1e-13));
    CHECK(mc.exact.pressure(0.5, 0.5, 0.123) ==
          doctest::Approx(0.594715265430648914).epsilon(1e-13));
    CHECK(mc.exact.velocity(0.5, 0.5, 0.5)[0] == doctest::Approx(0.0));

    const auto f = mc.forcing_vp(x, y, z);
    CHECK(f[0] == doctest::Approx(1.71039144530301936).epsilon(1e-11));
    CHECK(f[1] == doctest::Approx(0.96445435949066303).epsilon(1e-11));
    CHECK(f[2] == doctest::Approx(0.05778882363654144).epsilon(1e-9));

    // divergence-free by construction; forcing conventions agree; FD check
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unit(0.01, 0.99);
    const double h = 1e-6;
    for (int rep = 0; rep < 100; ++rep) {
        const double a = unit(rng), b = unit(rng), c = unit(rng);
        const auto du = mc.exact.velocity_grad(a, b, c);
        CHECK(std::abs(du[0] + du[4] + du[8]) <= 1e-12);
        const auto fvp = mc.forcing_vp(a, b, c);
        const auto fvvp = mc.forcing_vvp(a, b, c);
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(fvp[i] - fvvp[i]) <= 1e-10);
        if (rep < 20) {
            const auto up = mc.exact.velocity(a + h, b, c), um = mc.exact.velocity(a - h, b, c);
            for (int i = 0; i < 3; ++i)
                CHECK(du[3 * i] == doctest::Approx((up[i] - um[i]) / (2 * h)).epsilon(2e-6));
            const auto wp = mc.exact.vorticity(a, b + h, c), wm = mc.exact.vorticity(a, b - h, c);
            const auto dw = mc.exact.vorticity_grad(a, b, c);
            for (int i = 0; i < 3; ++i)
                CHECK(dw[3 * i + 1] == doctest::Approx((wp[i] - wm[i]) / (2 * h)).epsilon(2e-6));
        }
    }
}

TEST_CASE("error norms: zero field against u = (x, 0) gives 1/sqrt(3)") {
    const ManufacturedCase2D mc = vortex_2d(1.0, 1.0);
    CaseDefinition2D c = make_vortex_case_2d(mc, Formulation::VVP, 2, 4);
    const DofMap dm = build_dof_map(c);
    DiscreteSolution2D s = zero_solution(c, dm);
    for (auto& v : s.ux)
        v = 0.0; // clear the boundary interpolant too

    Exact2D exact;
    exact.velocity = [](double x, double) { return std::array<double, 2>{x, 0.0}; };
    exact.velocity_grad = [](double, double) { return std::array<double, 4>{1, 0, 0, 0}; };
    exact.pressure = [](double, double) { return 0.0; };
    exact.pressure_grad = [](double, double) { return std::array<double, 2>{0, 0}; };

    const ErrorReport rep = error_norms_2d(c.spaces, s, Formulation::VVP, false, exact);
    CHECK(rep.velocity.l2 == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(rep.velocity.h1 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("error norms vanish for an exactly representable solution") {
    // shear flow u = (-y, 0), omega = 1, kinematic p = 0 (VVP total P = y^2/2 - 1/6)
    CaseDefinition2D c;
    c.formulation = Formulation::VVP;
    c.nu = 1.0;
    c.forcing = [](double, double) { return std::array<double, 2>{0, 0}; };
    c.dirichlet = [](double, double y) { return std::array<double, 2>{-y, 0.0}; };
    c.penalty_constant = default_penalty(2);
    std::vector<double> bp{0.0, 0.25, 0.5, 0.75, 1.0};
    c.spaces = build_complex_2d(2, bp, bp);
    const DofMap dm = build_dof_map(c);
    DiscreteSolution2D s = zero_solution(c, dm);
    {
        const auto grid = greville_grid(c.spaces.vel_x);
        std::vector<double> vals(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            vals[i] = -grid[i].x[1];
        s.ux = greville_interpolate(c.spaces.vel_x, grid, vals);
    }
    for (auto& v : s.w)
        v = 1.0;
    {
        const auto grid = greville_grid(c.spaces.pres);
        std::vector<double> vals(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            vals[i] = 0.5 * grid[i].x[1] * grid[i].x[1] - 1.0 / 6.0;
        s.p = greville_interpolate(c.spaces.pres, grid, vals);
    }

    Exact2D exact;
    exact.velocity = [](double, double y) { return std::array<double, 2>{-y, 0.0}; };
    exact.velocity_grad = [](double, double) { return std::array<double, 4>{0, -1, 0, 0}; };
    exact.pressure = [](double, double) { return 0.0; };
    exact.pressure_grad = [](double, double) { return std::array<double, 2>{0, 0}; };
    exact.vorticity = [](double, double) { return 1.0; };
    exact.vorticity_grad = [](double, double) { return std::array<double, 2>{0, 0}; };

    const ErrorReport rep = error_norms_2d(c.spaces, s, Formulation::VVP, true, exact);
    CHECK(rep.velocity.l2 <= 1e-12);
    CHECK(rep.velocity.h1 <= 1e-12);
    CHECK(rep.pressure.l2 <= 1e-12); // mean-aligned kinematic pressure
    CHECK(rep.pressure.h1 <= 1e-12);
    CHECK(rep.vorticity.l2 <= 1e-12);
    CHECK(rep.vorticity.h1 <= 1e-12);
}

TEST_CASE("convergence rates") {
    ErrorReport a, b;
    a.mesh_h = 1.0 / 8;
    b.mesh_h = 1.0 / 16;
    a.velocity.l2 = 1e-2;
    b.velocity.l2 = 2.5e-3;
    a.velocity.h1 = 1.0;
    b.velocity.h1 = 0.5;
    a.pressure.l2 = 1e-16;
    b.pressure.l2 = 1e-16; // representable: undefined
    const std::vector<ErrorReport> reports{a, b};
    const RateReport r = convergence_rates(reports);
    REQUIRE(r.velocity_l2.has_value());
    CHECK(*r.velocity_l2 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(*r.velocity_h1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(r.pressure_l2.has_value());

    ErrorReport c = b;
    c.mesh_h = 1.0 / 24; // not halving
    const std::vector<ErrorReport> bad{a, c};
    CHECK_THROWS_AS(convergence_rates(bad), InvalidInput);
    const std::vector<ErrorReport> single{a};
    CHECK_THROWS_AS(convergence_rates(single), InvalidInput);
}

TEST_CASE("centerline profiles and extrema") {
    CaseDefinition2D c;
    c.formulation = Formulation::VVP;
    c.nu = 1.0;
    c.forcing = [](double, double) { return std::array<double, 2>{0, 0}; };
    c.dirichlet = [](double, double) { return std::array<double, 2>{0, 0}; };
    c.penalty_constant = 15.0;
    std::vector<double> bp{0.0, 0.25, 0.5, 0.75, 1.0};
    c.spaces = build_complex_2d(2, bp, bp);
    const DofMap dm = build_dof_map(c);
    DiscreteSolution2D s = zero_solution(c, dm);

    // representable quadratics with known extrema
    {
        const auto grid = greville_grid(c.spaces.vel_x);
        std::vector<double> vals(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double y = grid[i].x[1];
            vals[i] = -4.0 * (y - 0.3) * (y - 0.3) + 1.0;
        }
        s.ux = greville_interpolate(c.spaces.vel_x, grid, vals);
    }
    {
        const auto grid = greville_grid(c.spaces.vel_y);
        std::vector<double> vals(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double x = grid[i].x[0];
            vals[i] = x * (1.0 - x); // max 0.25 at x = 0.5
        }
        s.uy = greville_interpolate(c.spaces.vel_y, grid, vals);
    }

    const auto prof = centerline_profile(c.spaces, s, ProfileLine::VerticalUx, 33);
    CHECK(prof.size() == 33);
    CHECK(prof.front().coord == 0.0);
    CHECK(prof.back().coord == 1.0);
    for (const auto& p : prof)
        CHECK(p.value ==
              doctest::Approx(-4.0 * (p.coord - 0.3) * (p.coord - 0.3) + 1.0).epsilon(1e-10));

    const CavityExtrema e = velocity_extrema(c.spaces, s);
    CHECK(e.ux_min_vertical == doctest::Approx(-4.0 * 0.49 + 1.0).epsilon(1e-9)); // at y = 1
    CHECK(e.uy_max_horizontal == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(e.uy_min_horizontal == doctest::Approx(0.0).epsilon(1e-9)); // at the walls
}

TEST_CASE("streamfunction recovers a known potential and is path independent") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> d(-1.0, 1.0), unit(0.05, 0.95);
    std::vector<double> bp{0.0, 0.25, 0.5, 0.75, 1.0};
    const ComplexSpaces2D spaces = build_complex_2d(2, bp, bp);

    std::vector<double> psi0(spaces.psi.dim());
    for (auto& v : psi0)
        v = d(rng);
    for (int i = 0; i < spaces.psi.count(0); ++i)
        psi0[i] = 0.0; // zero trace on the bottom
    auto [ux, uy] = rotor_coeffs_2d(spaces, psi0);

    DiscreteSolution2D s;
    s.ux = ux;
    s.uy = uy;

    for (int rep = 0; rep < 50; ++rep) {
        const double x = unit(rng), y = unit(rng);
        const double want = eval_field(spaces.psi, psi0, std::array<double, 2>{x, y}, 0).value;
        CHECK(streamfunction_at(spaces, s.ux, x, y) == doctest::Approx(want).epsilon(1e-10));
    }

    // x-integration route: psi(x, y) = psi(0, y) - int_0^x u_y(t, y) dt,
    // integrated exactly with per-span Gauss quadrature
    auto psi_xroute = [&](double x, double y) {
        double acc = streamfunction_at(spaces, s.ux, 0.0, y);
        std::vector<double> nodes, weights;
        const auto& kv = spaces.vel_y.kv[0];
        for (int span = kv.degree; span < kv.count(); ++span) {
            const double lo = kv.knots[span], hi = std::min(kv.knots[span + 1], x);
            if (hi <= lo)
                continue;
            gauss_on_interval(kv.degree + 1, lo, hi, nodes, weights);
            for (std::size_t g = 0; g < nodes.size(); ++g)
                acc -= weights[g] *
                       eval_field(spaces.vel_y, s.uy, std::array<double, 2>{nodes[g], y}, 0).value;
            if (kv.knots[span + 1] >= x)
                break;
        }
        return acc;
    };
    for (int rep = 0; rep < 10; ++rep) {
        const double x = unit(rng), y = unit(rng);
        CHECK(psi_xroute(x, y) ==
              doctest::Approx(streamfunction_at(spaces, s.ux, x, y)).epsilon(1e-9));
    }

    // zero velocity gives zero psi
    DiscreteSolution2D z;
    z.ux.assign(spaces.vel_x.dim(), 0.0);
    CHECK(streamfunction_at(spaces, z.ux, 0.4, 0.8) == 0.0);
}

TEST_CASE("reference profile CSV round trip and errors") {
    namespace fs = std::filesystem;
    const std::string path = (fs::temp_directory_path() / "divcol_ref_test.csv").string();

    std::vector<ReferenceRow> rows;
    rows.push_back({0.5, -0.2058, 100.0, "u", "ghia1982"});
    rows.push_back({0.9688, -0.05906, 100.0, "v", "ghia1982"});
    write_reference_profiles(path, rows);
    const auto read = load_reference_profiles(path);
    REQUIRE(read.size() == 2);
    CHECK(read[0].coord == 0.5);
    CHECK(read[0].value == -0.2058);
    CHECK(read[0].re == 100.0);
    CHECK(read[0].component == "u");
    CHECK(read[1].source == "ghia1982");

    CHECK_THROWS_AS(load_reference_profiles("/nonexistent/file.csv"), MalformedData);
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        std::fclose(f);
    }
    CHECK_THROWS_AS(load_reference_profiles(path), MalformedData); // empty file
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        std::fputs("coord,value,re,component,source\n1.0,2.0\n", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(load_reference_profiles(path), MalformedData); // short row
    fs::remove(path);
}

TEST_CASE("vortex solve: Newton convergence and solution quality") {
    const ManufacturedCase2D mc = vortex_2d(1.0, 1.0);
    const CaseDefinition2D c = make_vortex_case_2d(mc, Formulation::VVP, 2, 8);
    const SolveOutcome2D out = solve_case_2d(c);
    CHECK(out.report.converged);
    CHECK(out.report.iterations <= 10);

    // gauge multiplier vanishes at convergence
    double scale = 0.0;
    for (double v : out.solution.p)
        scale = std::max(scale, std::abs(v));
    CHECK(std::abs(out.solution.lambda) <= 1e-8 * std::max(1.0, scale));

    const ErrorReport rep =
        error_norms_2d(c.spaces, out.solution, Formulation::VVP, true, mc.exact);
    CHECK(rep.velocity.l2 > 0.0);
    CHECK(rep.velocity.l2 <= 1e-3);
    CHECK(rep.has_vorticity);

    // pointwise divergence-free up to the linear solve
    double umax = 0.0;
    for (double v : out.solution.ux)
        umax = std::max(umax, std::abs(v));
    CHECK(divergence_max(c.spaces, out.solution, 500) <= 1e-9 * std::max(1.0, umax));

    // quadratic tail: once the residual is small, the next step collapses it
    const auto& h = out.report.residual_history;
    for (std::size_t i = 1; i + 1 < h.size(); ++i)
        if (h[i] < 1e-3 && h[i + 1] > 0.0 && h[i] > 1e-12)
            CHECK(h[i + 1] <= std::max(1e4 * 2.2e-16, 1e-4 * h[i]));
}

TEST_CASE("VP and VVP forcings converge to the same velocity") {
    const ManufacturedCase2D mc = vortex_2d(1.0, 1.0);
    const CaseDefinition2D cvp = make_vortex_case_2d(mc, Formulation::VP, 2, 16);
    const CaseDefinition2D cvvp = make_vortex_case_2d(mc, Formulation::VVP, 2, 16);
    const SolveOutcome2D ovp = solve_case_2d(cvp);
    const SolveOutcome2D ovvp = solve_case_2d(cvvp);

    const ErrorReport rvp = error_norms_2d(cvp.spaces, ovp.solution, Formulation::VP, false,
                                           mc.exact);
    const ErrorReport rvvp = error_norms_2d(cvvp.spaces, ovvp.solution, Formulation::VVP, true,
                                            mc.exact);
    // both are within discretization error of the same exact field
    const double scale = std::max(rvp.velocity.l2, rvvp.velocity.l2);
    CHECK(scale <= 1e-4);

    std::mt19937 rng(13);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double diff = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::array<double, 2> p{unit(rng), unit(rng)};
        const double a = eval_field(cvp.spaces.vel_x, ovp.solution.ux, p, 0).value;
        const double b = eval_field(cvvp.spaces.vel_x, ovvp.solution.ux, p, 0).value;
        diff = std::max(diff, std::abs(a - b));
    }
    CHECK(diff <= 20.0 * scale);
}
