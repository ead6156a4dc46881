#include "runcase.hpp"

#include "divcol/errors.hpp"
#include "divcol/verify.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

namespace divcol::cli {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

NewtonSettings newton_settings(const RunConfig& cfg) {
    NewtonSettings s;
    s.abs_tol = cfg.newton_abs_tol;
    s.rel_tol = cfg.newton_rel_tol;
    s.max_iters = cfg.newton_max_iters;
    return s;
}

ordered_json newton_json(const SolveReport& r) {
    ordered_json j;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["final_residual"] = r.residual_history.empty() ? 0.0 : r.residual_history.back();
    j["residual_history"] = r.residual_history;
    j["linear_backward_error"] = r.linear.backward_error;
    j["linear_factor_nonzeros"] = r.linear.factor_nonzeros;
    return j;
}

ordered_json errors_json(const ErrorReport& e) {
    ordered_json j;
    j["velocity_l2"] = e.velocity.l2;
    j["velocity_h1"] = e.velocity.h1;
    j["pressure_l2"] = e.pressure.l2;
    j["pressure_h1"] = e.pressure.h1;
    if (e.has_vorticity) {
        j["vorticity_l2"] = e.vorticity.l2;
        j["vorticity_h1"] = e.vorticity.h1;
    }
    return j;
}

ordered_json rates_json(const RateReport& r) {
    ordered_json j;
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v)
            j[key] = *v;
        else
            j[key] = nullptr; // exactly representable: rate undefined
    };
    put("velocity_l2", r.velocity_l2);
    put("velocity_h1", r.velocity_h1);
    put("pressure_l2", r.pressure_l2);
    put("pressure_h1", r.pressure_h1);
    put("vorticity_l2", r.vorticity_l2);
    put("vorticity_h1", r.vorticity_h1);
    return j;
}

Formulation formulation_of(const RunConfig& cfg) {
    return cfg.formulation == "vp" ? Formulation::VP : Formulation::VVP;
}

void write_profiles_2d(const fs::path& dir, const ComplexSpaces2D& spaces,
                       const DiscreteSolution2D& sol, int n) {
    std::ofstream out(dir / "profiles.csv");
    out << "component,coord,value\n";
    out.precision(17);
    for (const auto& p : centerline_profile(spaces, sol, ProfileLine::VerticalUx, n))
        out << "ux_vertical," << p.coord << ',' << p.value << '\n';
    for (const auto& p : centerline_profile(spaces, sol, ProfileLine::HorizontalUy, n))
        out << "uy_horizontal," << p.coord << ',' << p.value << '\n';
}

void write_profiles_3d(const fs::path& dir, const ComplexSpaces3D& spaces,
                       const DiscreteSolution3D& sol, int n) {
    std::ofstream out(dir / "profiles.csv");
    out << "component,coord,value\n";
    out.precision(17);
    for (const auto& p : centerline_profile(spaces, sol, ProfileLine::VerticalUx, n))
        out << "ux_vertical," << p.coord << ',' << p.value << '\n';
    for (const auto& p : centerline_profile(spaces, sol, ProfileLine::HorizontalUy, n))
        out << "uy_horizontal," << p.coord << ',' << p.value << '\n';
}

void write_fields_2d(const fs::path& dir, const ComplexSpaces2D& spaces,
                     const DiscreteSolution2D& sol, bool has_w, const GeometryMap2D* map, int n) {
    std::ofstream out(dir / "field_samples.csv");
    out << "x,y,ux,uy,p";
    if (has_w)
        out << ",omega";
    out << ",psi\n";
    out.precision(17);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double xi = static_cast<double>(i) / (n - 1);
            const double eta = static_cast<double>(j) / (n - 1);
            const std::array<double, 2> pt{xi, eta};
            double ux = eval_field(spaces.vel_x, sol.ux, pt, 0).value;
            double uy = eval_field(spaces.vel_y, sol.uy, pt, 0).value;
            double p = eval_field(spaces.pres, sol.p, pt, 0).value;
            double x = xi, y = eta;
            if (map) {
                const MapJet m = map->jet(xi, eta);
                const auto u = pushforward_velocity(m, {ux, uy});
                ux = u[0];
                uy = u[1];
                p = pushforward_pressure(m, p);
                x = m.x;
                y = m.y;
            }
            out << x << ',' << y << ',' << ux << ',' << uy << ',' << p;
            if (has_w)
                out << ',' << eval_field(spaces.psi, sol.w, pt, 0).value;
            out << ',' << streamfunction_at(spaces, sol.ux, xi, eta);
            out << '\n';
        }
}

void write_fields_3d(const fs::path& dir, const ComplexSpaces3D& spaces,
                     const DiscreteSolution3D& sol, bool has_w, int n) {
    std::ofstream out(dir / "field_samples.csv");
    out << "x,y,z,ux,uy,uz,p";
    if (has_w)
        out << ",wx,wy,wz";
    out << '\n';
    out.precision(17);
    // mid-plane z = 0.5 slice plus the two centerlines' plane
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const std::array<double, 3> pt{static_cast<double>(i) / (n - 1),
                                           static_cast<double>(j) / (n - 1), 0.5};
            out << pt[0] << ',' << pt[1] << ',' << pt[2] << ','
                << eval_field(spaces.vel[0], sol.ux, pt, 0).value << ','
                << eval_field(spaces.vel[1], sol.uy, pt, 0).value << ','
                << eval_field(spaces.vel[2], sol.uz, pt, 0).value << ','
                << eval_field(spaces.pres, sol.p, pt, 0).value;
            if (has_w)
                out << ',' << eval_field(spaces.omega[0], sol.wx, pt, 0).value << ','
                    << eval_field(spaces.omega[1], sol.wy, pt, 0).value << ','
                    << eval_field(spaces.omega[2], sol.wz, pt, 0).value;
            out << '\n';
        }
}

// run several study points on a small worker pool, preserving point order
template <class Fn>
void parallel_for(int count, int workers, Fn&& fn) {
    if (workers <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(count);
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(workers, count); ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

struct VortexPoint {
    ErrorReport errors;
    SolveReport report;
    double div_max = 0.0;
};

VortexPoint run_vortex2d_point(const RunConfig& cfg, int mesh, double sigma, double re) {
    const ManufacturedCase2D mc = vortex_2d(1.0 / re, sigma);
    const Formulation f = formulation_of(cfg);
    CaseDefinition2D c = make_vortex_case_2d(mc, f, cfg.kprime, mesh, cfg.penalty);
    c.stokes_only = cfg.stokes;
    const SolveOutcome2D out = solve_case_2d(c, newton_settings(cfg));
    VortexPoint p;
    p.errors = error_norms_2d(c.spaces, out.solution, f,
                              f == Formulation::VVP && !cfg.stokes, mc.exact);
    p.report = out.report;
    p.div_max = divergence_max(c.spaces, out.solution, 1000);
    return p;
}

VortexPoint run_vortex3d_point(const RunConfig& cfg, int mesh, double re) {
    const ManufacturedCase3D mc = filament_3d(1.0 / re);
    const Formulation f = formulation_of(cfg);
    CaseDefinition3D c = make_vortex_case_3d(mc, f, cfg.kprime, mesh, cfg.penalty);
    c.stokes_only = cfg.stokes;
    const SolveOutcome3D out = solve_case_3d(c, newton_settings(cfg));
    VortexPoint p;
    p.errors = error_norms_3d(c.spaces, out.solution, f,
                              f == Formulation::VVP && !cfg.stokes, mc.exact);
    p.report = out.report;
    p.div_max = divergence_max(c.spaces, out.solution, 1000);
    return p;
}

std::vector<double> cavity_ladder(const RunConfig& cfg, double re) {
    if (!cfg.ladder.empty()) {
        if (std::abs(cfg.ladder.back() - re) > 1e-12)
            throw InvalidInput("ladder must end at the target Reynolds number");
        return cfg.ladder;
    }
    return re > 400.0 ? default_ladder(re) : std::vector<double>{re};
}

ordered_json ghia_rms_json(const RunConfig& cfg, const ComplexSpaces2D& spaces,
                           const DiscreteSolution2D& sol, double re) {
    ordered_json j;
    const int re_i = static_cast<int>(std::lround(re));
    const fs::path file = fs::path(*cfg.data_dir) / ("ghia_re" + std::to_string(re_i) + ".csv");
    if (!fs::exists(file))
        return j;
    const auto rows = load_reference_profiles(file.string());
    double su = 0, sv = 0;
    int nu_ = 0, nv = 0;
    for (const auto& r : rows) {
        if (std::abs(r.re - re) > 1e-9)
            continue;
        if (r.component == "u") {
            const double v =
                eval_field(spaces.vel_x, sol.ux, std::array<double, 2>{0.5, r.coord}, 0).value;
            su += (v - r.value) * (v - r.value);
            ++nu_;
        } else if (r.component == "v") {
            const double v =
                eval_field(spaces.vel_y, sol.uy, std::array<double, 2>{r.coord, 0.5}, 0).value;
            sv += (v - r.value) * (v - r.value);
            ++nv;
        }
    }
    if (nu_ > 0)
        j["u_centerline"] = std::sqrt(su / nu_);
    if (nv > 0)
        j["v_centerline"] = std::sqrt(sv / nv);
    return j;
}

} // namespace

void run(const RunConfig& cfg) {
    const fs::path dir = cfg.out_dir;
    fs::create_directories(dir);

    ordered_json report;
    report["schema_version"] = 1;
    report["case"] = case_name(cfg.case_kind);
    report["formulation"] = cfg.formulation;
    report["kprime"] = cfg.kprime;
    report["mesh"] = cfg.mesh;
    report["stretched"] = cfg.stretched;
    report["re"] = cfg.reynolds();
    report["nu"] = cfg.viscosity();
    report["sigma"] = cfg.sigma;
    report["penalty_constant"] = cfg.penalty > 0.0 ? cfg.penalty : default_penalty(cfg.kprime);
    report["stokes"] = cfg.stokes;

    switch (cfg.case_kind) {
    case CaseKind::Vortex2D: {
        if (cfg.study == StudyKind::Convergence) {
            std::vector<ErrorReport> errs(cfg.meshes.size());
            std::vector<SolveReport> reps(cfg.meshes.size());
            parallel_for(static_cast<int>(cfg.meshes.size()), cfg.workers, [&](int i) {
                VortexPoint p = run_vortex2d_point(cfg, cfg.meshes[i], cfg.sigma, cfg.reynolds());
                errs[i] = p.errors;
                reps[i] = p.report;
            });
            ordered_json points = ordered_json::array();
            for (std::size_t i = 0; i < errs.size(); ++i) {
                ordered_json pt;
                pt["mesh"] = cfg.meshes[i];
                pt["errors"] = errors_json(errs[i]);
                pt["newton"] = newton_json(reps[i]);
                points.push_back(pt);
            }
            report["study"] = "convergence";
            report["points"] = points;
            report["rates"] = rates_json(convergence_rates(errs));
        } else if (cfg.study == StudyKind::Robustness) {
            const bool by_sigma = !cfg.sigmas.empty();
            const std::vector<double>& values = by_sigma ? cfg.sigmas : cfg.res;
            std::vector<ErrorReport> errs(values.size());
            parallel_for(static_cast<int>(values.size()), cfg.workers, [&](int i) {
                const double sigma = by_sigma ? values[i] : cfg.sigma;
                const double re = by_sigma ? cfg.reynolds() : values[i];
                errs[i] = run_vortex2d_point(cfg, cfg.mesh, sigma, re).errors;
            });
            ordered_json points = ordered_json::array();
            bool monotone = true;
            for (std::size_t i = 0; i < values.size(); ++i) {
                ordered_json pt;
                pt[by_sigma ? "sigma" : "re"] = values[i];
                pt["errors"] = errors_json(errs[i]);
                points.push_back(pt);
                if (i > 0 && errs[i].velocity.l2 < errs[i - 1].velocity.l2 * (1.0 - 1e-9))
                    monotone = false;
            }
            report["study"] = "robustness";
            report["sweep"] = by_sigma ? "sigma" : "re";
            report["points"] = points;
            report["velocity_error_nondecreasing"] = monotone;
        } else {
            const ManufacturedCase2D mc = vortex_2d(cfg.viscosity(), cfg.sigma);
            const Formulation f = formulation_of(cfg);
            CaseDefinition2D c = make_vortex_case_2d(mc, f, cfg.kprime, cfg.mesh, cfg.penalty);
            c.stokes_only = cfg.stokes;
            const SolveOutcome2D out = solve_case_2d(c, newton_settings(cfg));
            report["study"] = "none";
            report["newton"] = newton_json(out.report);
            report["divergence_max"] = divergence_max(c.spaces, out.solution, 1000);
            report["errors"] = errors_json(error_norms_2d(
                c.spaces, out.solution, f, f == Formulation::VVP && !cfg.stokes, mc.exact));
            write_profiles_2d(dir, c.spaces, out.solution, cfg.profile_samples);
            write_fields_2d(dir, c.spaces, out.solution, f == Formulation::VVP, nullptr,
                            cfg.field_samples);
        }
        break;
    }
    case CaseKind::Vortex3D: {
        if (cfg.study == StudyKind::Convergence) {
            std::vector<ErrorReport> errs(cfg.meshes.size());
            std::vector<SolveReport> reps(cfg.meshes.size());
            parallel_for(static_cast<int>(cfg.meshes.size()), cfg.workers, [&](int i) {
                VortexPoint p = run_vortex3d_point(cfg, cfg.meshes[i], cfg.reynolds());
                errs[i] = p.errors;
                reps[i] = p.report;
            });
            ordered_json points = ordered_json::array();
            for (std::size_t i = 0; i < errs.size(); ++i) {
                ordered_json pt;
                pt["mesh"] = cfg.meshes[i];
                pt["errors"] = errors_json(errs[i]);
                pt["newton"] = newton_json(reps[i]);
                points.push_back(pt);
            }
            report["study"] = "convergence";
            report["points"] = points;
            report["rates"] = rates_json(convergence_rates(errs));
        } else {
            const ManufacturedCase3D mc = filament_3d(cfg.viscosity());
            const Formulation f = formulation_of(cfg);
            CaseDefinition3D c = make_vortex_case_3d(mc, f, cfg.kprime, cfg.mesh, cfg.penalty);
            c.stokes_only = cfg.stokes;
            const SolveOutcome3D out = solve_case_3d(c, newton_settings(cfg));
            report["study"] = "none";
            report["newton"] = newton_json(out.report);
            report["divergence_max"] = divergence_max(c.spaces, out.solution, 1000);
            report["errors"] = errors_json(error_norms_3d(
                c.spaces, out.solution, f, f == Formulation::VVP && !cfg.stokes, mc.exact));
            write_profiles_3d(dir, c.spaces, out.solution, cfg.profile_samples);
            write_fields_3d(dir, c.spaces, out.solution, f == Formulation::VVP, cfg.field_samples);
        }
        break;
    }
    case CaseKind::Cavity2D: {
        const double re = cfg.reynolds();
        const Formulation f = formulation_of(cfg);
        const std::vector<double> ladder = cavity_ladder(cfg, re);
        auto family = [&](double r) {
            CaseDefinition2D c = make_cavity_case_2d(r, f, cfg.kprime, cfg.mesh, cfg.stretched,
                                                     cfg.penalty);
            c.stokes_only = cfg.stokes;
            return c;
        };
        const SolveOutcome2D out = solve_case_2d_continuation(family, ladder, newton_settings(cfg));
        const CaseDefinition2D c = family(re);
        report["study"] = "none";
        report["ladder"] = ladder;
        report["newton"] = newton_json(out.report);
        report["divergence_max"] = divergence_max(c.spaces, out.solution, 1000);
        const CavityExtrema e = velocity_extrema(c.spaces, out.solution);
        ordered_json ej;
        ej["ux_min_vertical"] = e.ux_min_vertical;
        ej["uy_max_horizontal"] = e.uy_max_horizontal;
        ej["uy_min_horizontal"] = e.uy_min_horizontal;
        report["extrema"] = ej;
        if (cfg.data_dir) {
            const ordered_json g = ghia_rms_json(cfg, c.spaces, out.solution, re);
            if (!g.empty())
                report["ghia_rms"] = g;
        }
        write_profiles_2d(dir, c.spaces, out.solution, cfg.profile_samples);
        write_fields_2d(dir, c.spaces, out.solution, f == Formulation::VVP, nullptr,
                        cfg.field_samples);
        break;
    }
    case CaseKind::Cavity3D: {
        const double re = cfg.reynolds();
        const Formulation f = formulation_of(cfg);
        const std::vector<double> ladder = cavity_ladder(cfg, re);
        auto family = [&](double r) {
            CaseDefinition3D c = make_cavity_case_3d(r, f, cfg.kprime, cfg.mesh, cfg.stretched,
                                                     cfg.penalty);
            c.stokes_only = cfg.stokes;
            return c;
        };
        const SolveOutcome3D out = solve_case_3d_continuation(family, ladder, newton_settings(cfg));
        const CaseDefinition3D c = family(re);
        report["study"] = "none";
        report["ladder"] = ladder;
        report["newton"] = newton_json(out.report);
        report["divergence_max"] = divergence_max(c.spaces, out.solution, 1000);
        write_profiles_3d(dir, c.spaces, out.solution, cfg.profile_samples);
        write_fields_3d(dir, c.spaces, out.solution, f == Formulation::VVP, cfg.field_samples);
        break;
    }
    case CaseKind::Couette: {
        if (cfg.study == StudyKind::Convergence) {
            std::vector<ErrorReport> errs(cfg.meshes.size());
            parallel_for(static_cast<int>(cfg.meshes.size()), cfg.workers, [&](int i) {
                const CouetteCase cc =
                    couette_case(cfg.r_in, cfg.r_out, cfg.u_wall, cfg.kprime, cfg.meshes[i]);
                const SolveOutcomeMapped out = solve_mapped_case(cc.def, newton_settings(cfg));
                Exact2D exact;
                exact.velocity = cc.velocity;
                exact.velocity_grad = cc.velocity_grad;
                exact.pressure = [](double, double) { return 0.0; };
                exact.pressure_grad = [](double, double) { return std::array<double, 2>{0, 0}; };
                exact.vorticity = [w = cc.vorticity_exact](double, double) { return w; };
                exact.vorticity_grad = [](double, double) { return std::array<double, 2>{0, 0}; };
                errs[i] = error_norms_2d(cc.def.spaces, out.solution, Formulation::VVP, false,
                                         exact, &cc.def.map);
            });
            ordered_json points = ordered_json::array();
            for (std::size_t i = 0; i < errs.size(); ++i) {
                ordered_json pt;
                pt["mesh"] = cfg.meshes[i];
                pt["errors"] = errors_json(errs[i]);
                points.push_back(pt);
            }
            report["study"] = "convergence";
            report["points"] = points;
            report["rates"] = rates_json(convergence_rates(errs));
        } else {
            const CouetteCase cc =
                couette_case(cfg.r_in, cfg.r_out, cfg.u_wall, cfg.kprime, cfg.mesh);
            const SolveOutcomeMapped out = solve_mapped_case(cc.def, newton_settings(cfg));
            report["study"] = "none";
            report["newton"] = newton_json(out.report);
            report["divergence_max"] = divergence_max(cc.def.spaces, out.solution, 1000);
            double werr = 0.0;
            for (int i = 0; i < 32; ++i)
                for (int j = 0; j < 32; ++j) {
                    const std::array<double, 2> pt{i / 31.0, j / 31.0};
                    const double w = eval_field(cc.def.spaces.psi, out.solution.w, pt, 0).value;
                    werr = std::max(werr, std::abs(w - cc.vorticity_exact));
                }
            report["omega_const_error"] = werr;
            write_profiles_2d(dir, cc.def.spaces, out.solution, cfg.profile_samples);
            write_fields_2d(dir, cc.def.spaces, out.solution, true, &cc.def.map,
                            cfg.field_samples);
        }
        break;
    }
    case CaseKind::Wavy: {
        const MappedStokesCase wc =
            wavy_cavity_case(cfg.map_a, cfg.map_b, cfg.map_c, cfg.kprime, cfg.mesh);
        const SolveOutcomeMapped out = solve_mapped_case(wc, newton_settings(cfg));
        report["study"] = "none";
        report["map_params"] = {{"a", cfg.map_a}, {"b", cfg.map_b}, {"c", cfg.map_c}};
        report["newton"] = newton_json(out.report);
        report["divergence_max"] = divergence_max(wc.spaces, out.solution, 1000);
        // physical u_y along the vertical centerline (symmetric presets give ~0)
        double uy_mid = 0.0, umax = 0.0;
        for (int j = 0; j <= 64; ++j) {
            const std::array<double, 2> pt{0.5, j / 64.0};
            const MapJet m = wc.map.jet(pt[0], pt[1]);
            const auto u = pushforward_velocity(
                m, {eval_field(wc.spaces.vel_x, out.solution.ux, pt, 0).value,
                    eval_field(wc.spaces.vel_y, out.solution.uy, pt, 0).value});
            uy_mid = std::max(uy_mid, std::abs(u[1]));
        }
        for (int j = 0; j <= 32; ++j)
            for (int i = 0; i <= 32; ++i) {
                const std::array<double, 2> pt{i / 32.0, j / 32.0};
                const MapJet m = wc.map.jet(pt[0], pt[1]);
                const auto u = pushforward_velocity(
                    m, {eval_field(wc.spaces.vel_x, out.solution.ux, pt, 0).value,
                        eval_field(wc.spaces.vel_y, out.solution.uy, pt, 0).value});
                umax = std::max({umax, std::abs(u[0]), std::abs(u[1])});
            }
        report["uy_centerline_max"] = uy_mid;
        report["velocity_max"] = umax;
        write_profiles_2d(dir, wc.spaces, out.solution, cfg.profile_samples);
        write_fields_2d(dir, wc.spaces, out.solution, true, &wc.map, cfg.field_samples);
        break;
    }
    }

    report["timestamp"] = iso_timestamp();
    std::ofstream out(dir / "report.json");
    out << report.dump(2) << '\n';
}

} // namespace divcol::cli
