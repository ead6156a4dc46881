#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace divcol::cli {

enum class CaseKind { Vortex2D, Vortex3D, Cavity2D, Cavity3D, Couette, Wavy };
enum class StudyKind { None, Convergence, Robustness };

/// One batch run: a benchmark case plus discretization, solver, and study
/// settings. Parsed from a flat key=value file with command-line overrides.
struct RunConfig {
    CaseKind case_kind = CaseKind::Vortex2D;
    std::string formulation = "vvp"; // vp | vvp
    int kprime = 2;
    int mesh = 16;
    bool stretched = false;
    std::optional<double> re;
    std::optional<double> nu;
    double sigma = 1.0;
    double penalty = 0.0; // 0: default 5(k'+1)
    bool stokes = false;

    double newton_abs_tol = 1e-11;
    double newton_rel_tol = 1e-10;
    int newton_max_iters = 25;
    std::vector<double> ladder; // empty: automatic for cavities above Re 400

    StudyKind study = StudyKind::None;
    std::vector<int> meshes;    // convergence study
    std::vector<double> sigmas; // robustness study (pressure scaling)
    std::vector<double> res;    // robustness study (Reynolds)

    // mapped-domain parameters
    double r_in = 1.0, r_out = 2.0, u_wall = 1.0; // couette
    double map_a = 1.0, map_b = 0.75, map_c = 1.0; // wavy
    std::optional<std::string> map_name;           // identity | polar | wavy

    std::string out_dir = ".";
    int field_samples = 33;
    int profile_samples = 101;
    std::optional<std::string> data_dir; // Ghia reference tables, when present
    int workers = 1;

    double reynolds() const; // from re/nu (case-dependent default)
    double viscosity() const;
};

/// Parse a config file (flat key=value lines, '#' comments) and apply
/// key=value overrides on top. Unknown keys are rejected by name.
RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides);

/// Overrides only (no file).
RunConfig parse_config(const std::vector<std::string>& overrides);

std::string case_name(CaseKind k);

} // namespace divcol::cli
