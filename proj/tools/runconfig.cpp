#include "runconfig.hpp"

#include "divcol/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace divcol::cli {

namespace {

CaseKind parse_case(const std::string& v) {
    if (v == "vortex2d")
        return CaseKind::Vortex2D;
    if (v == "vortex3d")
        return CaseKind::Vortex3D;
    if (v == "cavity2d")
        return CaseKind::Cavity2D;
    if (v == "cavity3d")
        return CaseKind::Cavity3D;
    if (v == "couette")
        return CaseKind::Couette;
    if (v == "wavy")
        return CaseKind::Wavy;
    throw InvalidInput("unknown case '" + v + "'");
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw InvalidInput("key '" + key + "': expected a boolean, got '" + v + "'");
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw InvalidInput("key '" + key + "': expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int i = std::stoi(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw InvalidInput("key '" + key + "': expected an integer, got '" + v + "'");
    }
}

template <class T, class F>
std::vector<T> parse_list(const std::string& key, const std::string& v, F&& one) {
    std::vector<T> out;
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(one(key, item));
    if (out.empty())
        throw InvalidInput("key '" + key + "': empty list");
    return out;
}

struct Seen {
    bool re = false, nu = false, sigmas = false, res = false, case_set = false;
};

void apply(RunConfig& c, Seen& seen, const std::string& key, const std::string& value) {
    if (key == "case") {
        c.case_kind = parse_case(value);
        seen.case_set = true;
    } else if (key == "formulation") {
        if (value != "vp" && value != "vvp")
            throw InvalidInput("key 'formulation': expected vp or vvp, got '" + value + "'");
        c.formulation = value;
    } else if (key == "kprime") {
        c.kprime = parse_int(key, value);
    } else if (key == "mesh") {
        c.mesh = parse_int(key, value);
    } else if (key == "stretched") {
        c.stretched = parse_bool(key, value);
    } else if (key == "re") {
        c.re = parse_double(key, value);
        seen.re = true;
    } else if (key == "nu") {
        c.nu = parse_double(key, value);
        seen.nu = true;
    } else if (key == "sigma") {
        c.sigma = parse_double(key, value);
    } else if (key == "penalty") {
        c.penalty = parse_double(key, value);
    } else if (key == "stokes") {
        c.stokes = parse_bool(key, value);
    } else if (key == "newton_abs_tol") {
        c.newton_abs_tol = parse_double(key, value);
    } else if (key == "newton_rel_tol") {
        c.newton_rel_tol = parse_double(key, value);
    } else if (key == "newton_max_iters") {
        c.newton_max_iters = parse_int(key, value);
    } else if (key == "ladder") {
        c.ladder = parse_list<double>(key, value, parse_double);
    } else if (key == "study") {
        if (value == "convergence")
            c.study = StudyKind::Convergence;
        else if (value == "robustness")
            c.study = StudyKind::Robustness;
        else if (value == "none")
            c.study = StudyKind::None;
        else
            throw InvalidInput("key 'study': expected convergence, robustness or none");
    } else if (key == "meshes") {
        c.meshes = parse_list<int>(key, value, parse_int);
    } else if (key == "sigmas") {
        c.sigmas = parse_list<double>(key, value, parse_double);
        seen.sigmas = true;
    } else if (key == "res") {
        c.res = parse_list<double>(key, value, parse_double);
        seen.res = true;
    } else if (key == "r_in") {
        c.r_in = parse_double(key, value);
    } else if (key == "r_out") {
        c.r_out = parse_double(key, value);
    } else if (key == "u_wall") {
        c.u_wall = parse_double(key, value);
    } else if (key == "map_a") {
        c.map_a = parse_double(key, value);
    } else if (key == "map_b") {
        c.map_b = parse_double(key, value);
    } else if (key == "map_c") {
        c.map_c = parse_double(key, value);
    } else if (key == "map") {
        if (value != "identity" && value != "polar" && value != "wavy")
            throw InvalidInput("key 'map': expected identity, polar or wavy");
        c.map_name = value;
    } else if (key == "out") {
        c.out_dir = value;
    } else if (key == "field_samples") {
        c.field_samples = parse_int(key, value);
    } else if (key == "profile_samples") {
        c.profile_samples = parse_int(key, value);
    } else if (key == "data_dir") {
        c.data_dir = value;
    } else if (key == "workers") {
        c.workers = parse_int(key, value);
    } else {
        throw InvalidInput("unknown configuration key '" + key + "'");
    }
}

void validate(const RunConfig& c, const Seen& seen) {
    if (!seen.case_set)
        throw InvalidInput("missing required key 'case'");
    if (seen.re && seen.nu)
        throw InvalidInput("'re' and 'nu' are mutually exclusive");
    if (c.kprime < 1)
        throw InvalidInput("kprime must be >= 1 (degree-0 collocation spaces are unsupported)");
    if (c.formulation == "vp" && c.kprime < 2)
        throw InvalidInput("the vp formulation needs kprime >= 2");
    if (c.mesh < 2)
        throw InvalidInput("mesh must be >= 2");
    if (c.newton_max_iters < 1)
        throw InvalidInput("newton_max_iters must be >= 1");
    if (c.workers < 1)
        throw InvalidInput("workers must be >= 1");
    if (c.field_samples < 2 || c.profile_samples < 2)
        throw InvalidInput("sample counts must be >= 2");

    const bool mapped = c.case_kind == CaseKind::Couette || c.case_kind == CaseKind::Wavy;
    if (mapped) {
        if (c.formulation != "vvp")
            throw InvalidInput("mapped cases require formulation=vvp");
        if (c.case_kind == CaseKind::Couette && !(0.0 < c.r_in && c.r_in < c.r_out))
            throw InvalidInput("couette requires 0 < r_in < r_out");
    }
    if (c.map_name) {
        const std::string expected = c.case_kind == CaseKind::Couette ? "polar"
                                     : c.case_kind == CaseKind::Wavy  ? "wavy"
                                                                      : "identity";
        if (*c.map_name != expected)
            throw InvalidInput("case '" + case_name(c.case_kind) + "' requires map=" + expected);
    }
    if (c.study == StudyKind::Convergence && c.meshes.empty())
        throw InvalidInput("study=convergence requires 'meshes'");
    if (c.study == StudyKind::Robustness) {
        if (seen.sigmas == seen.res)
            throw InvalidInput("study=robustness requires exactly one of 'sigmas' or 'res'");
        const bool manufactured =
            c.case_kind == CaseKind::Vortex2D || c.case_kind == CaseKind::Vortex3D;
        if (!manufactured)
            throw InvalidInput("robustness studies run on manufactured cases only");
    }
    for (std::size_t i = 1; i < c.meshes.size(); ++i)
        if (c.meshes[i] != 2 * c.meshes[i - 1])
            throw InvalidInput("'meshes' must halve the mesh size (each entry twice the previous)");
    if ((seen.re && *c.re <= 0.0) || (seen.nu && *c.nu <= 0.0))
        throw InvalidInput("re/nu must be positive");
}

} // namespace

double RunConfig::reynolds() const {
    if (re)
        return *re;
    if (nu)
        return 1.0 / *nu;
    switch (case_kind) {
    case CaseKind::Cavity2D:
    case CaseKind::Cavity3D:
        return 100.0;
    default:
        return 1.0;
    }
}

double RunConfig::viscosity() const { return 1.0 / reynolds(); }

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
    RunConfig c;
    Seen seen;

    std::ifstream in(path);
    if (!in)
        throw InvalidInput("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        // trim
        auto notspace = [](unsigned char ch) { return !std::isspace(ch); };
        line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
        line.erase(std::find_if(line.rbegin(), line.rend(), notspace).base(), line.end());
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(), key.end());
        value.erase(value.begin(), std::find_if(value.begin(), value.end(), notspace));
        apply(c, seen, key, value);
    }

    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw InvalidInput("override '" + ov + "': expected key=value");
        apply(c, seen, ov.substr(0, eq), ov.substr(eq + 1)); // flag overrides file value
    }

    if (const char* w = std::getenv("DIVCOL_WORKERS"))
        c.workers = std::max(1, std::atoi(w));
    validate(c, seen);
    return c;
}

RunConfig parse_config(const std::vector<std::string>& overrides) {
    RunConfig c;
    Seen seen;
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw InvalidInput("override '" + ov + "': expected key=value");
        apply(c, seen, ov.substr(0, eq), ov.substr(eq + 1));
    }
    if (const char* w = std::getenv("DIVCOL_WORKERS"))
        c.workers = std::max(1, std::atoi(w));
    validate(c, seen);
    return c;
}

std::string case_name(CaseKind k) {
    switch (k) {
    case CaseKind::Vortex2D:
        return "vortex2d";
    case CaseKind::Vortex3D:
        return "vortex3d";
    case CaseKind::Cavity2D:
        return "cavity2d";
    case CaseKind::Cavity3D:
        return "cavity3d";
    case CaseKind::Couette:
        return "couette";
    case CaseKind::Wavy:
        return "wavy";
    }
    return "?";
}

} // namespace divcol::cli
