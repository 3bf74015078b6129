#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "halfline/potential.hpp"
#include "halfline/spectrum.hpp"
#include "jsonio.hpp"
#include "tomlread.hpp"

namespace halfline::tools {

enum class Task {
    CheckA,
    CheckB,
    CheckThm3,
    RegionMap,
    Weyl,
    Eigs,
    Resolvent,
    Bounds,
    OracleCompare,
};

const char* task_name(Task t);

// How the right-hand side f of the resolvent tasks is specified.
struct InputFunction {
    enum class Kind { ExpDecay, Bump, Samples };

    Kind kind = Kind::ExpDecay;
    Complex amplitude{1.0, 0.0};
    double rate = 1.0;     // exp-decay: f = amplitude * exp(-rate x)
    double left = 0.0;     // bump support
    double right = 1.0;
    std::string path;      // samples CSV: x,re,im rows

    // Loaded sample data (filled by load(), empty otherwise).
    std::vector<double> xs;
    std::vector<Complex> vs;

    // Reads the samples file; no-op for analytic kinds.
    void load();
    // Evaluator; for samples, a C^1 piecewise-cubic through the data, zero
    // outside the sampled range.
    std::function<Complex(double)> evaluator() const;
};

// Validated run description. Construction performs the whole schema check
// (section/key allowlists, types, per-task requirements); anything wrong
// raises ConfigError with the config file line when one applies. Data files
// referenced by the config are read later, in prepare(), so `validate` stays
// a config-only operation.
struct RunConfig {
    Task task = Task::CheckA;

    // [potential]
    std::string potential_family;
    Complex constant_value{0.0, 0.0};
    double exponent = 0.0;
    double phase = 0.0;
    std::vector<Complex> poly_coeffs;
    std::string potential_path;

    // [boundary]
    BoundaryForm bc;

    // [lambda]
    std::optional<Complex> lambda;

    // [numeric]
    double tol = 1e-8;
    std::optional<double> anchor;
    double x_lo = 0.0;
    std::optional<double> x_max;
    double b_max = 64.0;
    double radius_tol = 1e-8;
    std::vector<double> b_schedule;
    double condition_c = 0.0;
    std::optional<double> eps;    // check-b strengthening
    std::optional<double> kappa;  // sector checks
    std::optional<double> delta;
    std::optional<int> n_grid;

    // [region]
    std::optional<ComplexRect> region;
    int nx = 41;
    int ny = 21;

    // [contour]
    int max_subdivision = 40;

    // [resolvent]
    std::optional<InputFunction> f;

    // [oracle]
    double fd_length = 12.0;
    int fd_n = 4800;
    std::optional<int> fd_count;

    // [output]
    std::string out_dir = "out";

    // Echo of the parsed file for results.json (sections as objects, values
    // as written).
    Json echo;

    // Built by prepare(); unusable before.
    Potential potential;

    // Reads any referenced data files and constructs the potential.
    void prepare();
};

RunConfig parse_run_config(const TomlTable& table);

RunConfig load_run_config(const std::string& path);

}  // namespace halfline::tools
