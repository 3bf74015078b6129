#include "tasks.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "halfline/oracle.hpp"
#include "halfline/version.hpp"
#include "svgplot.hpp"

namespace halfline::tools {
namespace {

namespace fs = std::filesystem;

struct Emitter {
    fs::path dir;
    bool plots = false;
    std::vector<std::string> written;

    std::string file(const std::string& name) {
        written.push_back(name);
        return (dir / name).string();
    }
};

class Csv {
  public:
    Csv(const std::string& path, const std::string& header) : out_(path, std::ios::binary) {
        if (!out_) throw ConfigError("cannot write " + path);
        out_ << header << "\n";
    }
    // Cells come preformatted; an empty string is an empty cell.
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

std::string cell(double v) { return format_double(v); }

// Anchor for a single-lambda task: config override, else the grid onset of
// the decay condition plus the same safety pad the region search uses.
struct Chosen {
    double value = 0.0;
    bool from_config = false;
};

Chosen pick_anchor(const RunConfig& cfg, Complex lambda) {
    if (cfg.anchor) return {*cfg.anchor, true};
    const Potential& pot = cfg.potential;
    const double cap = std::min(pot.x_upper(), std::max(24.0, 2.0 * std::abs(lambda)));
    const auto onset = find_anchor(pot, lambda, cfg.condition_c, cap, 2049);
    if (!onset) {
        throw PreconditionError("no admissible anchor up to x = " + std::to_string(cap) +
                                " for the requested lambda; set anchor explicitly or "
                                "relax condition_c");
    }
    return {*onset + std::max(1.0, 0.05 * *onset), false};
}

// x_max for solution-bearing tasks: config override, else walk int Re p
// forward from the anchor until 90% of the backward-recovery budget the
// solver accepts is used up.
Chosen pick_x_max(const RunConfig& cfg, Complex lambda, double anchor) {
    if (cfg.x_max) return {*cfg.x_max, true};
    const Potential& pot = cfg.potential;
    const double budget = 0.9 * std::log(1e-6 / std::min(cfg.tol, 1e-11));
    const double cap = std::min(pot.x_upper(), anchor + 64.0);
    if (!(cap > anchor)) {
        throw PreconditionError("no room beyond the anchor: x upper bound " +
                                std::to_string(cap));
    }
    const int n = 4096;
    const double h = (cap - anchor) / n;
    double sum = 0.0;
    double prev = eval_p(pot, lambda, anchor).real();
    for (int i = 1; i <= n; ++i) {
        const double x = anchor + i * h;
        const double cur = eval_p(pot, lambda, x).real();
        sum += 0.5 * h * (prev + cur);
        if (sum >= budget) return {x, false};
        prev = cur;
    }
    return {cap, false};
}

void write_results(Emitter& em, const RunConfig& cfg, Json results, Json diagnostics) {
    diagnostics["outputs"] = em.written;  // everything except results.json itself
    Json doc;
    doc["task"] = task_name(cfg.task);
    doc["config_echo"] = cfg.echo;
    doc["results"] = std::move(results);
    doc["diagnostics"] = std::move(diagnostics);
    doc["version"] = kVersion;
    write_json_file(em.file("results.json"), doc);
}

Json optional_number(const std::optional<double>& v) {
    return v ? Json(*v) : Json(nullptr);
}

Json report_json(const ConditionReport& rep) {
    Json j;
    j["holds"] = rep.holds;
    j["c"] = rep.c;
    j["margin"] = optional_number(rep.margin);
    j["first_violation"] = optional_number(rep.first_violation);
    j["x_lo"] = rep.x_lo;
    j["x_hi"] = rep.x_hi;
    j["n_grid"] = rep.n_grid;
    return j;
}

// ---- condition checks ----

int run_checks(const RunConfig& cfg, Emitter& em) {
    const Potential& pot = cfg.potential;
    const double x_hi = cfg.x_max.value_or(std::min(12.0, pot.x_upper()));
    if (!(x_hi > cfg.x_lo)) {
        throw PreconditionError("condition checks need x_max > x_lo");
    }
    const int ng = cfg.n_grid.value_or(2049);

    ConditionReport rep;
    std::function<double(double)> margin_at;
    Json results;
    if (cfg.task == Task::CheckA) {
        rep = check_condition_A(pot, *cfg.lambda, cfg.x_lo, x_hi, cfg.condition_c, ng);
        margin_at = [&](double x) { return rho(pot, *cfg.lambda, x) - cfg.condition_c; };
        results = report_json(rep);
        results["lambda"] = complex_json(*cfg.lambda);
    } else if (cfg.task == Task::CheckB) {
        rep = check_condition_B(pot, *cfg.lambda, cfg.x_lo, x_hi, cfg.condition_c,
                                *cfg.eps, ng);
        const double eps = *cfg.eps;
        margin_at = [&, eps](double x) {
            const Complex p = eval_p(pot, *cfg.lambda, x);
            const double log_deriv = 0.5 * std::abs(pot.dq(x) / (pot.q(x) - *cfg.lambda));
            return p.real() - (0.5 + eps) * log_deriv - cfg.condition_c;
        };
        results = report_json(rep);
        results["lambda"] = complex_json(*cfg.lambda);
        results["eps"] = eps;
    } else {
        rep = check_theorem3(pot, *cfg.kappa, *cfg.delta, cfg.x_lo, x_hi, ng);
        const double kappa = *cfg.kappa;
        const double bound = 4.0 * (*cfg.delta) * std::pow(std::tan(kappa), 1.5) *
                             std::sin(0.5 * kappa);
        margin_at = [&, kappa, bound](double x) {
            const Complex qv = pot.q(x);
            if (qv == Complex(0.0, 0.0) ||
                std::abs(std::arg(qv)) > std::numbers::pi - kappa) {
                throw BranchCutError("q outside the sector");
            }
            return bound - std::abs(pot.dq(x)) / std::pow(std::abs(qv), 1.5);
        };
        results = report_json(rep);
        results["kappa"] = kappa;
        results["delta"] = *cfg.delta;
        results["bound"] = bound;
    }

    // Margin profile on the same grid; rows where the point is outside the
    // branch-valid set carry an empty margin and valid = 0.
    Csv csv(em.file("margins.csv"), "x,margin,valid");
    const double dx = (x_hi - cfg.x_lo) / (ng - 1);
    for (int i = 0; i < ng; ++i) {
        const double x = (i == ng - 1) ? x_hi : cfg.x_lo + i * dx;
        std::string m;
        bool ok = false;
        try {
            const double v = margin_at(x);
            if (std::isfinite(v)) {
                m = cell(v);
                ok = true;
            }
        } catch (const BranchCutError&) {
        }
        csv.row({cell(x), m, ok ? "1" : "0"});
    }

    write_results(em, cfg, results, Json::object());
    if (rep.holds) {
        std::cout << task_name(cfg.task) << ": holds on [" << format_double(rep.x_lo)
                  << ", " << format_double(rep.x_hi) << "], margin "
                  << format_double(rep.margin.value_or(0.0)) << "\n";
        return 0;
    }
    std::cout << task_name(cfg.task) << ": fails";
    if (rep.first_violation) {
        std::cout << " near x = " << format_double(*rep.first_violation);
    }
    std::cout << " on [" << format_double(rep.x_lo) << ", " << format_double(rep.x_hi)
              << "]\n";
    return 3;
}

// ---- membership map ----

int run_region_map(const RunConfig& cfg, Emitter& em) {
    const Potential& pot = cfg.potential;
    const ComplexRect& r = *cfg.region;
    const double corner =
        std::max({std::abs(Complex(r.re_lo, r.im_lo)), std::abs(Complex(r.re_lo, r.im_hi)),
                  std::abs(Complex(r.re_hi, r.im_lo)), std::abs(Complex(r.re_hi, r.im_hi))});
    const double x_max =
        cfg.x_max.value_or(std::min(pot.x_upper(), std::max(24.0, 2.0 * corner)));
    const int ng = cfg.n_grid.value_or(513);

    const RegionMap map = sample_N_region(pot, r.re_lo, r.re_hi, cfg.nx, r.im_lo, r.im_hi,
                                          cfg.ny, cfg.condition_c, x_max, ng);

    Csv csv(em.file("region.csv"), "lambda_re,lambda_im,member,anchor,margin");
    for (const auto& s : map.samples) {
        if (s.member) {
            csv.row({cell(s.lambda.real()), cell(s.lambda.imag()), "1", cell(s.anchor),
                     cell(s.margin)});
        } else {
            csv.row({cell(s.lambda.real()), cell(s.lambda.imag()), "0", "", ""});
        }
    }
    if (em.plots) write_region_svg(em.file("region.svg"), map);

    Json results;
    results["re"] = Json::array({r.re_lo, r.re_hi});
    results["im"] = Json::array({r.im_lo, r.im_hi});
    results["nx"] = map.nx;
    results["ny"] = map.ny;
    results["c"] = cfg.condition_c;
    results["x_max"] = x_max;
    results["n_grid"] = ng;
    results["member_count"] = map.member_count;
    results["sample_count"] = static_cast<int>(map.samples.size());

    write_results(em, cfg, results, Json::object());
    std::cout << "region-map: " << map.member_count << "/" << map.samples.size()
              << " members\n";
    return 0;
}

// ---- single-lambda disk trace and solution ----

int run_weyl(const RunConfig& cfg, Emitter& em) {
    const Potential& pot = cfg.potential;
    const Complex lambda = *cfg.lambda;
    const Chosen anchor = pick_anchor(cfg, lambda);

    const WeylResult wr = weyl_theta(pot, lambda, anchor.value, cfg.radius_tol, cfg.b_max,
                                     cfg.b_schedule, cfg.tol);

    Csv disks(em.file("disks.csv"), "b,center_re,center_im,radius");
    for (const auto& d : wr.disks) {
        disks.row({cell(d.b), cell(d.center.real()), cell(d.center.imag()),
                   cell(d.radius)});
    }
    if (em.plots) write_disk_svg(em.file("disks.svg"), wr.disks);

    Json results;
    results["lambda"] = complex_json(lambda);
    results["anchor"] = wr.anchor;
    results["theta"] = complex_json(wr.theta);
    results["mu"] = complex_json(wr.mu);
    results["converged"] = wr.converged;
    results["final_radius"] = wr.final_radius;
    results["n_disks"] = static_cast<int>(wr.disks.size());

    Json diagnostics;
    diagnostics["anchor_source"] = anchor.from_config ? "config" : "auto";

    int exit_code = wr.converged ? 0 : 2;
    if (wr.converged) {
        // The square-integrable solution behind the converged normalization.
        try {
            const Chosen xm = pick_x_max(cfg, lambda, anchor.value);
            const WeylSolution sol =
                weyl_solution(pot, lambda, anchor.value, xm.value, cfg.tol);
            Csv eta(em.file("eta.csv"), "x,eta_re,eta_im,deta_re,deta_im");
            for (const auto& s : sol.samples()) {
                eta.row({cell(s.x), cell(s.eta.real()), cell(s.eta.imag()),
                         cell(s.deta.real()), cell(s.deta.imag())});
            }
            Json solution;
            solution["x_max"] = sol.x_max;
            solution["eta0"] = complex_json(sol.eta(0.0));
            solution["deta0"] = complex_json(sol.eta_prime(0.0));
            solution["tail_norm"] = sol.tail_norm;
            solution["tail_norm_rho"] = sol.tail_norm_rho;
            solution["tail_deriv_weighted"] = sol.tail_deriv_weighted;
            solution["energy_budget_lhs"] = sol.energy_budget_lhs;
            solution["energy_budget_rhs"] = sol.energy_budget_rhs;
            const auto trace = boundary_limit_trace(sol, pot, lambda);
            solution["h_at_x_max"] = trace.empty() ? 0.0 : trace.back().second;
            results["solution"] = std::move(solution);
            diagnostics["x_max_source"] = xm.from_config ? "config" : "auto";
        } catch (const Error& e) {
            // mu itself stands; record why the sampled solution is missing.
            results["solution_error"] = std::string(e.what());
            exit_code = dynamic_cast<const PreconditionError*>(&e) != nullptr ? 3 : 2;
        }
    }

    write_results(em, cfg, results, diagnostics);
    std::cout << "weyl: mu = " << format_double(wr.mu.real()) << " + "
              << format_double(wr.mu.imag()) << "i, final radius "
              << format_double(wr.final_radius) << (wr.converged ? "" : " (unconverged)")
              << "\n";
    return exit_code;
}

// ---- eigenvalue search ----

int run_eigs(const RunConfig& cfg, Emitter& em) {
    const auto eigenvalues =
        find_eigenvalues(cfg.potential, cfg.bc, *cfg.region, cfg.tol, cfg.max_subdivision);

    Csv csv(em.file("eigenvalues.csv"),
            "re,im,multiplicity,residual,enclosure_radius,refined");
    Json list = Json::array();
    int winding = 0;
    bool all_refined = true;
    for (const auto& e : eigenvalues) {
        csv.row({cell(e.lambda.real()), cell(e.lambda.imag()),
                 std::to_string(e.multiplicity), cell(e.residual),
                 cell(e.enclosure_radius), e.refined ? "1" : "0"});
        Json j;
        j["lambda"] = complex_json(e.lambda);
        j["multiplicity"] = e.multiplicity;
        j["residual"] = e.residual;
        j["enclosure_radius"] = e.enclosure_radius;
        j["refined"] = e.refined;
        list.push_back(std::move(j));
        winding += e.multiplicity;
        all_refined = all_refined && e.refined;
    }
    if (em.plots) write_eigenvalue_svg(em.file("eigenvalues.svg"), *cfg.region, eigenvalues);

    Json results;
    results["eigenvalues"] = std::move(list);
    results["count"] = static_cast<int>(eigenvalues.size());
    results["region_winding"] = winding;
    results["all_refined"] = all_refined;

    write_results(em, cfg, results, Json::object());
    std::cout << "eigs: " << eigenvalues.size() << " eigenvalue(s), region winding "
              << winding << (all_refined ? "" : " (unrefined enclosures present)") << "\n";
    return all_refined ? 0 : 2;
}

// ---- resolvent application ----

Json resolvent_json(const ResolventOutput& out) {
    Json j;
    j["lambda"] = complex_json(out.lambda);
    j["anchor"] = out.anchor;
    j["x_max"] = out.x_max;
    j["wronskian"] = complex_json(out.wronskian);
    j["wronskian_scale"] = out.wronskian_scale;
    j["norm_y"] = out.norm_y;
    j["norm_y_rho"] = out.norm_y_rho;
    j["norm_y2_rho"] = out.norm_y2_rho;
    j["norm_f_weighted"] = out.norm_f_weighted;
    j["ode_residual"] = out.ode_residual;
    j["boundary_residual"] = out.boundary_residual;
    j["tail_estimate"] = out.tail_estimate;
    return j;
}

void write_resolvent_csv(Emitter& em, const ResolventOutput& out) {
    Csv csv(em.file("resolvent.csv"), "x,y_re,y_im,dy_re,dy_im");
    for (std::size_t i = 0; i < out.x.size(); ++i) {
        csv.row({cell(out.x[i]), cell(out.y[i].real()), cell(out.y[i].imag()),
                 cell(out.dy[i].real()), cell(out.dy[i].imag())});
    }
}

int run_resolvent(const RunConfig& cfg, Emitter& em) {
    const Complex lambda = *cfg.lambda;
    const Chosen anchor = pick_anchor(cfg, lambda);
    const Chosen xm = pick_x_max(cfg, lambda, anchor.value);
    const auto fn = cfg.f->evaluator();

    const ResolventOutput out =
        apply_resolvent(cfg.potential, cfg.bc, lambda, fn, xm.value, anchor.value, cfg.tol);

    write_resolvent_csv(em, out);
    Json diagnostics;
    diagnostics["anchor_source"] = anchor.from_config ? "config" : "auto";
    diagnostics["x_max_source"] = xm.from_config ? "config" : "auto";
    write_results(em, cfg, resolvent_json(out), diagnostics);
    std::cout << "resolvent: ode residual " << format_double(out.ode_residual)
              << ", boundary " << format_double(out.boundary_residual) << ", tail "
              << format_double(out.tail_estimate) << "\n";
    return 0;
}

// ---- weighted-norm verification ----

int run_bounds(const RunConfig& cfg, Emitter& em) {
    const auto fn = cfg.f->evaluator();
    const Chosen xm = cfg.x_max ? Chosen{*cfg.x_max, true}
                                : pick_x_max(cfg, Complex(0.0, 0.0), 0.0);

    const WeightedBoundReport rep =
        weighted_bound_report(cfg.potential, cfg.bc, fn, xm.value, cfg.tol);

    write_resolvent_csv(em, rep.resolvent);
    Json results;
    results["c"] = rep.c;
    results["norm_y"] = rep.norm_y;
    results["norm_y_rho"] = rep.norm_y_rho;
    results["norm_y2_rho"] = rep.norm_y2_rho;
    results["norm_f_weighted"] = rep.norm_f_weighted;
    results["slack_y"] = rep.slack_y;
    results["slack_pair"] = rep.slack_pair;
    results["slack_y1_rho"] = rep.slack_y1_rho;
    results["slack_y2_rho"] = rep.slack_y2_rho;
    results["holds"] = rep.holds;
    results["resolvent"] = resolvent_json(rep.resolvent);

    Json diagnostics;
    diagnostics["x_max_source"] = xm.from_config ? "config" : "auto";
    write_results(em, cfg, results, diagnostics);
    const double worst = std::max({rep.slack_y, rep.slack_pair, rep.slack_y1_rho,
                                   rep.slack_y2_rho});
    std::cout << "bounds: " << (rep.holds ? "hold" : "VIOLATED") << ", max slack "
              << format_double(worst) << "\n";
    return rep.holds ? 0 : 2;
}

// ---- pipeline vs finite differences ----

int run_oracle_compare(const RunConfig& cfg, Emitter& em) {
    const auto eigenvalues =
        find_eigenvalues(cfg.potential, cfg.bc, *cfg.region, cfg.tol, cfg.max_subdivision);

    const int count = cfg.fd_count.value_or(static_cast<int>(eigenvalues.size()));
    std::vector<FDEigen> fd;
    if (count > 0) {
        FDProblem prob;
        prob.length = cfg.fd_length;
        prob.n = cfg.fd_n;
        prob.bc = cfg.bc;
        fd = fd_eigenvalues(cfg.potential, prob, count);
    }

    Csv csv(em.file("compare.csv"), "re,im,fd_re,fd_im,abs_diff,err_est,agree");
    Json rows = Json::array();
    std::vector<bool> used(fd.size(), false);
    bool all_agree = true;
    for (const auto& e : eigenvalues) {
        int best = -1;
        double best_d = 0.0;
        for (std::size_t k = 0; k < fd.size(); ++k) {
            if (used[k]) continue;
            const double d = std::abs(e.lambda - fd[k].lambda);
            if (best < 0 || d < best_d) {
                best = static_cast<int>(k);
                best_d = d;
            }
        }
        Json row;
        row["lambda"] = complex_json(e.lambda);
        if (best < 0) {
            all_agree = false;
            row["agree"] = false;
            csv.row({cell(e.lambda.real()), cell(e.lambda.imag()), "", "", "", "", "0"});
        } else {
            used[static_cast<std::size_t>(best)] = true;
            const FDEigen& m = fd[static_cast<std::size_t>(best)];
            const bool agree = best_d <= std::max(1e-4, m.err_est);
            all_agree = all_agree && agree;
            row["fd"] = complex_json(m.lambda);
            row["abs_diff"] = best_d;
            row["err_est"] = m.err_est;
            row["agree"] = agree;
            csv.row({cell(e.lambda.real()), cell(e.lambda.imag()), cell(m.lambda.real()),
                     cell(m.lambda.imag()), cell(best_d), cell(m.err_est),
                     agree ? "1" : "0"});
        }
        rows.push_back(std::move(row));
    }

    Json results;
    results["pairs"] = std::move(rows);
    results["all_agree"] = all_agree;
    results["fd_length"] = cfg.fd_length;
    results["fd_n"] = cfg.fd_n;
    results["fd_count"] = count;

    write_results(em, cfg, results, Json::object());
    std::cout << "oracle-compare: " << (all_agree ? "agreement" : "DISAGREEMENT") << " on "
              << eigenvalues.size() << " eigenvalue(s)\n";
    return all_agree ? 0 : 2;
}

}  // namespace

int run_task(const RunConfig& cfg, const RunOptions& opt) {
    fs::create_directories(cfg.out_dir);
    Emitter em{fs::path(cfg.out_dir), opt.plots, {}};
    switch (cfg.task) {
        case Task::CheckA:
        case Task::CheckB:
        case Task::CheckThm3: return run_checks(cfg, em);
        case Task::RegionMap: return run_region_map(cfg, em);
        case Task::Weyl: return run_weyl(cfg, em);
        case Task::Eigs: return run_eigs(cfg, em);
        case Task::Resolvent: return run_resolvent(cfg, em);
        case Task::Bounds: return run_bounds(cfg, em);
        case Task::OracleCompare: return run_oracle_compare(cfg, em);
    }
    throw ConfigError("unreachable task");
}

}  // namespace halfline::tools
