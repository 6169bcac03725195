// Experiment runner: parses a JSON config, dispatches to the toolkit
// modules, and writes CSV results plus a manifest echoing the inputs.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "semiscat/classical.hpp"
#include "semiscat/comparison.hpp"
#include "semiscat/config.hpp"
#include "semiscat/errors.hpp"
#include "semiscat/jost.hpp"
#include "semiscat/numerics.hpp"
#include "semiscat/output.hpp"
#include "semiscat/potential.hpp"
#include "semiscat/propagator.hpp"
#include "semiscat/resonance.hpp"
#include "semiscat/scattering.hpp"
#include "semiscat/semiclassics.hpp"
#include "semiscat/version.hpp"

using namespace semiscat;

namespace {

struct RunContext {
    ExperimentConfig cfg;
    std::string out_dir;
    int jobs = 1;
    bool verify = false;
    std::vector<std::string> outputs;
    std::vector<std::string> verify_notes;
    bool verify_failed = false;

    std::string path(const std::string& name) const { return out_dir + "/" + name; }
    void note_output(const std::string& name) { outputs.push_back(name); }
    void verify_check(bool ok, const std::string& what) {
        if (!ok) verify_failed = true;
        verify_notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
};

std::string h_tag(double h) {
    std::string s = format_double(h);
    for (auto& c : s)
        if (c == '.') c = 'p';
    return s;
}

void write_manifest(RunContext& ctx, double wall_seconds) {
    json man;
    man["command"] = ctx.cfg.command;
    man["toolkit_version"] = kVersion;
    man["inputs"] = ctx.cfg.raw;
    man["outputs"] = ctx.outputs;
    man["wall_time_s"] = wall_seconds;
    if (ctx.verify) {
        man["verify"] = ctx.verify_notes;
        man["verify_passed"] = !ctx.verify_failed;
    }
    std::ofstream f(ctx.path("manifest.json"));
    f << man.dump(2) << "\n";
}

// ---- subcommands ---------------------------------------------------------

void run_smatrix(RunContext& ctx) {
    const auto& pot = ctx.cfg.potential;
    if (ctx.cfg.h_list.empty() || ctx.cfg.lambda_list.empty())
        throw configuration_error("smatrix: h_list and lambda_list required");
    for (double h : ctx.cfg.h_list) {
        std::vector<ScatteringRecord> recs(ctx.cfg.lambda_list.size());
        parallel_for(recs.size(), ctx.jobs, [&](std::size_t i) {
            recs[i] = smatrix(pot, ctx.cfg.lambda_list[i], h);
        });
        scattering_phase(recs);
        CsvTable csv({"lambda", "h", "ReS_pp", "ImS_pp", "ReS_pm", "ImS_pm",
                      "ReS_mp", "ImS_mp", "ReS_mm", "ImS_mm", "theta",
                      "unitarity_defect"});
        for (const auto& r : recs) {
            csv.add_row({r.lambda, r.h, r.s_pp.real(), r.s_pp.imag(),
                         r.s_pm.real(), r.s_pm.imag(), r.s_mp.real(),
                         r.s_mp.imag(), r.s_mm.real(), r.s_mm.imag(), r.theta,
                         r.unitarity_defect()});
            if (ctx.verify)
                ctx.verify_check(r.unitarity_defect() < 1e-8,
                                 "S unitary at lambda=" + format_double(r.lambda));
        }
        const std::string name = "smatrix_h" + h_tag(h) + ".csv";
        csv.write(ctx.path(name));
        ctx.note_output(name);
    }
}

void run_ssf(RunContext& ctx) {
    const auto& pot = ctx.cfg.potential;
    if (ctx.cfg.h_list.empty() || ctx.cfg.lambda_list.empty())
        throw configuration_error("ssf: h_list and lambda_list required");
    const double dl_rel = ctx.cfg.get_number("dlambda_rel", 1e-4);
    for (double h : ctx.cfg.h_list) {
        CsvTable csv({"lambda", "h", "ssf_deriv", "weyl_over_h"});
        std::vector<double> vals(ctx.cfg.lambda_list.size());
        parallel_for(ctx.cfg.lambda_list.size(), ctx.jobs, [&](std::size_t i) {
            vals[i] = ssf_derivative(pot, ctx.cfg.lambda_list[i], h,
                                     dl_rel * ctx.cfg.lambda_list[i]);
        });
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const double lam = ctx.cfg.lambda_list[i];
            csv.add_row({lam, h, vals[i], weyl_leading(pot, lam) / h});
        }
        const std::string name = "ssf_h" + h_tag(h) + ".csv";
        csv.write(ctx.path(name));
        ctx.note_output(name);
    }
}

void run_resonances(RunContext& ctx) {
    const auto& pot = ctx.cfg.potential;
    if (ctx.cfg.h_list.empty())
        throw configuration_error("resonances: h_list required");
    SearchBox box{ctx.cfg.get_number("re_min", 0.5), ctx.cfg.get_number("re_max", 1.5),
                  ctx.cfg.get_number("im_min", -0.5), ctx.cfg.get_number("im_max", 1e-6),
                  static_cast<int>(ctx.cfg.get_number("contour_points", 256))};
    CsvTable csv({"h", "Re_z", "Im_z", "width", "newton_residual", "kind"});
    json jlist = json::array();
    for (double h : ctx.cfg.h_list) {
        const auto found = find_resonances(pot, box, h);
        for (const auto& r : found) {
            csv.add_row({h, r.z.real(), r.z.imag(), r.width, r.newton_residual,
                         std::string(r.kind == ResonanceKind::BoundState
                                         ? "bound_state"
                                         : "resonance")});
            jlist.push_back({{"h", h},
                             {"re", r.z.real()},
                             {"im", r.z.imag()},
                             {"width", r.width},
                             {"multiplicity", r.multiplicity},
                             {"refined", r.refined}});
            if (ctx.verify)
                ctx.verify_check(r.z.imag() <= 1e-10,
                                 "no upper half plane zeros at h=" + format_double(h));
        }
    }
    csv.write(ctx.path("resonances.csv"));
    ctx.note_output("resonances.csv");
    std::ofstream jf(ctx.path("resonances.json"));
    jf << jlist.dump(2) << "\n";
    ctx.note_output("resonances.json");
}

void run_residues(RunContext& ctx) {
    const auto& pot = ctx.cfg.potential;
    if (ctx.cfg.h_list.empty())
        throw configuration_error("residues: h_list required");
    SearchBox box{ctx.cfg.get_number("re_min", 0.5), ctx.cfg.get_number("re_max", 1.5),
                  ctx.cfg.get_number("im_min", -0.5), 1e-6, 256};
    const double extent = ctx.cfg.get_number("extent", 2.0);
    const auto n = static_cast<std::size_t>(ctx.cfg.get_number("kernel_points", 41));
    CsvTable csv({"h", "Re_z", "Im_z", "rank_defect", "symmetry_defect"});
    for (double h : ctx.cfg.h_list) {
        for (const auto& r : find_resonances(pot, box, h)) {
            if (r.multiplicity != 1) continue;
            const ResidueProjector pr = residue_projector(pot, r, h, extent, n);
            double sym = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    sym = std::max(sym, std::abs(pr.kernel(i, j) - pr.kernel(j, i)));
                    scale = std::max(scale, std::abs(pr.kernel(i, j)));
                }
            csv.add_row({h, r.z.real(), r.z.imag(), pr.rank_defect,
                         scale > 0 ? sym / scale : 0.0});
        }
    }
    csv.write(ctx.path("residues.csv"));
    ctx.note_output("residues.csv");
}

void run_classical(RunContext& ctx) {
    const auto& pot = ctx.cfg.potential;
    const double x0 = ctx.cfg.get_number("x0", 0.0);
    const double xi0 = ctx.cfg.get_number("xi0", 1.0);
    const double t_max = ctx.cfg.get_number("t_max", 10.0);
    const double dt = ctx.cfg.get_number("dt", 1e-3);
    const Trajectory tr = flow_trajectory(pot, {x0, xi0}, t_max, dt);
    CsvTable csv({"t", "x", "xi"});
    const std::size_t stride =
        std::max<std::size_t>(1, tr.t.size() / static_cast<std::size_t>(
                                                   ctx.cfg.get_number("samples", 2000)));
    for (std::size_t i = 0; i < tr.t.size(); i += stride)
        csv.add_row({tr.t[i], tr.x[i], tr.xi[i]});
    csv.write(ctx.path("trajectory.csv"));
    ctx.note_output("trajectory.csv");
    if (ctx.verify) {
        const double e0 = xi0 * xi0 + pot(x0);
        const double e1 = tr.xi.back() * tr.xi.back() + pot(tr.x.back());
        ctx.verify_check(std::abs(e1 - e0) <= 1e-6 * std::abs(e0) + 1e-8,
                         "energy conservation along the trajectory");
    }
}

void run_homoclinic(RunContext& ctx) {
    const auto& pot = ctx.cfg.potential;
    const double h = ctx.cfg.h_list.empty() ? 0.01 : ctx.cfg.h_list.front();
    const HomoclinicData hd = homoclinic_data(pot);

    json jh = {{"E0", hd.E0},           {"mu", hd.mu},
               {"A0", hd.A0},           {"g0_minus", hd.g0_minus},
               {"g0_plus", hd.g0_plus}, {"g_in", hd.g_in},
               {"g_out", hd.g_out},     {"A_in", hd.A_in},
               {"A_out", hd.A_out},     {"A_ell", hd.A_ell},
               {"T_ell", hd.T_ell},     {"x_loop", hd.x_loop},
               {"x_ell", hd.x_ell},     {"fit_residual", hd.fit_residual}};
    std::ofstream jf(ctx.path("homoclinic_data.json"));
    jf << jh.dump(2) << "\n";
    ctx.note_output("homoclinic_data.json");

    // overlay of the numerically computed derivative of the spectral shift
    // function against the closed-form line shape
    const double window = ctx.cfg.get_number("window_in_h", 5.0) * h;
    const int n = static_cast<int>(ctx.cfg.get_number("n_lambda", 400));
    const Potential trunc =
        pot.compactly_supported()
            ? pot
            : truncate(pot,
                       ctx.cfg.get_number("R", pot.effective_support_radius(1e-14)));
    CsvTable csv({"lambda", "ssf_numeric", "ssf_formula"});
    std::vector<double> lams(n), numval(n), formval(n);
    for (int i = 0; i < n; ++i)
        lams[i] = hd.E0 - window + 2.0 * window * i / (n - 1);
    parallel_for(static_cast<std::size_t>(n), ctx.jobs, [&](std::size_t i) {
        numval[i] = ssf_derivative(trunc, lams[i], h, 2e-3 * h);
        formval[i] = ssf_homoclinic(hd, lams[i], h);
    });
    for (int i = 0; i < n; ++i) csv.add_row({lams[i], numval[i], formval[i]});
    csv.write(ctx.path("homoclinic_overlay.csv"));
    ctx.note_output("homoclinic_overlay.csv");
}

EnergyWindow window_from_config(const ExperimentConfig& cfg, double c, double hw,
                                double sm) {
    if (cfg.raw.contains("phi")) {
        const auto& p = cfg.raw.at("phi");
        return EnergyWindow(p.at("center").get<double>(),
                            p.at("halfwidth").get<double>(),
                            p.at("smoothing").get<double>());
    }
    return EnergyWindow(c, hw, sm);
}

void run_evolve(RunContext& ctx) {
    const auto& pot = ctx.cfg.potential;
    if (ctx.cfg.h_list.empty())
        throw configuration_error("evolve: h_list required");
    if (ctx.cfg.t_list.empty())
        throw configuration_error("evolve: t_list required");
    const double h = ctx.cfg.h_list.front();
    const double L_box = ctx.cfg.get_number("L_box", 20.0);
    const int n_points = static_cast<int>(ctx.cfg.get_number("n_points", 2048));
    const EnergyWindow phi = window_from_config(ctx.cfg, 1.0, 0.3, 0.15);
    const CutoffSpec chi = cutoff_from_config(ctx.cfg, 1.5, 3.0);
    const bool enforce = ctx.cfg.get_number("enforce_resolution", 0.0) != 0.0;

    const GridHamiltonian ham = build_grid_hamiltonian(
        pot, h, L_box, n_points, phi.center + phi.halfwidth, enforce);
    SpectralData sd;
    const std::string cache =
        ctx.path("cache_" + spectral_cache_key(pot, h, L_box, n_points) + ".bin");
    if (!load_spectral(sd, cache)) {
        sd = diagonalize(ham);
        save_spectral(sd, cache);
    }

    const std::string mode =
        ctx.cfg.raw.contains("mode") ? ctx.cfg.raw.at("mode").get<std::string>()
                                     : "expansion";
    if (mode == "packet") {
        const double x0 = ctx.cfg.get_number("x0", -5.0);
        const double xi0 = ctx.cfg.get_number("xi0", 1.0);
        const double width = ctx.cfg.get_number("packet_width", 1.0);
        Eigen::VectorXcd u0(n_points);
        for (int i = 0; i < n_points; ++i) {
            const double x = ham.x[i];
            u0(i) = std::exp(cdouble(-(x - x0) * (x - x0) / (2.0 * width * width),
                                     xi0 * x / h));
        }
        CsvTable csv({"t", "norm", "center"});
        for (double t : ctx.cfg.t_list) {
            const Eigen::VectorXcd u = evolve(sd, u0, t);
            double m = 0, c = 0;
            for (int i = 0; i < n_points; ++i) {
                const double w = std::norm(u(i));
                m += w;
                c += w * ham.x[i];
            }
            csv.add_row({t, u.norm(), c / m});
        }
        csv.write(ctx.path("evolve_packet.csv"));
        ctx.note_output("evolve_packet.csv");
        return;
    }

    // resonance-expansion mode: compare the filtered cutoff evolution with
    // the ladder terms computed from the potential's resonances
    SearchBox box{ctx.cfg.get_number("re_min", phi.center - 2.0 * h),
                  ctx.cfg.get_number("re_max", phi.center + 2.0 * h),
                  ctx.cfg.get_number("im_min", -4.0 * h), 1e-6, 256};
    const int K_max = static_cast<int>(ctx.cfg.get_number("K_max", 2));
    const auto found = find_resonances(pot, box, h);
    std::vector<ResonanceTerm> terms;
    std::vector<int> support;
    for (int i = 0; i < n_points; ++i)
        if (chi(ham.x[i]) > 0.0) support.push_back(i);
    for (const auto& r : found) {
        if (static_cast<int>(terms.size()) >= K_max) break;
        const std::size_t npr = 257;
        const ResidueProjector pr = residue_projector(pot, r, h, chi.outer, npr);
        ResonanceTerm term;
        term.z = r.z;
        const std::size_t m = support.size();
        term.chi_kernel_chi.resize(m, m);
        const double dxp = pr.x[1] - pr.x[0];
        auto locate = [&](double s, std::size_t& idx, double& t) {
            double u = (s - pr.x.front()) / dxp;
            u = std::clamp(u, 0.0, static_cast<double>(pr.x.size() - 2));
            idx = static_cast<std::size_t>(u);
            t = u - static_cast<double>(idx);
        };
        for (std::size_t a = 0; a < m; ++a) {
            std::size_t i0;
            double tx;
            locate(ham.x[support[a]], i0, tx);
            for (std::size_t b = 0; b < m; ++b) {
                std::size_t j0;
                double ty;
                locate(ham.x[support[b]], j0, ty);
                const cdouble v = pr.kernel(i0, j0) * (1 - tx) * (1 - ty) +
                                  pr.kernel(i0 + 1, j0) * tx * (1 - ty) +
                                  pr.kernel(i0, j0 + 1) * (1 - tx) * ty +
                                  pr.kernel(i0 + 1, j0 + 1) * tx * ty;
                term.chi_kernel_chi(a, b) =
                    chi(ham.x[support[a]]) * v * chi(ham.x[support[b]]);
            }
        }
        terms.push_back(std::move(term));
    }

    CsvTable csv({"t", "error_norm", "K", "h"});
    for (int K = 0; K <= static_cast<int>(terms.size()); ++K) {
        const auto errs =
            resonance_expansion_error(sd, chi, phi, terms, ctx.cfg.t_list, K);
        for (std::size_t i = 0; i < errs.size(); ++i)
            csv.add_row({ctx.cfg.t_list[i], errs[i], double(K), h});
    }
    csv.write(ctx.path("expansion_error.csv"));
    ctx.note_output("expansion_error.csv");
}

void run_compare_resolvent(RunContext& ctx) {
    const auto& base = ctx.cfg.potential;
    if (ctx.cfg.h_list.empty() || ctx.cfg.R_list.empty())
        throw configuration_error("compare-resolvent: h_list and R_list required");
    const double lambda =
        ctx.cfg.lambda_list.empty() ? 1.0 : ctx.cfg.lambda_list.front();
    const double r_outer_factor = ctx.cfg.get_number("R_outer_factor", 4.0);
    const CutoffSpec chi = cutoff_from_config(ctx.cfg, 1.0, 2.0);

    CsvTable csv({"R", "h", "lambda", "diff_norm", "q_weighted_norm", "ratio",
                  "fit_exponent"});
    json summary = json::array();
    for (double R : ctx.cfg.R_list) {
        std::vector<ResolventDifference> cells(ctx.cfg.h_list.size());
        parallel_for(ctx.cfg.h_list.size(), ctx.jobs, [&](std::size_t i) {
            cells[i] = resolvent_difference(base, R, r_outer_factor * R,
                                            ctx.cfg.h_list[i], lambda, chi);
        });
        std::vector<std::pair<double, double>> pairs;
        for (std::size_t i = 0; i < cells.size(); ++i)
            pairs.emplace_back(ctx.cfg.h_list[i], cells[i].ratio);
        double fit_exp = 0.0;
        json windows = json::array();
        if (pairs.size() >= 3) {
            try {
                const DecayFit fit = superpoly_fit(pairs);
                fit_exp = fit.exponent;
                for (double w : fit.windowed) windows.push_back(w);
            } catch (const error&) {
            }
        }
        for (const auto& c : cells)
            csv.add_row({R, c.h, lambda, c.diff_norm, c.q_weighted_norm, c.ratio,
                         fit_exp});
        summary.push_back({{"R", R},
                           {"fit_exponent", fit_exp},
                           {"windowed_exponents", windows},
                           {"outer_sensitivity",
                            cells.back().diff_norm_outer2 - cells.back().diff_norm}});
    }
    csv.write(ctx.path("compare_resolvent.csv"));
    ctx.note_output("compare_resolvent.csv");
    std::ofstream jf(ctx.path("compare_resolvent_summary.json"));
    jf << summary.dump(2) << "\n";
    ctx.note_output("compare_resolvent_summary.json");
}

void run_compare_propagator(RunContext& ctx) {
    const auto& base = ctx.cfg.potential;
    if (ctx.cfg.h_list.empty() || ctx.cfg.R_list.empty() || ctx.cfg.t_list.empty())
        throw configuration_error(
            "compare-propagator: h_list, R_list and t_list required");
    const double r_outer_factor = ctx.cfg.get_number("R_outer_factor", 4.0);
    const double L_box = ctx.cfg.get_number("L_box", 50.0);
    const int n_points = static_cast<int>(ctx.cfg.get_number("n_points", 4096));
    const CutoffSpec chi = cutoff_from_config(ctx.cfg, 1.0, 2.0);
    const EnergyWindow phi = window_from_config(ctx.cfg, 1.0, 0.3, 0.15);

    CsvTable csv({"R", "h", "t", "diff_norm", "sup_norm"});
    for (double R : ctx.cfg.R_list) {
        for (double h : ctx.cfg.h_list) {
            const PropagatorDifference pd =
                propagator_difference(base, R, r_outer_factor * R, h, L_box,
                                      n_points, chi, phi, ctx.cfg.t_list);
            for (std::size_t i = 0; i < pd.t_list.size(); ++i)
                csv.add_row({R, h, pd.t_list[i], pd.norms[i], pd.sup_norm});
        }
    }
    csv.write(ctx.path("compare_propagator.csv"));
    ctx.note_output("compare_propagator.csv");
}

void run_inequalities(RunContext& ctx) {
    const auto& pot = ctx.cfg.potential;
    if (ctx.cfg.h_list.empty() || ctx.cfg.lambda_list.empty())
        throw configuration_error("inequalities: h_list and lambda_list required");
    const double s = ctx.cfg.get_number("weight_s", 1.0);
    const double R0 = ctx.cfg.get_number("R0", 4.0);
    CsvTable csv({"h", "lambda", "interior_norm", "one_sided_norm",
                  "exterior_norm", "cutoff_norm", "a13_ratio", "a14_ratio",
                  "a17_ratio"});
    for (double h : ctx.cfg.h_list)
        for (double lam : ctx.cfg.lambda_list) {
            const WeightedInequalityReport r =
                weighted_inequalities(pot, lam, h, s, R0);
            csv.add_row({h, lam, r.interior_norm, r.one_sided_norm,
                         r.exterior_norm, r.cutoff_norm, r.a13_ratio,
                         r.a14_ratio, r.a17_ratio});
        }
    csv.write(ctx.path("inequalities.csv"));
    ctx.note_output("inequalities.csv");
}

void run_weyl(RunContext& ctx) {
    const auto& pot = ctx.cfg.potential;
    if (ctx.cfg.lambda_list.empty())
        throw configuration_error("weyl: lambda_list required");
    CsvTable csv({"lambda", "s0"});
    for (double lam : ctx.cfg.lambda_list)
        csv.add_row({lam, weyl_leading(pot, lam)});
    csv.write(ctx.path("weyl.csv"));
    ctx.note_output("weyl.csv");
}

int dispatch(RunContext& ctx) {
    const auto t0 = std::chrono::steady_clock::now();
    ensure_directory(ctx.out_dir);

    const std::string& cmd = ctx.cfg.command;
    if (cmd == "smatrix")
        run_smatrix(ctx);
    else if (cmd == "ssf")
        run_ssf(ctx);
    else if (cmd == "resonances")
        run_resonances(ctx);
    else if (cmd == "residues")
        run_residues(ctx);
    else if (cmd == "classical")
        run_classical(ctx);
    else if (cmd == "homoclinic")
        run_homoclinic(ctx);
    else if (cmd == "evolve")
        run_evolve(ctx);
    else if (cmd == "compare-resolvent")
        run_compare_resolvent(ctx);
    else if (cmd == "compare-propagator")
        run_compare_propagator(ctx);
    else if (cmd == "inequalities")
        run_inequalities(ctx);
    else if (cmd == "weyl")
        run_weyl(ctx);
    else
        throw configuration_error("command: unknown command '" + cmd + "'");

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(ctx, wall);
    if (ctx.verify && ctx.verify_failed) {
        for (const auto& n : ctx.verify_notes) std::cerr << n << "\n";
        return 3;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"one-dimensional semiclassical scattering toolkit"};
    std::string config_path, out_dir = "out";
    int jobs = 1;
    bool verify = false;
    app.add_option("--config", config_path, "JSON experiment configuration")
        ->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--jobs", jobs, "worker threads for sweeps");
    app.add_flag("--verify", verify, "run invariant checks for touched modules");
    CLI11_PARSE(app, argc, argv);

    RunContext ctx;
    ctx.out_dir = out_dir;
    ctx.jobs = std::max(jobs, 1);
    ctx.verify = verify;
    try {
        ctx.cfg = load_config(config_path);
        return dispatch(ctx);
    } catch (const configuration_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
