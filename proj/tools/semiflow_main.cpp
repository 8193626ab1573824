// semiflow: batch experiments on suspension semiflows over expanding
// Markov interval maps. Subcommands:
//   srb        leading eigendata and SRB density
//   correlate  correlation curve, decay fits, envelope check
//   spectral   Lasota-Yorke fit, Dolgopyat sweep, Laplace route check
//   uni        cohomology verdict, partition points, cancellation set
//
// Exit codes: 0 success, 2 config error, 3 numerical error.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "semiflow/config.hpp"
#include "semiflow/decay_analysis.hpp"
#include "semiflow/grid_function.hpp"
#include "semiflow/markov_map.hpp"
#include "semiflow/numerics.hpp"
#include "semiflow/presets.hpp"
#include "semiflow/suspension_flow.hpp"
#include "semiflow/transfer_operator.hpp"
#include "semiflow/uni_cancellation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace semiflow;

namespace {

struct Workspace {
    ExperimentConfig cfg;
    MarkovMap map;
    RoofFunction roof;
    GridLayoutPtr layout;
    SrbMeasure srb;
    Potential pot;

    static Workspace open(const ExperimentConfig& cfg) {
        MarkovMap map = MarkovMap::build(cfg.map_spec);
        RoofFunction roof = roof_preset(cfg.roof_name);
        roof.validate(map);
        GridLayoutPtr layout = GridLayout::create(map, cfg.grid_m);
        SrbMeasure srb = srb_measure(map, layout);
        Potential pot = normalize(map, layout);
        return Workspace{cfg, std::move(map), std::move(roof),
                         std::move(layout), std::move(srb), std::move(pot)};
    }
};

void stamp(std::ostream& os, const ExperimentConfig& cfg) {
    os << "# config_hash=" << cfg.config_hash << " seed=" << cfg.seed
       << " grid_m=" << cfg.grid_m << "\n";
}

json stamp_json(const ExperimentConfig& cfg) {
    json j;
    j["config_hash"] = cfg.config_hash;
    j["seed"] = cfg.seed;
    j["grid_m"] = cfg.grid_m;
    j["map"] = cfg.map_name;
    j["roof"] = cfg.roof_name;
    return j;
}

void write_text(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    if (!out) throw ConfigError("cannot write output file " + p.string());
    out << body;
}

int cmd_srb(const ExperimentConfig& cfg) {
    Workspace ws = Workspace::open(cfg);
    fs::create_directories(cfg.out_dir);

    const auto [ev, eig] = leading_eigen(ws.map, ws.layout);
    std::ostringstream density;
    stamp(density, cfg);
    write_csv(density, ws.srb.density);
    write_text(fs::path(cfg.out_dir) / "density.csv", density.str());

    json rep = stamp_json(cfg);
    rep["eigenvalue"] = ev;
    rep["density_mass"] =
        srb_integrate(ws.map, ws.srb, [](double) { return Complex(1.0, 0.0); })
            .real();
    rep["mean_x"] =
        srb_integrate(ws.map, ws.srb, [](double x) { return Complex(x, 0.0); })
            .real();
    rep["mixing_power"] = ws.map.mixing_power();
    rep["lambda"] = ws.map.lambda();
    write_text(fs::path(cfg.out_dir) / "srb_report.json", rep.dump(2) + "\n");
    std::cout << "srb: eigenvalue " << std::setprecision(12) << ev << "\n";
    return 0;
}

int cmd_correlate(const ExperimentConfig& cfg) {
    Workspace ws = Workspace::open(cfg);
    fs::create_directories(cfg.out_dir);
    if (cfg.t_grid.size() < 2)
        throw InsufficientDataError("correlate needs a t_grid with >= 2 points");

    const std::string en = cfg.observables[0];
    const std::string fn =
        cfg.observables.size() > 1 ? cfg.observables[1] : cfg.observables[0];
    SuspensionObservable E = center_observable(
        ws.map, ws.srb, ws.roof, observable_preset(en, ws.map, ws.roof));
    SuspensionObservable F = center_observable(
        ws.map, ws.srb, ws.roof, observable_preset(fn, ws.map, ws.roof));

    const auto rho = correlation_curve(ws.map, ws.srb, ws.roof, E, F,
                                       cfg.t_grid);
    std::ostringstream csv;
    stamp(csv, cfg);
    csv << "t,re,im,abs\n" << std::setprecision(17);
    for (std::size_t i = 0; i < cfg.t_grid.size(); ++i)
        csv << cfg.t_grid[i] << ',' << rho[i].real() << ',' << rho[i].imag()
            << ',' << std::abs(rho[i]) << '\n';
    write_text(fs::path(cfg.out_dir) / "correlation.csv", csv.str());

    json rep = stamp_json(cfg);
    rep["observables"] = {en, fn};
    const DecayFitReport fits = fit_decay(cfg.t_grid, rho, cfg.noise_floor);
    for (const auto& f : fits.fits) {
        json jf;
        jf["model"] = to_string(f.model);
        jf["rate"] = f.rate;
        jf["prefactor"] = f.prefactor;
        jf["r2"] = f.r2;
        jf["points"] = f.points;
        rep["fits"].push_back(jf);
    }
    rep["best_model"] = to_string(fits.fits[fits.best].model);
    rep["caveat"] = fits.caveat;

    const DecayFit& best = fits.fits[fits.best];
    const EnvelopeResult env = envelope_check(
        cfg.t_grid, rho, 1.5 * best.prefactor, best.rate, cfg.noise_floor);
    rep["envelope_ok"] = env.ok;
    rep["envelope_worst_margin"] = env.worst_margin;

    std::ostringstream ecsv;
    stamp(ecsv, cfg);
    ecsv << "t,abs_rho,envelope\n" << std::setprecision(17);
    for (std::size_t i = 0; i < cfg.t_grid.size(); ++i)
        ecsv << cfg.t_grid[i] << ',' << std::abs(rho[i]) << ','
             << 1.5 * best.prefactor *
                    std::exp(-best.rate * std::sqrt(std::max(0.0,
                                                             cfg.t_grid[i])))
             << '\n';
    write_text(fs::path(cfg.out_dir) / "envelope.csv", ecsv.str());

    // Non-mixing flag: the tail of |rho| has not dropped against its head.
    double head = 0.0, tail = 0.0;
    const std::size_t third = rho.size() / 3;
    for (std::size_t i = 0; i < third; ++i) head += std::abs(rho[i]);
    for (std::size_t i = rho.size() - third; i < rho.size(); ++i)
        tail += std::abs(rho[i]);
    const bool non_mixing = third > 0 && tail > 0.5 * head;
    rep["non_mixing"] = non_mixing;

    write_text(fs::path(cfg.out_dir) / "decay_fit.json", rep.dump(2) + "\n");
    std::cout << "correlate: best model " << to_string(best.model)
              << ", rate " << best.rate
              << (non_mixing ? " [NON-MIXING]" : "") << "\n";
    return 0;
}

int cmd_spectral(const ExperimentConfig& cfg) {
    Workspace ws = Workspace::open(cfg);
    fs::create_directories(cfg.out_dir);

    std::vector<double> bs;
    for (double b : cfg.b_grid)
        if (std::abs(b) >= 3.0) bs.push_back(b);
    if (bs.empty()) throw ConfigError("b_grid needs entries with |b| >= 3");

    const LasotaYorkeFit ly = lasota_yorke_fit(
        ws.map, ws.pot, ws.roof, ws.layout, bs,
        {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}, cfg.seed);
    const double c3 = std::max(4.0 * ly.c9, 1e-3);
    json lyj = stamp_json(cfg);
    lyj["c9"] = ly.c9;
    lyj["lambda_eff"] = ly.lambda_eff;
    lyj["lambda_map"] = ly.lambda_map;
    lyj["n1"] = ly.n1;
    lyj["c3"] = c3;
    write_text(fs::path(cfg.out_dir) / "lasota_yorke.json", lyj.dump(2) + "\n");

    std::ostringstream csv;
    stamp(csv, cfg);
    csv << "b,iterations,final_factor,resolvent_abscissa,status\n"
        << std::setprecision(17);
    std::vector<double> log_bs, ns;
    for (double b : bs) {
        const BNormContext ctx(b, c3, ws.map.alpha());
        const double abscissa =
            resolvent_abscissa(ws.map, ws.pot, ws.roof, ws.layout, b);
        try {
            const DolgopyatResult dr = dolgopyat_probe(
                ws.map, ws.pot, ws.roof, ws.layout, b, 0.75, ctx, cfg.seed);
            csv << b << ',' << dr.iterations << ',' << dr.trace.back() << ','
                << abscissa << ",OK\n";
            log_bs.push_back(std::log(std::abs(b)));
            ns.push_back(dr.iterations);
        } catch (const NoContractionError&) {
            csv << b << ",,," << abscissa << ",NO_CONTRACTION\n";
        }
    }
    write_text(fs::path(cfg.out_dir) / "dolgopyat.csv", csv.str());
    json sweep = stamp_json(cfg);
    if (log_bs.size() >= 2) {
        const LineFit lf = fit_line(log_bs, ns);
        sweep["c11_slope"] = lf.slope;
        sweep["r2"] = lf.r2;
    }

    // Contour-bound table for the map's Holder exponent.
    {
        const ContourBoundReport cb = contour_bound_check(
            ws.map.alpha(), 0.1, {0.0, 1.0, 10.0, 100.0, 1000.0, 10000.0});
        std::ostringstream ccsv;
        stamp(ccsv, cfg);
        ccsv << "t,value,tail_bound\n" << std::setprecision(17);
        for (const auto& row : cb.rows)
            ccsv << row.t << ',' << row.value << ',' << row.tail_bound
                 << '\n';
        write_text(fs::path(cfg.out_dir) / "contour.csv", ccsv.str());
        sweep["contour_sqrt_slope"] = cb.sqrt_fit.slope;
        sweep["contour_sqrt_r2"] = cb.sqrt_fit.r2;
    }

    // Route equivalence: direct Laplace vs resolvent series at seeded
    // random s with Re s in [0.5, 2], |Im s| <= 20. chi(t) is shared
    // across the s samples.
    Rng rng(cfg.seed);
    SuspensionObservable E = center_observable(
        ws.map, ws.srb, ws.roof,
        observable_preset("usin", ws.map, ws.roof));
    SuspensionObservable F = center_observable(
        ws.map, ws.srb, ws.roof,
        observable_preset("usin_sinx", ws.map, ws.roof));
    const std::vector<double> tg = laplace_t_grid(30.0, 0.005);
    const std::vector<Complex> chi =
        chi_curve(ws.map, ws.srb, ws.roof, E, F, tg);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
        const Complex s(rng.uniform(0.5, 2.0), rng.uniform(-20.0, 20.0));
        const auto series =
            laplace_chi_series(ws.map, ws.pot, ws.srb, ws.roof, E, F, s);
        const Complex direct = laplace_transform_curve(tg, chi, s);
        const double denom = std::max(std::abs(series.value), 1e-12);
        const double gap = std::abs(series.value - direct) / denom;
        worst = std::max(worst, gap);
        json row;
        row["s_re"] = s.real();
        row["s_im"] = s.imag();
        row["series_re"] = series.value.real();
        row["series_im"] = series.value.imag();
        row["direct_re"] = direct.real();
        row["direct_im"] = direct.imag();
        row["rel_gap"] = gap;
        sweep["route_equivalence"].push_back(row);
    }
    sweep["route_equivalence_max_gap"] = worst;
    write_text(fs::path(cfg.out_dir) / "spectral_report.json",
               sweep.dump(2) + "\n");
    std::cout << "spectral: C9 " << ly.c9 << ", route gap " << worst << "\n";
    return 0;
}

int cmd_uni(const ExperimentConfig& cfg) {
    Workspace ws = Workspace::open(cfg);
    fs::create_directories(cfg.out_dir);

    const CohomologyReport rep =
        cohomology_verdict(ws.map, ws.roof, 8, 0.0, 20000, cfg.seed);
    json vj = stamp_json(cfg);
    vj["verdict"] = to_string(rep.verdict);
    vj["best_d"] = rep.best_d;
    vj["best_depth"] = rep.best_depth;
    vj["coboundary_deviation"] = rep.coboundary_deviation;
    vj["threshold"] = rep.threshold;
    vj["witness"]["rows1"] = rep.witness.rows1;
    vj["witness"]["rows2"] = rep.witness.rows2;
    vj["witness"]["x1"] = rep.witness.x1;
    vj["witness"]["x2"] = rep.witness.x2;
    vj["witness"]["glued"] = rep.witness.glued;

    std::ostringstream csv;
    stamp(csv, cfg);
    csv << "depth,best_d\n" << std::setprecision(17);
    for (const auto& [n, d] : rep.d_by_depth) csv << n << ',' << d << '\n';
    write_text(fs::path(cfg.out_dir) / "witness_depth.csv", csv.str());

    if (rep.verdict == CohomologyVerdict::NotCohomologous) {
        const double b = 100.0;
        try {
            const PartitionPoints pp =
                partition_points(ws.map, ws.roof, rep.witness, b);
            json pj;
            pj["b"] = b;
            pj["points"] = pp.points;
            pj["r_values"] = pp.r_values;
            pj["step"] = pp.step;
            pj["gap_bound"] = pp.gap_bound;
            pj["well_spaced_count"] = pp.well_spaced.size();
            vj["partition"] = pj;
        } catch (const InsufficientOscillationError& e) {
            vj["partition"] = {{"error", e.what()}};
        }

        const double b_cancel = 10.0;
        const double c3 = default_c3(ws.map, ws.pot, ws.roof, ws.layout);
        const BNormContext ctx(b_cancel, c3, ws.map.alpha());
        const int n_iter = std::max(
            1, scale_condition_depth(ws.map.alpha(), c3, 1.0, ws.map.lambda(),
                                     rep.witness));
        const GridFunction one =
            GridFunction::constant(ws.layout, Complex(1.0, 0.0));
        const CancellationMeasure cm = cancellation_set_measure(
            ws.map, ws.pot, ws.srb, ws.roof, b_cancel, one, n_iter, ctx);
        std::ostringstream ccsv;
        stamp(ccsv, cfg);
        ccsv << "delta,measure\n" << std::setprecision(17);
        for (std::size_t i = 0; i < cm.delta_grid.size(); ++i)
            ccsv << cm.delta_grid[i] << ',' << cm.measure[i] << '\n';
        write_text(fs::path(cfg.out_dir) / "cancellation.csv", ccsv.str());
    }

    write_text(fs::path(cfg.out_dir) / "verdict.json", vj.dump(2) + "\n");
    std::cout << "uni: " << to_string(rep.verdict) << " (D = " << rep.best_d
              << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for suspension semiflows over "
                 "expanding Markov interval maps"};
    app.require_subcommand(1);

    std::string config_path, preset, out_override;
    int threads = 0;
    std::uint64_t seed_override = 0;
    bool have_seed = false;

    app.add_option("--config", config_path, "experiment config (JSON)");
    app.add_option("--preset", preset,
                   "built-in '<map>-<roof>' preset, e.g. doub2-quadratic");
    app.add_option("--out", out_override, "output directory");
    app.add_option("--threads", threads, "worker thread cap (0 = auto)");
    auto* seed_opt =
        app.add_option("--seed", seed_override, "RNG seed override");

    auto* srb = app.add_subcommand("srb", "SRB density and eigenvalue report");
    auto* correlate =
        app.add_subcommand("correlate", "correlation curve and decay fits");
    auto* spectral =
        app.add_subcommand("spectral", "operator probes and Laplace routes");
    auto* uni = app.add_subcommand("uni", "cohomology and cancellation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        set_thread_count(threads);
        have_seed = seed_opt->count() > 0;
        ExperimentConfig cfg;
        if (!config_path.empty())
            cfg = load_config(config_path);
        else if (!preset.empty())
            cfg = preset_config(preset);
        else
            throw ConfigError("either --config or --preset is required");
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (have_seed) cfg.seed = seed_override;

        if (srb->parsed()) return cmd_srb(cfg);
        if (correlate->parsed()) return cmd_correlate(cfg);
        if (spectral->parsed()) return cmd_spectral(cfg);
        if (uni->parsed()) return cmd_uni(cfg);
        throw ConfigError("no subcommand given");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
