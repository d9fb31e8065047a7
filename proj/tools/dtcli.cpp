//==============================================================================
// dtcli — command-line front end for the disk tomography toolkit.
//
// Subcommands:
//   dtn       forward Dirichlet-to-Neumann solve for a domain spec; writes a
//             "mode,re,im" CSV of Neumann coefficients plus a manifest.
//   identify  disk recovery from Neumann data (file or synthetic); writes an
//             identification JSON.
//   sweep     eps sweeps: dtn-error / stability / theodorsen; CSV + slope JSON.
//   precomp   precomposition benches for a circle map: distortion and
//             composition-error CSVs plus a norms summary.
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure.
// Outputs are deterministic: identical config + seed give byte-identical CSVs.
//==============================================================================

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "disktomo/disktomo.hpp"

namespace fs = std::filesystem;
using namespace disktomo;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

// "cos3", "sin2", or "cos3:0.5+cos1:0.25" style shape descriptors
FourierSeries parse_delta_shape(const std::string& text) {
    FourierSeries acc(0);
    std::istringstream ss(text);
    std::string term;
    while (std::getline(ss, term, '+')) {
        double amp = 1.0;
        std::string head = term;
        if (const auto colon = term.find(':'); colon != std::string::npos) {
            head = term.substr(0, colon);
            amp = std::stod(term.substr(colon + 1));
        }
        int k = 0;
        if (head.rfind("cos", 0) == 0) {
            k = std::stoi(head.substr(3));
            acc = acc + cosine_series(k, amp);
        } else if (head.rfind("sin", 0) == 0) {
            k = std::stoi(head.substr(3));
            acc = acc + sine_series(k, amp);
        } else {
            throw CLI::ValidationError("--delta-shape", "expected cosK or sinK terms");
        }
    }
    return acc;
}

// "identity" | "rotation:c" | "sine:a,k" | "moebius:re,im"
CircleMap parse_map_spec(const std::string& text) {
    if (text == "identity") return CircleMap::identity();
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto split = [&args]() {
        std::vector<double> vals;
        std::istringstream ss(args);
        std::string tok;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        return vals;
    };
    if (kind == "rotation") {
        const auto v = split();
        if (v.size() != 1) throw CLI::ValidationError("--map-spec", "rotation:<angle>");
        return CircleMap::rotation(v[0]);
    }
    if (kind == "sine") {
        const auto v = split();
        if (v.size() != 2) throw CLI::ValidationError("--map-spec", "sine:<amplitude>,<k>");
        return CircleMap::from_displacement(sine_series(static_cast<int>(v[1]), v[0]));
    }
    if (kind == "moebius") {
        const auto v = split();
        if (v.size() != 2) throw CLI::ValidationError("--map-spec", "moebius:<re>,<im>");
        return boundary_phase(MoebiusMap(cdouble(v[0], v[1]))).map;
    }
    throw CLI::ValidationError("--map-spec", "unknown map kind: " + kind);
}

std::vector<double> parse_eps_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

struct CommonOutput {
    std::string out_dir = ".";
    // relative --out paths are rooted at $DTCLI_OUT_ROOT when set
    void ensure() {
        if (const char* root = std::getenv("DTCLI_OUT_ROOT");
            root && *root && !fs::path(out_dir).is_absolute())
            out_dir = (fs::path(root) / out_dir).string();
        fs::create_directories(out_dir);
    }
    std::string path(const std::string& name) const { return out_dir + "/" + name; }
};

//------------------------------------------------------------------------------
// dtn subcommand
//------------------------------------------------------------------------------

struct DtnArgs {
    std::string spec_file;
    double sigma1 = 1.0, sigma2 = 2.0;
    int n_modes = 128;
    double tol = 1e-12;
    std::string method = "closed";
    int grid = 256;
    bool dump = false;
    CommonOutput out;
};

int run_dtn(DtnArgs a) {
    const DomainSpec spec = load_domain_spec(a.spec_file);
    Conductivities cond(a.sigma1, a.sigma2);
    const FourierSeries f = truncated(cosine_series(), a.n_modes);
    a.out.ensure();

    DtnResult result;
    if (a.method == "closed") {
        if (!spec.is_plain_disk() || std::abs(spec.center) > 1e-14)
            throw unsupported_geometry("method=closed needs a centered plain disk");
        result = concentric_dtn(f, spec.radius, cond);
    } else if (a.method == "transplant") {
        if (spec.is_plain_disk() && std::abs(spec.center) > 1e-14) {
            result = transplant_dtn(MoebiusMap(spec.center), spec.radius, cond, cosine_series(),
                                    a.n_modes);
        } else {
            PipelineOptions opts;
            opts.degree = a.n_modes;
            opts.tol = a.tol;
            result = dtn_perturbed_disk(spec.centered_spec(), f, cond, opts);
        }
    } else if (a.method == "oracle") {
        OracleOptions opts;
        opts.grid_size = a.grid;
        InclusionSpec inc = spec.is_plain_disk()
                                ? InclusionSpec(DiskSpec(spec.center, spec.radius))
                                : InclusionSpec(spec.centered_spec());
        auto gs = fd_solve(inc, cond, f, opts);
        result.neumann = gs.neumann;
        result.meta.method = "oracle";
        result.meta.residual = gs.residual;
        result.meta.iterations = gs.iterations;
        if (a.dump) dump_grid(gs, a.out.path("grid.bin"), a.out.path("grid.json"));
    } else {
        throw CLI::ValidationError("--method", "expected closed|transplant|oracle");
    }

    write_neumann_csv(a.out.path("neumann.csv"), result.neumann);
    json config{{"spec", a.spec_file},   {"sigma1", a.sigma1}, {"sigma2", a.sigma2},
                {"n_modes", a.n_modes},  {"tol", a.tol},       {"method", a.method},
                {"grid", a.grid}};
    write_manifest(a.out.out_dir, "dtn", config);
    json summary{{"method", result.meta.method},
                 {"rho", result.meta.rho},
                 {"residual", result.meta.residual},
                 {"iterations", result.meta.iterations},
                 {"total_flux", result.neumann.coeff(0).real()}};
    write_json_file(a.out.path("summary.json"), summary);
    return exit_ok;
}

//------------------------------------------------------------------------------
// identify subcommand
//------------------------------------------------------------------------------

struct IdentifyArgs {
    std::string g_file;
    std::string synthetic_spec;
    double sigma1 = 1.0, sigma2 = 2.0;
    int n_modes = 96;
    std::string mode = "fit"; // fit | exact
    double init_b_re = 0.0, init_b_im = 0.0, init_radius = 0.0;
    CommonOutput out;
};

int run_identify(IdentifyArgs a) {
    Conductivities cond(a.sigma1, a.sigma2);
    a.out.ensure();

    FourierSeries g;
    std::optional<DomainSpec> truth;
    if (!a.g_file.empty()) {
        g = read_neumann_csv(a.g_file);
    } else if (!a.synthetic_spec.empty()) {
        const DomainSpec spec = load_domain_spec(a.synthetic_spec);
        truth = spec;
        if (spec.is_plain_disk()) {
            g = transplant_dtn(MoebiusMap(spec.center), spec.radius, cond, cosine_series(),
                               a.n_modes)
                    .neumann;
        } else {
            PipelineOptions opts;
            opts.degree = a.n_modes;
            g = dtn_perturbed_disk(spec.centered_spec(), cosine_series(), cond, opts).neumann;
        }
    } else {
        throw CLI::ValidationError("identify", "need --g or --synthetic-spec");
    }

    IdentifyOptions opts;
    opts.degree = a.n_modes;
    IdentificationResult res;
    if (a.mode == "exact") {
        res = recover_disk_exact(g, cond, opts);
    } else {
        std::optional<DiskSpec> init;
        if (a.init_radius > 0.0)
            init = DiskSpec(cdouble(a.init_b_re, a.init_b_im), a.init_radius,
                            AprioriConstants{-1.0, 1e-9}); // feasibility judged by the solver
        res = fit_disk(g, cond, init, opts);
    }

    if (truth.has_value() && !truth->is_plain_disk()) {
        res.symdiff_to_truth = symmetric_difference_area(
            truth->centered_spec(), DiskSpec(res.center, res.radius, AprioriConstants{0.0, 0.01}));
    } else if (truth.has_value()) {
        res.symdiff_to_truth = symmetric_difference_area(
            DiskSpec(truth->center, truth->radius, AprioriConstants{0.0, 0.01}),
            DiskSpec(res.center, res.radius, AprioriConstants{0.0, 0.01}));
    }

    json out{{"b", {res.moebius_b.real(), res.moebius_b.imag()}},
             {"transplant_radius", res.transplant_radius},
             {"center", {res.center.real(), res.center.imag()}},
             {"radius", res.radius},
             {"residual", res.residual},
             {"iterations", res.iterations},
             {"status", res.status == IdentifyStatus::ok
                            ? "ok"
                            : (res.status == IdentifyStatus::degenerate ? "degenerate"
                                                                        : "no_disk")}};
    if (res.symdiff_to_truth) out["symdiff_to_truth"] = *res.symdiff_to_truth;
    write_json_file(a.out.path("identification.json"), out);
    json config{{"g", a.g_file},          {"synthetic_spec", a.synthetic_spec},
                {"sigma1", a.sigma1},     {"sigma2", a.sigma2},
                {"n_modes", a.n_modes},   {"mode", a.mode},
                {"init_radius", a.init_radius}};
    write_manifest(a.out.out_dir, "identify", config);
    return exit_ok;
}

//------------------------------------------------------------------------------
// sweep subcommand
//------------------------------------------------------------------------------

struct SweepArgs {
    std::string what = "dtn-error"; // dtn-error | stability | theodorsen
    std::string delta_shape = "cos3";
    std::string eps_list = "0.004,0.008,0.016,0.032";
    double radius = 0.4;
    double sigma1 = 1.0, sigma2 = 2.0;
    int n_modes = 128;
    int jobs = 1;
    unsigned seed = 0;
    CommonOutput out;
};

int run_sweep(SweepArgs a) {
    const FourierSeries delta = parse_delta_shape(a.delta_shape);
    const std::vector<double> eps = parse_eps_list(a.eps_list);
    if (eps.empty()) throw CLI::ValidationError("--eps-list", "empty eps list");
    Conductivities cond(a.sigma1, a.sigma2);
    a.out.ensure();
    json config{{"what", a.what},       {"delta_shape", a.delta_shape},
                {"eps_list", a.eps_list}, {"radius", a.radius},
                {"sigma1", a.sigma1},   {"sigma2", a.sigma2},
                {"n_modes", a.n_modes}, {"jobs", a.jobs},
                {"seed", a.seed}};
    write_manifest(a.out.out_dir, "sweep", config);

    if (a.what == "dtn-error") {
        PipelineOptions opts;
        opts.degree = a.n_modes;
        std::vector<DtnSweepRow> rows(eps.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= eps.size()) return;
                PerturbedDiskSpec spec = PerturbedDiskSpec::profile(a.radius, delta, eps[i]);
                const DtnResult full =
                    dtn_perturbed_disk(spec, truncated(cosine_series(), a.n_modes), cond, opts);
                const DtnResult base =
                    concentric_dtn(truncated(cosine_series(), a.n_modes), a.radius, cond);
                rows[i] = DtnSweepRow{eps[i],
                                      sobolev_norm(full.neumann - base.neumann, h_minus_half),
                                      full.meta.xi_w1inf, full.meta.rho};
            }
        };
        std::vector<std::thread> pool;
        const int workers = std::max(1, std::min<int>(a.jobs, static_cast<int>(eps.size())));
        for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();

        CsvWriter csv(a.out.path("sweep.csv"), "eps,error_hminushalf,xi_w1inf,rho");
        std::vector<double> xs, ys;
        for (const auto& r : rows) {
            csv.row({r.eps, r.error_hminushalf, r.xi_w1inf, r.rho});
            if (r.eps > 0 && r.error_hminushalf > 0) {
                xs.push_back(r.eps);
                ys.push_back(r.error_hminushalf);
            }
        }
        const SlopeFit fit = xs.size() >= 2 ? loglog_fit(xs, ys) : SlopeFit{};
        write_json_file(a.out.path("slope.json"),
                        json{{"slope", fit.slope}, {"r_squared", fit.r_squared}});
        return exit_ok;
    }

    if (a.what == "stability") {
        IdentifyOptions iopts;
        iopts.degree = std::min(a.n_modes, 96);
        PipelineOptions popts;
        popts.degree = a.n_modes;
        const StabilityTable table =
            stability_experiment(delta, eps, cond, a.radius, iopts, popts);
        CsvWriter csv(a.out.path("stability.csv"), "eps,symdiff,residual,b_re,b_im,R");
        for (const auto& r : table.rows)
            csv.row({r.eps, r.symdiff, r.residual, r.center.real(), r.center.imag(), r.radius});
        write_json_file(a.out.path("slope.json"),
                        json{{"slope", table.symdiff_slope.slope},
                             {"r_squared", table.symdiff_slope.r_squared},
                             {"envelope_intercept", table.symdiff_slope.intercept}});
        return exit_ok;
    }

    if (a.what == "theodorsen") {
        // deviation from the first-order correspondence phi = theta - (eps/R) H delta
        const FourierSeries hdelta = hilbert_transform(delta);
        CsvWriter csv(a.out.path("theodorsen.csv"), "eps,deviation_sup");
        std::vector<double> xs, ys;
        for (double e : eps) {
            const CircleMap phi = theodorsen_solve(a.radius, delta, e);
            double dev = 0.0;
            for (int j = 0; j < 1024; ++j) {
                const double t = two_pi * j / 1024.0;
                const double first_order = t - (e / a.radius) * evaluate(hdelta, t).real();
                dev = std::max(dev, std::abs(phi.xi(t) - first_order));
            }
            csv.row({e, dev});
            if (e > 0 && dev > 0) {
                xs.push_back(e);
                ys.push_back(dev);
            }
        }
        const SlopeFit fit = xs.size() >= 2 ? loglog_fit(xs, ys) : SlopeFit{};
        write_json_file(a.out.path("slope.json"),
                        json{{"slope", fit.slope}, {"r_squared", fit.r_squared}});
        return exit_ok;
    }

    throw CLI::ValidationError("--what", "expected dtn-error|stability|theodorsen");
}

//------------------------------------------------------------------------------
// precomp subcommand
//------------------------------------------------------------------------------

struct PrecompArgs {
    std::string map_spec = "sine:0.05,1";
    int n_max = 64;
    double delta = 0.5; // H^{1+delta} regularity used for bounds
    std::string eps_list = "0.005,0.01,0.02,0.04,0.08";
    int norm_modes = 128;
    CommonOutput out;
};

int run_precomp(PrecompArgs a) {
    const CircleMap xi = parse_map_spec(a.map_spec);
    a.out.ensure();
    json config{{"map_spec", a.map_spec}, {"n_max", a.n_max},           {"delta", a.delta},
                {"eps_list", a.eps_list}, {"norm_modes", a.norm_modes}};
    write_manifest(a.out.out_dir, "precomp", config);

    // basis distortion bench: ratio against n^{1+2d} w_{2d}(||xi-I||)
    const double dist = w1inf_distance(xi);
    const double halfd = 0.5 * a.delta; // delta in (0, 1/2) for the basis bench
    ModulusOfContinuity w2d(std::min(2.0 * halfd, 0.999));
    const double denom_base = w2d(std::max(dist, 1e-300));
    {
        CsvWriter csv(a.out.path("distortion.csv"), "n,distortion,bound,ratio");
        for (int n = 1; n <= a.n_max; ++n) {
            const double d = basis_distortion(n, xi);
            const double bound = std::pow(n, 1.0 + 2.0 * halfd) * denom_base;
            csv.row(n, {d, bound, bound > 0.0 ? d / bound : 0.0});
        }
    }
    // composition error bench for u = cos theta with the displacement scaled
    {
        CsvWriter csv(a.out.path("composition.csv"), "eps,error,bound");
        for (double e : parse_eps_list(a.eps_list)) {
            CircleMap scaled = CircleMap::from_displacement(e * xi.displacement());
            const CompositionError ce = composition_error(cosine_series(), scaled, a.delta);
            csv.row({e, ce.error, ce.bound});
        }
    }
    // norm summary
    {
        const NormSymmetry ns = norm_symmetry_check(xi, a.norm_modes);
        json summary{{"map", a.map_spec},
                     {"w1inf", dist},
                     {"doubling_constant", doubling_constant(xi)},
                     {"operator_norm", ns.norm_forward},
                     {"inverse_operator_norm", ns.norm_inverse},
                     {"norm_gap", std::abs(ns.norm_forward - ns.norm_inverse)}};
        write_json_file(a.out.path("norms.json"), summary);
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral toolkit for the inverse conductivity problem on the unit disk"};
    app.require_subcommand(1);

    DtnArgs dtn_args;
    auto* cmd_dtn = app.add_subcommand("dtn", "forward Dirichlet-to-Neumann solve");
    cmd_dtn->add_option("--spec", dtn_args.spec_file, "domain spec JSON")->required();
    cmd_dtn->add_option("--sigma1", dtn_args.sigma1, "background conductivity");
    cmd_dtn->add_option("--sigma2", dtn_args.sigma2, "inclusion conductivity");
    cmd_dtn->add_option("--n-modes", dtn_args.n_modes, "truncation degree");
    cmd_dtn->add_option("--tol", dtn_args.tol, "interface solve tolerance");
    cmd_dtn->add_option("--method", dtn_args.method, "closed|transplant|oracle");
    cmd_dtn->add_option("--grid", dtn_args.grid, "oracle grid size");
    cmd_dtn->add_flag("--dump-grid", dtn_args.dump, "dump the oracle potential");
    cmd_dtn->add_option("--out", dtn_args.out.out_dir, "output directory");

    IdentifyArgs id_args;
    auto* cmd_identify = app.add_subcommand("identify", "disk recovery from one Cauchy pair");
    cmd_identify->add_option("--g", id_args.g_file, "Neumann coefficients CSV");
    cmd_identify->add_option("--synthetic-spec", id_args.synthetic_spec,
                             "generate g from this domain spec");
    cmd_identify->add_option("--sigma1", id_args.sigma1, "background conductivity");
    cmd_identify->add_option("--sigma2", id_args.sigma2, "inclusion conductivity");
    cmd_identify->add_option("--n-modes", id_args.n_modes, "truncation degree");
    cmd_identify->add_option("--mode", id_args.mode, "fit|exact");
    cmd_identify->add_option("--init-b-re", id_args.init_b_re, "initial center, real part");
    cmd_identify->add_option("--init-b-im", id_args.init_b_im, "initial center, imag part");
    cmd_identify->add_option("--init-radius", id_args.init_radius,
                             "initial radius (enables init)");
    cmd_identify->add_option("--out", id_args.out.out_dir, "output directory");

    SweepArgs sweep_args;
    auto* cmd_sweep = app.add_subcommand("sweep", "eps sweeps with slope fits");
    cmd_sweep->add_option("--what", sweep_args.what, "dtn-error|stability|theodorsen");
    cmd_sweep->add_option("--delta-shape", sweep_args.delta_shape,
                          "e.g. cos3 or cos3:0.5+sin1:0.1");
    cmd_sweep->add_option("--eps-list", sweep_args.eps_list, "comma-separated eps values");
    cmd_sweep->add_option("--radius", sweep_args.radius, "base disk radius");
    cmd_sweep->add_option("--sigma1", sweep_args.sigma1, "background conductivity");
    cmd_sweep->add_option("--sigma2", sweep_args.sigma2, "inclusion conductivity");
    cmd_sweep->add_option("--n-modes", sweep_args.n_modes, "truncation degree");
    cmd_sweep->add_option("--jobs", sweep_args.jobs, "parallel sweep workers");
    cmd_sweep->add_option("--seed", sweep_args.seed, "seed echoed into the manifest");
    cmd_sweep->add_option("--out", sweep_args.out.out_dir, "output directory");

    PrecompArgs pre_args;
    auto* cmd_precomp = app.add_subcommand("precomp", "precomposition benches");
    cmd_precomp->add_option("--map-spec", pre_args.map_spec,
                            "identity|rotation:c|sine:a,k|moebius:re,im");
    cmd_precomp->add_option("--n-max", pre_args.n_max, "largest basis mode");
    cmd_precomp->add_option("--delta", pre_args.delta, "H^{1+delta} regularity exponent");
    cmd_precomp->add_option("--eps-list", pre_args.eps_list, "composition-error eps grid");
    cmd_precomp->add_option("--norm-modes", pre_args.norm_modes, "operator-norm truncation");
    cmd_precomp->add_option("--out", pre_args.out.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (cmd_dtn->parsed()) return run_dtn(dtn_args);
        if (cmd_identify->parsed()) return run_identify(id_args);
        if (cmd_sweep->parsed()) return run_sweep(sweep_args);
        if (cmd_precomp->parsed()) return run_precomp(pre_args);
        std::fprintf(stderr, "no subcommand\n");
        return exit_config;
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const optimization_failure& e) {
        std::fprintf(stderr, "numerical failure: %s\ntrace:\n%s\n", e.what(), e.trace.c_str());
        return exit_numerical;
    } catch (const no_disk_found& e) {
        std::fprintf(stderr, "numerical failure: %s (best residual %.3e)\n", e.what(),
                     e.best.residual);
        return exit_numerical;
    } catch (const numerical_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return exit_numerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_numerical;
    }
}
