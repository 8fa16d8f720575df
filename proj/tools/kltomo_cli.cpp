// kltomo command line: validation suites and Busemann-Petty experiments with
// JSON/CSV reports. Subcommands: validate | bp | ibody | radon.
//
// Exit codes: 0 success, 1 usage/parse error, 2 check failure or violated
// precondition, 3 numerical non-convergence.

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <map>
#include <filesystem>
#include <sstream>
#include <string>

#include <kltomo/io.hpp>
#include <kltomo/validate.hpp>
#include <kltomo/version.hpp>

namespace fs = std::filesystem;
using namespace kltomo;

namespace {

struct CommonArgs {
    int n = 6, i = 4, ell = 1;
    double q = 4.0;
    long samples = 2000;
    std::uint64_t seed = 1;
    int degree = 48;
    double eps_max = 0.5;
    double tol = 1e-8;
    int threads = 1;
    std::string out = "out";
    std::string format = "json";
};

void add_common(CLI::App* sub, CommonArgs& a, std::string& config_path, bool with_i = true) {
    sub->add_option("--n", a.n, "ambient dimension");
    if (with_i) sub->add_option("--i", a.i, "section dimension");
    sub->add_option("--ell", a.ell, "symmetry split dimension");
    sub->add_option("--q", a.q, "exponent of the (q,ell)-ball");
    sub->add_option("--samples", a.samples, "Monte-Carlo / section sample count");
    sub->add_option("--seed", a.seed, "master random seed");
    sub->add_option("--degree", a.degree, "harmonic truncation K");
    sub->add_option("--eps-max", a.eps_max, "upper bound for the counterexample epsilon");
    sub->add_option("--tol", a.tol, "relative section tolerance");
    sub->add_option("--threads", a.threads, "worker threads (0 = hardware)");
    sub->add_option("--out", a.out, "output directory");
    sub->add_option("--format", a.format, "report format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--config", config_path, "flat key=value config file (flags win)");
}

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key=value files; '#' starts a comment; explicit flags always win.
// Every key must name an extra handler or a common flag of the subcommand.
void apply_config(const std::string& path, CLI::App* sub, CommonArgs& a,
                  const std::map<std::string, std::function<void(const std::string&)>>& extra) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    auto taken = [&](const std::string& flag) { return sub->count("--" + flag) > 0; };
    auto parse_err = [&](const std::string& line, const std::string& why) {
        throw ConfigError("config parse error in '" + line + "': " + why);
    };
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos) parse_err(line, "expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        try {
            if (auto it = extra.find(key); it != extra.end()) {
                if (!taken(key)) it->second(value);
            } else if (key == "n") {
                if (!taken(key)) a.n = std::stoi(value);
            } else if (key == "i") {
                if (!taken(key)) a.i = std::stoi(value);
            } else if (key == "ell") {
                if (!taken(key)) a.ell = std::stoi(value);
            } else if (key == "q") {
                if (!taken(key)) a.q = std::stod(value);
            } else if (key == "samples") {
                if (!taken(key)) a.samples = std::stol(value);
            } else if (key == "seed") {
                if (!taken(key)) a.seed = std::stoull(value);
            } else if (key == "degree") {
                if (!taken(key)) a.degree = std::stoi(value);
            } else if (key == "eps-max" || key == "eps_max") {
                if (!taken("eps-max")) a.eps_max = std::stod(value);
            } else if (key == "tol") {
                if (!taken(key)) a.tol = std::stod(value);
            } else if (key == "threads") {
                if (!taken(key)) a.threads = std::stoi(value);
            } else if (key == "out") {
                if (!taken(key)) a.out = value;
            } else if (key == "format") {
                if (!taken(key)) a.format = value;
            } else {
                parse_err(line, "unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            parse_err(line, "bad value for '" + key + "'");
        } catch (const std::out_of_range&) {
            parse_err(line, "value out of range for '" + key + "'");
        }
    }
}

Json config_echo(const CommonArgs& a, const std::string& mode = "") {
    Json j;
    j["version"] = kVersion;
    if (!mode.empty()) j["mode"] = mode;
    j["n"] = a.n;
    j["i"] = a.i;
    j["ell"] = a.ell;
    j["q"] = a.q;
    j["samples"] = a.samples;
    j["seed"] = a.seed;
    j["degree"] = a.degree;
    j["eps_max"] = a.eps_max;
    j["tol"] = a.tol;
    j["threads"] = a.threads;
    return j;
}

int cmd_validate(const CommonArgs& a, bool with_dims) {
    ValidationConfig cfg;
    cfg.seed = a.seed;
    if (with_dims) cfg.extra_dims.push_back(Dims(a.n, a.i, a.ell));
    const ValidationReport rep = run_validation(cfg);
    Json j = to_json(rep);
    j["config"] = config_echo(a);
    write_json_file(fs::path(a.out) / "validate.json", j);
    {
        std::vector<int> ks;
        for (int k = 0; k <= 48; k += 4) ks.push_back(k);
        const std::vector<double> alphas{-3.5, -1.2, 0.25, 0.5, 0.75};
        std::ostringstream csv;
        MultiplierTable::for_dimension(a.n >= 3 ? a.n : 6).export_csv(csv, ks, alphas);
        write_text_file(fs::path(a.out) / "multipliers.csv", csv.str());
    }
    for (const auto& c : rep.checks)
        std::printf("[%s] %-28s residual=%.3e tolerance=%.3e\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.residual, c.tolerance);
    return rep.all_pass ? 0 : 2;
}

int cmd_bp(const CommonArgs& a, const std::string& mode, int lambda_grid,
           const std::string& b_json_path, double a_scale) {
    const Dims dims(a.n, a.i, a.ell);
    const fs::path out(a.out);

    if (mode == "negative") {
        CounterexampleOptions copt;
        copt.K = a.degree;
        copt.eps_max = a.eps_max;
        copt.seed = a.seed;
        const Counterexample ce = construct_counterexample(dims, copt);

        VerifyOptions vopt;
        vopt.haar_samples = a.samples;
        vopt.lambda_grid = lambda_grid;
        vopt.seed = a.seed + 1;
        vopt.tol.section_rel = a.tol;
        const BpReport rep = verify_counterexample(ce.a_profile, dims, vopt);

        Json j = to_json(rep);
        j["construction"] = to_json(ce.spec);
        j["environment"] = {{"inner_nodes", vopt.reduced.inner_nodes},
                            {"outer_degree", vopt.reduced.outer_degree},
                            {"lambda_grid", lambda_grid},
                            {"truncation_K", copt.K}};
        j["config"] = config_echo(a, mode);
        write_json_file(out / "bp_report.json", j);

        // section-by-section table on a capped sample
        std::vector<std::vector<double>> spectra;
        std::vector<double> va, vb;
        const Profile b_profile = Profile::ql_ball(4.0);
        ReducedOptions ropt;
        ropt.inner_nodes = 48;
        ropt.outer_degree = 48;
        const long table_rows = std::min<long>(a.samples, 512);
        for (long trial = 0; trial < table_rows; ++trial) {
            Rng rng(vopt.seed, static_cast<std::uint64_t>(trial));
            const auto sp = canonical_lambdas(haar_sample_frame(dims, rng), dims);
            spectra.push_back(sp.lambdas);
            va.push_back(section_volume_profile(ce.a_profile, sp, dims, ropt).value);
            vb.push_back(section_volume_profile(b_profile, sp, dims, ropt).value);
        }
        write_text_file(out / "sections.csv", section_table_csv(spectra, va, vb));

        // profile dumps: A, B, phi, h
        std::ostringstream apcsv, bpcsv;
        ce.a_profile.save_csv(apcsv);
        b_profile.save_csv(bpcsv);
        write_text_file(out / "a_profile.csv", apcsv.str());
        write_text_file(out / "b_profile.csv", bpcsv.str());
        const InvariantBasis basis(a.n, a.ell, copt.K);
        const auto phi = cosine_transform(
            expand_invariant_fn([&](double t) { return std::pow(b_profile(t), a.n - a.i); },
                                basis),
            1.0 - a.i);
        const auto ts = ChebyshevInterpolant::open_nodes(257);
        std::vector<double> phi_vals, h_vals;
        for (double t : ts) {
            phi_vals.push_back(reconstruct(phi, basis, t));
            h_vals.push_back(reconstruct(ce.h, basis, t));
        }
        write_text_file(out / "phi.csv", grid_function_csv("phi", ts, phi_vals));
        write_text_file(out / "h.csv", grid_function_csv("h", ts, h_vals));

        std::printf("verdict: %s (fraction_ok=%.6f, volume margin=%.3e, error=%.3e)\n",
                    rep.verdict.c_str(), rep.fraction_ok, rep.volume_margin, rep.volume_error);
        return rep.verdict == "true" ? 0 : 2;
    }

    // positive modes: A is a (q,ell)-ball profile (optionally scaled); B comes
    // from --b-json or defaults to the same body.
    const Profile base = Profile::ql_ball(a.q);
    const Profile a_profile =
        a_scale == 1.0
            ? base
            : Profile::closed_form([base, a_scale](double t) { return a_scale * base(t); });
    StarBody b_body = StarBody::ql_ball(a.n, a.ell, a.q);
    if (!b_json_path.empty()) {
        std::ifstream is(b_json_path);
        if (!is) throw std::invalid_argument("--b-json: cannot open " + b_json_path);
        nlohmann::json bj;
        is >> bj;
        b_body = star_body_from_json(bj);
    }
    BpPositiveOptions popt;
    popt.lambda_grid = lambda_grid;
    popt.seed = a.seed;
    popt.threads = a.threads;
    popt.tol.section_rel = a.tol;
    popt.mc_section_samples = std::max<long>(1024, a.samples / 4);
    const BpReport rep = bp_positive_check(a_profile, b_body, dims, mode, popt);

    Json j = to_json(rep);
    j["environment"] = {{"lambda_grid", lambda_grid},
                        {"frames_per_lambda", popt.frames_per_lambda},
                        {"mc_section_samples", popt.mc_section_samples},
                        {"symmetrize_nodes", popt.symmetrize_nodes}};
    j["config"] = config_echo(a, mode);
    j["a_scale"] = a_scale;
    write_json_file(out / "bp_report.json", j);

    std::vector<std::vector<double>> spectra;
    std::vector<double> va, vb;
    for (double lambda : ChebyshevInterpolant::open_nodes(lambda_grid)) {
        std::vector<double> sp(static_cast<std::size_t>(dims.m()), lambda);
        spectra.push_back(sp);
        va.push_back(section_volume_equal_angle(a_profile, lambda, dims).value);
        if (b_body.profile()) {
            vb.push_back(section_volume_equal_angle(*b_body.profile(), lambda, dims).value);
        } else {
            Rng rng(a.seed, 9000 + static_cast<std::uint64_t>(lambda * 1e6));
            const Frame xi = equal_angle_frame(dims, lambda, rng);
            vb.push_back(
                section_volume_body_mc(b_body, xi, popt.mc_section_samples, a.seed).value);
        }
    }
    write_text_file(out / "sections.csv", section_table_csv(spectra, va, vb));

    if (mode == "positive-b") {
        const auto g = solve_g(a_profile, AbelParams{dims});
        write_text_file(out / "g.csv", grid_function_csv("g", g.ts, g.values));
    }

    std::printf("verdict: %s (fraction_ok=%.6f)\n", rep.verdict.c_str(), rep.fraction_ok);
    return rep.verdict == "violation" ? 2 : 0;
}

int cmd_ibody(const CommonArgs& a, int kth) {
    const auto rep = intersection_body_test(Profile::ql_ball(a.q), a.n, a.ell, kth, a.degree);
    Json j = to_json(rep);
    j["k"] = kth;
    j["config"] = config_echo(a);
    write_json_file(fs::path(a.out) / "ibody.json", j);
    write_text_file(fs::path(a.out) / "mu.csv", grid_function_csv("mu", rep.ts, rep.mu));
    std::printf("B^%d_{%g,%d} %s I^%d_%d (mu_min=%.6g, truncation error=%.3g)\n", a.n, a.q,
                a.ell, rep.is_member ? "IS in" : "is NOT in", a.n, kth, rep.mu_min,
                rep.truncation_error);
    return 0;
}

int cmd_radon(const CommonArgs& a, double lambda) {
    const Dims dims(a.n, a.i, a.ell);
    const Profile rho = Profile::ql_ball(a.q);
    const int i = a.i, ell = a.ell;
    auto f0 = [&rho, i](double t) { return std::pow(rho(t), i); };
    auto f = [&f0, ell](std::span<const double> th) { return f0(cos2_to_rell(th, ell)); };

    std::vector<std::vector<double>> spectra;
    std::vector<double> direct, reduced;
    double worst = 0.0;
    const bool quad_ok = a.i <= 4;
    const long frames = std::min<long>(a.samples, 512);
    for (long trial = 0; trial < frames; ++trial) {
        Rng rng(a.seed, static_cast<std::uint64_t>(trial));
        const Frame xi = haar_sample_frame(dims, rng);
        const auto sp = canonical_lambdas(xi, dims);
        const double d = quad_ok
                             ? radon_direct_quadrature(f, xi).value
                             : radon_direct_mc(f, xi, a.samples, a.seed + trial).value;
        const double r = radon_reduced_fn(f0, sp, dims).value;
        spectra.push_back(sp.lambdas);
        direct.push_back(d);
        reduced.push_back(r);
        worst = std::max(worst, std::abs(d - r) / (1.0 + std::abs(d)));
    }
    if (lambda >= 0.0) {
        std::vector<double> sp(static_cast<std::size_t>(dims.m()), lambda);
        Rng rng(a.seed, 777);
        const Frame xi = equal_angle_frame(dims, lambda, rng);
        spectra.push_back(sp);
        direct.push_back(quad_ok ? radon_direct_quadrature(f, xi).value
                                 : radon_direct_mc(f, xi, a.samples, a.seed + 999).value);
        reduced.push_back(radon_equal_angle_fn(f0, lambda, dims).value);
    }

    std::string csv;
    for (int c = 0; c < dims.m(); ++c) csv += "lambda" + std::to_string(c + 1) + ",";
    csv += "direct,reduced,abs_diff\n";
    for (std::size_t r = 0; r < spectra.size(); ++r) {
        for (double l : spectra[r]) csv += csv_cell(l) + ",";
        csv += csv_cell(direct[r]) + "," + csv_cell(reduced[r]) + "," +
               csv_cell(std::abs(direct[r] - reduced[r])) + "\n";
    }
    write_text_file(fs::path(a.out) / "radon_compare.csv", csv);

    Json j;
    j["config"] = config_echo(a);
    j["frames"] = static_cast<long>(spectra.size());
    j["direct_mode"] = quad_ok ? "quadrature" : "monte-carlo";
    j["max_rel_diff"] = worst;
    write_json_file(fs::path(a.out) / "radon.json", j);
    std::printf("max relative difference over %zu frames: %.3e (%s oracle)\n", spectra.size(),
                worst, quad_ok ? "quadrature" : "monte-carlo");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kltomo: spherical Radon transforms and Busemann-Petty experiments for "
                 "K_ell-symmetric star bodies"};
    app.require_subcommand(1);

    CommonArgs va, ba, ia, ra;
    std::string va_cfg, ba_cfg, ia_cfg, ra_cfg;
    std::string bp_mode;
    int lambda_grid = 33;
    std::string b_json_path;
    double a_scale = 1.0;
    int kth = 2;
    double radon_lambda = -1.0;

    CLI::App* validate = app.add_subcommand("validate", "run the cross-module identity suite");
    add_common(validate, va, va_cfg);

    CLI::App* bp = app.add_subcommand("bp", "Busemann-Petty experiments");
    add_common(bp, ba, ba_cfg);
    bp->add_option("--mode", bp_mode, "positive-a | positive-b | negative")
        ->check(CLI::IsMember({"positive-a", "positive-b", "negative"}));
    bp->add_option("--lambda-grid", lambda_grid, "equal-angle lambda grid size");
    bp->add_option("--b-json", b_json_path, "JSON body spec for the comparison body B");
    bp->add_option("--a-scale", a_scale, "radial scale applied to A");

    CLI::App* ibody = app.add_subcommand("ibody", "intersection-body membership of a (q,ell)-ball");
    add_common(ibody, ia, ia_cfg, false);
    ibody->add_option("--k", kth, "intersection-body order k");

    CLI::App* radon = app.add_subcommand("radon", "direct-vs-reduced Radon comparison dump");
    add_common(radon, ra, ra_cfg);
    radon->add_option("--lambda", radon_lambda, "additional equal-angle lambda row");

    try {
        app.parse(argc, argv);
        if (validate->parsed()) {
            if (!va_cfg.empty()) apply_config(va_cfg, validate, va, {});
            return cmd_validate(va, validate->count("--n") > 0);
        }
        if (bp->parsed()) {
            if (!ba_cfg.empty())
                apply_config(ba_cfg, bp, ba,
                             {{"mode", [&](const std::string& v) { bp_mode = v; }},
                              {"lambda-grid",
                               [&](const std::string& v) { lambda_grid = std::stoi(v); }},
                              {"b-json", [&](const std::string& v) { b_json_path = v; }},
                              {"a-scale",
                               [&](const std::string& v) { a_scale = std::stod(v); }}});
            if (bp_mode.empty())
                throw std::invalid_argument("bp: --mode is required (flag or config)");
            return cmd_bp(ba, bp_mode, lambda_grid, b_json_path, a_scale);
        }
        if (ibody->parsed()) {
            if (!ia_cfg.empty())
                apply_config(ia_cfg, ibody, ia,
                             {{"k", [&](const std::string& v) { kth = std::stoi(v); }}});
            return cmd_ibody(ia, kth);
        }
        if (radon->parsed()) {
            if (!ra_cfg.empty())
                apply_config(ra_cfg, radon, ra,
                             {{"lambda",
                               [&](const std::string& v) { radon_lambda = std::stod(v); }}});
            return cmd_radon(ra, radon_lambda);
        }
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "input parse error: %s\n", e.what());
        return 1;
    } catch (const NonConvergence& e) {
        std::fprintf(stderr, "non-convergence: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "precondition violated: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
