#include "malign/cli.hpp"

#include <chrono>
#include <iostream>

#include <CLI11.hpp>

namespace malign {

namespace {

/// "lcs-indicator" (dimensions from the instance), "lcs-indicator:k:m", or a
/// model JSON path.
ScoreModel resolve_model(const std::string& spec, const Instance* instance) {
    if (spec.rfind("lcs-indicator", 0) == 0) {
        if (spec == "lcs-indicator") {
            if (!instance) throw Error(Errc::BadConfig, "lcs-indicator needs :k:m or an instance");
            int max_symbol = 0;
            for (const auto& seq : instance->sequences)
                for (int v : seq) max_symbol = std::max(max_symbol, v);
            return lcs_indicator_model(max_symbol + 1, instance->arity());
        }
        int k = 0, m = 0;
        if (std::sscanf(spec.c_str(), "lcs-indicator:%d:%d", &k, &m) != 2)
            throw Error(Errc::BadConfig, "expected lcs-indicator:<alphabet>:<m>");
        return lcs_indicator_model(k, m);
    }
    return load_score_model_file(spec);
}

std::vector<int> to_int_vec(const ordered_json& j) {
    std::vector<int> out;
    for (const auto& v : j) out.push_back(v.get<int>());
    return out;
}

std::vector<double> to_double_vec(const ordered_json& j) {
    std::vector<double> out;
    for (const auto& v : j) out.push_back(v.get<double>());
    return out;
}

McConfig mc_config(const ordered_json& cfg, int workers) {
    McConfig mc;
    mc.seed = cfg.at("seed").get<std::uint64_t>();
    mc.replicates = cfg.at("reps").get<int>();
    mc.workers = workers;
    return mc;
}

std::vector<std::vector<double>> default_surface_grid() {
    std::vector<std::vector<double>> grid;
    for (int i = -4; i <= 4; ++i) {
        const double q1 = 1.0 + 0.1 * i;
        grid.push_back({q1, 2.0 - q1});
    }
    return grid;
}

} // namespace

ExecResult execute_command(const std::string& command, const ordered_json& cfg, int workers) {
    ExecResult res;
    if (command == "score") {
        const Instance instance = load_instance_file(cfg.at("instance").get<std::string>());
        const ScoreModel model = resolve_model(cfg.at("model").get<std::string>(), &instance);
        instance.validate(model.alphabet());
        const AlignmentResult r = align_exact(instance, model, cfg.value("path", false));
        res.report = to_json(r, model);
    } else if (command == "diag") {
        const Instance instance = load_instance_file(cfg.at("instance").get<std::string>());
        const ScoreModel model = resolve_model(cfg.at("model").get<std::string>(), &instance);
        instance.validate(model.alphabet());
        const AlignmentResult r = align_exact(instance, model, true);
        const int v = cfg.at("v").get<int>();
        const BlockDecomposition decomp = decompose_cells(*r.path, instance, model, v);
        res.report = to_json(decomp);
        res.report["L"] = score_to_rational_string(r.score, model.scale());
        DiagonalConfig dc;
        dc.p_lo = to_double_vec(cfg.at("p_lo"));
        dc.p_hi = to_double_vec(cfg.at("p_hi"));
        dc.epsilon = cfg.at("epsilon").get<double>();
        const EEventResult e = check_E_event(decomp, dc);
        res.report["E_event"] =
            ordered_json{{"holds", e.holds}, {"good_fraction", json_num(e.good_fraction)}};
        res.report["D_event"] =
            check_D_event(*r.path, instance.lengths()[0], dc, v);
    } else if (command == "gamma") {
        const ScoreModel model = resolve_model(cfg.at("model").get<std::string>(), nullptr);
        const SequenceDistribution dist = load_distribution_file(
            cfg.at("dist").get<std::string>(), model.alphabet_size(), model.arity());
        McConfig mc = mc_config(cfg, workers);
        mc.n_grid = to_int_vec(cfg.at("n_grid"));
        const GammaCurveReport r = estimate_gamma_curve(model, dist, mc);
        res.report = to_json(r);
        res.csv = csv_of(r);
        std::vector<double> xs, ys;
        for (const auto& p : r.points) {
            xs.push_back(p.n);
            ys.push_back(round_sig12(p.gamma_n));
        }
        res.svg = svg_line_chart(xs, ys, "n", "gamma_n");
    } else if (command == "surface") {
        const ScoreModel model = resolve_model(cfg.at("model").get<std::string>(), nullptr);
        const SequenceDistribution dist = load_distribution_file(
            cfg.at("dist").get<std::string>(), model.alphabet_size(), model.arity());
        const McConfig mc = mc_config(cfg, workers);
        std::vector<std::vector<double>> grid;
        if (cfg.at("grid").is_string())
            grid = default_surface_grid();
        else
            for (const auto& q : cfg.at("grid")) grid.push_back(to_double_vec(q));
        const SurfaceReport r =
            estimate_gamma_surface(model, dist, cfg.at("n").get<int>(), grid, mc);
        res.report = to_json(r);
        res.csv = csv_of(r);
    } else if (command == "hoeffding") {
        const ScoreModel model = resolve_model(cfg.at("model").get<std::string>(), nullptr);
        const SequenceDistribution dist = load_distribution_file(
            cfg.at("dist").get<std::string>(), model.alphabet_size(), model.arity());
        const McConfig mc = mc_config(cfg, workers);
        const HoeffdingReport r = hoeffding_audit(model, dist, cfg.at("n").get<int>(),
                                                  to_double_vec(cfg.at("t_grid")), mc);
        res.report = to_json(r);
        res.csv = csv_of(r);
    } else if (command == "clt") {
        const ScoreModel model = resolve_model(cfg.at("model").get<std::string>(), nullptr);
        const SequenceDistribution dist = load_distribution_file(
            cfg.at("dist").get<std::string>(), model.alphabet_size(), model.arity());
        const McConfig mc = mc_config(cfg, workers);
        const CltSeries r = clt_report(model, dist, to_int_vec(cfg.at("n_grid")), mc,
                                       cfg.value("c_star", 0.01));
        res.report = to_json(r);
        res.csv = csv_of(r);
        std::vector<double> xs, ys;
        for (const auto& row : r.rows) {
            xs.push_back(row.n);
            ys.push_back(round_sig12(row.dk_hat));
        }
        res.svg = svg_line_chart(xs, ys, "n", "dk");
    } else if (command == "stein") {
        const ScoreModel model = resolve_model(cfg.at("model").get<std::string>(), nullptr);
        const SequenceDistribution dist = load_distribution_file(
            cfg.at("dist").get<std::string>(), model.alphabet_size(), model.arity());
        const std::string mode = cfg.at("mode").get<std::string>();
        const int n = cfg.at("n").get<int>();
        const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
        if (mode == "bound") {
            BoundConfig bc;
            bc.n = n;
            bc.outer_reps = cfg.at("outer").get<int>();
            bc.inner_samples = cfg.at("inner").get<int>();
            bc.sigma_reps = cfg.value("sigma_reps", 2000);
            bc.seed = seed;
            bc.workers = workers;
            res.report = to_json(bound_report(model, dist, bc));
        } else {
            Rng rng = Rng::stream(seed, 0);
            const PairedSample paired = PairedSample::draw(model, dist, n, rng);
            if (mode == "exact") {
                res.report = to_json(stein_exact(model, paired));
            } else if (mode == "sampled") {
                res.report = to_json(
                    stein_sampled(model, paired, cfg.at("samples").get<std::uint64_t>(), rng));
            } else {
                throw Error(Errc::BadConfig, "mode must be exact, sampled, or bound");
            }
        }
    } else if (command == "bm") {
        BmConfig bc;
        bc.n = cfg.at("n").get<int>();
        const std::string mode = cfg.at("mode").get<std::string>();
        if (mode == "dependent")
            bc.mode = BmMode::dependent;
        else if (mode == "independent")
            bc.mode = BmMode::independent;
        else
            throw Error(Errc::BadConfig, "mode must be dependent or independent");
        bc.p = cfg.at("p").get<double>();
        bc.alphabet = cfg.at("alphabet").get<int>();
        bc.replicates = cfg.at("reps").get<int>();
        bc.seed = cfg.at("seed").get<std::uint64_t>();
        bc.workers = workers;
        res.report = to_json(run_bm(bc));
    } else if (command == "perm") {
        PermConfig pc;
        pc.n = cfg.at("n").get<int>();
        pc.c = cfg.at("c").get<double>();
        pc.replicates = cfg.at("reps").get<int>();
        pc.seed = cfg.at("seed").get<std::uint64_t>();
        pc.literal_formula = cfg.value("literal", false);
        pc.workers = workers;
        res.report = to_json(run_perm(pc));
    } else {
        throw Error(Errc::BadConfig, "unknown command " + command);
    }
    return res;
}

namespace {

int finish(const std::string& command, const ordered_json& cfg, const std::string& out,
           bool want_csv, bool want_svg, int workers) {
    RunManifest manifest = make_manifest(command, cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const ExecResult res = execute_command(command, cfg, workers);
    manifest.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (out.empty()) {
        ordered_json full = res.report;
        full["config_digest"] = manifest.digest;
        std::cout << full.dump(2) << "\n";
    } else {
        emit_report(res.report, manifest, out, EmitFormats{want_csv, want_svg}, res.csv, res.svg);
    }
    return 0;
}

} // namespace

int run_command(int argc, const char* const* argv) {
    CLI::App app{"Optimal alignment scores of random words: exact solvers and limit-theorem audits"};
    app.require_subcommand(1);

    std::string model = "lcs-indicator", dist = "uniform", instance, out, manifest_path;
    std::string mode = "exact", grid = "default9";
    std::vector<int> n_grid;
    std::vector<double> t_grid{5, 10, 20, 40}, p_lo{0.5}, p_hi{2.0};
    int n = 0, v = 0, reps = 1000, workers = 0, alphabet = 2, outer = 50, inner = 200,
        sigma_reps = 2000;
    std::uint64_t seed = 1, samples = 100000;
    double p = 0.5, c = 0.0, epsilon = 0.5, c_star = 0.01;
    bool want_path = false, want_csv = false, want_svg = false, literal = false;

    auto add_common = [&](CLI::App* sub, bool with_out = true) {
        if (with_out) sub->add_option("--out", out, "output base path (stdout when omitted)");
        sub->add_option("--workers", workers, "worker threads (0 = auto, MALIGN_THREADS caps)");
    };
    auto add_mc = [&](CLI::App* sub) {
        sub->add_option("--model", model, "model JSON path or lcs-indicator:<k>:<m>");
        sub->add_option("--dist", dist, "distribution JSON path or 'uniform'");
        sub->add_option("--reps", reps, "replicates");
        sub->add_option("--seed", seed, "RNG seed");
        sub->add_flag("--csv", want_csv, "also emit CSV");
        sub->add_flag("--svg", want_svg, "also emit SVG");
        add_common(sub);
    };

    auto* score = app.add_subcommand("score", "exact optimal alignment score of one instance");
    score->add_option("--model", model);
    score->add_option("--instance", instance)->required();
    score->add_flag("--path", want_path, "emit the canonical optimal path");
    add_common(score);

    auto* diag = app.add_subcommand("diag", "cell decomposition and diagonal-closeness events");
    diag->add_option("--model", model);
    diag->add_option("--instance", instance)->required();
    diag->add_option("--v", v, "block length")->required();
    diag->add_option("--p-lo", p_lo, "lower slopes, one per sequence j=2..m");
    diag->add_option("--p-hi", p_hi, "upper slopes");
    diag->add_option("--epsilon", epsilon);
    add_common(diag);

    auto* gamma = app.add_subcommand("gamma", "gamma_n curve with superadditivity audits");
    gamma->add_option("--n", n_grid, "n grid")->required();
    add_mc(gamma);

    auto* surface = app.add_subcommand("surface", "gamma-tilde surface over relative lengths q");
    surface->add_option("--n", n, "total scale n")->required();
    surface->add_option("--grid", grid, "grid JSON path or 'default9'");
    add_mc(surface);

    auto* hoeff = app.add_subcommand("hoeffding", "concentration tail audit");
    hoeff->add_option("--n", n)->required();
    hoeff->add_option("--t", t_grid, "deviation grid");
    add_mc(hoeff);

    auto* clt = app.add_subcommand("clt", "Kolmogorov-distance and variance audit across n");
    clt->add_option("--n", n_grid, "n grid")->required();
    clt->add_option("--c-star", c_star, "linear variance threshold");
    add_mc(clt);

    auto* stein = app.add_subcommand("stein", "recombination statistics T, T' and bound terms");
    stein->add_option("--n", n)->required();
    stein->add_option("--mode", mode, "exact | sampled | bound");
    stein->add_option("--samples", samples, "sampled mode draws");
    stein->add_option("--outer", outer, "bound mode outer replicates");
    stein->add_option("--inner", inner, "bound mode inner samples");
    stein->add_option("--sigma-reps", sigma_reps, "bound mode variance replicate set");
    add_mc(stein);

    auto* bm = app.add_subcommand("bm", "Bernoulli matching recursion");
    bm->add_option("--n", n)->required();
    bm->add_option("--mode", mode, "dependent | independent");
    bm->add_option("--p", p, "match probability (independent mode)");
    bm->add_option("--alphabet", alphabet, "alphabet size (dependent mode)");
    bm->add_option("--reps", reps);
    bm->add_option("--seed", seed);
    add_common(bm);

    auto* perm = app.add_subcommand("perm", "random-permutation score experiment");
    perm->add_option("--n", n)->required();
    perm->add_option("--c", c, "window parameter");
    perm->add_option("--reps", reps);
    perm->add_option("--seed", seed);
    perm->add_flag("--literal", literal, "use the uncorrected score formula");
    add_common(perm);

    auto* replay = app.add_subcommand("report", "regenerate a report from its manifest");
    replay->add_option("--manifest", manifest_path)->required();
    replay->add_option("--out", out)->required();
    replay->add_option("--workers", workers);
    replay->add_flag("--csv", want_csv);
    replay->add_flag("--svg", want_svg);

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e);
            return code == 0 ? 0 : 2;
        }

        if (score->parsed()) {
            ordered_json cfg{{"model", model}, {"instance", instance}, {"path", want_path}};
            return finish("score", cfg, out, false, false, workers);
        }
        if (diag->parsed()) {
            ordered_json cfg{{"model", model}, {"instance", instance}, {"v", v},
                             {"p_lo", p_lo},  {"p_hi", p_hi},          {"epsilon", epsilon}};
            return finish("diag", cfg, out, false, false, workers);
        }
        if (gamma->parsed()) {
            ordered_json cfg{{"model", model}, {"dist", dist}, {"n_grid", n_grid},
                             {"reps", reps},   {"seed", seed}};
            return finish("gamma", cfg, out, want_csv, want_svg, workers);
        }
        if (surface->parsed()) {
            ordered_json grid_json;
            if (grid == "default9")
                grid_json = "default9";
            else
                grid_json = ordered_json::parse(read_file(grid)).at("grid");
            ordered_json cfg{{"model", model}, {"dist", dist}, {"n", n},
                             {"grid", grid_json}, {"reps", reps}, {"seed", seed}};
            return finish("surface", cfg, out, want_csv, want_svg, workers);
        }
        if (hoeff->parsed()) {
            ordered_json cfg{{"model", model}, {"dist", dist}, {"n", n},
                             {"t_grid", t_grid}, {"reps", reps}, {"seed", seed}};
            return finish("hoeffding", cfg, out, want_csv, want_svg, workers);
        }
        if (clt->parsed()) {
            ordered_json cfg{{"model", model}, {"dist", dist},   {"n_grid", n_grid},
                             {"reps", reps},   {"seed", seed},   {"c_star", c_star}};
            return finish("clt", cfg, out, want_csv, want_svg, workers);
        }
        if (stein->parsed()) {
            ordered_json cfg{{"model", model},     {"dist", dist}, {"n", n},
                             {"mode", mode},       {"samples", samples}, {"outer", outer},
                             {"inner", inner},     {"sigma_reps", sigma_reps}, {"seed", seed}};
            return finish("stein", cfg, out, want_csv, want_svg, workers);
        }
        if (bm->parsed()) {
            ordered_json cfg{{"n", n},     {"mode", mode}, {"p", p},
                             {"alphabet", alphabet}, {"reps", reps}, {"seed", seed}};
            return finish("bm", cfg, out, false, false, workers);
        }
        if (perm->parsed()) {
            ordered_json cfg{{"n", n},       {"c", c},       {"reps", reps},
                             {"seed", seed}, {"literal", literal}};
            return finish("perm", cfg, out, false, false, workers);
        }
        if (replay->parsed()) {
            const RunManifest m =
                RunManifest::from_json(ordered_json::parse(read_file(manifest_path)));
            return finish(m.command, m.config, out, want_csv, want_svg, workers);
        }
        return 2;
    } catch (const Error& e) {
        std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
        return e.is_budget() ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace malign
