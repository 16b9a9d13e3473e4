#include "coxnet/io.hpp"
#include "coxnet/version.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

using coxnet::json;

void emit(const std::string& out_path, const json& doc) {
    std::string text = doc.dump(2);
    text.push_back('\n');
    if (out_path.empty())
        std::cout << text;
    else
        coxnet::write_text_file(out_path, text);
}

coxnet::RunManifest make_manifest(const std::string& command, json config,
                                  const std::string& fingerprint) {
    return {command, std::move(config), coxnet::version, fingerprint};
}

int run_fit(const json& cfg) {
    const std::string input = cfg.at("input").get<std::string>();
    const std::string method = cfg.at("method").get<std::string>();
    coxnet::SurvivalDataset data = coxnet::read_dataset_csv(input);
    coxnet::validate_dataset(data);

    coxnet::FitConfig fit_cfg;
    fit_cfg.tol = cfg.at("tol").get<double>();
    fit_cfg.standardize = cfg.at("standardize").get<bool>();

    const bool adaptive = method == "alasso" || method == "aen";
    const double lambda2 =
        (method == "lasso" || method == "alasso") ? 0.0 : cfg.at("lambda2").get<double>();
    const double lambda1 = cfg.at("lambda1").get<double>();
    double epsilon = cfg.at("epsilon").get<double>();
    if (epsilon < 0.0) epsilon = 1.0 / static_cast<double>(data.n());

    json resolved = cfg;
    resolved["lambda2"] = lambda2;
    resolved["epsilon"] = epsilon;
    json manifest = coxnet::manifest_json(
        make_manifest("fit", resolved, coxnet::fingerprint_file(input)));

    json out;
    out["manifest"] = manifest;
    bool converged;
    if (adaptive) {
        const double lambda1_en =
            cfg.contains("lambda1_en") && !cfg.at("lambda1_en").is_null()
                ? cfg.at("lambda1_en").get<double>()
                : lambda1;
        coxnet::AenFit fit = coxnet::fit_adaptive_elastic_net(
            data, lambda1_en, lambda2, lambda1, cfg.at("gamma").get<double>(), epsilon, fit_cfg);
        json body = coxnet::aen_fit_json(fit, data.feature_names);
        for (auto& [key, value] : body.items()) out[key] = value;
        converged = fit.en_stage.converged && fit.aen_stage.converged;
    } else {
        coxnet::PenaltySpec spec = coxnet::PenaltySpec::plain(lambda1, lambda2, data.p());
        spec.gamma = cfg.at("gamma").get<double>();
        coxnet::FitResult fit = coxnet::fit_penalized_cox(data, spec, fit_cfg);
        json body = coxnet::fit_result_json(fit, spec, data.feature_names);
        for (auto& [key, value] : body.items()) out[key] = value;
        converged = fit.converged;
    }
    emit(cfg.value("out", std::string{}), out);
    return converged ? 0 : 2;
}

int run_cv(const json& cfg) {
    const std::string input = cfg.at("input").get<std::string>();
    coxnet::SurvivalDataset data = coxnet::read_dataset_csv(input);
    coxnet::validate_dataset(data);

    coxnet::CvConfig cv_cfg;
    cv_cfg.k_folds = cfg.at("folds").get<int>();
    cv_cfg.seed = cfg.at("seed").get<std::uint64_t>();
    cv_cfg.grid_size = cfg.at("grid_size").get<int>();
    cv_cfg.grid_ratio = cfg.at("grid_ratio").get<double>();
    cv_cfg.lambda2_grid = cfg.at("lambda2").get<std::vector<double>>();

    coxnet::FitConfig fit_cfg;
    fit_cfg.tol = cfg.at("tol").get<double>();
    fit_cfg.standardize = cfg.at("standardize").get<bool>();

    json manifest =
        coxnet::manifest_json(make_manifest("cv", cfg, coxnet::fingerprint_file(input)));

    coxnet::CvReport report = coxnet::select_lambda(
        data, Eigen::VectorXd::Ones(data.p()), cv_cfg, fit_cfg);
    json out;
    out["manifest"] = manifest;
    json body = coxnet::cv_report_json(report);
    for (auto& [key, value] : body.items()) out[key] = value;
    emit(cfg.value("out", std::string{}), out);
    return 0;
}

int run_simulate(const json& cfg) {
    coxnet::SimConfig sim;
    sim.n = cfg.at("n").get<int>();
    sim.seed = cfg.at("seed").get<std::uint64_t>();
    sim.censor_rate_target = cfg.at("censor_rate").get<double>();
    const std::string design = cfg.at("design").get<std::string>();
    if (design == "paper")
        sim.design = coxnet::DesignKind::paper;
    else if (design == "independent")
        sim.design = coxnet::DesignKind::independent;
    else if (design == "custom")
        sim.design = coxnet::DesignKind::custom;
    else
        throw std::invalid_argument("unknown design: " + design);
    sim.rho = cfg.at("rho").get<double>();

    const std::string prefix = cfg.at("out").get<std::string>();
    const std::string experiment = cfg.at("experiment").get<std::string>();
    const int replicates = cfg.at("replicates").get<int>();

    Eigen::MatrixXd X = coxnet::generate_design(sim);
    coxnet::SurvivalDataset data = coxnet::generate_survival(sim, X);
    const std::string csv_path = prefix + ".csv";
    coxnet::write_dataset_csv(csv_path, data);

    json out;
    out["manifest"] = coxnet::manifest_json(
        make_manifest("simulate", cfg, coxnet::fingerprint_file(csv_path)));
    out["dataset"] = {{"path", csv_path},
                      {"n", data.n()},
                      {"events", data.n_events()},
                      {"censored_fraction",
                       1.0 - static_cast<double>(data.n_events()) / data.n()}};

    json report;
    if (experiment == "table4") {
        coxnet::CvConfig cv_cfg;
        cv_cfg.seed = sim.seed;
        report = coxnet::experiment_report_json(coxnet::run_table4(sim, cv_cfg));
    } else if (experiment == "oracle") {
        report = coxnet::experiment_report_json(coxnet::run_oracle_monte_carlo(sim, replicates));
    } else if (experiment == "grouping") {
        report = coxnet::experiment_report_json(coxnet::run_grouping_experiment(sim, replicates));
    } else if (experiment != "none") {
        throw std::invalid_argument("unknown experiment: " + experiment);
    }
    for (auto& [key, value] : report.items()) out[key] = value;

    coxnet::write_text_file(prefix + ".json", out.dump(2) + "\n");
    return 0;
}

int run_diagnose(const json& cfg) {
    const std::string fit_path = cfg.at("fit").get<std::string>();
    const std::string data_path = cfg.at("data").get<std::string>();

    coxnet::LoadedFit loaded = coxnet::load_fit_json(fit_path);
    std::string fingerprint = coxnet::fingerprint_file(data_path);
    if (!loaded.dataset_fingerprint.empty() && loaded.dataset_fingerprint != fingerprint)
        throw std::invalid_argument("fit was produced from different data (fingerprint " +
                                    loaded.dataset_fingerprint + ", this file is " +
                                    fingerprint + ")");

    coxnet::SurvivalDataset data = coxnet::read_dataset_csv(data_path);
    coxnet::validate_dataset(data);

    json out;
    out["manifest"] = coxnet::manifest_json(make_manifest("diagnose", cfg, fingerprint));

    if (cfg.contains("pair") && !cfg.at("pair").get<std::string>().empty()) {
        const std::string pair = cfg.at("pair").get<std::string>();
        auto comma = pair.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("--pair wants two comma-separated column numbers");
        long a = std::stol(pair.substr(0, comma));
        long b = std::stol(pair.substr(comma + 1));
        if (a == b) throw std::invalid_argument("--pair needs two distinct columns");
        if (a < 1 || b < 1 || a > data.p() || b > data.p())
            throw std::invalid_argument("--pair column out of range (1.." +
                                        std::to_string(data.p()) + ")");
        coxnet::GroupingReport report =
            coxnet::grouping_bound(data, loaded.fit, loaded.spec, a - 1, b - 1);
        out["grouping"] = coxnet::grouping_report_json(report, data.feature_names);
    }

    if (cfg.value("covariance", false)) {
        std::vector<std::string> labels;
        Eigen::MatrixXd cov = coxnet::asymptotic_covariance(data, loaded.fit, &labels);
        json rows = json::array();
        for (Eigen::Index i = 0; i < cov.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < cov.cols(); ++j) row.push_back(cov(i, j));
            rows.push_back(row);
        }
        out["covariance"] = {{"labels", labels}, {"matrix", rows}};
    }

    emit(cfg.value("out", std::string{}), out);
    return 0;
}

json load_config_from_manifest(const std::string& path, const std::string& expected_command) {
    json j = json::parse(coxnet::read_text_file(path));
    if (!j.contains("manifest"))
        throw std::invalid_argument(path + ": no manifest section");
    coxnet::RunManifest m = coxnet::manifest_from_json(j.at("manifest"));
    if (m.command != expected_command)
        throw std::invalid_argument(path + ": manifest is for command '" + m.command + "'");
    return m.config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Penalized Cox proportional-hazards toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", coxnet::version);

    // fit
    auto* fit = app.add_subcommand("fit", "Fit a penalized Cox model");
    std::string fit_input, fit_method = "en", fit_out, fit_manifest;
    double fit_lambda1 = 0.0, fit_lambda2 = 0.0, fit_gamma = 3.0, fit_epsilon = -1.0,
           fit_tol = 1e-8;
    double fit_lambda1_en = -1.0;
    bool fit_standardize = true;
    std::uint64_t fit_seed = 0;
    fit->add_option("input", fit_input, "input CSV (time,status,covariates...)");
    fit->add_option("--method", fit_method, "lasso|alasso|en|aen")
        ->check(CLI::IsMember({"lasso", "alasso", "en", "aen"}));
    fit->add_option("--lambda1", fit_lambda1, "L1 strength (second stage for adaptive)");
    fit->add_option("--lambda1-en", fit_lambda1_en,
                    "first-stage L1 strength for adaptive methods (default: --lambda1)");
    fit->add_option("--lambda2", fit_lambda2, "L2 strength (ignored for lasso/alasso)");
    fit->add_option("--gamma", fit_gamma, "adaptive weight exponent");
    fit->add_option("--epsilon", fit_epsilon,
                    "adaptive weight stabilizer (negative means 1/n)");
    fit->add_option("--tol", fit_tol, "solver tolerance");
    fit->add_flag("--standardize,!--no-standardize", fit_standardize,
                  "standardize covariates (default on)");
    fit->add_option("--seed", fit_seed, "recorded in the manifest");
    fit->add_option("--out", fit_out, "output JSON path (default stdout)");
    fit->add_option("--from-manifest", fit_manifest, "rerun a previous fit manifest");

    // cv
    auto* cv = app.add_subcommand("cv", "Cross-validate lambda1");
    std::string cv_input, cv_out, cv_manifest;
    int cv_folds = 5, cv_grid_size = 50;
    double cv_grid_ratio = 0.01, cv_tol = 1e-8;
    bool cv_standardize = true;
    std::uint64_t cv_seed = 0;
    std::vector<double> cv_lambda2 = {0.0};
    cv->add_option("input", cv_input, "input CSV");
    cv->add_option("--folds", cv_folds, "number of folds")->check(CLI::Range(2, 1 << 20));
    cv->add_option("--grid-size", cv_grid_size, "lambda1 grid size")
        ->check(CLI::Range(2, 1 << 20));
    cv->add_option("--grid-ratio", cv_grid_ratio, "smallest lambda1 as a fraction of max");
    cv->add_option("--lambda2", cv_lambda2, "lambda2 value(s) to search")->expected(-1);
    cv->add_option("--tol", cv_tol, "solver tolerance");
    cv->add_flag("--standardize,!--no-standardize", cv_standardize, "standardize covariates");
    cv->add_option("--seed", cv_seed, "fold-split seed");
    cv->add_option("--out", cv_out, "output JSON path (default stdout)");
    cv->add_option("--from-manifest", cv_manifest, "rerun a previous cv manifest");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate survival data and run experiments");
    std::string sim_design = "paper", sim_experiment = "none", sim_out, sim_manifest;
    int sim_n = 1000, sim_replicates = 100;
    double sim_censor = 0.2, sim_rho = 1.0;
    std::uint64_t sim_seed = 0;
    sim->add_option("--n", sim_n, "sample size")->check(CLI::Range(1, 1 << 26));
    sim->add_option("--seed", sim_seed, "generator seed");
    sim->add_option("--censor-rate", sim_censor, "target censoring fraction in [0,1)");
    sim->add_option("--design", sim_design, "paper|independent|custom")
        ->check(CLI::IsMember({"paper", "independent", "custom"}));
    sim->add_option("--rho", sim_rho, "pair correlation for the custom design");
    sim->add_option("--experiment", sim_experiment, "none|table4|oracle|grouping")
        ->check(CLI::IsMember({"none", "table4", "oracle", "grouping"}));
    sim->add_option("--replicates", sim_replicates,
                    "replicates (oracle) or seeds (grouping)")
        ->check(CLI::Range(2, 1 << 20));
    sim->add_option("--out", sim_out, "output prefix (.csv and .json are written)");
    sim->add_option("--from-manifest", sim_manifest, "rerun a previous simulate manifest");

    // diagnose
    auto* diag = app.add_subcommand("diagnose", "Grouping and covariance diagnostics");
    std::string diag_fit, diag_data, diag_pair, diag_out, diag_manifest;
    bool diag_cov = false;
    diag->add_option("--fit", diag_fit, "fit result JSON");
    diag->add_option("--data", diag_data, "dataset CSV the fit was computed from");
    diag->add_option("--pair", diag_pair, "two 1-based covariate columns, e.g. 2,3");
    diag->add_flag("--covariance", diag_cov, "emit the active-set asymptotic covariance");
    diag->add_option("--out", diag_out, "output JSON path (default stdout)");
    diag->add_option("--from-manifest", diag_manifest, "rerun a previous diagnose manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 1;
    }

    try {
        if (fit->parsed()) {
            json cfg;
            if (!fit_manifest.empty()) {
                cfg = load_config_from_manifest(fit_manifest, "fit");
            } else {
                if (fit_input.empty()) throw std::invalid_argument("fit: input CSV required");
                cfg["input"] = fit_input;
                cfg["method"] = fit_method;
                cfg["lambda1"] = fit_lambda1;
                if (fit_lambda1_en >= 0.0) cfg["lambda1_en"] = fit_lambda1_en;
                cfg["lambda2"] = fit_lambda2;
                cfg["gamma"] = fit_gamma;
                cfg["epsilon"] = fit_epsilon;
                cfg["tol"] = fit_tol;
                cfg["standardize"] = fit_standardize;
                cfg["seed"] = fit_seed;
                cfg["out"] = fit_out;
            }
            return run_fit(cfg);
        }
        if (cv->parsed()) {
            json cfg;
            if (!cv_manifest.empty()) {
                cfg = load_config_from_manifest(cv_manifest, "cv");
            } else {
                if (cv_input.empty()) throw std::invalid_argument("cv: input CSV required");
                cfg["input"] = cv_input;
                cfg["folds"] = cv_folds;
                cfg["grid_size"] = cv_grid_size;
                cfg["grid_ratio"] = cv_grid_ratio;
                cfg["lambda2"] = cv_lambda2;
                cfg["tol"] = cv_tol;
                cfg["standardize"] = cv_standardize;
                cfg["seed"] = cv_seed;
                cfg["out"] = cv_out;
            }
            return run_cv(cfg);
        }
        if (sim->parsed()) {
            json cfg;
            if (!sim_manifest.empty()) {
                cfg = load_config_from_manifest(sim_manifest, "simulate");
            } else {
                if (sim_out.empty())
                    throw std::invalid_argument("simulate: --out prefix required");
                cfg["n"] = sim_n;
                cfg["seed"] = sim_seed;
                cfg["censor_rate"] = sim_censor;
                cfg["design"] = sim_design;
                cfg["rho"] = sim_rho;
                cfg["experiment"] = sim_experiment;
                cfg["replicates"] = sim_replicates;
                cfg["out"] = sim_out;
            }
            return run_simulate(cfg);
        }
        if (diag->parsed()) {
            json cfg;
            if (!diag_manifest.empty()) {
                cfg = load_config_from_manifest(diag_manifest, "diagnose");
            } else {
                if (diag_fit.empty() || diag_data.empty())
                    throw std::invalid_argument("diagnose: --fit and --data are required");
                cfg["fit"] = diag_fit;
                cfg["data"] = diag_data;
                cfg["pair"] = diag_pair;
                cfg["covariance"] = diag_cov;
                cfg["out"] = diag_out;
            }
            return run_diagnose(cfg);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
