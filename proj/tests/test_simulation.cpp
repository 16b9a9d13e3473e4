#include "coxnet/simulation.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace coxnet;

TEST_CASE("paper design carries its column identities exactly") {
    SimConfig cfg;
    cfg.n = 400;
    cfg.seed = 17;
    Eigen::MatrixXd X = generate_design(cfg);
    REQUIRE(X.rows() == 400);
    REQUIRE(X.cols() == 10);
    // duplicates are bitwise copies, col4 = 2*col1 + col2 exactly
    CHECK((X.col(2) - X.col(1)).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((X.col(6) - X.col(5)).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((X.col(3) - (2.0 * X.col(0) + X.col(1))).lpNorm<Eigen::Infinity>() == 0.0);
    // free columns are standard normal-ish
    for (Eigen::Index j : {0, 1, 4, 5, 7, 8, 9}) {
        CHECK(std::abs(X.col(j).mean()) < 0.2);
        double sd = std::sqrt(X.col(j).squaredNorm() / 400.0 - std::pow(X.col(j).mean(), 2));
        CHECK(sd == doctest::Approx(1.0).epsilon(0.15));
    }
}

TEST_CASE("independent design has no built-in collinearity") {
    SimConfig cfg;
    cfg.n = 2000;
    cfg.seed = 18;
    cfg.design = DesignKind::independent;
    Eigen::MatrixXd X = generate_design(cfg);
    for (Eigen::Index a = 0; a < 10; ++a)
        for (Eigen::Index b = a + 1; b < 10; ++b) {
            Eigen::VectorXd ca = X.col(a).array() - X.col(a).mean();
            Eigen::VectorXd cb = X.col(b).array() - X.col(b).mean();
            double rho = ca.dot(cb) / std::sqrt(ca.squaredNorm() * cb.squaredNorm());
            CHECK(std::abs(rho) < 0.08);
        }
}

TEST_CASE("custom design hits the requested pair correlation") {
    SimConfig cfg;
    cfg.n = 5000;
    cfg.seed = 19;
    cfg.design = DesignKind::custom;

    for (double target : {0.9, 0.99}) {
        cfg.rho = target;
        Eigen::MatrixXd X = generate_design(cfg);
        Eigen::VectorXd a = X.col(1).array() - X.col(1).mean();
        Eigen::VectorXd b = X.col(2).array() - X.col(2).mean();
        double rho = a.dot(b) / std::sqrt(a.squaredNorm() * b.squaredNorm());
        CHECK(rho == doctest::Approx(target).epsilon(0.02));
    }

    // rho = 1 degenerates to exact copies
    cfg.rho = 1.0;
    Eigen::MatrixXd X = generate_design(cfg);
    CHECK((X.col(2) - X.col(1)).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((X.col(6) - X.col(5)).lpNorm<Eigen::Infinity>() == 0.0);

    // shared columns are draw-matched across rho so sweeps are paired
    cfg.rho = 0.9;
    Eigen::MatrixXd Y = generate_design(cfg);
    CHECK((Y.col(0) - X.col(0)).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((Y.col(1) - X.col(1)).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((Y.col(9) - X.col(9)).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("survival generation is reproducible and calibrated") {
    SimConfig cfg;
    cfg.n = 2000;
    cfg.seed = 21;
    Eigen::MatrixXd X = generate_design(cfg);
    SurvivalDataset d = generate_survival(cfg, X);
    REQUIRE(d.n() == 2000);
    CHECK(d.time.minCoeff() > 0.0);
    CHECK(d.time.allFinite());
    CHECK_NOTHROW(validate_dataset(d));

    // the censored fraction lands near the target
    double censored = 1.0 - static_cast<double>(d.n_events()) / static_cast<double>(d.n());
    CHECK(censored == doctest::Approx(cfg.censor_rate_target).epsilon(0.25));

    // identical settings regenerate the identical sample
    SurvivalDataset again = generate_survival(cfg, X);
    CHECK((again.time - d.time).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((again.status.array() == d.status.array()).all());

    // another replicate is a fresh draw
    SimConfig rep = cfg;
    rep.replicate = 1;
    Eigen::MatrixXd X1 = generate_design(rep);
    CHECK((X1 - X).lpNorm<Eigen::Infinity>() != 0.0);
    SurvivalDataset d1 = generate_survival(rep, X1);
    CHECK((d1.time - d.time).lpNorm<Eigen::Infinity>() != 0.0);
}

TEST_CASE("target zero disables censoring") {
    SimConfig cfg;
    cfg.n = 300;
    cfg.seed = 22;
    cfg.censor_rate_target = 0.0;
    SurvivalDataset d = generate_survival(cfg, generate_design(cfg));
    CHECK(d.n_events() == d.n());
}

TEST_CASE("hazard scaling shortens lifetimes for high-risk draws") {
    // with beta_true fixed, the observed times must be monotone in the risk
    // score on average; check via correlation of log T with -beta'x among
    // uncensored records
    SimConfig cfg;
    cfg.n = 3000;
    cfg.seed = 23;
    cfg.censor_rate_target = 0.0;
    Eigen::MatrixXd X = generate_design(cfg);
    SurvivalDataset d = generate_survival(cfg, X);
    Eigen::VectorXd eta = X * cfg.beta_true;
    Eigen::VectorXd logt = d.time.array().log();
    Eigen::VectorXd a = eta.array() - eta.mean();
    Eigen::VectorXd b = logt.array() - logt.mean();
    double rho = a.dot(b) / std::sqrt(a.squaredNorm() * b.squaredNorm());
    CHECK(rho < -0.8);
}

TEST_CASE("oracle monte carlo summarizes identified coordinates") {
    SimConfig cfg;
    cfg.n = 400;
    cfg.seed = 29;
    ExperimentReport report = run_oracle_monte_carlo(cfg, 4);
    REQUIRE(report.oracle.has_value());
    const OracleSummary& o = *report.oracle;
    CHECK(o.replicates == 4);
    CHECK(o.records.size() == 4);
    CHECK(o.labels == std::vector<std::string>{"x1", "x2+x3", "x5", "x6+x7"});
    REQUIRE(o.true_identified.size() == 4);
    CHECK(o.true_identified[0] == -1.0);
    CHECK(o.true_identified[1] == 4.0);
    CHECK(o.true_identified[2] == 0.5);
    CHECK(o.true_identified[3] == 2.0);
    CHECK(o.empirical_sd.size() == 4);
    CHECK(o.asymptotic_sd.size() == 4);
    CHECK(o.sd_ratio.size() == 4);
    CHECK(o.sparsity_fraction >= 0.0);
    CHECK(o.sparsity_fraction <= 1.0);
    for (const OracleReplicate& r : o.records) {
        CHECK(r.beta.size() == 10);
        CHECK(r.identified.size() == 4);
    }

    CHECK_THROWS_AS(run_oracle_monte_carlo(cfg, 1), std::invalid_argument);
}

TEST_CASE("oracle monte carlo on the independent design keeps all six actives") {
    SimConfig cfg;
    cfg.n = 400;
    cfg.seed = 31;
    cfg.design = DesignKind::independent;
    ExperimentReport report = run_oracle_monte_carlo(cfg, 3);
    REQUIRE(report.oracle.has_value());
    CHECK(report.oracle->labels ==
          std::vector<std::string>{"x1", "x2", "x3", "x5", "x6", "x7"});
    CHECK(report.oracle->true_identified.size() == 6);
}

TEST_CASE("grouping experiment tightens as correlation approaches one") {
    SimConfig cfg;
    cfg.n = 250;
    cfg.seed = 37;
    ExperimentReport report = run_grouping_experiment(cfg, 3, {0.9, 1.0});
    REQUIRE(report.grouping.size() == 2);
    const GroupingSweepPoint& loose = report.grouping[0];
    const GroupingSweepPoint& tight = report.grouping[1];
    CHECK(loose.rho == 0.9);
    CHECK(tight.rho == 1.0);
    CHECK(tight.median_distance_23 <= 1e-8);
    CHECK(tight.median_distance_67 <= 1e-8);
    REQUIRE(loose.median_bound_23.has_value());
    CHECK(loose.median_distance_23 <= *loose.median_bound_23 + 1e-8);
    CHECK(loose.median_distance_23 > tight.median_distance_23);
}

TEST_CASE("table-style comparison keeps methods in order with their penalties") {
    SimConfig cfg;
    cfg.n = 150;
    cfg.seed = 41;
    CvConfig cv;
    cv.grid_size = 12;
    cv.k_folds = 4;
    ExperimentReport report = run_table4(cfg, cv);
    REQUIRE(report.rows.size() == 4);
    CHECK(report.rows[0].method == "lasso");
    CHECK(report.rows[1].method == "alasso");
    CHECK(report.rows[2].method == "en");
    CHECK(report.rows[3].method == "aen");
    CHECK(report.rows[0].lambda2 == 0.0);
    CHECK(report.rows[1].lambda2 == 0.0);
    CHECK(report.rows[2].lambda2 == doctest::Approx(1.0 / 3.0));
    CHECK(report.rows[3].lambda2 == doctest::Approx(1.0 / 3.0));
    // the elastic-net pair splits duplicates evenly
    CHECK(report.rows[2].distance_23 <= 1e-8);
    CHECK(report.rows[2].distance_67 <= 1e-8);
    CHECK(report.rows[3].distance_23 <= 1e-8);
    for (const MethodRow& row : report.rows) {
        CHECK(row.beta.size() == 10);
        CHECK(row.lambda1 > 0.0);
        CHECK(row.max_zero_block >= 0.0);
    }
}
