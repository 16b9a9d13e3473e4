#include "coxnet/solver.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace coxnet;

namespace {

SurvivalDataset two_point() {
    SurvivalDataset d;
    d.time.resize(2);
    d.time << 1.0, 2.0;
    d.status.resize(2);
    d.status << 1, 1;
    d.X.resize(2, 1);
    d.X << 1.0, 0.0;
    d.feature_names = {"x1"};
    return d;
}

// objective on the data as given (no standardization)
double raw_objective(const SurvivalDataset& d, const Eigen::VectorXd& beta,
                     const PenaltySpec& spec) {
    LikelihoodContext ctx = LikelihoodContext::make(d);
    return neg_log_partial_likelihood(ctx, beta) + penalty_value(beta, spec);
}

FitConfig raw_config() {
    FitConfig cfg;
    cfg.standardize = false;
    return cfg;
}

}  // namespace

TEST_CASE("lambda_max hand value and exact-zero threshold") {
    SurvivalDataset d = two_point();
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(1);
    double lmax = compute_lambda_max(d, ones);
    // g(0) = -(1/2) * 0.5 = -0.25
    CHECK(lmax == doctest::Approx(0.25).epsilon(1e-15));

    FitConfig cfg = raw_config();
    SUBCASE("at lambda_max the zero vector is returned exactly") {
        FitResult fit = fit_penalized_cox(d, PenaltySpec::plain(lmax, 0.0, 1), cfg);
        CHECK(fit.converged);
        CHECK(fit.beta[0] == 0.0);
        CHECK(fit.active_set.empty());
    }
    SUBCASE("above lambda_max too") {
        FitResult fit = fit_penalized_cox(d, PenaltySpec::plain(lmax * 1.5, 0.1, 1), cfg);
        CHECK(fit.beta[0] == 0.0);
    }
    SUBCASE("just below lambda_max the coefficient moves") {
        FitResult fit = fit_penalized_cox(d, PenaltySpec::plain(lmax * 0.95, 0.0, 1), cfg);
        CHECK(fit.beta[0] != 0.0);
    }
}

TEST_CASE("lambda_grid anchors the endpoints") {
    std::vector<double> grid = lambda_grid(2.0, 5, 0.01);
    REQUIRE(grid.size() == 5);
    CHECK(grid[0] == 2.0);  // exact, not just approximate
    CHECK(grid[4] == doctest::Approx(0.02).epsilon(1e-12));
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] < grid[i - 1]);
    // log spacing: constant ratio
    double ratio = grid[1] / grid[0];
    for (std::size_t i = 2; i < grid.size(); ++i)
        CHECK(grid[i] / grid[i - 1] == doctest::Approx(ratio).epsilon(1e-12));

    CHECK_THROWS_AS(lambda_grid(1.0, 1, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(lambda_grid(1.0, 5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(lambda_grid(1.0, 5, 1.5), std::invalid_argument);
}

TEST_CASE("converged fits certify their own optimality") {
    Philox rng(42);
    for (int rep = 0; rep < 25; ++rep) {
        SurvivalDataset d = oracles::random_dataset(rng, 30, 4, 0.3, 0.3);
        double l1 = 0.3 * rng.uniform01();
        double l2 = 0.3 * rng.uniform01();
        PenaltySpec spec = PenaltySpec::plain(l1, l2, 4);
        FitConfig cfg;
        cfg.standardize = rep % 2 == 0;
        FitResult fit = fit_penalized_cox(d, spec, cfg);
        REQUIRE(fit.converged);
        CHECK(fit.kkt_residual <= 10 * cfg.tol);

        // the reported objective re-evaluates on the solver scale
        if (!cfg.standardize)
            CHECK(std::abs(raw_objective(d, fit.beta, spec) - fit.objective) <= 1e-10);
        // active_set lists exactly the nonzeros
        for (Eigen::Index k = 0; k < 4; ++k) {
            bool active = fit.beta[k] != 0.0;
            bool listed = std::find(fit.active_set.begin(), fit.active_set.end(), k) !=
                          fit.active_set.end();
            CHECK(active == listed);
        }
    }
}

TEST_CASE("objective trace decreases monotonically") {
    Philox rng(7);
    SurvivalDataset d = oracles::random_dataset(rng, 50, 5, 0.2, 0.3);
    FitResult fit = fit_penalized_cox(d, PenaltySpec::plain(0.02, 0.05, 5));
    REQUIRE(fit.objective_trace.size() >= 2);
    for (std::size_t i = 1; i < fit.objective_trace.size(); ++i)
        CHECK(fit.objective_trace[i] <= fit.objective_trace[i - 1] + 1e-12);
    CHECK(fit.objective == doctest::Approx(fit.objective_trace.back()));
}

TEST_CASE("no-op penalty reproduces the unpenalized optimum") {
    // strong ridge vs none: coefficient shrinks
    Philox rng(11);
    SurvivalDataset d = oracles::random_dataset(rng, 60, 2, 0.2, 0.2);
    FitConfig cfg = raw_config();
    FitResult free_fit = fit_penalized_cox(d, PenaltySpec::plain(0.0, 0.0, 2), cfg);
    FitResult ridge = fit_penalized_cox(d, PenaltySpec::plain(0.0, 5.0, 2), cfg);
    CHECK(ridge.beta.norm() < free_fit.beta.norm());
    // unpenalized stationarity: the raw score vanishes
    LikelihoodContext ctx = LikelihoodContext::make(d);
    CHECK(score(ctx, free_fit.beta).lpNorm<Eigen::Infinity>() / d.n() <= 1e-7);
}

TEST_CASE("standardized and raw solves agree after destandardization") {
    Philox rng(23);
    SurvivalDataset d = oracles::random_dataset(rng, 80, 3, 0.2, 0.25);
    // lambda2 = 0 keeps the two problems equivalent up to the L1 scale change,
    // so solve raw with the per-column weights the standardized problem implies
    auto [ds, info] = standardize(d);
    double l1 = 0.05;
    FitConfig cfg;
    cfg.tol = 1e-10;
    FitResult std_fit = fit_penalized_cox(d, PenaltySpec::plain(l1, 0.0, 3), cfg);

    PenaltySpec raw_spec = PenaltySpec::plain(l1, 0.0, 3);
    raw_spec.weights = info.scales;  // |beta_std_k| = scale_k * |beta_k|
    FitConfig raw_cfg = raw_config();
    raw_cfg.tol = 1e-10;
    FitResult raw_fit = fit_penalized_cox(d, raw_spec, raw_cfg);
    CHECK((std_fit.beta - raw_fit.beta).lpNorm<Eigen::Infinity>() <= 1e-7);
}

TEST_CASE("cycle order does not change the optimum") {
    Philox rng(31);
    SurvivalDataset d = oracles::random_dataset(rng, 60, 5, 0.3, 0.3);
    PenaltySpec spec = PenaltySpec::plain(0.03, 0.02, 5);
    FitConfig cfg;
    cfg.tol = 1e-10;
    FitResult a = fit_penalized_cox(d, spec, cfg);
    cfg.cycle_order_seed = 424242;
    FitResult b = fit_penalized_cox(d, spec, cfg);
    CHECK((a.beta - b.beta).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("warm starts reach the same optimum faster") {
    Philox rng(53);
    SurvivalDataset d = oracles::random_dataset(rng, 70, 4, 0.3, 0.3);
    PenaltySpec spec = PenaltySpec::plain(0.02, 0.01, 4);
    FitConfig cold;
    cold.tol = 1e-10;
    FitResult base = fit_penalized_cox(d, spec, cold);
    FitConfig warm = cold;
    warm.beta0 = base.beta_std;
    FitResult again = fit_penalized_cox(d, spec, warm);
    CHECK((again.beta - base.beta).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK(again.outer_iterations <= base.outer_iterations);
}

TEST_CASE("fit_lambda_sequence equals one-at-a-time fits") {
    Philox rng(61);
    SurvivalDataset d = oracles::random_dataset(rng, 50, 3, 0.3, 0.3);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
    auto [ds, info] = standardize(d);
    double lmax = compute_lambda_max(ds, ones);
    std::vector<double> grid = lambda_grid(lmax, 8, 0.05);
    FitConfig cfg;
    cfg.tol = 1e-10;
    std::vector<FitResult> path = fit_lambda_sequence(d, grid, 0.1, ones, cfg);
    REQUIRE(path.size() == grid.size());
    CHECK(path[0].beta.lpNorm<Eigen::Infinity>() == 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        FitResult solo = fit_penalized_cox(d, PenaltySpec::plain(grid[i], 0.1, 3), cfg);
        CHECK((path[i].beta - solo.beta).lpNorm<Eigen::Infinity>() <= 1e-7);
    }

    auto pairs = regularization_path(d, 0.1, ones, 8, 0.05, cfg);
    REQUIRE(pairs.size() == 8);
    CHECK(pairs[0].first == doctest::Approx(lmax));
    CHECK((pairs.back().second.beta - path.back().beta).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("adaptive two-stage pipeline keeps its pieces consistent") {
    Philox rng(71);
    SurvivalDataset d = oracles::random_dataset(rng, 80, 4, 0.2, 0.25);
    double eps = 1.0 / static_cast<double>(d.n());
    AenFit fit = fit_adaptive_elastic_net(d, 0.03, 0.1, 0.01, 3.0, eps);
    CHECK(fit.en_stage.converged);
    CHECK(fit.aen_stage.converged);
    // stored weights reproduce from the first stage
    Eigen::VectorXd w = adaptive_weights(fit.en_stage.beta_std, 3.0, eps);
    CHECK((fit.weights - w).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(fit.spec_en.lambda1 == 0.03);
    CHECK(fit.spec_aen.lambda1 == 0.01);
    CHECK((fit.spec_aen.weights - w).lpNorm<Eigen::Infinity>() == 0.0);
    // second stage satisfies its own KKT system
    CHECK(fit.aen_stage.kkt_residual <= 1e-7);
}

TEST_CASE("perfect separation with no penalty is detected") {
    // covariate perfectly ranks the failure order, so beta -> infinity
    SurvivalDataset d;
    d.time.resize(4);
    d.time << 1.0, 2.0, 3.0, 4.0;
    d.status.resize(4);
    d.status << 1, 1, 1, 1;
    d.X.resize(4, 1);
    d.X << 4.0, 3.0, 2.0, 1.0;
    d.feature_names = {"x1"};
    FitConfig cfg = raw_config();
    CHECK_THROWS_WITH_AS(
        fit_penalized_cox(d, PenaltySpec::plain(0.0, 0.0, 1), cfg),
        "coefficients diverging with no penalty: data may be separable, so the objective "
        "has no minimizer; set lambda1 or lambda2 positive",
        std::runtime_error);
    // the same data with any positive penalty is fine
    CHECK_NOTHROW(fit_penalized_cox(d, PenaltySpec::plain(0.0, 0.01, 1), cfg));
    CHECK_NOTHROW(fit_penalized_cox(d, PenaltySpec::plain(0.01, 0.0, 1), cfg));
}

TEST_CASE("solver rejects invalid configuration") {
    SurvivalDataset d = two_point();
    FitConfig cfg;
    SUBCASE("bad tol") {
        cfg.tol = 0.0;
        CHECK_THROWS_AS(fit_penalized_cox(d, PenaltySpec::plain(0.1, 0.0, 1), cfg),
                        std::invalid_argument);
    }
    SUBCASE("bad caps") {
        cfg.max_outer = 0;
        CHECK_THROWS_AS(fit_penalized_cox(d, PenaltySpec::plain(0.1, 0.0, 1), cfg),
                        std::invalid_argument);
    }
    SUBCASE("warm start dimension") {
        cfg.beta0 = Eigen::VectorXd::Zero(3);
        CHECK_THROWS_AS(fit_penalized_cox(d, PenaltySpec::plain(0.1, 0.0, 1), cfg),
                        std::invalid_argument);
    }
    SUBCASE("penalty dimension") {
        CHECK_THROWS_AS(fit_penalized_cox(d, PenaltySpec::plain(0.1, 0.0, 2), cfg),
                        std::invalid_argument);
    }
}

TEST_CASE("check_kkt flags a non-optimal point") {
    Philox rng(83);
    SurvivalDataset d = oracles::random_dataset(rng, 40, 3, 0.3, 0.3);
    PenaltySpec spec = PenaltySpec::plain(0.05, 0.05, 3);
    FitResult fit = fit_penalized_cox(d, spec, raw_config());
    CHECK(check_kkt(d, fit.beta, spec) <= 1e-7);
    Eigen::VectorXd off = fit.beta;
    off[0] += 0.25;
    CHECK(check_kkt(d, off, spec) > 1e-3);
}
