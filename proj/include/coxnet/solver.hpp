#pragma once

#include "coxnet/partial_likelihood.hpp"
#include "coxnet/penalty.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace coxnet {

struct FitConfig {
    double tol = 1e-8;       // max |coefficient change| per accepted outer cycle
    int max_outer = 100;
    int max_inner = 1000;    // full coordinate cycles per outer iteration
    bool standardize = true;
    std::optional<Eigen::VectorXd> beta0;  // warm start on the solver scale
    // alternate cyclic order for the uniqueness cross-check; default is
    // ascending indices
    std::optional<std::uint64_t> cycle_order_seed;

    void validate() const;
};

struct FitResult {
    Eigen::VectorXd beta;      // original scale
    Eigen::VectorXd beta_std;  // solver (standardized) scale
    double objective = 0.0;    // smooth loss + penalty at beta_std
    std::vector<double> objective_trace;  // one entry per accepted outer iterate
    int outer_iterations = 0;
    long inner_iterations = 0;
    bool converged = false;
    double kkt_residual = 0.0;
    std::vector<Eigen::Index> active_set;  // {k : beta_k != 0}
    StandardizationInfo standardization;
};

// Two-stage pipeline: elastic-net fit, adaptive weights from it, weighted
// refit.
struct AenFit {
    FitResult en_stage;
    Eigen::VectorXd weights;
    FitResult aen_stage;
    PenaltySpec spec_en;
    PenaltySpec spec_aen;
};

// Minimizes (1/n)*sum_events{-beta'X_i + ln sum_{R_i} e^{beta'X_j}}
//           + lambda1*sum w_k|beta_k| + lambda2*sum beta_k^2
// by outer quadratic approximation (score plus observed information) and
// inner cyclic coordinate descent, with step halving whenever a full step
// would increase the true objective. Exhausting the iteration caps returns
// converged=false rather than throwing; an unbounded direction with
// lambda1 = lambda2 = 0 (perfect separation) throws.
FitResult fit_penalized_cox(const SurvivalDataset& d, const PenaltySpec& spec,
                            const FitConfig& cfg = {});

AenFit fit_adaptive_elastic_net(const SurvivalDataset& d, double lambda1_en, double lambda2,
                                double lambda1_star, double gamma, double epsilon,
                                const FitConfig& cfg = {});

// Smallest lambda1 for which beta = 0 is optimal: max_k |g_k(0)|/w_k with
// g = -(1/n)*score evaluated on the data as given.
double compute_lambda_max(const SurvivalDataset& d, const Eigen::VectorXd& weights);

// Log-spaced grid from lambda_max down to grid_ratio*lambda_max; the first
// entry is exactly lambda_max.
std::vector<double> lambda_grid(double lambda_max, int grid_size, double grid_ratio);

// Fits lambda1 values in the order given, chaining warm starts. The data
// is standardized once up front when cfg.standardize.
std::vector<FitResult> fit_lambda_sequence(const SurvivalDataset& d,
                                           const std::vector<double>& lambda1_values,
                                           double lambda2, const Eigen::VectorXd& weights,
                                           const FitConfig& cfg = {});

std::vector<std::pair<double, FitResult>> regularization_path(const SurvivalDataset& d,
                                                              double lambda2,
                                                              const Eigen::VectorXd& weights,
                                                              int grid_size, double grid_ratio,
                                                              const FitConfig& cfg = {});

// Max stationarity violation of the penalized objective at beta, on the
// same scale as d: for beta_k != 0, |g_k + lambda1*w_k*sign(beta_k) +
// 2*lambda2*beta_k|; for beta_k = 0, max(|g_k| - lambda1*w_k, 0).
double check_kkt(const SurvivalDataset& d, const Eigen::VectorXd& beta, const PenaltySpec& spec);

namespace detail {
double kkt_residual(const LikelihoodContext& ctx, const Eigen::VectorXd& beta,
                    const PenaltySpec& spec);
}

}
