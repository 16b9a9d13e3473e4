#pragma once

#include "coxnet/solver.hpp"

#include <cstdint>
#include <vector>

namespace coxnet {

struct CvConfig {
    int k_folds = 5;
    std::uint64_t seed = 0;
    std::vector<double> lambda2_grid;  // callers supply at least one value
    int grid_size = 50;
    double grid_ratio = 0.01;
};

struct CvPoint {
    double lambda2 = 0.0;
    double lambda1 = 0.0;
    double mean_score = 0.0;
    double se_score = 0.0;
    int folds_used = 0;
};

struct CvReport {
    std::vector<CvPoint> points;  // lambda2 blocks in grid order, lambda1 descending
    double best_lambda1 = 0.0;
    double best_lambda2 = 0.0;
    std::vector<int> fold_assignment;  // record -> fold
};

// Deterministic stratified split: events and censored records are shuffled
// separately by the seed and dealt round-robin, so folds carry events as
// evenly as possible. Requires k_folds <= number of events.
std::vector<int> kfold_split(const SurvivalDataset& d, const CvConfig& cfg);

// Cross-validated partial likelihood contribution of one fold:
// l_full(beta) - l_minus(beta), both unscaled log partial likelihoods,
// where l_minus drops the fold's records. beta is on the original scale.
double cv_score(const SurvivalDataset& d, const std::vector<int>& fold_assignment, int fold,
                const Eigen::VectorXd& beta);

// Grid search over (lambda2_grid) x (shared lambda1 path from the full
// data), maximizing the mean CV score; ties break toward larger lambda1.
// Folds that fail to fit are dropped from the mean; if every fold fails
// the search errors out.
CvReport select_lambda(const SurvivalDataset& d, const Eigen::VectorXd& weights,
                       const CvConfig& cfg, const FitConfig& fit_cfg = {});

// Records of d whose fold_assignment differs from `fold` (the training
// subset for that fold).
SurvivalDataset drop_fold(const SurvivalDataset& d, const std::vector<int>& fold_assignment,
                          int fold);

}
