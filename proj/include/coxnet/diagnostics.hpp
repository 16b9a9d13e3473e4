#pragma once

#include "coxnet/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace coxnet {

// Grouping-effect evidence for one covariate pair: the coefficient
// distance D, the residual-based bound on it, and the columns' sample
// correlation. The bound only exists under the equal-sign hypothesis.
struct GroupingReport {
    Eigen::Index a = 0;
    Eigen::Index b = 0;
    double distance = 0.0;         // |beta_a - beta_b| on the standardized scale
    std::optional<double> bound;
    double correlation = 0.0;
    bool hypothesis_met = false;
    std::string note;
};

struct SparsityReport {
    std::vector<Eigen::Index> active;
    std::vector<Eigen::Index> zero;
    std::optional<bool> exact_recovery;
    std::vector<Eigen::Index> false_inclusions;
    std::vector<Eigen::Index> false_exclusions;
};

double grouping_distance(const FitResult& fit, Eigen::Index a, Eigen::Index b);

// bound = (1/(2*n*lambda2)) * sum_events |r_ia - r_ib|
//       + (lambda1/(2*lambda2)) * |w_b - w_a|
// with Schoenfeld residuals taken at beta_std on the standardized data.
// Requires lambda2 > 0; when sign(beta_a) != sign(beta_b) or either is
// zero the report is marked "hypothesis not met" and the bound is omitted.
GroupingReport grouping_bound(const SurvivalDataset& d, const FitResult& fit,
                              const PenaltySpec& spec, Eigen::Index a, Eigen::Index b);

// (1/n) * observed information at beta on the data as given.
Eigen::MatrixXd estimated_fisher_information(const SurvivalDataset& d,
                                             const Eigen::VectorXd& beta);

// Inverse of the active-set submatrix of (1/n) * information at fit.beta
// on the original scale. Throws when the submatrix is singular (e.g.
// duplicated active columns), naming the dependent columns.
Eigen::MatrixXd asymptotic_covariance(const SurvivalDataset& d, const FitResult& fit,
                                      std::vector<std::string>* labels = nullptr);

SparsityReport sparsity_report(const FitResult& fit,
                               const std::optional<std::vector<Eigen::Index>>& true_active = {});

}
