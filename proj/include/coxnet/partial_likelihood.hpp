#pragma once

#include "coxnet/survival_data.hpp"

namespace coxnet {

// Ties the dataset to its risk-set index and fixes the 1/n scale of the
// smooth loss. The dataset is stored by value; contexts are cheap relative
// to the fits they serve.
struct LikelihoodContext {
    SurvivalDataset data;
    RiskSetIndex index;
    double scale = 0.0;

    static LikelihoodContext make(SurvivalDataset d) {
        LikelihoodContext ctx;
        ctx.scale = d.n() > 0 ? 1.0 / static_cast<double>(d.n()) : 0.0;
        ctx.index = build_risk_sets(d);
        ctx.data = std::move(d);
        return ctx;
    }
};

// (1/n) * sum over events { -beta'X_i + ln sum_{j in R_i} exp(beta'X_j) }.
// Evaluated in one descending pass over the sorted times with running
// log-sum-exp rescaling, so it stays finite for |beta'X| up to ~700.
double neg_log_partial_likelihood(const LikelihoodContext& ctx, const Eigen::VectorXd& beta);

// Unscaled score U(beta) = sum over events [X_i - S1/S0]. The solver
// consumes -(1/n) U.
Eigen::VectorXd score(const LikelihoodContext& ctx, const Eigen::VectorXd& beta);

// Unscaled observed information I(beta) = sum over events
// [S2/S0 - (S1/S0)(S1/S0)'], symmetric positive semidefinite.
Eigen::MatrixXd observed_information(const LikelihoodContext& ctx, const Eigen::VectorXd& beta);

// One row per event: r_ir = x_ir - risk-set weighted average of column r.
// Column sums reproduce score().
Eigen::MatrixXd schoenfeld_residuals(const LikelihoodContext& ctx, const Eigen::VectorXd& beta);

namespace detail {

// Shared suffix-sum walker; the flags pick which accumulators run.
struct CoxPass {
    double unscaled_nll = 0.0;
    Eigen::VectorXd score;
    Eigen::MatrixXd information;
    Eigen::MatrixXd residuals;
};

CoxPass cox_pass(const LikelihoodContext& ctx, const Eigen::VectorXd& beta,
                 bool want_score, bool want_information, bool want_residuals);

}

}
