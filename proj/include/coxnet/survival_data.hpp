#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace coxnet {

// One observation: Z_i = min(T_i, C_i), delta_i, X_i.
struct SurvivalRecord {
    double time = 0.0;
    int status = 0;
    Eigen::VectorXd covariates;
};

// Right-censored sample held column-oriented for the numerics. Records are
// kept in input order; sorting lives in RiskSetIndex.
struct SurvivalDataset {
    Eigen::VectorXd time;
    Eigen::VectorXi status;
    Eigen::MatrixXd X;
    std::vector<std::string> feature_names;

    Eigen::Index n() const { return time.size(); }
    Eigen::Index p() const { return X.cols(); }
    Eigen::Index n_events() const { return (status.array() == 1).count(); }

    SurvivalRecord record(Eigen::Index i) const {
        return {time[i], status[i], X.row(i).transpose()};
    }

    static SurvivalDataset from_records(const std::vector<SurvivalRecord>& records,
                                        std::vector<std::string> names = {});
};

struct StandardizationInfo {
    Eigen::VectorXd means;
    Eigen::VectorXd scales;

    // identity transform for fits that skip standardization
    static StandardizationInfo identity(Eigen::Index p) {
        return {Eigen::VectorXd::Zero(p), Eigen::VectorXd::Ones(p)};
    }
};

// Sorted view of the sample. Risk sets are suffixes of `order`:
// R_i = positions [risk_set_start[e], n) for the e-th event, so every
// record tied with the event time (event or censored) is included.
struct RiskSetIndex {
    std::vector<Eigen::Index> order;           // ascending time, stable
    std::vector<Eigen::Index> event_positions; // positions in `order` with status 1
    std::vector<Eigen::Index> risk_set_start;  // per event: first position of its tie block
};

// Throws std::invalid_argument naming the offending record if any type
// invariant fails (non-finite values, time <= 0, status outside {0,1},
// dimension mismatch, no events, n < 2, duplicate feature names).
const SurvivalDataset& validate_dataset(const SurvivalDataset& d);

// Centers and scales every column to mean 0, sd 1 with divisor n.
// A constant column is an error naming the column.
std::pair<SurvivalDataset, StandardizationInfo> standardize(const SurvivalDataset& d);

// beta_orig[k] = beta_std[k] / scales[k]; the centering shift is absorbed
// by the baseline hazard and never surfaces.
Eigen::VectorXd destandardize_coefficients(const Eigen::VectorXd& beta_std,
                                           const StandardizationInfo& info);

RiskSetIndex build_risk_sets(const SurvivalDataset& d);

}
