#include "coxnet/survival_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace coxnet {

SurvivalDataset SurvivalDataset::from_records(const std::vector<SurvivalRecord>& records,
                                              std::vector<std::string> names) {
    SurvivalDataset d;
    const Eigen::Index n = static_cast<Eigen::Index>(records.size());
    const Eigen::Index p = n > 0 ? records.front().covariates.size() : 0;
    d.time.resize(n);
    d.status.resize(n);
    d.X.resize(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = records[static_cast<std::size_t>(i)];
        if (r.covariates.size() != p)
            throw std::invalid_argument("record " + std::to_string(i) +
                                        ": covariate dimension mismatch");
        d.time[i] = r.time;
        d.status[i] = r.status;
        d.X.row(i) = r.covariates.transpose();
    }
    if (names.empty()) {
        for (Eigen::Index k = 0; k < p; ++k) names.push_back("x" + std::to_string(k + 1));
    }
    d.feature_names = std::move(names);
    return d;
}

const SurvivalDataset& validate_dataset(const SurvivalDataset& d) {
    const Eigen::Index n = d.n();
    const Eigen::Index p = d.p();
    if (n < 2) throw std::invalid_argument("dataset needs at least 2 records, got " + std::to_string(n));
    if (d.status.size() != n || d.X.rows() != n)
        throw std::invalid_argument("dataset fields disagree on record count");
    if (static_cast<Eigen::Index>(d.feature_names.size()) != p)
        throw std::invalid_argument("feature_names length does not match covariate dimension");
    std::set<std::string> seen(d.feature_names.begin(), d.feature_names.end());
    if (static_cast<Eigen::Index>(seen.size()) != p)
        throw std::invalid_argument("feature_names contains duplicates");

    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(d.time[i]) || d.time[i] <= 0.0)
            throw std::invalid_argument("record " + std::to_string(i) +
                                        ": time must be finite and > 0");
        if (d.status[i] != 0 && d.status[i] != 1)
            throw std::invalid_argument("record " + std::to_string(i) +
                                        ": status must be 0 or 1");
        for (Eigen::Index k = 0; k < p; ++k)
            if (!std::isfinite(d.X(i, k)))
                throw std::invalid_argument("record " + std::to_string(i) + ", covariate " +
                                            d.feature_names[static_cast<std::size_t>(k)] +
                                            ": non-finite value");
    }
    if (d.n_events() == 0) throw std::invalid_argument("no events: every record is censored");
    return d;
}

std::pair<SurvivalDataset, StandardizationInfo> standardize(const SurvivalDataset& d) {
    const Eigen::Index n = d.n();
    const Eigen::Index p = d.p();
    StandardizationInfo info;
    info.means = d.X.colwise().mean();
    info.scales.resize(p);

    SurvivalDataset out = d;
    for (Eigen::Index k = 0; k < p; ++k) {
        Eigen::VectorXd centered = d.X.col(k).array() - info.means[k];
        double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(n));
        if (sd == 0.0)
            throw std::invalid_argument("constant covariate column: " +
                                        d.feature_names[static_cast<std::size_t>(k)]);
        info.scales[k] = sd;
        out.X.col(k) = centered / sd;
    }
    return {std::move(out), std::move(info)};
}

Eigen::VectorXd destandardize_coefficients(const Eigen::VectorXd& beta_std,
                                           const StandardizationInfo& info) {
    if (beta_std.size() != info.scales.size())
        throw std::invalid_argument("coefficient/scale length mismatch");
    return beta_std.array() / info.scales.array();
}

RiskSetIndex build_risk_sets(const SurvivalDataset& d) {
    const Eigen::Index n = d.n();
    RiskSetIndex idx;
    idx.order.resize(static_cast<std::size_t>(n));
    std::iota(idx.order.begin(), idx.order.end(), Eigen::Index{0});
    std::stable_sort(idx.order.begin(), idx.order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return d.time[a] < d.time[b]; });

    // tie_start[q] = first position of the block of equal times containing q
    std::vector<Eigen::Index> tie_start(static_cast<std::size_t>(n));
    for (Eigen::Index q = 0; q < n; ++q) {
        if (q > 0 && d.time[idx.order[static_cast<std::size_t>(q)]] ==
                         d.time[idx.order[static_cast<std::size_t>(q - 1)]])
            tie_start[static_cast<std::size_t>(q)] = tie_start[static_cast<std::size_t>(q - 1)];
        else
            tie_start[static_cast<std::size_t>(q)] = q;
    }
    for (Eigen::Index q = 0; q < n; ++q) {
        if (d.status[idx.order[static_cast<std::size_t>(q)]] == 1) {
            idx.event_positions.push_back(q);
            idx.risk_set_start.push_back(tie_start[static_cast<std::size_t>(q)]);
        }
    }
    return idx;
}

}
