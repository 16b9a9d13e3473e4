#include "coxnet/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace coxnet {

namespace {

double column_correlation(const Eigen::MatrixXd& X, Eigen::Index a, Eigen::Index b) {
    Eigen::VectorXd ca = X.col(a).array() - X.col(a).mean();
    Eigen::VectorXd cb = X.col(b).array() - X.col(b).mean();
    double denom = std::sqrt(ca.squaredNorm() * cb.squaredNorm());
    if (denom == 0.0) return 0.0;
    return ca.dot(cb) / denom;
}

// re-applies a stored standardization so diagnostics see the same data the
// solver saw
SurvivalDataset apply_standardization(const SurvivalDataset& d, const StandardizationInfo& info) {
    SurvivalDataset out = d;
    for (Eigen::Index k = 0; k < d.p(); ++k)
        out.X.col(k) = (d.X.col(k).array() - info.means[k]) / info.scales[k];
    return out;
}

}  // namespace

double grouping_distance(const FitResult& fit, Eigen::Index a, Eigen::Index b) {
    if (a == b) throw std::invalid_argument("grouping pair needs two distinct covariates");
    if (a < 0 || b < 0 || a >= fit.beta_std.size() || b >= fit.beta_std.size())
        throw std::invalid_argument("covariate index out of range");
    return std::abs(fit.beta_std[a] - fit.beta_std[b]);
}

GroupingReport grouping_bound(const SurvivalDataset& d, const FitResult& fit,
                              const PenaltySpec& spec, Eigen::Index a, Eigen::Index b) {
    if (!(spec.lambda2 > 0.0)) throw std::invalid_argument("bound requires lambda2 > 0");

    GroupingReport report;
    report.a = a;
    report.b = b;
    report.distance = grouping_distance(fit, a, b);
    report.correlation = column_correlation(d.X, a, b);

    double ba = fit.beta_std[a];
    double bb = fit.beta_std[b];
    report.hypothesis_met = ba * bb > 0.0;
    if (!report.hypothesis_met) {
        report.note = "hypothesis not met: estimates must be nonzero with equal signs";
        return report;
    }

    SurvivalDataset ds = apply_standardization(d, fit.standardization);
    LikelihoodContext ctx = LikelihoodContext::make(std::move(ds));
    Eigen::MatrixXd resid = schoenfeld_residuals(ctx, fit.beta_std);
    double total = (resid.col(a) - resid.col(b)).cwiseAbs().sum();

    double n = static_cast<double>(d.n());
    report.bound = total / (2.0 * n * spec.lambda2) +
                   spec.lambda1 * std::abs(spec.weights[b] - spec.weights[a]) /
                       (2.0 * spec.lambda2);
    return report;
}

Eigen::MatrixXd estimated_fisher_information(const SurvivalDataset& d,
                                             const Eigen::VectorXd& beta) {
    LikelihoodContext ctx = LikelihoodContext::make(d);
    return ctx.scale * observed_information(ctx, beta);
}

Eigen::MatrixXd asymptotic_covariance(const SurvivalDataset& d, const FitResult& fit,
                                      std::vector<std::string>* labels) {
    const std::vector<Eigen::Index>& active = fit.active_set;
    if (active.empty()) throw std::invalid_argument("active set is empty");

    Eigen::MatrixXd info = estimated_fisher_information(d, fit.beta);
    const Eigen::Index m = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd sub(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            sub(i, j) = info(active[static_cast<std::size_t>(i)],
                             active[static_cast<std::size_t>(j)]);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) {
        // name an exactly collinear active pair if one exists
        std::string offenders;
        for (Eigen::Index i = 0; i < m && offenders.empty(); ++i)
            for (Eigen::Index j = i + 1; j < m; ++j) {
                double rho = column_correlation(d.X, active[static_cast<std::size_t>(i)],
                                                active[static_cast<std::size_t>(j)]);
                if (std::abs(std::abs(rho) - 1.0) < 1e-12) {
                    offenders = d.feature_names[static_cast<std::size_t>(
                                    active[static_cast<std::size_t>(i)])] +
                                ", " +
                                d.feature_names[static_cast<std::size_t>(
                                    active[static_cast<std::size_t>(j)])];
                    break;
                }
            }
        std::string msg = "active-set information matrix is singular";
        if (!offenders.empty()) msg += " (linearly dependent columns: " + offenders + ")";
        msg += "; collapse dependent columns to identified sums, as the oracle Monte Carlo "
               "does, before inverting";
        throw std::runtime_error(msg);
    }

    if (labels) {
        labels->clear();
        for (Eigen::Index k : active)
            labels->push_back(d.feature_names[static_cast<std::size_t>(k)]);
    }
    return lu.inverse();
}

SparsityReport sparsity_report(const FitResult& fit,
                               const std::optional<std::vector<Eigen::Index>>& true_active) {
    SparsityReport report;
    for (Eigen::Index k = 0; k < fit.beta.size(); ++k)
        (fit.beta[k] != 0.0 ? report.active : report.zero).push_back(k);

    if (true_active) {
        std::set<Eigen::Index> truth(true_active->begin(), true_active->end());
        std::set<Eigen::Index> estimated(report.active.begin(), report.active.end());
        for (Eigen::Index k : report.active)
            if (!truth.count(k)) report.false_inclusions.push_back(k);
        for (Eigen::Index k : *true_active)
            if (!estimated.count(k)) report.false_exclusions.push_back(k);
        report.exact_recovery =
            report.false_inclusions.empty() && report.false_exclusions.empty();
    }
    return report;
}

}
