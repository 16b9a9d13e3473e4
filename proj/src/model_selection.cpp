#include "coxnet/model_selection.hpp"

#include "coxnet/parallel.hpp"
#include "coxnet/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace coxnet {

namespace {

void shuffle_indices(std::vector<Eigen::Index>& v, Philox& rng) {
    for (std::size_t k = v.size(); k > 1; --k)
        std::swap(v[k - 1], v[static_cast<std::size_t>(rng.uniform_below(k))]);
}

}  // namespace

std::vector<int> kfold_split(const SurvivalDataset& d, const CvConfig& cfg) {
    validate_dataset(d);
    if (cfg.k_folds < 2) throw std::invalid_argument("k_folds must be at least 2");
    const Eigen::Index events = d.n_events();
    if (static_cast<Eigen::Index>(cfg.k_folds) > events)
        throw std::invalid_argument("k_folds (" + std::to_string(cfg.k_folds) +
                                    ") exceeds the number of events (" + std::to_string(events) +
                                    ")");

    std::vector<Eigen::Index> event_ids, censored_ids;
    for (Eigen::Index i = 0; i < d.n(); ++i)
        (d.status[i] == 1 ? event_ids : censored_ids).push_back(i);

    Philox rng(cfg.seed, 0xF01Du);
    shuffle_indices(event_ids, rng);
    shuffle_indices(censored_ids, rng);

    std::vector<int> assignment(static_cast<std::size_t>(d.n()), 0);
    int fold = 0;
    for (Eigen::Index id : event_ids) {
        assignment[static_cast<std::size_t>(id)] = fold;
        fold = (fold + 1) % cfg.k_folds;
    }
    for (Eigen::Index id : censored_ids) {
        assignment[static_cast<std::size_t>(id)] = fold;
        fold = (fold + 1) % cfg.k_folds;
    }
    return assignment;
}

SurvivalDataset drop_fold(const SurvivalDataset& d, const std::vector<int>& fold_assignment,
                          int fold) {
    if (fold_assignment.size() != static_cast<std::size_t>(d.n()))
        throw std::invalid_argument("fold assignment length does not match dataset");
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < d.n(); ++i)
        if (fold_assignment[static_cast<std::size_t>(i)] != fold) keep.push_back(i);

    SurvivalDataset out;
    out.time.resize(static_cast<Eigen::Index>(keep.size()));
    out.status.resize(static_cast<Eigen::Index>(keep.size()));
    out.X.resize(static_cast<Eigen::Index>(keep.size()), d.p());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        out.time[static_cast<Eigen::Index>(r)] = d.time[keep[r]];
        out.status[static_cast<Eigen::Index>(r)] = d.status[keep[r]];
        out.X.row(static_cast<Eigen::Index>(r)) = d.X.row(keep[r]);
    }
    out.feature_names = d.feature_names;
    return out;
}

double cv_score(const SurvivalDataset& d, const std::vector<int>& fold_assignment, int fold,
                const Eigen::VectorXd& beta) {
    LikelihoodContext full = LikelihoodContext::make(d);
    double l_full = -detail::cox_pass(full, beta, false, false, false).unscaled_nll;

    SurvivalDataset minus = drop_fold(d, fold_assignment, fold);
    if (minus.n() == d.n()) return 0.0;  // empty fold
    LikelihoodContext rest = LikelihoodContext::make(minus);
    double l_minus = -detail::cox_pass(rest, beta, false, false, false).unscaled_nll;
    return l_full - l_minus;
}

CvReport select_lambda(const SurvivalDataset& d, const Eigen::VectorXd& weights,
                       const CvConfig& cfg, const FitConfig& fit_cfg) {
    validate_dataset(d);
    if (cfg.lambda2_grid.empty())
        throw std::invalid_argument("lambda2_grid must contain at least one value");
    if (weights.size() != d.p())
        throw std::invalid_argument("weights length does not match dimension");

    CvReport report;
    report.fold_assignment = kfold_split(d, cfg);

    // One lambda1 grid per lambda2, anchored at the full-data lambda_max so
    // every fold is scored at identical grid points.
    double lmax;
    if (fit_cfg.standardize) {
        auto [ds, info] = standardize(d);
        lmax = compute_lambda_max(ds, weights);
    } else {
        lmax = compute_lambda_max(d, weights);
    }
    const std::vector<double> grid = lambda_grid(lmax, cfg.grid_size, cfg.grid_ratio);

    struct FoldScores {
        bool ok = false;
        std::vector<double> score;  // per grid point
    };

    for (double lambda2 : cfg.lambda2_grid) {
        std::vector<FoldScores> per_fold(static_cast<std::size_t>(cfg.k_folds));
        parallel_for(static_cast<std::size_t>(cfg.k_folds), [&](std::size_t f) {
            FoldScores& slot = per_fold[f];
            try {
                SurvivalDataset training =
                    drop_fold(d, report.fold_assignment, static_cast<int>(f));
                std::vector<FitResult> path =
                    fit_lambda_sequence(training, grid, lambda2, weights, fit_cfg);
                slot.score.resize(grid.size());
                for (std::size_t i = 0; i < grid.size(); ++i)
                    slot.score[i] = cv_score(d, report.fold_assignment, static_cast<int>(f),
                                             path[i].beta);
                slot.ok = true;
            } catch (const std::exception&) {
                slot.ok = false;  // fold dropped from the mean
            }
        });

        int usable = 0;
        for (const auto& fs : per_fold)
            if (fs.ok) ++usable;
        if (usable == 0)
            throw std::runtime_error("cross-validation failed in every fold (lambda2 = " +
                                     std::to_string(lambda2) + ")");

        for (std::size_t i = 0; i < grid.size(); ++i) {
            double mean = 0.0;
            for (const auto& fs : per_fold)
                if (fs.ok) mean += fs.score[i];
            mean /= usable;
            double var = 0.0;
            for (const auto& fs : per_fold)
                if (fs.ok) var += (fs.score[i] - mean) * (fs.score[i] - mean);
            double se = usable > 1 ? std::sqrt(var / (usable - 1) / usable) : 0.0;
            report.points.push_back({lambda2, grid[i], mean, se, usable});
        }
    }

    // Maximize the mean score; strict improvement required, so the earlier
    // (larger) lambda1 wins ties.
    std::size_t best = 0;
    for (std::size_t i = 1; i < report.points.size(); ++i)
        if (report.points[i].mean_score > report.points[best].mean_score) best = i;
    report.best_lambda1 = report.points[best].lambda1;
    report.best_lambda2 = report.points[best].lambda2;
    return report;
}

}
