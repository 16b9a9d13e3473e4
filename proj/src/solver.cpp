#include "coxnet/solver.hpp"

#include "coxnet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace coxnet {

void FitConfig::validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (max_outer < 1 || max_inner < 1)
        throw std::invalid_argument("iteration caps must be at least 1");
}

namespace detail {

double kkt_residual(const LikelihoodContext& ctx, const Eigen::VectorXd& beta,
                    const PenaltySpec& spec) {
    Eigen::VectorXd g = -ctx.scale * cox_pass(ctx, beta, true, false, false).score;
    double worst = 0.0;
    for (Eigen::Index k = 0; k < beta.size(); ++k) {
        double v;
        if (beta[k] != 0.0) {
            double sign = beta[k] > 0.0 ? 1.0 : -1.0;
            v = std::abs(g[k] + spec.lambda1 * spec.weights[k] * sign + 2.0 * spec.lambda2 * beta[k]);
        } else {
            v = std::max(std::abs(g[k]) - spec.lambda1 * spec.weights[k], 0.0);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

namespace {

constexpr double kSeparationThreshold = 500.0;  // on the solver scale
constexpr double kVanishingObjective = 1e-6;
constexpr double kCurvatureFloor = 1e-12;

double objective_at(const LikelihoodContext& ctx, const Eigen::VectorXd& beta,
                    const PenaltySpec& spec) {
    return ctx.scale * cox_pass(ctx, beta, false, false, false).unscaled_nll +
           penalty_value(beta, spec);
}

// With no penalty the objective equals the negative log partial likelihood,
// which is strictly positive at any finite beta once some risk set has more
// than one member; driving it toward zero certifies that no minimizer exists.
void throw_if_separating(const Eigen::VectorXd& b, double objective, const PenaltySpec& spec) {
    if (spec.lambda1 != 0.0 || spec.lambda2 != 0.0) return;
    double magnitude = b.lpNorm<Eigen::Infinity>();
    if (magnitude > kSeparationThreshold ||
        (objective < kVanishingObjective && magnitude > 1.0))
        throw std::runtime_error(
            "coefficients diverging with no penalty: data may be separable, so the "
            "objective has no minimizer; set lambda1 or lambda2 positive");
}

std::vector<Eigen::Index> cycle_order(Eigen::Index p, const FitConfig& cfg) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    if (cfg.cycle_order_seed) {
        Philox rng(*cfg.cycle_order_seed, 0xC0DEu);
        for (Eigen::Index k = p - 1; k > 0; --k)
            std::swap(order[static_cast<std::size_t>(k)],
                      order[static_cast<std::size_t>(rng.uniform_below(static_cast<std::uint64_t>(k + 1)))]);
    }
    return order;
}

// Solves the penalized objective on the data exactly as given; the caller
// handles standardization and destandardization.
FitResult fit_core(const LikelihoodContext& ctx, const PenaltySpec& spec, const FitConfig& cfg,
                   Eigen::VectorXd b) {
    const Eigen::Index p = ctx.data.p();
    const std::vector<Eigen::Index> order = cycle_order(p, cfg);

    FitResult res;
    double f_current = objective_at(ctx, b, spec);
    res.objective_trace.push_back(f_current);

    for (int outer = 0; outer < cfg.max_outer; ++outer) {
        ++res.outer_iterations;
        throw_if_separating(b, f_current, spec);

        detail::CoxPass pass = detail::cox_pass(ctx, b, true, true, false);
        Eigen::VectorXd g = -ctx.scale * pass.score;
        Eigen::MatrixXd H = ctx.scale * pass.information;

        // Inner cyclic coordinate descent on the local quadratic model
        //   m(v) = g'(v-b) + (1/2)(v-b)'H(v-b) + penalty(v).
        // r tracks H(v-b); the 1-D update for coordinate k has exact
        // curvature H_kk + 2*lambda2.
        Eigen::VectorXd v = b;
        Eigen::VectorXd r = Eigen::VectorXd::Zero(p);
        for (int cycle = 0; cycle < cfg.max_inner; ++cycle) {
            ++res.inner_iterations;
            double max_delta = 0.0;
            for (Eigen::Index idx = 0; idx < p; ++idx) {
                Eigen::Index k = order[static_cast<std::size_t>(idx)];
                double hkk = H(k, k);
                double z = hkk * v[k] - g[k] - r[k];
                double denom = std::max(hkk + 2.0 * spec.lambda2, kCurvatureFloor);
                double updated = soft_threshold(z, spec.lambda1 * spec.weights[k]) / denom;
                if (updated != v[k]) {
                    r += H.col(k) * (updated - v[k]);
                    max_delta = std::max(max_delta, std::abs(updated - v[k]));
                    v[k] = updated;
                }
            }
            if (max_delta < 0.1 * cfg.tol) break;
        }

        Eigen::VectorXd direction = v - b;
        double step_size = direction.lpNorm<Eigen::Infinity>();
        if (step_size == 0.0) {
            res.kkt_residual = detail::kkt_residual(ctx, b, spec);
            res.converged = res.kkt_residual <= 10.0 * cfg.tol;
            break;
        }

        // Step halving keeps the true objective non-increasing when the
        // quadratic model overshoots. The slack absorbs evaluation noise so
        // that a full step is still taken once the iterates sit at the
        // optimum up to rounding.
        const double f_slack = 1e-12 * (1.0 + std::abs(f_current));
        double alpha = 1.0;
        Eigen::VectorXd candidate = v;
        double f_candidate = objective_at(ctx, candidate, spec);
        int halvings = 0;
        while (f_candidate > f_current + f_slack && halvings < 40) {
            alpha *= 0.5;
            candidate = b + alpha * direction;
            f_candidate = objective_at(ctx, candidate, spec);
            ++halvings;
        }
        if (f_candidate > f_current + f_slack) {
            // no progress along the model direction; settle at b
            res.kkt_residual = detail::kkt_residual(ctx, b, spec);
            res.converged = res.kkt_residual <= 10.0 * cfg.tol;
            break;
        }

        b = candidate;
        f_current = f_candidate;
        res.objective_trace.push_back(f_current);

        // Only a full step preserves the exact zeros placed by the inner
        // soft-threshold updates, so convergence is declared on full steps.
        if (alpha == 1.0 && step_size < cfg.tol) {
            res.kkt_residual = detail::kkt_residual(ctx, b, spec);
            if (res.kkt_residual <= 10.0 * cfg.tol) {
                res.converged = true;
                break;
            }
        }
    }

    throw_if_separating(b, f_current, spec);
    if (!res.converged && res.kkt_residual == 0.0)
        res.kkt_residual = detail::kkt_residual(ctx, b, spec);
    res.objective = f_current;
    res.beta_std = std::move(b);
    for (Eigen::Index k = 0; k < p; ++k)
        if (res.beta_std[k] != 0.0) res.active_set.push_back(k);
    return res;
}

}  // namespace
}  // namespace detail

FitResult fit_penalized_cox(const SurvivalDataset& d, const PenaltySpec& spec,
                            const FitConfig& cfg) {
    validate_dataset(d);
    spec.validate(d.p());
    cfg.validate();

    SurvivalDataset working;
    StandardizationInfo info = StandardizationInfo::identity(d.p());
    if (cfg.standardize) {
        auto [ds, si] = standardize(d);
        working = std::move(ds);
        info = std::move(si);
    } else {
        working = d;
    }
    LikelihoodContext ctx = LikelihoodContext::make(std::move(working));

    Eigen::VectorXd start = Eigen::VectorXd::Zero(d.p());
    if (cfg.beta0) {
        if (cfg.beta0->size() != d.p())
            throw std::invalid_argument("warm start length does not match dimension");
        start = *cfg.beta0;
    }

    FitResult res = detail::fit_core(ctx, spec, cfg, std::move(start));
    res.standardization = std::move(info);
    res.beta = destandardize_coefficients(res.beta_std, res.standardization);
    return res;
}

AenFit fit_adaptive_elastic_net(const SurvivalDataset& d, double lambda1_en, double lambda2,
                                double lambda1_star, double gamma, double epsilon,
                                const FitConfig& cfg) {
    AenFit out;
    out.spec_en = PenaltySpec::plain(lambda1_en, lambda2, d.p());
    out.spec_en.gamma = gamma;
    out.en_stage = fit_penalized_cox(d, out.spec_en, cfg);

    out.weights = adaptive_weights(out.en_stage.beta_std, gamma, epsilon);
    out.spec_aen = PenaltySpec{lambda1_star, lambda2, out.weights, gamma};

    FitConfig stage2_cfg = cfg;
    stage2_cfg.beta0 = out.en_stage.beta_std;
    out.aen_stage = fit_penalized_cox(d, out.spec_aen, stage2_cfg);
    return out;
}

double compute_lambda_max(const SurvivalDataset& d, const Eigen::VectorXd& weights) {
    validate_dataset(d);
    if (weights.size() != d.p())
        throw std::invalid_argument("weights length does not match dimension");
    LikelihoodContext ctx = LikelihoodContext::make(d);
    Eigen::VectorXd g =
        -ctx.scale * score(ctx, Eigen::VectorXd::Zero(d.p()));
    double lmax = 0.0;
    for (Eigen::Index k = 0; k < d.p(); ++k) {
        // round the quotient up until lmax * w_k >= |g_k| holds in floating
        // point, so the zero vector really is optimal at lambda1 = lmax
        double q = std::abs(g[k]) / weights[k];
        while (q * weights[k] < std::abs(g[k]))
            q = std::nextafter(q, std::numeric_limits<double>::infinity());
        lmax = std::max(lmax, q);
    }
    return lmax;
}

std::vector<double> lambda_grid(double lambda_max, int grid_size, double grid_ratio) {
    if (grid_size < 2) throw std::invalid_argument("grid_size must be at least 2");
    if (!(grid_ratio > 0.0 && grid_ratio < 1.0))
        throw std::invalid_argument("grid_ratio must lie in (0,1)");
    std::vector<double> grid(static_cast<std::size_t>(grid_size));
    grid[0] = lambda_max;
    for (int i = 1; i < grid_size; ++i)
        grid[static_cast<std::size_t>(i)] =
            lambda_max * std::pow(grid_ratio, static_cast<double>(i) / (grid_size - 1));
    return grid;
}

std::vector<FitResult> fit_lambda_sequence(const SurvivalDataset& d,
                                           const std::vector<double>& lambda1_values,
                                           double lambda2, const Eigen::VectorXd& weights,
                                           const FitConfig& cfg) {
    validate_dataset(d);
    cfg.validate();

    SurvivalDataset working;
    StandardizationInfo info = StandardizationInfo::identity(d.p());
    if (cfg.standardize) {
        auto [ds, si] = standardize(d);
        working = std::move(ds);
        info = std::move(si);
    } else {
        working = d;
    }
    LikelihoodContext ctx = LikelihoodContext::make(std::move(working));

    Eigen::VectorXd warm = Eigen::VectorXd::Zero(d.p());
    if (cfg.beta0) warm = *cfg.beta0;

    std::vector<FitResult> fits;
    fits.reserve(lambda1_values.size());
    for (double lambda1 : lambda1_values) {
        PenaltySpec spec{lambda1, lambda2, weights, 3.0};
        spec.validate(d.p());
        FitResult res = detail::fit_core(ctx, spec, cfg, warm);
        res.standardization = info;
        res.beta = destandardize_coefficients(res.beta_std, info);
        warm = res.beta_std;
        fits.push_back(std::move(res));
    }
    return fits;
}

std::vector<std::pair<double, FitResult>> regularization_path(const SurvivalDataset& d,
                                                              double lambda2,
                                                              const Eigen::VectorXd& weights,
                                                              int grid_size, double grid_ratio,
                                                              const FitConfig& cfg) {
    validate_dataset(d);
    double lmax;
    if (cfg.standardize) {
        auto [ds, si] = standardize(d);
        lmax = compute_lambda_max(ds, weights);
    } else {
        lmax = compute_lambda_max(d, weights);
    }
    std::vector<double> grid = lambda_grid(lmax, grid_size, grid_ratio);
    std::vector<FitResult> fits = fit_lambda_sequence(d, grid, lambda2, weights, cfg);
    std::vector<std::pair<double, FitResult>> path;
    path.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        path.emplace_back(grid[i], std::move(fits[i]));
    return path;
}

double check_kkt(const SurvivalDataset& d, const Eigen::VectorXd& beta, const PenaltySpec& spec) {
    spec.validate(d.p());
    if (beta.size() != d.p())
        throw std::invalid_argument("beta length does not match dimension");
    LikelihoodContext ctx = LikelihoodContext::make(d);
    return detail::kkt_residual(ctx, beta, spec);
}

}
