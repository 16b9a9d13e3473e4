#include "coxnet/partial_likelihood.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace coxnet {
namespace detail {

// Walk sorted positions descending. Each tie block is absorbed into the
// suffix accumulators S0, S1, S2 before any of its events contribute a
// term, which is the Breslow convention: tied events (and censored records
// tied with them) all sit in each other's risk sets. The accumulators
// carry a running maximum m of eta over the suffix; entering a larger eta
// rescales them by exp(m_old - m_new) so S0 never overflows.
CoxPass cox_pass(const LikelihoodContext& ctx, const Eigen::VectorXd& beta,
                 bool want_score, bool want_information, bool want_residuals) {
    const SurvivalDataset& d = ctx.data;
    const Eigen::Index n = d.n();
    const Eigen::Index p = d.p();
    if (beta.size() != p)
        throw std::invalid_argument("beta length " + std::to_string(beta.size()) +
                                    " does not match covariate dimension " + std::to_string(p));
    if (!beta.allFinite()) throw std::invalid_argument("beta contains non-finite values");

    Eigen::VectorXd eta = d.X * beta;
    if (!eta.allFinite())
        throw std::runtime_error("linear predictor overflowed despite finite beta");

    CoxPass out;
    if (want_score) out.score = Eigen::VectorXd::Zero(p);
    if (want_information) out.information = Eigen::MatrixXd::Zero(p, p);
    const Eigen::Index m_events = static_cast<Eigen::Index>(ctx.index.event_positions.size());
    if (want_residuals) out.residuals.resize(m_events, p);

    double max_eta = -std::numeric_limits<double>::infinity();
    double s0 = 0.0;
    Eigen::VectorXd s1;
    Eigen::MatrixXd s2;
    if (want_score || want_residuals || want_information) s1 = Eigen::VectorXd::Zero(p);
    if (want_information) s2 = Eigen::MatrixXd::Zero(p, p);

    auto absorb = [&](Eigen::Index rec) {
        double e = eta[rec];
        if (e > max_eta) {
            if (std::isfinite(max_eta)) {
                double shrink = std::exp(max_eta - e);
                s0 *= shrink;
                if (s1.size()) s1 *= shrink;
                if (s2.size()) s2 *= shrink;
            }
            max_eta = e;
        }
        double w = std::exp(e - max_eta);
        s0 += w;
        if (s1.size()) s1 += w * d.X.row(rec).transpose();
        if (s2.size()) s2.selfadjointView<Eigen::Lower>().rankUpdate(d.X.row(rec).transpose(), w);
    };

    Eigen::Index next_event = m_events - 1;  // events visited in descending position order
    Eigen::Index q = n - 1;
    while (q >= 0) {
        Eigen::Index block_start = q;
        double t = d.time[ctx.index.order[static_cast<std::size_t>(q)]];
        while (block_start > 0 &&
               d.time[ctx.index.order[static_cast<std::size_t>(block_start - 1)]] == t)
            --block_start;
        for (Eigen::Index r = block_start; r <= q; ++r)
            absorb(ctx.index.order[static_cast<std::size_t>(r)]);

        while (next_event >= 0 && ctx.index.event_positions[static_cast<std::size_t>(next_event)] >= block_start) {
            Eigen::Index pos = ctx.index.event_positions[static_cast<std::size_t>(next_event)];
            Eigen::Index rec = ctx.index.order[static_cast<std::size_t>(pos)];
            out.unscaled_nll += -eta[rec] + max_eta + std::log(s0);
            if (want_score || want_residuals || want_information) {
                Eigen::VectorXd mean = s1 / s0;
                if (want_score) out.score += d.X.row(rec).transpose() - mean;
                if (want_residuals) out.residuals.row(next_event) = d.X.row(rec) - mean.transpose();
                if (want_information) {
                    Eigen::MatrixXd s2full = s2.selfadjointView<Eigen::Lower>();
                    out.information += s2full / s0 - mean * mean.transpose();
                }
            }
            --next_event;
        }
        q = block_start - 1;
    }

    if (!std::isfinite(out.unscaled_nll))
        throw std::runtime_error("partial likelihood overflowed despite stabilization");
    return out;
}

}

double neg_log_partial_likelihood(const LikelihoodContext& ctx, const Eigen::VectorXd& beta) {
    return ctx.scale * detail::cox_pass(ctx, beta, false, false, false).unscaled_nll;
}

Eigen::VectorXd score(const LikelihoodContext& ctx, const Eigen::VectorXd& beta) {
    return detail::cox_pass(ctx, beta, true, false, false).score;
}

Eigen::MatrixXd observed_information(const LikelihoodContext& ctx, const Eigen::VectorXd& beta) {
    return detail::cox_pass(ctx, beta, false, true, false).information;
}

Eigen::MatrixXd schoenfeld_residuals(const LikelihoodContext& ctx, const Eigen::VectorXd& beta) {
    return detail::cox_pass(ctx, beta, false, false, true).residuals;
}

}
