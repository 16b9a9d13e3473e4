#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace coxnet {

// lambda1 * sum_k w_k |beta_k| + lambda2 * sum_k beta_k^2, with weights all
// ones for the plain elastic net. gamma is carried along so a fit records
// how its weights were built.
struct PenaltySpec {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    Eigen::VectorXd weights;
    double gamma = 3.0;

    static PenaltySpec plain(double lambda1, double lambda2, Eigen::Index p) {
        return {lambda1, lambda2, Eigen::VectorXd::Ones(p), 3.0};
    }

    void validate(Eigen::Index p) const {
        if (lambda1 < 0.0 || lambda2 < 0.0)
            throw std::invalid_argument("penalty strengths must be nonnegative");
        if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
        if (weights.size() != p)
            throw std::invalid_argument("penalty weights length " + std::to_string(weights.size()) +
                                        " does not match dimension " + std::to_string(p));
        for (Eigen::Index k = 0; k < p; ++k)
            if (!(weights[k] > 0.0) || !std::isfinite(weights[k]))
                throw std::invalid_argument("penalty weight " + std::to_string(k) +
                                            " must be positive and finite");
    }
};

inline double penalty_value(const Eigen::VectorXd& beta, const PenaltySpec& spec) {
    if (beta.size() != spec.weights.size())
        throw std::invalid_argument("beta/weights length mismatch");
    return spec.lambda1 * (spec.weights.array() * beta.array().abs()).sum() +
           spec.lambda2 * beta.squaredNorm();
}

// w_k = (|beta_en_k| + epsilon)^(-gamma). epsilon = 0 recovers the pure
// power weights and is only legal when no first-stage coefficient is zero.
inline Eigen::VectorXd adaptive_weights(const Eigen::VectorXd& beta_en, double gamma,
                                        double epsilon) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (epsilon < 0.0) throw std::invalid_argument("epsilon must be nonnegative");
    Eigen::VectorXd w(beta_en.size());
    for (Eigen::Index k = 0; k < beta_en.size(); ++k) {
        double base = std::abs(beta_en[k]) + epsilon;
        if (base == 0.0)
            throw std::invalid_argument("zero first-stage coefficient; supply epsilon > 0 "
                                        "or exclude variable");
        w[k] = std::pow(base, -gamma);
    }
    return w;
}

inline double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

}
