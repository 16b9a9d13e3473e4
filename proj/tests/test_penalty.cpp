#include "coxnet/penalty.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace coxnet;

TEST_CASE("penalty value arithmetic") {
    PenaltySpec spec = PenaltySpec::plain(0.5, 0.25, 2);
    spec.weights << 1.0, 2.0;
    Eigen::VectorXd beta(2);
    beta << 2.0, -1.0;
    // 0.5*(1*2 + 2*1) + 0.25*(4 + 1)
    CHECK(penalty_value(beta, spec) == doctest::Approx(3.25).epsilon(1e-15));

    PenaltySpec none = PenaltySpec::plain(0.0, 0.0, 2);
    CHECK(penalty_value(beta, none) == 0.0);
}

TEST_CASE("soft threshold cases") {
    CHECK(soft_threshold(3.0, 1.0) == 2.0);
    CHECK(soft_threshold(-3.0, 1.0) == -2.0);
    CHECK(soft_threshold(0.5, 1.0) == 0.0);
    CHECK(soft_threshold(-0.5, 1.0) == 0.0);
    CHECK(soft_threshold(1.0, 1.0) == 0.0);
    CHECK(soft_threshold(-1.0, 1.0) == 0.0);
    CHECK(soft_threshold(2.5, 0.0) == 2.5);
}

TEST_CASE("adaptive weights invert first-stage magnitudes") {
    Eigen::VectorXd b(2);
    b << 2.0, 0.5;
    Eigen::VectorXd w1 = adaptive_weights(b, 1.0, 0.0);
    CHECK(w1[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(w1[1] == doctest::Approx(2.0).epsilon(1e-15));
    Eigen::VectorXd w2 = adaptive_weights(b, 2.0, 0.0);
    CHECK(w2[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(w2[1] == doctest::Approx(4.0).epsilon(1e-15));
    // sign is irrelevant
    Eigen::VectorXd bn(2);
    bn << -2.0, 0.5;
    CHECK(adaptive_weights(bn, 2.0, 0.0)[0] == doctest::Approx(0.25));
}

TEST_CASE("adaptive weights with a zero coefficient") {
    Eigen::VectorXd b(2);
    b << 1.0, 0.0;
    CHECK_THROWS_WITH_AS(adaptive_weights(b, 3.0, 0.0),
                         "zero first-stage coefficient; supply epsilon > 0 or exclude variable",
                         std::invalid_argument);
    Eigen::VectorXd w = adaptive_weights(b, 3.0, 0.001);
    CHECK(w[1] == doctest::Approx(std::pow(0.001, -3.0)).epsilon(1e-12));
    CHECK(w[0] == doctest::Approx(std::pow(1.001, -3.0)).epsilon(1e-12));
}

TEST_CASE("spec validation catches bad penalties") {
    PenaltySpec spec = PenaltySpec::plain(0.1, 0.2, 3);
    CHECK_NOTHROW(spec.validate(3));

    SUBCASE("negative lambda1") {
        spec.lambda1 = -0.1;
        CHECK_THROWS_AS(spec.validate(3), std::invalid_argument);
    }
    SUBCASE("negative lambda2") {
        spec.lambda2 = -1.0;
        CHECK_THROWS_AS(spec.validate(3), std::invalid_argument);
    }
    SUBCASE("weight length mismatch") { CHECK_THROWS_AS(spec.validate(2), std::invalid_argument); }
    SUBCASE("nonpositive weight") {
        spec.weights[1] = 0.0;
        CHECK_THROWS_AS(spec.validate(3), std::invalid_argument);
    }
    SUBCASE("non-finite weight") {
        spec.weights[0] = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(spec.validate(3), std::invalid_argument);
    }
}
