#include <cmath>
#include <functional>

#include "doctest.h"
#include "qal/error.hpp"
#include "qal/tailfit.hpp"

using namespace qal;

namespace {

const Grid grid = Grid::from_spacing(30.0, 0.04);

// Real profile with density f(offset from node `centre`).
WaveFunction profile(std::size_t centre, const std::function<double(double)>& density) {
    WaveFunction psi(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double u = (static_cast<double>(i) - static_cast<double>(centre)) * grid.dx();
        psi[i] = std::sqrt(density(u));
    }
    return psi;
}

WaveFunction exponential(double l0, std::size_t centre = 750, double amp = 1.0) {
    return profile(centre, [=](double u) { return amp * std::exp(-2.0 * std::abs(u) / l0); });
}

}  // namespace

TEST_SUITE("tailfit") {

TEST_CASE("exact exponential tails") {
    const auto psi = exponential(2.0);
    const auto d = diagnostics(psi);
    const auto fit = fit_tails(psi, d);
    REQUIRE(fit.left.ok());
    REQUIRE(fit.right.ok());
    CHECK(std::abs(fit.left.length - 2.0) < 1e-6);
    CHECK(std::abs(fit.right.length - 2.0) < 1e-6);
    CHECK(fit.left.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.right.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.left.amplitude == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.left.points >= min_tail_points);
    CHECK(fit.localized);
    CHECK(classify_regime(fit, d) == Regime::exponential_localized);
}

TEST_CASE("localization length recovered across scales") {
    for (double l0 : {0.1, 0.25, 0.5, 1.0, 3.0, 7.0, 10.0}) {
        CAPTURE(l0);
        const auto psi = exponential(l0);
        const auto fit = fit_tails(psi, diagnostics(psi));
        REQUIRE(fit.left.ok());
        REQUIRE(fit.right.ok());
        CHECK(std::abs(fit.left.length - l0) < 1e-9 * l0);
        CHECK(std::abs(fit.right.length - l0) < 1e-9 * l0);
    }
}

TEST_CASE("asymmetric tails are fitted independently") {
    const auto psi = profile(700, [](double u) { return std::exp(-2.0 * std::abs(u) / (u < 0 ? 0.8 : 1.6)); });
    const auto fit = fit_tails(psi, diagnostics(psi));
    CHECK(fit.left.length == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(fit.right.length == doctest::Approx(1.6).epsilon(1e-9));
}

TEST_CASE("Gaussian profile") {
    const auto psi = profile(750, [](double u) { return std::exp(-u * u); });
    const auto fit = fit_tails(psi, diagnostics(psi));
    REQUIRE(fit.gaussian.ok());
    CHECK(std::abs(fit.gaussian.sigma - 1.0) < 1e-3);
    CHECK(fit.gaussian.r2 > fit.left.r2);
    CHECK(fit.gaussian.r2 > fit.right.r2);
}

TEST_CASE("narrow truncated Gaussian is gaussian-localized") {
    const auto psi = profile(750, [](double u) { return std::abs(u) <= 1.5 ? std::exp(-u * u) : 0.0; });
    const auto d = diagnostics(psi);
    const auto fit = fit_tails(psi, d);
    REQUIRE(fit.left.ok());
    REQUIRE(fit.right.ok());
    CHECK(fit.localized);
    CHECK(fit.gaussian.r2 > fit.left.r2);
    CHECK(classify_regime(fit, d) == Regime::gaussian_localized);
}

TEST_CASE("wide profile with short tails is extended") {
    // Flat top of half-width 5 with steep exponential flanks.
    const auto psi = profile(750, [](double u) {
        const double excess = std::max(0.0, std::abs(u) - 5.0);
        return std::exp(-2.0 * excess / 0.5);
    });
    const auto d = diagnostics(psi);
    const auto fit = fit_tails(psi, d);
    REQUIRE(fit.right.ok());
    CHECK_FALSE(fit.localized);
    CHECK(classify_regime(fit, d) == Regime::extended);
}

TEST_CASE("uniform density cannot be classified") {
    const auto psi = profile(750, [](double) { return 1.0; });
    const auto d = diagnostics(psi);
    const auto fit = fit_tails(psi, d);
    CHECK(fit.left.status == FitStatus::insufficient_data);
    CHECK(fit.right.status == FitStatus::insufficient_data);
    CHECK_THROWS_AS(classify_regime(fit, d), ClassificationUnavailableError);
}

TEST_CASE("peak at the wall leaves one side without data") {
    const auto psi = exponential(1.0, 0);
    const auto fit = fit_tails(psi, diagnostics(psi));
    CHECK(fit.left.status == FitStatus::insufficient_data);
    CHECK(fit.right.ok());
}

TEST_CASE("growing tail is reported") {
    // Left of the peak the density rises slowly away from it.
    const auto psi = profile(900, [](double u) {
        if (u >= 0) return std::exp(-2.0 * u);
        return 0.4 * std::exp(-0.005 * u);
    });
    const auto fit = fit_tails(psi, diagnostics(psi));
    CHECK(fit.left.status == FitStatus::growing_tail);
    CHECK(fit.right.ok());
}

TEST_CASE("amplitude scaling changes only the amplitude") {
    const auto psi = profile(760, [](double u) { return std::exp(-2.0 * std::abs(u) / 1.3 - 0.05 * u * u); });
    const auto base = fit_tails(psi, diagnostics(psi));
    WaveFunction scaled = psi;
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] *= std::sqrt(7.5);
    const auto fit = fit_tails(scaled, diagnostics(scaled));
    CHECK(std::abs(fit.left.length - base.left.length) < 1e-10);
    CHECK(std::abs(fit.right.r2 - base.right.r2) < 1e-10);
    CHECK(std::abs(fit.gaussian.sigma - base.gaussian.sigma) < 1e-10);
    CHECK(fit.left.amplitude == doctest::Approx(7.5 * base.left.amplitude).epsilon(1e-10));
}

TEST_CASE("translation by whole nodes leaves fits unchanged") {
    auto shape = [](double u) { return std::exp(-2.0 * std::abs(u) / 1.3 - 0.05 * u * u); };
    const auto base_psi = profile(750, shape);
    const auto base = fit_tails(base_psi, diagnostics(base_psi));
    for (std::size_t centre : {500u, 731u, 1020u}) {
        const auto psi = profile(centre, shape);
        const auto fit = fit_tails(psi, diagnostics(psi));
        CHECK(std::abs(fit.left.length - base.left.length) < 1e-8);
        CHECK(std::abs(fit.right.length - base.right.length) < 1e-8);
        CHECK(std::abs(fit.left.r2 - base.left.r2) < 1e-8);
        CHECK(std::abs(fit.gaussian.r2 - base.gaussian.r2) < 1e-8);
    }
}

TEST_CASE("window validation") {
    const auto psi = exponential(1.0);
    const auto d = diagnostics(psi);
    CHECK_THROWS_AS(fit_tails(psi, d, FitWindow{0.5, 0.0}), ParameterError);
    CHECK_THROWS_AS(fit_tails(psi, d, FitWindow{0.1, 0.2}), ParameterError);
    CHECK_THROWS_AS(fit_tails(psi, d, FitWindow{1.5, 0.2}), ParameterError);
    CHECK(to_string(Regime::gaussian_localized) == "gaussian-localized");
}

}
