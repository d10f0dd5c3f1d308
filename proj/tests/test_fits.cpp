#include <doctest.h>

#include <cmath>
#include <limits>

#include "ctds/error.hpp"
#include "ctds/fits.hpp"
#include "ctds/rng.hpp"

using namespace ctds;

namespace {

std::vector<double> exponential_samples(double lambda, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (double& x : out) x = -std::log(rng.uniform_open(0.0, 1.0)) / lambda;
  return out;
}

// Survival (1 + n)^-eta.
std::vector<double> powerlaw_samples(double eta, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (double& x : out) x = std::pow(rng.uniform_open(0.0, 1.0), -1.0 / eta) - 1.0;
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("survival function") {
  const std::vector<double> xs{3.0, 1.0, 2.0, 2.0, std::numeric_limits<double>::infinity()};
  const auto s = survival(xs);
  REQUIRE(s.size() == 3);
  CHECK(s[0].x == 1.0);
  CHECK(s[0].p == doctest::Approx(0.8));
  CHECK(s[1].p == doctest::Approx(0.4));
  CHECK(s[2].p == doctest::Approx(0.2));
}

TEST_CASE("survival is non-increasing") {
  const auto s = survival(exponential_samples(1.0, 1000, 4));
  for (std::size_t i = 1; i < s.size(); ++i) REQUIRE(s[i].p <= s[i - 1].p);
}

TEST_CASE("exponential decay recovery") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ScalingFit fit = fit_exponential_decay(exponential_samples(0.7, 10'000, seed));
    const auto& m = std::get<ExpDecay>(fit.model);
    CHECK(m.lambda == doctest::Approx(0.7).epsilon(0.02));
    CHECK(m.r == doctest::Approx(1.0).epsilon(0.05));
    CHECK(fit.r_squared > 0.99);
    CHECK(fit.window_lo == 0.02);
    CHECK(fit.window_hi == 0.5);
    CHECK(fit.samples == 10'000);
  }
}

TEST_CASE("exponential fit errors") {
  CHECK(code_of([] { fit_exponential_decay(exponential_samples(1.0, 49, 1)); }) == ErrorCode::InsufficientData);
  const std::vector<double> same(100, 3.0);
  CHECK(code_of([&] { fit_exponential_decay(same); }) == ErrorCode::DegenerateWindow);
  CHECK_THROWS_AS(fit_exponential_decay(exponential_samples(1.0, 100, 1), {0.1, 0.2}), Error);
}

TEST_CASE("unsolved samples stay in the denominator") {
  auto xs = exponential_samples(0.5, 10'000, 8);
  for (std::size_t i = 0; i < 1000; ++i) xs[i] = std::numeric_limits<double>::infinity();
  const ScalingFit fit = fit_exponential_decay(xs);
  // Survival of the mixture is 0.1 + 0.9 e^{-0.5 t}: slower apparent decay.
  CHECK(std::get<ExpDecay>(fit.model).lambda < 0.5);
}

TEST_CASE("rate law recovery and predictor") {
  std::vector<std::pair<double, double>> pairs;
  for (double n : {20.0, 30.0, 40.0, 50.0}) pairs.emplace_back(n, 2.0 * std::pow(n, -1.5));
  const ScalingFit fit = fit_rate_scaling(pairs);
  const auto& law = std::get<RateLaw>(fit.model);
  CHECK(law.beta == doctest::Approx(1.5).epsilon(0.01 / 1.5));
  CHECK(law.b == doctest::Approx(2.0));
  CHECK(fit.window_lo == 20.0);
  CHECK(fit.window_hi == 50.0);
  // t(p, N) = N^beta ln(r/p) / b
  CHECK(predicted_time(law, 1.0, std::exp(-1.0), 40.0) == doctest::Approx(std::pow(40.0, 1.5) / 2.0));
  const std::vector<std::pair<double, double>> one{{20.0, 0.1}, {20.0, 0.2}, {20.0, 0.3}};
  CHECK(code_of([&] { fit_rate_scaling(one); }) == ErrorCode::InsufficientData);
}

TEST_CASE("rate law recovery from noisy per-N fits") {
  std::vector<std::pair<double, double>> pairs;
  std::uint64_t seed = 100;
  for (double n : {20.0, 30.0, 40.0, 50.0}) {
    const double lambda = 3.0 * std::pow(n, -1.66);
    const ScalingFit f = fit_exponential_decay(exponential_samples(lambda, 10'000, ++seed));
    pairs.emplace_back(n, std::get<ExpDecay>(f.model).lambda);
  }
  CHECK(std::get<RateLaw>(fit_rate_scaling(pairs).model).beta == doctest::Approx(1.66).epsilon(0.03));
}

TEST_CASE("step power law recovery") {
  const ScalingFit fit = fit_step_powerlaw(powerlaw_samples(0.8, 10'000, 3));
  const auto& m = std::get<StepPowerLaw>(fit.model);
  CHECK(std::abs(m.eta - 0.8) <= 0.05);
  CHECK(m.v == doctest::Approx(1.0).epsilon(0.35));
  CHECK(fit.r_squared > 0.99);
}

TEST_CASE("exponential data favours the exponential model") {
  const auto xs = exponential_samples(0.01, 10'000, 5);
  const double r2_exp = fit_exponential_decay(xs).r_squared;
  const double r2_pow = fit_step_powerlaw(xs).r_squared;
  MESSAGE("R2 exp " << r2_exp << " power " << r2_pow);
  CHECK(r2_exp - r2_pow > 0.01);
}

TEST_CASE("power-law data favours the power-law model") {
  const auto xs = powerlaw_samples(0.8, 10'000, 6);
  CHECK(fit_step_powerlaw(xs).r_squared > fit_exponential_decay(xs).r_squared + 0.01);
}

TEST_CASE("eta law recovery") {
  std::vector<std::pair<double, double>> pairs;
  for (double n : {20.0, 30.0, 40.0, 50.0}) pairs.emplace_back(n, 5.0 * std::pow(n, -1.09));
  const auto& law = std::get<EtaLaw>(fit_eta_scaling(pairs).model);
  CHECK(law.delta == doctest::Approx(1.09));
  CHECK(law.d == doctest::Approx(5.0));
}

TEST_CASE("record extraction") {
  SolveRecord a, b;
  a.status = RunStatus::Solved;
  a.t_solve = 2.0;
  a.n_step_total = 40;
  b.status = RunStatus::TimeBudgetExceeded;
  b.n_step_total = 99;
  const std::vector<SolveRecord> recs{a, b};
  const auto t = solve_times(recs);
  const auto n = solve_steps(recs);
  CHECK(t[0] == 2.0);
  CHECK(std::isinf(t[1]));
  CHECK(n[0] == 40.0);
  CHECK(std::isinf(n[1]));
}
