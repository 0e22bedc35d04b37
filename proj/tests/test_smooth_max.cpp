#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "maxgauss/smooth_max.hpp"
#include "maxgauss/verify.hpp"
#include "support/oracles.hpp"

using namespace maxgauss;

namespace {
SmoothingParams make_params(double gamma, std::size_t d) {
  return SmoothingParams{gamma, 2.0 / gamma, 0.5, d};
}
}  // namespace

TEST_CASE("psi handles the symmetric two-point case", "[smoothmax]") {
  const std::vector<double> x{0.0, 0.0};
  const double v = psi(make_params(1.0, 2), x);
  // equals the upper sandwich bound c_gamma = log(2) exactly
  REQUIRE(v == Catch::Approx(0.6931471805599453).epsilon(1e-15));
}

TEST_CASE("psi is the identity for d = 1", "[smoothmax]") {
  for (double t : {-17.25, 0.0, 3.5, 911.0}) {
    const std::vector<double> x{t};
    REQUIRE(psi(make_params(7.0, 1), x) == t);
  }
}

TEST_CASE("psi matches direct extended-precision evaluation", "[smoothmax]") {
  const std::vector<double> x{1.0, 0.0, -1.0};
  const double v = psi(make_params(2.0, 3), x);
  const double reference = static_cast<double>(oracles::lse_direct(2.0L, x));
  REQUIRE(v == Catch::Approx(reference).epsilon(1e-14));
  REQUIRE(v >= 1.0);
  REQUIRE(v <= 1.0 + std::log(3.0) / 2.0);
}

TEST_CASE("psi rejects bad input", "[smoothmax]") {
  const SmoothingParams p = make_params(2.0, 2);
  REQUIRE_THROWS_AS(psi(p, std::vector<double>{1.0}), ShapeError);
  REQUIRE_THROWS_AS(psi(p, std::vector<double>{1.0, std::nan("")}), DomainError);
  REQUIRE_THROWS_AS(
      psi(p, std::vector<double>{1.0, std::numeric_limits<double>::infinity()}),
      DomainError);
  SmoothingParams bad = p;
  bad.delta = 0.1;  // gamma*delta < 1
  REQUIRE_THROWS_AS(psi(bad, std::vector<double>{1.0, 2.0}), DomainError);
}

TEST_CASE("psi_grad known values", "[smoothmax]") {
  {
    const SoftmaxWeights w = psi_grad(make_params(3.7, 2), std::vector<double>{0.0, 0.0});
    REQUIRE(w.pi[0] == Catch::Approx(0.5).margin(1e-16));
    REQUIRE(w.pi[1] == Catch::Approx(0.5).margin(1e-16));
  }
  {
    const SoftmaxWeights w = psi_grad(make_params(1.0, 2), std::vector<double>{1.0, 0.0});
    REQUIRE(w.pi[0] == Catch::Approx(0.7310585786300049).epsilon(1e-15));
    REQUIRE(w.pi[1] == Catch::Approx(0.2689414213699951).epsilon(1e-15));
  }
  {
    const SoftmaxWeights w = psi_grad(make_params(9.0, 1), std::vector<double>{4.2});
    REQUIRE(w.pi.size() == 1);
    REQUIRE(w.pi[0] == 1.0);
  }
}

TEST_CASE("softmax weights sum to one and shift-invariance holds", "[smoothmax]") {
  std::mt19937_64 rng(991);
  std::uniform_real_distribution<double> ud(-40.0, 40.0);
  for (int c = 0; c < 300; ++c) {
    const std::size_t d = 1 + rng() % 24;
    const SmoothingParams p = make_params(0.3 + (c % 11), d);
    std::vector<double> x(d), xs(d);
    const double shift = ud(rng);
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = ud(rng);
      xs[j] = x[j] + shift;
    }
    const SoftmaxWeights w = psi_grad(p, x);
    const SoftmaxWeights w2 = psi_grad(p, xs);
    double sum = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      REQUIRE(w.pi[j] >= 0.0);
      REQUIRE(w.pi[j] <= 1.0);
      REQUIRE(w.pi[j] == Catch::Approx(w2.pi[j]).margin(4e-15));
      sum += w.pi[j];
    }
    REQUIRE(std::abs(sum - 1.0) <=
            4.0 * static_cast<double>(d) * std::numeric_limits<double>::epsilon());
  }
}

TEST_CASE("psi_hessian trivial cases", "[smoothmax]") {
  {
    const Matrix h = psi_hessian(make_params(5.0, 1), std::vector<double>{2.0});
    REQUIRE(h(0, 0) == 0.0);
  }
  {
    const Matrix h = psi_hessian(make_params(1.0, 2), std::vector<double>{0.0, 0.0});
    REQUIRE(h(0, 0) == Catch::Approx(0.25).margin(1e-15));
    REQUIRE(h(0, 1) == Catch::Approx(-0.25).margin(1e-15));
    REQUIRE(h(1, 0) == Catch::Approx(-0.25).margin(1e-15));
    REQUIRE(h(1, 1) == Catch::Approx(0.25).margin(1e-15));
  }
}

TEST_CASE("psi_hessian matches finite differences of the gradient", "[smoothmax]") {
  const SmoothingParams p = make_params(2.0, 3);
  const std::vector<double> x{1.0, 0.0, -1.0};
  const Matrix h = psi_hessian(p, x);
  const Matrix fd = verify_detail::fd_psi_hessian(p, x);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t k = 0; k < 3; ++k)
      REQUIRE(h(j, k) == Catch::Approx(fd(j, k)).margin(1e-6 * p.gamma));
}

TEST_CASE("psi_hessian structure: zero row sums, PSD", "[smoothmax]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ud(-5.0, 5.0);
  for (int c = 0; c < 100; ++c) {
    const std::size_t d = 1 + rng() % 12;
    const SmoothingParams p = make_params(0.5 + (c % 7), d);
    std::vector<double> x(d), z(d);
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = ud(rng);
      z[j] = ud(rng);
    }
    const Matrix h = psi_hessian(p, x);
    for (std::size_t j = 0; j < d; ++j) {
      double row = 0.0;
      double quad = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        row += h(j, k);
        REQUIRE(h(j, k) == h(k, j));
      }
      REQUIRE(std::abs(row) <= 1e-12 * p.gamma);
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) quad += z[a] * h(a, b) * z[b];
      REQUIRE(quad >= -1e-10 * p.gamma);
    }
  }
}

TEST_CASE("psi_third trivial cases and symmetry", "[smoothmax]") {
  {
    const Tensor3 t = psi_third(make_params(3.0, 1), std::vector<double>{0.7});
    REQUIRE(t(0, 0, 0) == 0.0);
  }
  {
    const Tensor3 t = psi_third(make_params(1.0, 2), std::vector<double>{0.0, 0.0});
    REQUIRE(std::abs(t(0, 0, 0)) <= 1e-15);
  }
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ud(-3.0, 3.0);
  for (int c = 0; c < 40; ++c) {
    const std::size_t d = 2 + rng() % 5;
    const SmoothingParams p = make_params(1.5, d);
    std::vector<double> x(d);
    for (double& v : x) v = ud(rng);
    const Tensor3 t = psi_third(p, x);
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        // all-ones contraction over the last index vanishes
        for (std::size_t l = 0; l < d; ++l) {
          REQUIRE(t(j, k, l) == t(k, j, l));
          REQUIRE(t(j, k, l) == t(j, l, k));
          REQUIRE(t(j, k, l) == t(l, k, j));
        }
        double contraction = 0.0;
        for (std::size_t l = 0; l < d; ++l) contraction += t(j, k, l);
        REQUIRE(std::abs(contraction) <= 1e-13 * p.gamma * p.gamma);
      }
    }
  }
}

TEST_CASE("psi_third matches finite differences of the Hessian", "[smoothmax]") {
  const SmoothingParams p = make_params(2.0, 3);
  const std::vector<double> x{1.0, 0.0, -1.0};
  const Tensor3 t = psi_third(p, x);
  const Tensor3 fd = verify_detail::fd_psi_third(p, x);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t l = 0; l < 3; ++l)
        REQUIRE(t(j, k, l) ==
                Catch::Approx(fd(j, k, l)).margin(1e-5 * p.gamma * p.gamma));
}

TEST_CASE("psi_third refuses huge dense tensors", "[smoothmax]") {
  SmoothingParams p = make_params(2.0, 129);
  std::vector<double> x(129, 0.0);
  REQUIRE_THROWS_AS(psi_third(p, x), DomainError);
}

TEST_CASE("f_third_sum switches to the factored route beyond d = 128", "[smoothmax]") {
  const std::size_t d = 200;
  SmoothingParams p = make_params(1.5, d);
  const SmoothIndicator g = build_g(BorelSet::half_line_below(2.0), p);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  std::vector<double> x(d);
  for (double& v : x) v = ud(rng);
  const double automatic = f_third_sum(p, g, x);  // factored at this size
  const double factored = f_third_sum(p, g, x, ThirdSumMethod::factored);
  REQUIRE(automatic == factored);
  REQUIRE(automatic <= f_third_envelope(p, g) * (1.0 + 1e-12));
}

TEST_CASE("f_third_sum trivial values", "[smoothmax]") {
  // Deep inside the plateau every derivative of g vanishes.
  {
    const SmoothingParams p = make_params(4.0, 3);
    const SmoothIndicator g = build_g(BorelSet::half_line_below(100.0), p);
    REQUIRE(f_third_sum(p, g, std::vector<double>{0.0, -1.0, 0.5}) == 0.0);
  }
  // d = 1: psi is the identity, so the sum collapses to |g'''(x)|.
  {
    const SmoothingParams p = make_params(4.0, 1);
    const SmoothIndicator g = build_g(BorelSet::half_line_below(0.0), p);
    for (double t : {0.3, 0.75, 1.2}) {
      const double expect = std::abs(g_eval(g, t, 3));
      REQUIRE(f_third_sum(p, g, std::vector<double>{t}) ==
              Catch::Approx(expect).margin(1e-12 * (1.0 + expect)));
    }
  }
}

TEST_CASE("f_third_sum dense and factored routes agree", "[smoothmax]") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> ud(-2.0, 2.0);
  for (int c = 0; c < 200; ++c) {
    const std::size_t d = 1 + rng() % 16;
    SmoothingParams p = make_params(0.7 + (c % 9) * 0.5, d);
    const SmoothIndicator g = build_g(BorelSet::half_line_below(0.4), p);
    std::vector<double> x(d);
    for (double& v : x) v = ud(rng);
    const double dense = f_third_sum(p, g, x, ThirdSumMethod::dense);
    const double factored = f_third_sum(p, g, x, ThirdSumMethod::factored);
    REQUIRE(dense == Catch::Approx(factored).margin(1e-10 * (1.0 + dense)));
  }
}

TEST_CASE("f_third_sum stays below the analytic envelope and matches dense FD",
          "[smoothmax]") {
  const SmoothingParams p{4.0, 0.5, 0.5, 5};
  const SmoothIndicator g = build_g(BorelSet::half_line_below(0.0), p);
  const double env = f_third_envelope(p, g);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ud(-1.5, 1.5);
  for (int c = 0; c < 50; ++c) {
    std::vector<double> x(5);
    for (double& v : x) v = ud(rng);
    const double sum = f_third_sum(p, g, x);
    REQUIRE(sum <= env * (1.0 + 1e-12));

    // Cross-check against finite differences of the composite Hessian.
    double fd_sum = 0.0;
    for (std::size_t l = 0; l < 5; ++l) {
      const double h = 2e-5 * (1.0 + std::abs(x[l]));
      std::vector<double> xp = x, xm = x;
      xp[l] += h;
      xm[l] -= h;
      const Matrix up = composite_hessian(p, g, xp);
      const Matrix dn = composite_hessian(p, g, xm);
      for (std::size_t j = 0; j < 5; ++j)
        for (std::size_t k = 0; k < 5; ++k)
          fd_sum += std::abs((up(j, k) - dn(j, k)) / (2.0 * h));
    }
    REQUIRE(sum == Catch::Approx(fd_sum).margin(1e-4 * (1.0 + env)));
  }
}

TEST_CASE("smooth max property suites stay green", "[smoothmax][suites]") {
  const SuiteResult sandwich = suite_smooth_max_sandwich(10000, 101);
  CAPTURE(sandwich.worst);
  REQUIRE(sandwich.failures == 0);

  const SuiteResult shift = suite_shift_equivariance(4000, 102);
  REQUIRE(shift.failures == 0);

  const SuiteResult fd = suite_psi_derivatives_fd(120, 103);
  CAPTURE(fd.worst);
  REQUIRE(fd.failures == 0);

  const SuiteResult env = suite_third_envelope(1500, 104);
  REQUIRE(env.failures == 0);
}
