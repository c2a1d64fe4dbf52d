#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "rbn/entropy.hpp"
#include "rbn/error.hpp"
#include "rbn/power_law.hpp"

using namespace rbn;

namespace {

FunctionFingerprint fingerprint(std::uint64_t key, std::uint32_t inputs = 3) {
  FunctionFingerprint f(inputs, 1);
  const std::uint64_t space = std::uint64_t{1} << inputs;
  for (std::uint64_t p = 0; p < space; ++p) f.set_output(p, 0, (key >> (space - 1 - p)) & 1U);
  return f;
}

NetworkSpec spec_of(std::uint32_t n, double k, std::uint32_t i) {
  NetworkSpec s;
  s.nodes = n;
  s.connectivity = k;
  s.inputs = i;
  s.outputs = 1;
  return s;
}

}  // namespace

TEST_SUITE("entropy") {
  TEST_CASE("uniform over all 256 three-input functions is 8 bits") {
    FunctionHistogram h;
    for (std::uint64_t k = 0; k < 256; ++k) h.add(fingerprint(k));
    CHECK(h.distinct() == 256);
    CHECK(entropy(h) == doctest::Approx(8.0));
  }

  TEST_CASE("one function is 0 bits, two equal counts are 1 bit") {
    FunctionHistogram one;
    one.add(fingerprint(7), 12);
    CHECK(entropy(one) == 0.0);
    FunctionHistogram two;
    two.add(fingerprint(1));
    two.add(fingerprint(2));
    CHECK(entropy(two) == doctest::Approx(1.0));
    CHECK(entropy_from_counts(std::vector<std::uint64_t>{1, 1, 2}) == doctest::Approx(1.5));
  }

  TEST_CASE("fingerprint helper agrees with the key") {
    CHECK(fingerprint(105).key() == 105);
  }

  TEST_CASE("link-free single node realizes only the two constants") {
    const auto h = sample_ensemble(spec_of(1, 0.0, 3), 1000, 42);
    CHECK(h.samples() == 1000);
    CHECK(h.distinct() == 2);
    const auto zero = h.counts().find(fingerprint(0));
    const auto one = h.counts().find(fingerprint(255));
    REQUIRE(zero != h.counts().end());
    REQUIRE(one != h.counts().end());
    // Binomial(1000, 1/2): standard deviation about 15.8.
    CHECK(std::abs(static_cast<double>(zero->second) - 500.0) < 64.0);
    CHECK(zero->second + one->second == 1000);
  }

  TEST_CASE("a single sample has zero entropy") {
    const auto h = sample_ensemble(spec_of(10, 2.0, 3), 1, 5);
    CHECK(h.distinct() == 1);
    CHECK(entropy(h) == 0.0);
  }

  TEST_CASE("entropy stays within its bounds") {
    for (double k : {0.5, 2.0, 5.0}) {
      for (std::uint64_t samples : {10, 300}) {
        const double h = entropy(sample_ensemble(spec_of(12, k, 3), samples, 9));
        CHECK(h >= 0.0);
        CHECK(h <= std::log2(std::min<double>(samples, 256)) + 1e-12);
      }
    }
  }

  TEST_CASE("ensemble sampling does not depend on the worker count") {
    const auto spec = spec_of(15, 3.0, 3);
    const auto a = sample_ensemble(spec, 700, 77, 1);
    const auto b = sample_ensemble(spec, 700, 77, 4);
    CHECK(a.counts() == b.counts());
  }

  TEST_CASE("histograms merge by adding counts") {
    FunctionHistogram a, b;
    a.add(fingerprint(1), 2);
    b.add(fingerprint(1));
    b.add(fingerprint(3));
    a.merge(b);
    CHECK(a.samples() == 4);
    CHECK(a.counts().at(fingerprint(1)) == 3);
  }

  TEST_CASE("sampled entropy converges to the exact small-ensemble entropy") {
    // N = 2, L = 2, I = 1: enumerable in full by the test oracle.
    const auto exact = oracle::exact_function_distribution(2, 2, 1);
    double total = 0.0;
    for (const auto& [key, p] : exact) total += p;
    CHECK(total == doctest::Approx(1.0));
    const double h_exact = oracle::shannon_bits(exact);

    const auto hist = sample_ensemble(spec_of(2, 1.0, 1), 20000, 2024);
    Rng rng(1);
    const double se = entropy_standard_error(hist, 200, rng);
    CHECK(se > 0.0);
    CHECK(std::abs(entropy(hist) - h_exact) < 4.0 * se);
    // The sampled frequencies themselves track the exact probabilities.
    for (const auto& [f, count] : hist.counts()) {
      const double p = exact.at(f.key());
      const double sd = std::sqrt(p * (1 - p) / 20000.0);
      CHECK(std::abs(static_cast<double>(count) / 20000.0 - p) < 5.0 * sd);
    }
  }
}

TEST_SUITE("connectivity scan") {
  TEST_CASE("grids are built on an integer lattice") {
    const auto g = connectivity_grid(0.5, 8.0, 0.5);
    CHECK(g.size() == 16);
    CHECK(g.front() == 0.5);
    CHECK(g.back() == 8.0);
    CHECK(g[5] == 3.0);
    CHECK_THROWS_AS(connectivity_grid(1.0, 0.5, 0.5), InvalidSpecError);
  }

  TEST_CASE("seeds are keyed by K in thousandths") {
    CHECK(connectivity_seed(3, 2.5) == connectivity_seed(3, 2.5000001));
    CHECK(connectivity_seed(3, 2.5) != connectivity_seed(3, 2.6));
  }

  TEST_CASE("the peak is the best scanned K and refinement stays near it") {
    const auto base = spec_of(8, 0.0, 2);
    const std::vector<double> grid{0.5, 1.0, 1.5, 2.0};
    const auto coarse = max_entropy_connectivity(base, grid, 300, 11);
    CHECK(coarse.scanned.size() == 4);
    for (const auto& p : coarse.scanned) CHECK(p.entropy <= coarse.entropy);

    const auto fine = max_entropy_connectivity(base, grid, 300, 11, 0.1);
    CHECK(fine.scanned.size() > 4);
    CHECK(fine.entropy >= coarse.entropy);
    CHECK(std::abs(fine.connectivity - coarse.connectivity) <= 0.5 + 1e-9);
    // Coarse points keep their values under refinement.
    for (const auto& c : coarse.scanned) {
      for (const auto& f : fine.scanned) {
        if (std::abs(f.connectivity - c.connectivity) < 1e-9) CHECK(f.entropy == c.entropy);
      }
    }
  }
}

TEST_SUITE("power law") {
  TEST_CASE("noise-free synthetic data recovers the coefficients") {
    const double a = 14.06, b = -0.83, c = 2.32;
    std::vector<double> n{5, 10, 20, 50, 100, 200, 500, 1000, 2000}, k;
    for (double v : n) k.push_back(a * std::pow(v, b) + c);
    const auto fit = fit_power_law(n, k);
    CHECK(fit.a == doctest::Approx(a).epsilon(0.01));
    CHECK(fit.b == doctest::Approx(b).epsilon(0.01));
    CHECK(fit.c == doctest::Approx(c).epsilon(0.01));
    CHECK(fit.residual < 1e-8);
    CHECK_FALSE(fit.degenerate);
  }

  TEST_CASE("reference coefficients put N = 20 near K = 3.49") {
    PowerLawFit f;
    f.a = 14.06;
    f.b = -0.83;
    f.c = 2.32;
    CHECK(f(20) == doctest::Approx(3.49).epsilon(0.002));
  }

  TEST_CASE("constant data is flagged degenerate") {
    const std::vector<double> n{5, 10, 20, 50}, k{3.0, 3.0, 3.0, 3.0};
    const auto fit = fit_power_law(n, k);
    CHECK(fit.degenerate);
    CHECK(fit.a == doctest::Approx(0.0));
    CHECK(fit.c == doctest::Approx(3.0));
  }

  TEST_CASE("increasing data is fitted too") {
    std::vector<double> n{4, 8, 16, 32, 64}, k;
    for (double v : n) k.push_back(5.0 - 3.0 * std::pow(v, -0.5));
    const auto fit = fit_power_law(n, k);
    CHECK(fit.residual < 1e-6);
    CHECK(fit.b < 0.0);
  }

  TEST_CASE("bad inputs are rejected") {
    CHECK_THROWS_AS(fit_power_law(std::vector<double>{5, 5, 5, 5}, std::vector<double>{1, 2, 3, 4}), InvalidSpecError);
    CHECK_THROWS_AS(fit_power_law(std::vector<double>{5, 10, 20}, std::vector<double>{1, 2, 3}), InvalidSpecError);
  }

  TEST_CASE("JSON carries the coefficients") {
    PowerLawFit f;
    f.a = 1.5;
    f.points = 4;
    const auto text = to_json(f);
    CHECK(text.find("\"a\":1.5") != std::string::npos);
    CHECK(text.find("\"n_points\":4") != std::string::npos);
  }
}
