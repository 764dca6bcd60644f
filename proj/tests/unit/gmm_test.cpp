#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "shoutcomp/gmm.hpp"
#include "support/oracles.hpp"

using namespace shoutcomp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

DiagonalGmm single(double mean, double var) {
  DiagonalGmm g;
  g.dim = 1;
  g.components.push_back({1.0, {mean}, {var}});
  return g;
}

DiagonalGmm random_gmm(std::mt19937_64& rng, std::size_t k, std::size_t dim) {
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  std::normal_distribution<double> gauss(0.0, 3.0);
  DiagonalGmm g;
  g.dim = dim;
  double wsum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    GaussianComponent comp;
    comp.weight = unit(rng);
    wsum += comp.weight;
    for (std::size_t d = 0; d < dim; ++d) {
      comp.mean.push_back(gauss(rng));
      comp.variance.push_back(unit(rng) * 2.0);
    }
    g.components.push_back(std::move(comp));
  }
  for (auto& c : g.components) c.weight /= wsum;
  return g;
}

std::vector<Vec> two_blob_data(std::mt19937_64& rng, std::size_t per_blob,
                               std::size_t dim, double center) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vec> data;
  for (int sign : {-1, 1})
    for (std::size_t i = 0; i < per_blob; ++i) {
      Vec v(dim);
      for (std::size_t d = 0; d < dim; ++d)
        v[d] = double(sign) * center + gauss(rng);
      data.push_back(std::move(v));
    }
  return data;
}

}  // namespace

TEST_CASE("log_density matches closed-form gaussians", "[gmm]") {
  auto std_normal = single(0.0, 1.0);
  // -0.5 log(2 pi)
  CHECK_THAT(log_density(std_normal, {0.0}), WithinAbs(-0.9189385332046727, 1e-15));
  // one sigma out adds -1/2
  CHECK_THAT(log_density(std_normal, {1.0}), WithinAbs(-1.4189385332046727, 1e-15));

  DiagonalGmm iso2;
  iso2.dim = 2;
  iso2.components.push_back({1.0, {0.0, 0.0}, {1.0, 1.0}});
  CHECK_THAT(log_density(iso2, {0.0, 0.0}), WithinAbs(-1.8378770664093453, 1e-15));

  // half-weight mixture collapses to log(0.5) + component log-density when the
  // other component is negligible
  DiagonalGmm far;
  far.dim = 1;
  far.components.push_back({0.5, {0.0}, {1.0}});
  far.components.push_back({0.5, {40.0}, {1.0}});
  CHECK_THAT(log_density(far, {0.0}),
             WithinAbs(std::log(0.5) - 0.9189385332046727, 1e-12));
}

TEST_CASE("log_density agrees with a direct-density oracle", "[gmm]") {
  std::mt19937_64 rng(101);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t k = 1 + rep % 4;
    const std::size_t dim = 1 + rep % 5;
    auto g = random_gmm(rng, k, dim);
    auto z = oracles::random_vec(rng, dim, 3.0);
    CHECK_THAT(log_density(g, z), WithinRel(oracles::naive_log_density(g, z), 1e-12));
  }
}

TEST_CASE("posteriors normalize and match the oracle", "[gmm]") {
  SECTION("single component is certain") {
    auto g = single(2.0, 3.0);
    auto p = posteriors(g, {17.0});
    REQUIRE(p.size() == 1);
    CHECK(p[0] == 1.0);
  }
  SECTION("symmetric midpoint splits evenly") {
    DiagonalGmm g;
    g.dim = 1;
    g.components.push_back({0.5, {0.0}, {1.0}});
    g.components.push_back({0.5, {2.0}, {1.0}});
    auto p = posteriors(g, {1.0});
    CHECK_THAT(p[0], WithinAbs(0.5, 1e-15));
    CHECK_THAT(p[1], WithinAbs(0.5, 1e-15));
    // at the far mean, the log-joint gap is 2, so the posterior is sigma(2)
    auto q = posteriors(g, {2.0});
    CHECK_THAT(q[1], WithinAbs(0.8807970779778823, 1e-14));
  }
  SECTION("random models against the oracle") {
    std::mt19937_64 rng(202);
    for (int rep = 0; rep < 50; ++rep) {
      const std::size_t k = 2 + rep % 3;
      const std::size_t dim = 1 + rep % 4;
      auto g = random_gmm(rng, k, dim);
      auto z = oracles::random_vec(rng, dim, 3.0);
      auto p = posteriors(g, z);
      auto q = oracles::naive_posteriors(g, z);
      double sum = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        CHECK_THAT(p[c], WithinAbs(q[c], 1e-12));
        sum += p[c];
      }
      CHECK_THAT(sum, WithinAbs(1.0, 1e-9));
    }
  }
}

TEST_CASE("gmm input validation", "[gmm]") {
  auto g = single(0.0, 1.0);
  CHECK_THROWS_AS(log_density(g, {1.0, 2.0}), ValidationError);
  CHECK_THROWS_AS(posteriors(DiagonalGmm{}, {}), ValidationError);
}

TEST_CASE("fit_em with one component recovers sample moments", "[gmm]") {
  std::mt19937_64 rng(7);
  std::vector<Vec> data;
  for (int i = 0; i < 40; ++i) data.push_back(oracles::random_vec(rng, 3, 2.0));

  auto result = fit_em(data, 1);
  REQUIRE(result.gmm.size() == 1);
  const auto& c = result.gmm.components[0];
  CHECK(c.weight == 1.0);

  Vec mean(3, 0.0), var(3, 0.0);
  for (const auto& v : data)
    for (int d = 0; d < 3; ++d) mean[d] += v[d] / 40.0;
  for (const auto& v : data)
    for (int d = 0; d < 3; ++d) var[d] += (v[d] - mean[d]) * (v[d] - mean[d]) / 40.0;
  for (int d = 0; d < 3; ++d) {
    CHECK_THAT(c.mean[d], WithinAbs(mean[d], 1e-12));
    CHECK_THAT(c.variance[d], WithinAbs(var[d], 1e-9));
  }
}

TEST_CASE("fit_em separates two well-spaced clusters", "[gmm]") {
  std::mt19937_64 rng(13);
  auto data = two_blob_data(rng, 150, 2, 10.0);
  auto result = fit_em(data, 2, {}, 3);
  REQUIRE(result.gmm.size() == 2);
  auto comps = result.gmm.components;
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.mean[0] < b.mean[0]; });
  for (int d = 0; d < 2; ++d) {
    CHECK_THAT(comps[0].mean[d], WithinAbs(-10.0, 0.2));
    CHECK_THAT(comps[1].mean[d], WithinAbs(10.0, 0.2));
  }
  CHECK_THAT(comps[0].weight, WithinAbs(0.5, 0.05));
  CHECK_THAT(comps[1].weight, WithinAbs(0.5, 0.05));
}

TEST_CASE("fit_em log-likelihood never decreases across normal steps", "[gmm]") {
  std::mt19937_64 rng(29);
  std::vector<Vec> data;
  for (int i = 0; i < 120; ++i) data.push_back(oracles::random_vec(rng, 4, 1.5));
  auto result = fit_em(data, 3, {}, 11);
  const auto& ll = result.trace.log_likelihood;
  REQUIRE(ll.size() >= 2);
  const auto& reseeds = result.trace.reseeded_iterations;
  for (std::size_t i = 1; i < ll.size(); ++i) {
    const bool after_reseed =
        std::find(reseeds.begin(), reseeds.end(), i - 1) != reseeds.end();
    if (!after_reseed) CHECK(ll[i] >= ll[i - 1] - 1e-9);
  }
  CHECK(ll.size() < EmConfig{}.max_iterations);  // actually converged
}

TEST_CASE("fit_em is deterministic per seed", "[gmm]") {
  std::mt19937_64 rng(31);
  auto data = two_blob_data(rng, 60, 3, 4.0);
  auto a = fit_em(data, 3, {}, 42);
  auto b = fit_em(data, 3, {}, 42);
  REQUIRE(a.gmm.size() == b.gmm.size());
  for (std::size_t c = 0; c < a.gmm.size(); ++c) {
    CHECK(a.gmm.components[c].weight == b.gmm.components[c].weight);
    CHECK(a.gmm.components[c].mean == b.gmm.components[c].mean);
    CHECK(a.gmm.components[c].variance == b.gmm.components[c].variance);
  }
  CHECK(a.trace.log_likelihood == b.trace.log_likelihood);
}

TEST_CASE("fit_em fitted density integrates to one", "[gmm]") {
  std::mt19937_64 rng(37);
  std::vector<Vec> data;
  for (int i = 0; i < 200; ++i) data.push_back(oracles::random_vec(rng, 1, 2.0));
  auto g = fit_em(data, 3, {}, 5).gmm;
  double integral = 0.0;
  const double lo = -25.0, hi = 25.0, step = 0.01;
  double prev = std::exp(log_density(g, {lo}));
  for (double x = lo + step; x <= hi; x += step) {
    double cur = std::exp(log_density(g, {x}));
    integral += 0.5 * (prev + cur) * step;
    prev = cur;
  }
  CHECK_THAT(integral, WithinAbs(1.0, 1e-3));
}

TEST_CASE("fit_em input validation", "[gmm]") {
  CHECK_THROWS_AS(fit_em({}, 1), ValidationError);
  std::vector<Vec> tiny{{1.0}, {2.0}};
  CHECK_THROWS_AS(fit_em(tiny, 0), ValidationError);
  CHECK_THROWS_AS(fit_em(tiny, 3), ValidationError);
  std::vector<Vec> mixed{{1.0}, {2.0, 3.0}};
  CHECK_THROWS_AS(fit_em(mixed, 1), ValidationError);
}

TEST_CASE("fit_em floors variance in degenerate dimensions", "[gmm]") {
  // second coordinate is constant across the data
  std::vector<Vec> data;
  std::mt19937_64 rng(41);
  std::normal_distribution<double> gauss;
  for (int i = 0; i < 30; ++i) data.push_back({gauss(rng), 5.0});
  auto g = fit_em(data, 1).gmm;
  CHECK(g.components[0].variance[1] == 1e-10);
  CHECK(g.components[0].variance[0] > 1e-6);
}

TEST_CASE("fit_em records re-seeded iterations", "[gmm]") {
  // An absurdly high starvation threshold forces the re-seed path: with two
  // components at least one always holds less than 60% of the mass.
  std::mt19937_64 rng(43);
  auto data = two_blob_data(rng, 20, 2, 5.0);
  EmConfig cfg;
  cfg.reseed_mass = 0.6;
  cfg.max_iterations = 6;
  auto result = fit_em(data, 2, cfg, 1);
  CHECK_FALSE(result.trace.reseeded_iterations.empty());
  for (std::size_t idx : result.trace.reseeded_iterations)
    CHECK(idx < result.trace.log_likelihood.size());
  // the model stays well-formed through re-seeding
  double wsum = 0.0;
  for (const auto& c : result.gmm.components) {
    wsum += c.weight;
    for (double v : c.variance) CHECK(v > 0.0);
  }
  CHECK_THAT(wsum, WithinAbs(1.0, 1e-12));
}
