#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "shoutcomp/metrics.hpp"
#include "support/oracles.hpp"

using namespace shoutcomp;
using Catch::Matchers::WithinAbs;

namespace {

ScoredTrials scored(std::vector<double> scores, std::vector<int> same) {
  ScoredTrials out;
  out.scores = std::move(scores);
  for (int s : same) out.same.push_back(std::uint8_t(s));
  return out;
}

ScoredTrials random_scored(std::mt19937_64& rng, std::size_t n_same,
                           std::size_t n_diff, double gap) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> coarse(0, 4);
  ScoredTrials out;
  for (std::size_t i = 0; i < n_same; ++i) {
    // quantized now and then so ties occur
    double s = gap + (i % 3 == 0 ? 0.5 * coarse(rng) : gauss(rng));
    out.scores.push_back(s);
    out.same.push_back(1);
  }
  for (std::size_t i = 0; i < n_diff; ++i) {
    double s = (i % 3 == 0 ? 0.5 * coarse(rng) : gauss(rng));
    out.scores.push_back(s);
    out.same.push_back(0);
  }
  return out;
}

}  // namespace

TEST_CASE("eer on the worked three-vs-three example", "[metrics]") {
  // same: 0.9 0.8 0.4, diff: 0.7 0.3 0.2 -> exact crossing at threshold 0.7
  auto st = scored({0.9, 0.8, 0.4, 0.7, 0.3, 0.2}, {1, 1, 1, 0, 0, 0});
  auto r = compute_eer(st);
  CHECK(r.eer == 1.0 / 3.0);
  CHECK(r.threshold == 0.7);
}

TEST_CASE("separable scores give zero eer", "[metrics]") {
  auto st = scored({5.0, 4.0, 3.0, 1.0, 0.5, -2.0}, {1, 1, 1, 0, 0, 0});
  auto r = compute_eer(st);
  CHECK(r.eer == 0.0);
}

TEST_CASE("identical scores give an eer of one half", "[metrics]") {
  auto st = scored({1.0, 1.0, 1.0, 1.0}, {1, 1, 0, 0});
  auto r = compute_eer(st);
  CHECK(r.eer == 0.5);
  CHECK(r.threshold == 1.0);
}

TEST_CASE("eer matches the brute-force sweep on random score sets", "[metrics]") {
  std::mt19937_64 rng(404);
  for (int rep = 0; rep < 120; ++rep) {
    const std::size_t n_same = 3 + rep % 40;
    const std::size_t n_diff = 3 + (rep * 7) % 40;
    const double gap = (rep % 5) * 0.4;
    auto st = random_scored(rng, n_same, n_diff, gap);
    auto r = compute_eer(st);
    std::vector<bool> same;
    for (auto s : st.same) same.push_back(s != 0);
    auto ref = oracles::naive_eer(st.scores, same);
    CHECK_THAT(r.eer, WithinAbs(ref.eer, 1e-12));
    CHECK_THAT(r.threshold, WithinAbs(ref.threshold, 1e-12));
    CHECK(r.eer >= 0.0);
    CHECK(r.eer <= 1.0);
  }
}

TEST_CASE("eer of indistinguishable populations sits near one half", "[metrics]") {
  std::mt19937_64 rng(505);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ScoredTrials st;
  for (int i = 0; i < 10000; ++i) {
    st.scores.push_back(gauss(rng));
    st.same.push_back(i % 2 == 0 ? 1 : 0);
  }
  auto r = compute_eer(st);
  CHECK_THAT(r.eer, WithinAbs(0.5, 0.05));
}

TEST_CASE("eer is invariant to monotone score transforms", "[metrics]") {
  std::mt19937_64 rng(606);
  auto st = random_scored(rng, 30, 30, 0.6);
  auto base = compute_eer(st);

  auto shifted = st;
  for (auto& s : shifted.scores) s += 100.0;
  CHECK(compute_eer(shifted).eer == base.eer);

  auto scaled = st;
  for (auto& s : scaled.scores) s *= 3.0;
  CHECK(compute_eer(scaled).eer == base.eer);

  auto warped = st;
  for (auto& s : warped.scores) s = std::atan(s);  // strictly increasing
  CHECK(compute_eer(warped).eer == base.eer);
}

TEST_CASE("minimal one-vs-one sweep", "[metrics]") {
  auto st = scored({0.9, 0.1}, {1, 0});
  auto points = det_points(st);
  REQUIRE(points.size() == 3);
  CHECK(points[0].threshold == 0.1);
  CHECK(points[0].far == 1.0);
  CHECK(points[0].frr == 0.0);
  CHECK(points[1].threshold == 0.9);
  CHECK(points[1].far == 0.0);
  CHECK(points[1].frr == 0.0);
  CHECK(std::isinf(points[2].threshold));
  CHECK(points[2].far == 0.0);
  CHECK(points[2].frr == 1.0);
  // the perfect operating point exists, so the eer is 0
  CHECK(compute_eer(st).eer == 0.0);
}

TEST_CASE("det staircase is monotone and anchored", "[metrics]") {
  std::mt19937_64 rng(707);
  auto st = random_scored(rng, 50, 60, 0.8);
  auto points = det_points(st);
  REQUIRE(points.size() >= 2);
  CHECK(points.front().far == 1.0);
  CHECK(points.front().frr == 0.0);
  CHECK(points.back().far == 0.0);
  CHECK(points.back().frr == 1.0);
  for (std::size_t j = 1; j < points.size(); ++j) {
    CHECK(points[j].far <= points[j - 1].far);
    CHECK(points[j].frr >= points[j - 1].frr);
    if (j + 1 < points.size())
      CHECK(points[j].threshold > points[j - 1].threshold);
  }
  // rates count whole trials, so every value is a multiple of 1/n
  for (const auto& p : points) {
    CHECK_THAT(p.far * 60.0, WithinAbs(std::round(p.far * 60.0), 1e-9));
    CHECK_THAT(p.frr * 50.0, WithinAbs(std::round(p.frr * 50.0), 1e-9));
  }
}

TEST_CASE("thin_det keeps the ends and respects the budget", "[metrics]") {
  std::vector<DetPoint> points;
  for (int i = 0; i < 1000; ++i)
    points.push_back({double(i), 1.0 - double(i) / 1000.0, double(i) / 1000.0});

  auto thin = thin_det(points, 51);
  CHECK(thin.size() <= 51);
  CHECK(thin.front().threshold == points.front().threshold);
  CHECK(thin.back().threshold == points.back().threshold);
  for (std::size_t j = 1; j < thin.size(); ++j)
    CHECK(thin[j].threshold > thin[j - 1].threshold);

  SECTION("short inputs pass through untouched") {
    auto same = thin_det(points, 5000);
    CHECK(same.size() == points.size());
  }
  SECTION("degenerate budgets are rejected") {
    CHECK_THROWS_AS(thin_det(points, 1), ValidationError);
  }
  SECTION("exact budget boundary") {
    auto exact = thin_det(points, points.size());
    CHECK(exact.size() == points.size());
  }
}

TEST_CASE("sweep input validation", "[metrics]") {
  CHECK_THROWS_AS(compute_eer(scored({1.0, 2.0}, {1, 1})), ValidationError);
  CHECK_THROWS_AS(compute_eer(scored({1.0, 2.0}, {0, 0})), ValidationError);
  ScoredTrials ragged;
  ragged.scores = {1.0, 2.0};
  ragged.same = {1};
  CHECK_THROWS_AS(compute_eer(ragged), ValidationError);
  auto nan = scored({std::nan(""), 1.0}, {1, 0});
  CHECK_THROWS_AS(compute_eer(nan), NumericError);
}

TEST_CASE("detector metrics on a worked confusion table", "[metrics]") {
  using D = Domain;
  // 200 records: 100 shouted with 2 misses, 100 normal with 3 misses
  std::vector<Domain> actual, predicted;
  for (int i = 0; i < 100; ++i) {
    actual.push_back(D::Shouted);
    predicted.push_back(i < 2 ? D::Normal : D::Shouted);
  }
  for (int i = 0; i < 100; ++i) {
    actual.push_back(D::Normal);
    predicted.push_back(i < 3 ? D::Shouted : D::Normal);
  }
  auto m = detector_metrics(predicted, actual);
  CHECK(m.accuracy == 0.975);
  CHECK(m.shouted_miss_rate == 0.02);
  CHECK(m.normal_miss_rate == 0.03);
  CHECK(m.n_shouted == 100);
  CHECK(m.n_normal == 100);

  SECTION("perfect predictions") {
    auto p = detector_metrics(actual, actual);
    CHECK(p.accuracy == 1.0);
    CHECK(p.shouted_miss_rate == 0.0);
    CHECK(p.normal_miss_rate == 0.0);
  }
  SECTION("total miss on one class") {
    std::vector<Domain> all_normal(4, D::Normal);
    std::vector<Domain> truth{D::Shouted, D::Shouted, D::Normal, D::Normal};
    auto t = detector_metrics(all_normal, truth);
    CHECK(t.shouted_miss_rate == 1.0);
    CHECK(t.normal_miss_rate == 0.0);
    CHECK(t.accuracy == 0.5);
  }
  SECTION("single-class input leaves the other rate at zero") {
    std::vector<Domain> truth(5, D::Shouted);
    auto t = detector_metrics(truth, truth);
    CHECK(t.normal_miss_rate == 0.0);
    CHECK(t.n_normal == 0);
  }
  SECTION("validation") {
    CHECK_THROWS_AS(detector_metrics({}, {}), ValidationError);
    CHECK_THROWS_AS(detector_metrics({D::Normal}, {D::Normal, D::Shouted}),
                    ValidationError);
    CHECK_THROWS_AS(detector_metrics({D::Unknown}, {D::Normal}), ValidationError);
  }
}
