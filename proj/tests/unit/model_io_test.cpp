#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "shoutcomp/model_io.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace shoutcomp;
using testsupport::TempDir;

namespace {

DiagonalGmm random_gmm(std::mt19937_64& rng, std::size_t k, std::size_t dim) {
  std::uniform_real_distribution<double> unit(1e-8, 1.0);
  std::normal_distribution<double> gauss(0.0, 100.0);
  DiagonalGmm g;
  g.dim = dim;
  double wsum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    GaussianComponent comp;
    comp.weight = unit(rng);
    wsum += comp.weight;
    for (std::size_t d = 0; d < dim; ++d) {
      comp.mean.push_back(gauss(rng));
      comp.variance.push_back(unit(rng) * 1e6);
    }
    g.components.push_back(std::move(comp));
  }
  for (auto& c : g.components) c.weight /= wsum;
  return g;
}

}  // namespace

TEST_CASE("gmm files round-trip bit for bit", "[model-io]") {
  TempDir dir;
  std::mt19937_64 rng(71);
  // large awkward values exercise shortest-round-trip float printing
  auto g = random_gmm(rng, 8, 512);
  auto path = dir.file("gmm.json").string();
  save_model(g, path);
  auto back = load_gmm(path);
  REQUIRE(back.dim == g.dim);
  REQUIRE(back.size() == g.size());
  for (std::size_t c = 0; c < g.size(); ++c) {
    CHECK(back.components[c].weight == g.components[c].weight);
    CHECK(back.components[c].mean == g.components[c].mean);
    CHECK(back.components[c].variance == g.components[c].variance);
  }
  CHECK(peek_model_kind(path) == "diagonal_gmm");
}

TEST_CASE("detector files round-trip bit for bit", "[model-io]") {
  TempDir dir;
  std::mt19937_64 rng(73);
  LogisticModel m;
  m.intercept = -0.12345678901234567;
  m.weights = oracles::random_vec(rng, 64, 10.0);
  auto path = dir.file("detector.json").string();
  save_model(m, path);
  auto back = load_detector(path);
  CHECK(back.intercept == m.intercept);
  CHECK(back.weights == m.weights);
  CHECK(peek_model_kind(path) == "logistic_detector");
}

TEST_CASE("bias tables round-trip bit for bit", "[model-io]") {
  TempDir dir;
  std::mt19937_64 rng(79);

  RatzBiasTable ratz;
  for (int s = 0; s < 4; ++s) ratz.biases.push_back(oracles::random_vec(rng, 16, 5.0));
  auto rpath = dir.file("ratz.json").string();
  save_model(ratz, rpath);
  CHECK(load_ratz(rpath).biases == ratz.biases);
  CHECK(peek_model_kind(rpath) == "ratz_bias");

  SpliceBiasTable splice;
  for (int s = 0; s < 3; ++s)
    splice.biases.push_back(oracles::random_vec(rng, 16, 5.0));
  auto spath = dir.file("splice.json").string();
  save_model(splice, spath);
  CHECK(load_splice(spath).biases == splice.biases);
  CHECK(peek_model_kind(spath) == "splice_bias");

  MemlinBiasTable memlin;
  memlin.biases.assign(3, std::vector<Vec>(2));
  for (auto& row : memlin.biases)
    for (auto& b : row) b = oracles::random_vec(rng, 16, 5.0);
  memlin.cross_probs = {{0.25, 0.5, 0.25}, {0.1, 0.2, 0.7}};
  auto mpath = dir.file("memlin.json").string();
  save_model(memlin, mpath);
  auto mback = load_memlin(mpath);
  CHECK(mback.biases == memlin.biases);
  CHECK(mback.cross_probs == memlin.cross_probs);
  CHECK(peek_model_kind(mpath) == "memlin_bias");
}

TEST_CASE("random models survive save/load across many draws", "[model-io]") {
  TempDir dir;
  std::mt19937_64 rng(83);
  for (int rep = 0; rep < 20; ++rep) {
    auto g = random_gmm(rng, 1 + rep % 5, 1 + rep % 7);
    auto path = dir.file("g" + std::to_string(rep) + ".json").string();
    save_model(g, path);
    auto back = load_gmm(path);
    for (std::size_t c = 0; c < g.size(); ++c) {
      REQUIRE(back.components[c].weight == g.components[c].weight);
      REQUIRE(back.components[c].mean == g.components[c].mean);
      REQUIRE(back.components[c].variance == g.components[c].variance);
    }
  }
}

TEST_CASE("unsupported format versions are refused", "[model-io]") {
  TempDir dir;
  auto path = dir.file("future.json").string();
  {
    nlohmann::ordered_json j;
    j["format_version"] = 2;
    j["kind"] = "diagonal_gmm";
    j["dim"] = 1;
    j["weights"] = {1.0};
    j["means"] = {{0.0}};
    j["variances"] = {{1.0}};
    std::ofstream(path) << j.dump(2);
  }
  CHECK_THROWS_WITH(load_gmm(path),
                    Catch::Matchers::ContainsSubstring("format_version"));
}

TEST_CASE("kind mismatches are refused", "[model-io]") {
  TempDir dir;
  std::mt19937_64 rng(89);
  auto g = random_gmm(rng, 2, 3);
  auto path = dir.file("gmm.json").string();
  save_model(g, path);
  CHECK_THROWS_AS(load_detector(path), IoError);
  CHECK_THROWS_AS(load_ratz(path), IoError);
  CHECK_THROWS_AS(load_memlin(path), IoError);
}

TEST_CASE("structurally broken model files are refused", "[model-io]") {
  TempDir dir;
  auto path = dir.file("broken.json").string();

  SECTION("not json at all") {
    std::ofstream(path) << "not json";
    CHECK_THROWS_AS(load_gmm(path), IoError);
    CHECK_THROWS_AS(peek_model_kind(path), IoError);
  }
  SECTION("missing version") {
    std::ofstream(path) << R"({"kind":"diagonal_gmm","dim":1})";
    CHECK_THROWS_AS(load_gmm(path), IoError);
  }
  SECTION("component shape mismatch") {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["kind"] = "diagonal_gmm";
    j["dim"] = 2;
    j["weights"] = {1.0};
    j["means"] = {{0.0}};  // dim 1, header says 2
    j["variances"] = {{1.0}};
    std::ofstream(path) << j.dump(2);
    CHECK_THROWS_AS(load_gmm(path), IoError);
  }
  SECTION("memlin cross shape mismatch") {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["kind"] = "memlin_bias";
    j["dim"] = 1;
    j["biases"] = {{{0.5}}, {{0.25}}};     // 2x1 pairs
    j["cross_probs"] = {{1.0}};            // needs 1 row of 2 entries
    std::ofstream(path) << j.dump(2);
    CHECK_THROWS_AS(load_memlin(path), IoError);
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(load_gmm(dir.file("absent.json").string()), IoError);
  }
}

TEST_CASE("fitted models behave identically after reload", "[model-io]") {
  TempDir dir;
  std::mt19937_64 rng(97);
  std::vector<Vec> data;
  for (int i = 0; i < 60; ++i) data.push_back(oracles::random_vec(rng, 4, 2.0));
  auto g = fit_em(data, 3, {}, 7).gmm;
  auto path = dir.file("fitted.json").string();
  save_model(g, path);
  auto back = load_gmm(path);
  for (const auto& z : data) {
    CHECK(log_density(back, z) == log_density(g, z));
    CHECK(posteriors(back, z) == posteriors(g, z));
  }
}
