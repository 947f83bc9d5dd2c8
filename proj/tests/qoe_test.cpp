#include <cmath>
#include <vector>

#include "doctest.h"
#include "holostream/qoe.hpp"
#include "holostream/rng.hpp"
#include "support/test_util.hpp"

using namespace holostream;
using test::rel_err;
using test::rel_err_strict;

namespace {

FovState make_fov(std::vector<FovTile> tiles) {
  FovState fov;
  fov.tiles = std::move(tiles);
  return fov;
}

}  // namespace

TEST_CASE("top-of-ladder selections score zero under unit rate weight") {
  const BitrateLadder ladder{{1e6, 2e6, 4e6}};
  const FovState fov = make_fov({{0, 1.3, 2.0}, {1, 0.7, 1.0}});
  TileSelection sel;
  sel.level = {3, 3};
  sel.compress = {0, 1};
  QoeWeights weights;
  CHECK(video_quality(fov, sel, ladder, weights) == 0.0);
}

TEST_CASE("a single unit-weight tile at rate ratio e scores exactly two") {
  // (1/1 + 1/1) * ln(e * mu_l / mu_L) with mu_l == mu_L collapses to 2.
  const BitrateLadder ladder{{5e6}};
  const FovState fov = make_fov({{0, 1.0, 1.0}});
  TileSelection sel;
  sel.level = {1};
  sel.compress = {0};
  QoeWeights weights;
  weights.rate_weight = std::exp(1.0);
  CHECK(video_quality(fov, sel, ladder, weights) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("video quality matches a term-by-term oracle on random scenes") {
  const BitrateLadder ladder{{1e6, 2e6, 4e6, 8e6}};
  rng::Engine eng(7);
  for (int trial = 0; trial < 200; ++trial) {
    QoeWeights weights;
    weights.dist_weight = eng.uniform(0.1, 3.0);
    weights.occ_weight = eng.uniform(0.1, 3.0);
    weights.rate_weight = eng.uniform(0.5, 4.0);
    FovState fov;
    TileSelection sel;
    double manual = 0.0;
    const int tiles = 1 + static_cast<int>(eng.below(8));
    for (int i = 0; i < tiles; ++i) {
      const double dist = eng.uniform(0.5, 5.0);
      const double occ = eng.uniform(1.0, 4.0);
      fov.tiles.push_back({i, dist, occ});
      const int level = 1 + static_cast<int>(eng.below(4));
      sel.level.push_back(level);
      sel.compress.push_back(static_cast<std::uint8_t>(eng.below(2)));
      manual += (weights.dist_weight / dist + weights.occ_weight / occ) *
                std::log(weights.rate_weight * ladder.rate_of(level) /
                         ladder.top());
    }
    CHECK(rel_err(video_quality(fov, sel, ladder, weights), manual) < 1e-12);
  }
}

TEST_CASE("quality rises with level and falls with distance and occlusion") {
  const BitrateLadder ladder{{1e6, 2e6, 4e6}};
  QoeWeights weights;
  weights.rate_weight = 8.0;  // keep every log argument positive and > 1
  TileSelection sel;
  sel.level = {2};
  sel.compress = {0};
  const double base =
      video_quality(make_fov({{0, 1.0, 1.5}}), sel, ladder, weights);
  TileSelection higher = sel;
  higher.level[0] = 3;
  CHECK(video_quality(make_fov({{0, 1.0, 1.5}}), higher, ladder, weights) >
        base);
  CHECK(video_quality(make_fov({{0, 2.0, 1.5}}), sel, ladder, weights) < base);
  CHECK(video_quality(make_fov({{0, 1.0, 3.0}}), sel, ladder, weights) < base);
}

TEST_CASE("an empty field of view scores zero") {
  const BitrateLadder ladder{{1e6}};
  CHECK(video_quality(FovState{}, TileSelection{}, ladder, QoeWeights{}) ==
        0.0);
}

TEST_CASE("weight validation rejects non-positive shares and penalties") {
  QoeWeights w;
  w.fluctuation_penalty = -0.1;
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
  w = QoeWeights{};
  w.rebuffer_penalty = -1.0;
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
  w = QoeWeights{};
  w.dist_weight = 0.0;
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
  w = QoeWeights{};
  w.rate_weight = 0.0;
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
  CHECK_NOTHROW(QoeWeights{}.validate());
}

TEST_CASE("fluctuation is the symmetric absolute difference") {
  CHECK(quality_fluctuation(5.0, 3.0) == 2.0);
  CHECK(quality_fluctuation(3.0, 5.0) == 2.0);
  CHECK(quality_fluctuation(-1.5, -1.5) == 0.0);
  rng::Engine eng(11);
  for (int i = 0; i < 100; ++i) {
    const double a = eng.uniform(-10.0, 10.0);
    const double b = eng.uniform(-10.0, 10.0);
    CHECK(quality_fluctuation(a, b) == quality_fluctuation(b, a));
    CHECK(quality_fluctuation(a, b) >= 0.0);
  }
}

TEST_CASE("buffer gains play time, spends the deadline, and clamps") {
  const BufferState start{0.010, 0.050};
  // Gain 15 ms, spend 5 ms: net +10 ms.
  CHECK(buffer_update(start, 0.015, 0.005).level ==
        doctest::Approx(0.020).epsilon(1e-12));
  // Drain below zero clamps at zero.
  CHECK(buffer_update(start, 0.001, 0.030).level == 0.0);
  // Fill above capacity clamps at capacity.
  CHECK(buffer_update(BufferState{0.045, 0.050}, 0.020, 0.001).level ==
        doctest::Approx(0.050).epsilon(1e-12));
  // Equal gain and spend leaves the level untouched.
  CHECK(buffer_update(start, 0.024, 0.024).level ==
        doctest::Approx(start.level).epsilon(1e-12));
}

TEST_CASE("buffer updates always land inside the admissible interval") {
  rng::Engine eng(13);
  for (int i = 0; i < 1000; ++i) {
    const double cap = eng.uniform(0.01, 0.2);
    BufferState b{eng.uniform(0.0, cap), cap};
    const BufferState next =
        buffer_update(b, eng.uniform(0.0, 0.05), eng.uniform(0.0, 0.05));
    CHECK(next.level >= 0.0);
    CHECK(next.level <= cap);
    CHECK(next.capacity == cap);
  }
}

TEST_CASE("buffer update validates its inputs") {
  CHECK_THROWS_AS(buffer_update(BufferState{-0.01, 0.05}, 0.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(buffer_update(BufferState{0.06, 0.05}, 0.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(buffer_update(BufferState{0.0, 0.0}, 0.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(buffer_update(BufferState{0.01, 0.05}, -1e-6, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(buffer_update(BufferState{0.01, 0.05}, 0.0, -1e-6),
                  std::invalid_argument);
}

TEST_CASE("rebuffering means an exactly empty buffer") {
  CHECK(rebuffer_indicator(BufferState{0.0, 0.05}));
  CHECK_FALSE(rebuffer_indicator(BufferState{1e-9, 0.05}));
  CHECK_FALSE(rebuffer_indicator(BufferState{0.05, 0.05}));
}

TEST_CASE("slot score subtracts weighted fluctuation and rebuffer terms") {
  QoeWeights weights;  // both penalties default to 0.5
  CHECK(qoe_slot(5.0, 2.0, true, weights) ==
        doctest::Approx(3.5).epsilon(1e-12));
  CHECK(qoe_slot(5.0, 2.0, false, weights) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK(qoe_slot(0.0, 0.0, false, weights) == 0.0);
  CHECK_THROWS_AS(qoe_slot(1.0, -0.5, false, weights), std::invalid_argument);
}

TEST_CASE("slot score is affine in each penalty weight") {
  rng::Engine eng(19);
  for (int i = 0; i < 100; ++i) {
    QoeWeights weights;
    weights.fluctuation_penalty = eng.uniform(0.0, 2.0);
    weights.rebuffer_penalty = eng.uniform(0.0, 2.0);
    const double q = eng.uniform(-5.0, 5.0);
    const double f = eng.uniform(0.0, 4.0);
    const bool stalled = eng.below(2) == 1;
    const double expected = q - weights.fluctuation_penalty * f -
                            weights.rebuffer_penalty * (stalled ? 1.0 : 0.0);
    CHECK(rel_err(qoe_slot(q, f, stalled, weights), expected) < 1e-15);
  }
}

TEST_CASE("aggregate sums record values over a rectangular grid") {
  std::vector<std::vector<QoeRecord>> records(2, std::vector<QoeRecord>(3));
  double manual = 0.0;
  rng::Engine eng(23);
  for (auto& row : records) {
    for (QoeRecord& r : row) {
      r.value = eng.uniform(-2.0, 2.0);
      manual += r.value;
    }
  }
  CHECK(rel_err(qoe_aggregate(records), manual) < 1e-12);
  CHECK(qoe_aggregate({}) == 0.0);

  records[1].pop_back();
  CHECK_THROWS_AS(qoe_aggregate(records), std::invalid_argument);
}
