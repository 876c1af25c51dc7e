#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "uqd/archive.hpp"
#include "uqd/rng.hpp"

using uqd::AdditionRule;
using uqd::AddOutcome;
using uqd::AddStatus;
using uqd::Archive;
using uqd::CompareDecision;
using uqd::DeltaPreference;
using uqd::GridSpec;
using uqd::SolutionRecord;

namespace {

GridSpec unit_grid(int cells, int depth = 1) {
  GridSpec spec;
  spec.feature_mins = {0.0, 0.0};
  spec.feature_maxs = {1.0, 1.0};
  spec.cells_per_dim = {cells, cells};
  spec.depth = depth;
  return spec;
}

SolutionRecord rec(double f, double r, std::vector<double> features = {0.5, 0.5}) {
  SolutionRecord s;
  s.genotype = {f, features[0], features[1]};
  s.samples = {{f, features}};
  s.sample_count = 1;
  s.est_fitness = f;
  s.est_features = std::move(features);
  s.est_reproducibility = r;
  return s;
}

// Dyadic rationals (k/8 in a small range): sums and differences are exact in
// binary floating point, so oracle and implementation cannot diverge through
// rounding.
double dyadic(uqd::RngStream& stream, int lo_eighths, int hi_eighths) {
  const auto span = static_cast<std::uint64_t>(hi_eighths - lo_eighths + 1);
  return static_cast<double>(lo_eighths + static_cast<int>(stream.next_below(span))) / 8.0;
}

// Region-membership oracle for the delta rule, phrased over the improvement
// deltas as in the preference figure rather than over shifted thresholds.
bool replace_region_oracle(double f_i, double r_i, double f_e, double r_e,
                           const DeltaPreference& pref) {
  const double df = f_i - f_e;
  const double dr = r_i - r_e;
  const bool large_fitness_gain = df >= pref.delta_f;
  const bool dominates = df >= 0.0 && dr >= 0.0;
  const bool trades_fitness_for_reproducibility = df >= -pref.delta_f && dr >= pref.delta_r;
  return large_fitness_gain || dominates || trades_fitness_for_reproducibility;
}

}  // namespace

TEST_CASE("cell_index follows the floor-and-clamp convention") {
  const GridSpec spec = unit_grid(32);
  CHECK(uqd::cell_index({0.5, 0.5}, spec) == std::vector<int>{16, 16});
  CHECK(uqd::cell_index({0.0, 0.0}, spec) == std::vector<int>{0, 0});
  CHECK(uqd::cell_index({1.0, 1.0}, spec) == std::vector<int>{31, 31});
  CHECK(uqd::cell_index({1.7, -0.2}, spec) == std::vector<int>{31, 0});
}

TEST_CASE("flat indexing is dimension-0 fastest and round-trips") {
  GridSpec spec;
  spec.feature_mins = {0.0, 0.0};
  spec.feature_maxs = {1.0, 1.0};
  spec.cells_per_dim = {4, 3};
  CHECK(uqd::flat_cell_index({0, 0}, spec) == 0);
  CHECK(uqd::flat_cell_index({1, 0}, spec) == 1);
  CHECK(uqd::flat_cell_index({0, 1}, spec) == 4);
  CHECK(uqd::flat_cell_index({3, 2}, spec) == 11);
  for (std::size_t flat = 0; flat < spec.total_cells(); ++flat) {
    CHECK(uqd::flat_cell_index(uqd::unflatten_cell_index(flat, spec), spec) == flat);
  }
}

TEST_CASE("grid validation rejects malformed specs") {
  GridSpec spec = unit_grid(8);
  CHECK_NOTHROW(uqd::validate(spec));
  spec.feature_mins = {0.0, 1.0};
  CHECK_THROWS_AS(uqd::validate(spec), std::invalid_argument);
  spec = unit_grid(8);
  spec.cells_per_dim = {8, 0};
  CHECK_THROWS_AS(uqd::validate(spec), std::invalid_argument);
  spec = unit_grid(8);
  spec.depth = 0;
  CHECK_THROWS_AS(uqd::validate(spec), std::invalid_argument);
  spec = unit_grid(8);
  spec.feature_maxs = {1.0};
  CHECK_THROWS_AS(uqd::validate(spec), std::invalid_argument);
}

TEST_CASE("weighted_fitness evaluates the adjusted-fitness formula") {
  CHECK(uqd::weighted_fitness(10, -2, {2, 1, 1e-9}) == doctest::Approx(6.0).epsilon(1e-8));

  // delta_f = 0: the coefficient stays strictly positive, so among equal
  // fitness the more reproducible solution always scores higher.
  const DeltaPreference zero_f{0.0, 0.5, 1e-9};
  CHECK(uqd::weighted_fitness(3, -0.1, zero_f) > uqd::weighted_fitness(3, -0.2, zero_f));

  // delta_r = 0: rho keeps the value defined and finite.
  const double v = uqd::weighted_fitness(0, -1, {1, 0, 1e-9});
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(-1e9).epsilon(1e-6));

  // Strictly increasing in both arguments.
  const DeltaPreference pref{0.3, 0.2, 1e-9};
  CHECK(uqd::weighted_fitness(1.1, -0.5, pref) > uqd::weighted_fitness(1.0, -0.5, pref));
  CHECK(uqd::weighted_fitness(1.0, -0.4, pref) > uqd::weighted_fitness(1.0, -0.5, pref));

  // (0, 0) keeps a coefficient of exactly 1 (rho / rho).
  CHECK(uqd::weighted_fitness(0.75, -0.25, {0, 0, 1e-9}) == 0.5);
}

TEST_CASE("delta_compare stated examples") {
  CHECK(uqd::delta_compare(12, -99, 10, 0, {2, 1}) == CompareDecision::ReplaceElite);
  CHECK(uqd::delta_compare(5, -1, 5, -1, {2, 1}) == CompareDecision::ReplaceElite);
  const DeltaPreference pref{2, 0.5};
  CHECK(uqd::delta_compare(8.5, -0.4, 10, -1, pref) == CompareDecision::ReplaceElite);
  CHECK(uqd::delta_compare(7.9, 0, 10, -1, pref) == CompareDecision::KeepElite);
}

TEST_CASE("delta_compare matches the region oracle on 1e5 random tuples") {
  uqd::RngStream stream(404);
  int replacements = 0;
  for (int i = 0; i < 100000; ++i) {
    const double f_i = dyadic(stream, -16, 16);
    const double r_i = dyadic(stream, -16, 0);
    const double f_e = dyadic(stream, -16, 16);
    const double r_e = dyadic(stream, -16, 0);
    const DeltaPreference pref{dyadic(stream, 0, 16), dyadic(stream, 0, 16), 1e-9};
    const bool replace =
        uqd::delta_compare(f_i, r_i, f_e, r_e, pref) == CompareDecision::ReplaceElite;
    REQUIRE(replace == replace_region_oracle(f_i, r_i, f_e, r_e, pref));
    replacements += replace ? 1 : 0;
  }
  // Both outcomes must actually occur for the oracle comparison to mean much.
  CHECK(replacements > 10000);
  CHECK(replacements < 90000);
}

TEST_CASE("weak domination always lands in the replace region") {
  uqd::RngStream stream(77);
  for (int i = 0; i < 1000; ++i) {
    const double f_e = dyadic(stream, -8, 8);
    const double r_e = dyadic(stream, -8, 0);
    const double f_i = f_e + dyadic(stream, 0, 8);
    const double r_i = r_e + dyadic(stream, 0, 8);
    const DeltaPreference pref{dyadic(stream, 0, 8), dyadic(stream, 0, 8), 1e-9};
    CHECK(uqd::delta_compare(f_i, r_i, f_e, r_e, pref) == CompareDecision::ReplaceElite);
  }
}

TEST_CASE("add_single fills empty cells under every rule") {
  for (const AdditionRule& rule :
       {AdditionRule::fitness_only(), AdditionRule::reproducibility_only(), AdditionRule::ls(),
        AdditionRule::weighted({1, 1}), AdditionRule::delta({1, 1})}) {
    Archive archive(unit_grid(4));
    const AddOutcome outcome = uqd::add_single(archive, rec(0.1, -0.1), rule);
    CHECK(outcome.status == AddStatus::Added);
    CHECK(archive.occupancy() == 1);
  }
}

TEST_CASE("add_single per-rule replacement semantics") {
  SUBCASE("fitness_only: strictly higher fitness replaces, ties keep the incumbent") {
    Archive archive(unit_grid(4));
    uqd::add_single(archive, rec(0.5, -0.9), AdditionRule::fitness_only());
    CHECK(uqd::add_single(archive, rec(0.5, 0.0), AdditionRule::fitness_only()).status ==
          AddStatus::Rejected);
    const AddOutcome outcome =
        uqd::add_single(archive, rec(0.6, -1.0), AdditionRule::fitness_only());
    CHECK(outcome.status == AddStatus::Replaced);
    CHECK(outcome.evicted->est_fitness == 0.5);
  }

  SUBCASE("reproducibility_only compares est_reproducibility") {
    Archive archive(unit_grid(4));
    uqd::add_single(archive, rec(0.9, -0.5), AdditionRule::reproducibility_only());
    CHECK(uqd::add_single(archive, rec(1.0, -0.6), AdditionRule::reproducibility_only()).status ==
          AddStatus::Rejected);
    CHECK(uqd::add_single(archive, rec(0.1, -0.4), AdditionRule::reproducibility_only()).status ==
          AddStatus::Replaced);
  }

  SUBCASE("ls requires both objectives to be at least as good") {
    Archive archive(unit_grid(4));
    uqd::add_single(archive, rec(0.5, -0.5), AdditionRule::ls());
    CHECK(uqd::add_single(archive, rec(0.9, -0.6), AdditionRule::ls()).status ==
          AddStatus::Rejected);
    CHECK(uqd::add_single(archive, rec(0.4, -0.1), AdditionRule::ls()).status ==
          AddStatus::Rejected);
    CHECK(uqd::add_single(archive, rec(0.5, -0.5), AdditionRule::ls()).status ==
          AddStatus::Replaced);
    CHECK(uqd::add_single(archive, rec(0.6, -0.4), AdditionRule::ls()).status ==
          AddStatus::Replaced);
  }

  SUBCASE("weighted compares adjusted fitness") {
    Archive archive(unit_grid(4));
    uqd::add_single(archive, rec(10, -2), AdditionRule::weighted({2, 1, 1e-9}));
    const AddOutcome outcome =
        uqd::add_single(archive, rec(8, -0.5), AdditionRule::weighted({2, 1, 1e-9}));
    CHECK(outcome.status == AddStatus::Replaced);  // 7 > 6
  }

  SUBCASE("delta applies delta_compare against the elite") {
    Archive archive(unit_grid(4));
    uqd::add_single(archive, rec(10, -1), AdditionRule::delta({2, 0.5}));
    CHECK(uqd::add_single(archive, rec(8.5, -0.4), AdditionRule::delta({2, 0.5})).status ==
          AddStatus::Replaced);
  }
}

TEST_CASE("add_single usage errors") {
  Archive archive(unit_grid(4));
  SolutionRecord no_samples = rec(0.5, 0.0);
  no_samples.sample_count = 0;
  CHECK_THROWS_AS(uqd::add_single(archive, no_samples, AdditionRule::fitness_only()),
                  std::invalid_argument);
  Archive deep(unit_grid(4, 3));
  CHECK_THROWS_AS(uqd::add_single(deep, rec(0.5, 0.0), AdditionRule::fitness_only()),
                  std::invalid_argument);
  CHECK_THROWS_AS(uqd::add_single(archive, rec(0.5, 0.0), {uqd::RuleKind::Pareto, {}}),
                  std::invalid_argument);
}

TEST_CASE("rule_score is defined only for single-score rules") {
  const SolutionRecord r = rec(1.0, -0.5);
  CHECK(uqd::rule_score(r, AdditionRule::fitness_only()) == 1.0);
  CHECK(uqd::rule_score(r, AdditionRule::reproducibility_only()) == -0.5);
  CHECK(uqd::rule_score(r, AdditionRule::weighted({0, 0, 1e-9})) == 0.5);
  CHECK_THROWS_AS(uqd::rule_score(r, AdditionRule::ls()), std::invalid_argument);
  CHECK_THROWS_AS(uqd::rule_score(r, AdditionRule::delta({1, 1})), std::invalid_argument);
}

TEST_CASE("add_scored_depth stated examples") {
  SUBCASE("depth 3 with room appends without eviction") {
    Archive archive(unit_grid(4, 3));
    uqd::add_scored_depth(archive, rec(5, 0), AdditionRule::fitness_only());
    uqd::add_scored_depth(archive, rec(3, 0), AdditionRule::fitness_only());
    const AddOutcome outcome =
        uqd::add_scored_depth(archive, rec(4, 0), AdditionRule::fitness_only());
    CHECK(outcome.status == AddStatus::Added);
    CHECK_FALSE(outcome.evicted.has_value());
    const auto& cell = archive.cell(uqd::cell_of({0.5, 0.5}, archive.spec()));
    REQUIRE(cell.size() == 3);
    CHECK(cell[0].est_fitness == 5);
    CHECK(cell[1].est_fitness == 4);
    CHECK(cell[2].est_fitness == 3);
  }

  SUBCASE("depth 2 insertion in the middle evicts the lowest score") {
    Archive archive(unit_grid(4, 2));
    uqd::add_scored_depth(archive, rec(5, 0), AdditionRule::fitness_only());
    uqd::add_scored_depth(archive, rec(3, 0), AdditionRule::fitness_only());
    const AddOutcome outcome =
        uqd::add_scored_depth(archive, rec(4, 0), AdditionRule::fitness_only());
    CHECK(outcome.status == AddStatus::Replaced);
    CHECK(outcome.evicted->est_fitness == 3);
  }

  SUBCASE("a tie with the lowest occupant of a full cell is rejected") {
    Archive archive(unit_grid(4, 2));
    uqd::add_scored_depth(archive, rec(5, 0), AdditionRule::fitness_only());
    uqd::add_scored_depth(archive, rec(3, 0), AdditionRule::fitness_only());
    CHECK(uqd::add_scored_depth(archive, rec(3, 0), AdditionRule::fitness_only()).status ==
          AddStatus::Rejected);
  }

  SUBCASE("equal scores place the candidate after the incumbents") {
    Archive archive(unit_grid(4, 3));
    SolutionRecord first = rec(4, 0);
    first.genotype = {1, 0, 0};
    SolutionRecord second = rec(4, 0);
    second.genotype = {2, 0, 0};
    uqd::add_scored_depth(archive, first, AdditionRule::fitness_only());
    uqd::add_scored_depth(archive, second, AdditionRule::fitness_only());
    const auto& cell = archive.cell(uqd::cell_of({0.5, 0.5}, archive.spec()));
    REQUIRE(cell.size() == 2);
    CHECK(cell[0].genotype[0] == 1);
    CHECK(cell[1].genotype[0] == 2);
  }
}

TEST_CASE("add_scored_depth keeps cells sorted and bounded on random streams") {
  uqd::RngStream stream(11);
  for (const AdditionRule& rule :
       {AdditionRule::fitness_only(), AdditionRule::weighted({0.5, 0.1, 1e-9})}) {
    Archive archive(unit_grid(3, 3));
    for (int i = 0; i < 2000; ++i) {
      uqd::add_scored_depth(
          archive, rec(stream.next_double(), -stream.next_double(),
                       {stream.next_double(), stream.next_double()}),
          rule);
    }
    for (std::size_t c = 0; c < archive.total_cells(); ++c) {
      const auto& cell = archive.cell(c);
      CHECK(cell.size() <= 3);
      for (std::size_t s = 1; s < cell.size(); ++s) {
        CHECK(uqd::rule_score(cell[s - 1], rule) >= uqd::rule_score(cell[s], rule));
      }
    }
  }
}

namespace {

struct DeltaDepthExpectation {
  AddStatus status;
  std::vector<double> cell_fitness;  // expected est_fitness per slot, in order
  std::optional<double> evicted_fitness;
};

// Hand-derived truth table for one cascade step at depth 2, phrased by
// domination pattern instead of replaying the implementation's loop.
DeltaDepthExpectation expected_delta_depth(const std::vector<SolutionRecord>& occupants,
                                           const SolutionRecord& c, const DeltaPreference& pref) {
  auto dominated = [&](const SolutionRecord& i, const SolutionRecord& e) {
    return uqd::delta_compare(i.est_fitness, i.est_reproducibility, e.est_fitness,
                              e.est_reproducibility, pref) == CompareDecision::ReplaceElite;
  };
  if (occupants.empty()) return {AddStatus::Added, {c.est_fitness}, std::nullopt};
  const SolutionRecord& a = occupants[0];
  if (occupants.size() == 1) {
    if (dominated(c, a)) return {AddStatus::Added, {c.est_fitness, a.est_fitness}, std::nullopt};
    return {AddStatus::Added, {a.est_fitness, c.est_fitness}, std::nullopt};
  }
  const SolutionRecord& b = occupants[1];
  if (!dominated(c, a)) {
    if (!dominated(c, b)) return {AddStatus::Rejected, {a.est_fitness, b.est_fitness}, std::nullopt};
    return {AddStatus::Replaced, {a.est_fitness, c.est_fitness}, b.est_fitness};
  }
  if (dominated(a, b)) return {AddStatus::Replaced, {c.est_fitness, a.est_fitness}, b.est_fitness};
  return {AddStatus::Replaced, {c.est_fitness, b.est_fitness}, a.est_fitness};
}

}  // namespace

TEST_CASE("add_delta_depth matches the exhaustive 3-record domination oracle") {
  const std::vector<double> fs = {0.0, 0.5, 1.0, 1.5};
  const std::vector<double> rs = {-1.0, -0.5, 0.0};
  const std::vector<DeltaPreference> prefs = {{0.25, 0.25, 1e-9}, {0, 0, 1e-9}, {0.5, 0.1, 1e-9}};
  int cases = 0;
  for (const auto& pref : prefs) {
    for (double fa : fs)
      for (double ra : rs)
        for (double fb : fs)
          for (double rb : rs)
            for (double fc : fs)
              for (double rc : rs) {
                // Fitness values are distinguishable labels only when unique
                // per role; tagging by slot keeps the expectation readable.
                Archive archive(unit_grid(2, 2));
                const std::size_t at = uqd::cell_of({0.5, 0.5}, archive.spec());
                std::vector<SolutionRecord> occupants = {rec(fa, ra), rec(fb, rb)};
                archive.cell_mutable(at) = occupants;
                const SolutionRecord c = rec(fc, rc);
                const DeltaDepthExpectation expect = expected_delta_depth(occupants, c, pref);
                const AddOutcome outcome = uqd::add_delta_depth(archive, c, pref);
                REQUIRE(outcome.status == expect.status);
                const auto& cell = archive.cell(at);
                REQUIRE(cell.size() == expect.cell_fitness.size());
                for (std::size_t s = 0; s < cell.size(); ++s) {
                  REQUIRE(cell[s].est_fitness == expect.cell_fitness[s]);
                }
                REQUIRE(outcome.evicted.has_value() == expect.evicted_fitness.has_value());
                if (outcome.evicted) {
                  REQUIRE(outcome.evicted->est_fitness == *expect.evicted_fitness);
                }
                ++cases;
              }
  }
  CHECK(cases == 3 * 4 * 3 * 4 * 3 * 4 * 3);
}

TEST_CASE("add_delta_depth with partial cells appends and keeps cascade order") {
  const DeltaPreference pref{0.25, 0.25, 1e-9};
  Archive archive(unit_grid(2, 2));
  const std::size_t at = uqd::cell_of({0.5, 0.5}, archive.spec());

  CHECK(uqd::add_delta_depth(archive, rec(0.5, -0.5), pref).status == AddStatus::Added);
  // Dominating candidate takes position 0, incumbent is appended.
  CHECK(uqd::add_delta_depth(archive, rec(1.0, -0.25), pref).status == AddStatus::Added);
  const auto& cell = archive.cell(at);
  REQUIRE(cell.size() == 2);
  CHECK(cell[0].est_fitness == 1.0);
  CHECK(cell[1].est_fitness == 0.5);
}

TEST_CASE("add_delta_depth at depth 1 is decision-identical to add_single(delta)") {
  uqd::RngStream stream(2718);
  for (int trial = 0; trial < 200; ++trial) {
    const DeltaPreference pref{dyadic(stream, 0, 8), dyadic(stream, 0, 8), 1e-9};
    Archive via_depth(unit_grid(2, 1));
    Archive via_single(unit_grid(2, 1));
    for (int i = 0; i < 50; ++i) {
      const SolutionRecord candidate =
          rec(dyadic(stream, -8, 8), dyadic(stream, -8, 0),
              {stream.next_double(), stream.next_double()});
      const AddOutcome a = uqd::add_delta_depth(via_depth, candidate, pref);
      const AddOutcome b = uqd::add_single(via_single, candidate, AdditionRule::delta(pref));
      REQUIRE(a.status == b.status);
      REQUIRE(a.evicted.has_value() == b.evicted.has_value());
      if (a.evicted) {
        REQUIRE(a.evicted->est_fitness == b.evicted->est_fitness);
        REQUIRE(a.evicted->est_reproducibility == b.evicted->est_reproducibility);
      }
    }
    for (std::size_t c = 0; c < via_depth.total_cells(); ++c) {
      REQUIRE(via_depth.cell(c).size() == via_single.cell(c).size());
      for (std::size_t s = 0; s < via_depth.cell(c).size(); ++s) {
        REQUIRE(via_depth.cell(c)[s].est_fitness == via_single.cell(c)[s].est_fitness);
        REQUIRE(via_depth.cell(c)[s].genotype == via_single.cell(c)[s].genotype);
      }
    }
  }
}

TEST_CASE("cells never exceed depth under randomized delta streams") {
  uqd::RngStream stream(505);
  const DeltaPreference pref{0.2, 0.1, 1e-9};
  Archive archive(unit_grid(3, 3));
  for (int i = 0; i < 3000; ++i) {
    uqd::add_delta_depth(archive,
                         rec(stream.next_double(), -stream.next_double(),
                             {stream.next_double(), stream.next_double()}),
                         pref);
    if (i % 256 == 0) {
      for (std::size_t c = 0; c < archive.total_cells(); ++c) {
        CHECK(archive.cell(c).size() <= 3);
      }
    }
  }
}
