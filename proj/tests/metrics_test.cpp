#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include <oevo/metrics.hpp>

using namespace oevo;

namespace {

Holon leaf(IdSource& ids, std::vector<double> values) {
  Holon h;
  h.id = ids.fresh();
  h.traits.values = std::move(values);
  return h;
}

Holon stack(IdSource& ids, int levels) {
  Holon h = leaf(ids, {0.0});
  for (int i = 1; i < levels; ++i) {
    Holon up = leaf(ids, {0.0});
    up.parts.push_back(std::move(h));
    h = std::move(up);
  }
  return h;
}

Event birth(std::int64_t gen, HolonId child, BirthMode mode, std::vector<HolonId> parents) {
  Event e;
  e.generation = gen;
  e.type = EventType::birth;
  e.subject = child;
  e.related = std::move(parents);
  e.birth_mode = mode;
  return e;
}

MetricsRow row(std::int64_t gen, std::int64_t pop, int modal, double fit_var) {
  MetricsRow r;
  r.generation = gen;
  r.pop_size = pop;
  r.modal_depth = modal;
  r.fitness_variance = fit_var;
  return r;
}

}  // namespace

TEST_CASE("depth summaries") {
  IdSource ids;
  std::vector<Holon> pop;
  pop.push_back(stack(ids, 1));
  pop.push_back(stack(ids, 1));
  pop.push_back(stack(ids, 2));
  pop.push_back(stack(ids, 2));
  pop.push_back(stack(ids, 3));

  CHECK(max_depth(pop) == 3);
  CHECK(mean_depth(pop) == 1.8);
  CHECK(modal_depth(pop) == 1);  // 2-2 tie between 1 and 2 goes to the smaller

  pop.push_back(stack(ids, 2));
  CHECK(modal_depth(pop) == 2);

  CHECK(max_depth({}) == 0);
  CHECK(mean_depth({}) == 0.0);
  CHECK(modal_depth({}) == 0);
}

TEST_CASE("diversity averages comparable pairs and counts the rest") {
  IdSource ids;
  std::vector<Holon> pop;
  pop.push_back(leaf(ids, {0.0}));
  pop.push_back(leaf(ids, {0.0}));
  pop.push_back(leaf(ids, {3.0}));

  const DiversityStats s = diversity_stats(pop);
  CHECK(s.comparable_pairs == 3);
  CHECK(s.incomparable_pairs == 0);
  CHECK(s.mean == 2.0);  // (0 + 3 + 3) / 3
  CHECK(diversity(pop) == 2.0);

  pop.push_back(stack(ids, 2));  // different shape: incomparable with all three
  const DiversityStats t = diversity_stats(pop);
  CHECK(t.comparable_pairs == 3);
  CHECK(t.incomparable_pairs == 3);
  CHECK(t.mean == 2.0);

  CHECK(diversity_stats({}).mean == 0.0);
  std::vector<Holon> clones;
  clones.push_back(leaf(ids, {1.0}));
  clones.push_back(leaf(ids, {1.0}));
  CHECK(diversity(clones) == 0.0);
}

TEST_CASE("transition detection wants a new height held for the whole window") {
  SECTION("flat series has none") {
    std::vector<int> series(200, 1);
    CHECK(detect_transitions(series, 50).empty());
  }
  SECTION("one clean step") {
    std::vector<int> series;
    series.insert(series.end(), 100, 1);
    series.insert(series.end(), 100, 2);
    const auto t = detect_transitions(series, 50);
    REQUIRE(t.size() == 1);
    CHECK(t[0].generation == 100);
    CHECK(t[0].old_modal == 1);
    CHECK(t[0].new_modal == 2);
    CHECK(t[0].window == 50);
  }
  SECTION("a dip inside the window disqualifies the rise") {
    std::vector<int> series;
    series.insert(series.end(), 100, 1);
    series.insert(series.end(), 30, 2);
    series.push_back(1);
    series.insert(series.end(), 69, 2);
    CHECK(detect_transitions(series, 50).empty());
    // the same shape with a window short enough to fit before the dip
    const auto t = detect_transitions(series, 20);
    REQUIRE_FALSE(t.empty());
    CHECK(t[0].generation == 100);
  }
  SECTION("a rise too close to the end cannot be confirmed") {
    std::vector<int> series;
    series.insert(series.end(), 100, 1);
    series.insert(series.end(), 49, 2);
    CHECK(detect_transitions(series, 50).empty());
  }
  SECTION("two-step ascent yields two events") {
    std::vector<int> series;
    series.insert(series.end(), 80, 1);
    series.insert(series.end(), 80, 2);
    series.insert(series.end(), 80, 3);
    const auto t = detect_transitions(series, 50);
    REQUIRE(t.size() == 2);
    CHECK(t[0].generation == 80);
    CHECK(t[0].old_modal == 1);
    CHECK(t[0].new_modal == 2);
    CHECK(t[1].generation == 160);
    CHECK(t[1].old_modal == 2);
    CHECK(t[1].new_modal == 3);
  }
  SECTION("a return to an old level is not a transition") {
    // rise, fall back, rise again to the same height: only the first counts
    std::vector<int> series;
    series.insert(series.end(), 60, 1);
    series.insert(series.end(), 60, 2);
    series.insert(series.end(), 60, 1);
    series.insert(series.end(), 60, 2);
    const auto t = detect_transitions(series, 50);
    REQUIRE(t.size() == 1);
    CHECK(t[0].generation == 60);
  }
}

TEST_CASE("condition audit counts what the log actually shows") {
  std::vector<Event> events;
  std::vector<MetricsRow> rows;

  SECTION("birth modes, suppressions, mutations") {
    events.push_back(birth(1, 10, BirthMode::asexual, {1}));
    events.push_back(birth(1, 11, BirthMode::multiparent, {1, 2}));
    events.push_back(birth(1, 12, BirthMode::internal, {5, 1}));
    Event sup;
    sup.generation = 1;
    sup.type = EventType::suppression;
    sup.subject = 5;
    events.push_back(sup);
    Event mut;
    mut.generation = 1;
    mut.type = EventType::mutation;
    mut.subject = 10;
    mut.variation = VariationKind::trait_change;
    mut.node = 10;
    events.push_back(mut);
    mut.variation = VariationKind::part_deletion;
    events.push_back(mut);
    mut.variation = VariationKind::trait_change;
    events.push_back(mut);

    rows.push_back(row(0, 3, 1, 0.0));
    rows.push_back(row(1, 5, 1, 0.5));

    const AuditReport r = condition_audit(events, rows, 50);
    CHECK(r.reproduction_asexual == 1);
    CHECK(r.reproduction_multiparent == 1);
    CHECK(r.internal_births == 1);
    CHECK(r.enforcement_suppressions == 1);
    CHECK(r.mutation_count(VariationKind::trait_change) == 2);
    CHECK(r.mutation_count(VariationKind::part_deletion) == 1);
    CHECK(r.mutation_count(VariationKind::repro_mechanism) == 0);
    CHECK(r.differential_fitness_generations == 1);
    CHECK_FALSE(r.brandon_subset_only);
  }

  SECTION("a composite is heritable only once it reproduces at a later generation") {
    Event fus;
    fus.generation = 1;
    fus.type = EventType::fusion;
    fus.subject = 20;
    fus.related = {7, 8};
    events.push_back(fus);
    rows.push_back(row(0, 4, 1, 0.0));
    rows.push_back(row(1, 4, 1, 0.0));
    rows.push_back(row(2, 4, 1, 0.0));
    rows.push_back(row(3, 4, 1, 0.0));

    SECTION("no later birth: not heritable") {
      const AuditReport r = condition_audit(events, rows, 50);
      CHECK(r.fusion_events == 1);
      CHECK(r.heritable_fusion_composites == 0);
    }
    SECTION("same-generation birth does not count") {
      events.push_back(birth(1, 30, BirthMode::asexual, {20}));
      const AuditReport r = condition_audit(events, rows, 50);
      CHECK(r.heritable_fusion_composites == 0);
    }
    SECTION("later birth listing the composite as parent counts once") {
      events.push_back(birth(3, 30, BirthMode::asexual, {20}));
      events.push_back(birth(3, 31, BirthMode::multiparent, {20, 9}));
      const AuditReport r = condition_audit(events, rows, 50);
      CHECK(r.heritable_fusion_composites == 1);
    }
    SECTION("internal births do not make a composite heritable") {
      events.push_back(birth(3, 30, BirthMode::internal, {20, 20}));
      const AuditReport r = condition_audit(events, rows, 50);
      CHECK(r.heritable_fusion_composites == 0);
    }
  }

  SECTION("fragments are joined through fission related ids") {
    Event fis;
    fis.generation = 1;
    fis.type = EventType::fission;
    fis.subject = 40;
    fis.related = {41, 42};
    events.push_back(fis);
    events.push_back(birth(2, 50, BirthMode::asexual, {42}));
    rows.push_back(row(0, 4, 1, 0.0));
    rows.push_back(row(1, 4, 1, 0.0));
    rows.push_back(row(2, 4, 1, 0.0));

    const AuditReport r = condition_audit(events, rows, 50);
    CHECK(r.fission_events == 1);
    CHECK(r.heritable_fission_fragments == 1);  // 42 reproduced, 41 did not
  }

  SECTION("offspring variance wants unequal realized birth counts") {
    rows.push_back(row(0, 4, 1, 0.0));
    rows.push_back(row(1, 4, 1, 0.0));
    rows.push_back(row(2, 4, 1, 0.0));

    SECTION("all births from one parent") {
      events.push_back(birth(1, 60, BirthMode::asexual, {1}));
      events.push_back(birth(1, 61, BirthMode::asexual, {1}));
      const AuditReport r = condition_audit(events, rows, 50);
      CHECK(r.offspring_variance_generations == 1);
    }
    SECTION("perfectly even reproduction has no variance") {
      events.push_back(birth(1, 60, BirthMode::asexual, {1}));
      events.push_back(birth(1, 61, BirthMode::asexual, {2}));
      events.push_back(birth(1, 62, BirthMode::asexual, {3}));
      events.push_back(birth(1, 63, BirthMode::asexual, {4}));
      const AuditReport r = condition_audit(events, rows, 50);
      CHECK(r.offspring_variance_generations == 0);
    }
    SECTION("uneven counts across parents register") {
      events.push_back(birth(1, 60, BirthMode::asexual, {1}));
      events.push_back(birth(1, 61, BirthMode::asexual, {1}));
      events.push_back(birth(2, 62, BirthMode::asexual, {2}));
      events.push_back(birth(2, 63, BirthMode::multiparent, {3, 4}));
      const AuditReport r = condition_audit(events, rows, 50);
      CHECK(r.offspring_variance_generations == 2);  // gen 1 skewed, gen 2 two of four parents
    }
  }

  SECTION("brandon subset flag") {
    events.push_back(birth(1, 70, BirthMode::multiparent, {1, 2}));
    Event mut;
    mut.generation = 1;
    mut.type = EventType::mutation;
    mut.subject = 70;
    mut.variation = VariationKind::trait_change;
    events.push_back(mut);
    Event death;
    death.generation = 1;
    death.type = EventType::death;
    death.subject = 3;
    events.push_back(death);
    rows.push_back(row(0, 4, 1, 0.1));
    rows.push_back(row(1, 4, 1, 0.1));

    CHECK(condition_audit(events, rows, 50).brandon_subset_only);

    SECTION("any fission breaks it") {
      Event fis;
      fis.generation = 1;
      fis.type = EventType::fission;
      fis.subject = 9;
      fis.related = {10, 11};
      events.push_back(fis);
      CHECK_FALSE(condition_audit(events, rows, 50).brandon_subset_only);
    }
    SECTION("an enforcement mutation breaks it") {
      Event mech;
      mech.generation = 1;
      mech.type = EventType::mutation;
      mech.subject = 70;
      mech.variation = VariationKind::enforcement_mechanism;
      events.push_back(mech);
      CHECK_FALSE(condition_audit(events, rows, 50).brandon_subset_only);
    }
  }

  SECTION("transitions come from the metrics rows") {
    for (int g = 0; g < 60; ++g) rows.push_back(row(g, 4, 1, 0.0));
    for (int g = 60; g < 120; ++g) rows.push_back(row(g, 4, 2, 0.0));
    const AuditReport r = condition_audit(events, rows, 50);
    REQUIRE(r.transitions_detected == 1);
    CHECK(r.transitions[0].generation == 60);
    CHECK(r.transitions[0].old_modal == 1);
    CHECK(r.transitions[0].new_modal == 2);
    CHECK_FALSE(r.brandon_subset_only);
  }
}
