#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <oevo/errors.hpp>
#include <oevo/scenarios.hpp>

using namespace oevo;

namespace {

EngineConfig base_config(const std::string& name) {
  EngineConfig cfg;
  cfg.scenario.name = name;
  return cfg;
}

Holon molecule(IdSource& ids, int tag, double defection, double efficiency) {
  Holon h;
  h.id = ids.fresh();
  h.traits.tags = {tag};
  h.traits.values = {defection, efficiency};
  return h;
}

Holon compartment(IdSource& ids, std::vector<Holon> parts, double enforcement) {
  Holon c;
  c.id = ids.fresh();
  c.traits.values = {0.0, 0.0};
  c.mechanisms.enforcement_strength = enforcement;
  c.parts = std::move(parts);
  return c;
}

Holon gene(IdSource& ids, int tag) {
  Holon h;
  h.id = ids.fresh();
  h.traits.tags = {tag};
  h.traits.values = {0.0};
  return h;
}

Holon worker(IdSource& ids, double defection, double role) {
  Holon h;
  h.id = ids.fresh();
  h.traits.values = {defection, role};
  return h;
}

}  // namespace

TEST_CASE("factory dispatch and parameter validation") {
  CHECK(make_scenario(base_config("hypercycle")).name == "hypercycle");
  CHECK(make_scenario(base_config("linkage")).name == "linkage");
  CHECK(make_scenario(base_config("division_of_labor")).name == "division_of_labor");
  CHECK(make_scenario(base_config("fisher_muller")).name == "fisher_muller");

  EngineConfig bad = base_config("hypercycle");
  bad.scenario.name = "panspermia";
  CHECK_THROWS_AS(make_scenario(bad), ConfigError);

  EngineConfig cfg = base_config("hypercycle");
  cfg.scenario.num["members"] = 1;
  CHECK_THROWS_AS(make_scenario(cfg), ConfigError);
  cfg.scenario.num["members"] = 2.5;
  CHECK_THROWS_AS(make_scenario(cfg), ConfigError);
  cfg.scenario.num["members"] = 3;
  cfg.scenario.num["parasite_fraction"] = 1.5;
  CHECK_THROWS_AS(make_scenario(cfg), ConfigError);

  EngineConfig lk = base_config("linkage");
  lk.scenario.num["protocell_size"] = 1;
  CHECK_THROWS_AS(make_scenario(lk), ConfigError);
  lk.scenario.num["protocell_size"] = 6;
  lk.scenario.num["copy_penalty"] = 1.2;
  CHECK_THROWS_AS(make_scenario(lk), ConfigError);

  EngineConfig dl = base_config("division_of_labor");
  dl.scenario.num["role_count"] = 0;
  CHECK_THROWS_AS(make_scenario(dl), ConfigError);
  dl.scenario.num["role_count"] = 3;
  dl.scenario.num["role_exponent"] = -1.0;
  CHECK_THROWS_AS(make_scenario(dl), ConfigError);
}

TEST_CASE("initial populations honor the config") {
  EngineConfig cfg = base_config("hypercycle");
  cfg.capacity = 10;
  cfg.scenario.num["parasite_fraction"] = 0.2;
  cfg.scenario.num["init_n_parents"] = 4;
  cfg.scenario.init_repro = "mixed";
  cfg.rates.trait_change = 0.33;
  const Scenario s = make_scenario(cfg);
  IdSource ids;
  Rng rng(1);
  const std::vector<Holon> pop = s.init(cfg, ids, rng);

  REQUIRE(pop.size() == 10);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    CHECK(pop[i].id == i + 1);
    CHECK(pop[i].mechanisms.n_parents == 4);
    CHECK(pop[i].mechanisms.mutation_rates.trait_change == 0.33);
    CHECK(pop[i].mechanisms.repro_mode ==
          (i % 2 == 0 ? ReproMode::asexual : ReproMode::multiparent));
    CHECK(validate(pop[i]).empty());
  }
  // first eight cycle the member tags, last two are parasites (tag = members)
  CHECK(pop[0].traits.tags == std::vector<int>{0});
  CHECK(pop[1].traits.tags == std::vector<int>{1});
  CHECK(pop[2].traits.tags == std::vector<int>{2});
  CHECK(pop[3].traits.tags == std::vector<int>{0});
  CHECK(pop[8].traits.tags == std::vector<int>{3});
  CHECK(pop[9].traits.tags == std::vector<int>{3});
  CHECK(pop[8].traits.values[0] == 1.0);  // parasites defect fully
  CHECK(pop[0].traits.values[0] == 0.0);

  EngineConfig lk = base_config("linkage");
  lk.capacity = 6;
  const Scenario ls = make_scenario(lk);
  IdSource ids2;
  const std::vector<Holon> genes = ls.init(lk, ids2, rng);
  REQUIRE(genes.size() == 6);
  for (std::size_t i = 0; i < genes.size(); ++i) {
    CHECK(genes[i].traits.tags == std::vector<int>{static_cast<int>(i % 2)});
    CHECK(genes[i].mechanisms.repro_mode == ReproMode::asexual);
    CHECK(genes[i].mechanisms.fusion_affinity == 0.5);
    CHECK(genes[i].mechanisms.fission_rate == 0.0);
  }

  EngineConfig dl = base_config("division_of_labor");
  dl.capacity = 9;
  dl.scenario.num["init_defection_max"] = 0.4;
  const Scenario ds = make_scenario(dl);
  IdSource ids3;
  const std::vector<Holon> workers = ds.init(dl, ids3, rng);
  for (std::size_t i = 0; i < workers.size(); ++i) {
    CHECK(workers[i].traits.values[0] >= 0.0);
    CHECK(workers[i].traits.values[0] < 0.4);
    CHECK(workers[i].traits.values[1] == static_cast<double>(i % 3));
    CHECK(workers[i].mechanisms.enforcement_strength == 0.5);
  }
}

TEST_CASE("hypercycle support pool and leaf fitness") {
  EngineConfig cfg = base_config("hypercycle");
  const Scenario s = make_scenario(cfg);  // members 3, advantage 1.5
  IdSource ids;

  std::vector<Holon> pop;
  pop.push_back(molecule(ids, 0, 0.0, 1.0));
  pop.push_back(molecule(ids, 1, 0.0, 1.0));
  pop.push_back(molecule(ids, 2, 0.0, 1.0));
  pop.push_back(molecule(ids, 3, 1.0, 1.0));  // parasite dilutes the pool

  Environment env;
  s.env_update(env, pop);
  CHECK(env.get("unfused") == 4.0);
  CHECK(env.get("support_0") == 0.25);
  CHECK(env.get("support_1") == 0.25);
  CHECK(env.get("support_2") == 0.25);

  // member j feeds on support of j-1 (cyclically); the parasite feeds on the
  // last member with its advantage and supports nobody
  CHECK(s.fitness(pop[0], env) == 1.0 * env.get("support_2"));
  CHECK(s.fitness(pop[1], env) == 0.25);
  CHECK(s.fitness(pop[3], env) == 0.25 * 1.5);

  // fused members leave the pool
  std::vector<Holon> mixed;
  mixed.push_back(molecule(ids, 0, 0.0, 1.0));
  mixed.push_back(compartment(ids, {molecule(ids, 1, 0.0, 1.0)}, 0.0));
  s.env_update(env, mixed);
  CHECK(env.get("unfused") == 1.0);
  CHECK(env.get("support_0") == 1.0);
  CHECK(env.get("support_1") == 0.0);

  // efficiency below zero contributes nothing anywhere
  std::vector<Holon> dud;
  dud.push_back(molecule(ids, 0, 0.0, -2.0));
  s.env_update(env, dud);
  CHECK(env.get("support_0") == 0.0);
  CHECK(s.fitness(dud[0], env) == 0.0);
}

TEST_CASE("hypercycle compartments need the whole cycle") {
  EngineConfig cfg = base_config("hypercycle");
  const Scenario s = make_scenario(cfg);
  IdSource ids;
  Environment env;  // compartment fitness ignores the pool

  SECTION("complete cycle of clean members scores one") {
    Holon c = compartment(
        ids,
        {molecule(ids, 0, 0.0, 1.0), molecule(ids, 1, 0.0, 1.0), molecule(ids, 2, 0.0, 1.0)},
        0.9);
    CHECK(s.fitness(c, env) == 1.0);
  }
  SECTION("a missing member voids the compartment") {
    Holon c = compartment(ids, {molecule(ids, 0, 0.0, 1.0), molecule(ids, 1, 0.0, 1.0)}, 0.9);
    CHECK(s.fitness(c, env) == 0.0);
  }
  SECTION("member efficiencies average per tag and multiply across tags") {
    Holon c = compartment(
        ids,
        {molecule(ids, 0, 0.0, 0.5), molecule(ids, 0, 0.0, 1.5), molecule(ids, 1, 0.0, 2.0),
         molecule(ids, 2, 0.0, 1.0)},
        1.0);
    // tag 0 mean 1.0, tag 1 mean 2.0, tag 2 mean 1.0
    CHECK(s.fitness(c, env) == 2.0);
  }
  SECTION("full enforcement makes parasite count irrelevant") {
    std::vector<Holon> one = {molecule(ids, 0, 0.0, 1.0), molecule(ids, 1, 0.0, 1.0),
                              molecule(ids, 2, 0.0, 1.0), molecule(ids, 3, 1.0, 1.0)};
    std::vector<Holon> three = {molecule(ids, 0, 0.0, 1.0), molecule(ids, 1, 0.0, 1.0),
                                molecule(ids, 2, 0.0, 1.0), molecule(ids, 3, 1.0, 1.0),
                                molecule(ids, 3, 1.0, 1.0), molecule(ids, 3, 1.0, 1.0)};
    Holon a = compartment(ids, std::move(one), 1.0);
    Holon b = compartment(ids, std::move(three), 1.0);
    CHECK(s.fitness(a, env) == s.fitness(b, env));
    CHECK(s.fitness(a, env) == 1.0);
  }
  SECTION("unsuppressed parasites tax the whole") {
    Holon c = compartment(
        ids,
        {molecule(ids, 0, 0.0, 1.0), molecule(ids, 1, 0.0, 1.0), molecule(ids, 2, 0.0, 1.0),
         molecule(ids, 3, 1.0, 1.0)},
        0.8);
    // tax = mean over parts of defection * (1 - enforcement) = 0.2/4
    CHECK_THAT(s.fitness(c, env), Catch::Matchers::WithinAbs(0.95, 1e-12));
  }
  SECTION("observable counts parasite molecules at any depth") {
    std::vector<Holon> pop;
    pop.push_back(molecule(ids, 0, 0.0, 1.0));
    pop.push_back(molecule(ids, 1, 0.0, 1.0));
    pop.push_back(molecule(ids, 2, 0.0, 1.0));
    pop.push_back(molecule(ids, 3, 1.0, 1.0));
    pop.push_back(compartment(
        ids,
        {molecule(ids, 0, 0.0, 1.0), molecule(ids, 1, 0.0, 1.0), molecule(ids, 2, 0.0, 1.0),
         molecule(ids, 3, 1.0, 1.0)},
        1.0));
    REQUIRE(s.observable);
    CHECK(s.observable(pop, env) == 0.25);  // 2 parasites among 8 molecules
  }
  SECTION("fusion seeds compartments with inert root traits") {
    REQUIRE(s.fusion_root_traits);
    const TraitVector tv = s.fusion_root_traits({});
    CHECK(tv.values == std::vector<double>{0.0, 0.0});
    CHECK(tv.tags.empty());
  }
  CHECK_FALSE(s.goal);
}

TEST_CASE("linkage assembly odds and composite returns") {
  EngineConfig cfg = base_config("linkage");  // protocell 6, penalty 0.2
  const Scenario s = make_scenario(cfg);
  IdSource ids;

  SECTION("hand-computed hypergeometric case") {
    // pool 10 A, 2 B; a focal A draws 5 of the 11 others:
    // P(at least one B) = 1 - C(9,5)/C(11,5) = 1 - 126/462
    std::vector<Holon> pop;
    for (int i = 0; i < 10; ++i) pop.push_back(gene(ids, 0));
    for (int i = 0; i < 2; ++i) pop.push_back(gene(ids, 1));
    Environment env;
    s.env_update(env, pop);
    CHECK(env.get("pool_a") == 10.0);
    CHECK(env.get("pool_b") == 2.0);
    CHECK_THAT(s.fitness(pop[0], env),
               Catch::Matchers::WithinAbs(1.0 - 126.0 / 462.0, 1e-12));
  }
  SECTION("no complementary gene in the pool means no replication") {
    std::vector<Holon> pop;
    for (int i = 0; i < 5; ++i) pop.push_back(gene(ids, 0));
    Environment env;
    s.env_update(env, pop);
    CHECK(s.fitness(pop[0], env) == 0.0);
  }
  SECTION("a pool smaller than the protocell still works") {
    // 2 A + 1 B: a focal A draws both others, so the B is guaranteed
    std::vector<Holon> pop = {gene(ids, 0), gene(ids, 0), gene(ids, 1)};
    Environment env;
    s.env_update(env, pop);
    CHECK(s.fitness(pop[0], env) == 1.0);
  }
  SECTION("a lone gene has nobody to assemble with") {
    std::vector<Holon> pop = {gene(ids, 0)};
    Environment env;
    s.env_update(env, pop);
    CHECK(s.fitness(pop[0], env) == 0.0);
  }
  SECTION("linked pairs replicate at the penalty rate, regardless of the pool") {
    Holon pair;
    pair.id = ids.fresh();
    pair.traits.values = {0.0};
    pair.parts.push_back(gene(ids, 0));
    pair.parts.push_back(gene(ids, 1));
    Environment env;  // empty pool on purpose
    CHECK_THAT(s.fitness(pair, env), Catch::Matchers::WithinAbs(0.8, 1e-12));

    Holon trio = pair;
    trio.parts.push_back(gene(ids, 0));
    CHECK_THAT(s.fitness(trio, env), Catch::Matchers::WithinAbs(0.64, 1e-12));

    Holon same;
    same.id = ids.fresh();
    same.traits.values = {0.0};
    same.parts.push_back(gene(ids, 0));
    same.parts.push_back(gene(ids, 0));
    CHECK(s.fitness(same, env) == 0.0);  // two copies of one type link for nothing
  }
  SECTION("zero penalty makes a linked pair a sure replicator") {
    EngineConfig free_cfg = base_config("linkage");
    free_cfg.scenario.num["copy_penalty"] = 0.0;
    const Scenario fs = make_scenario(free_cfg);
    Holon pair;
    pair.id = ids.fresh();
    pair.traits.values = {0.0};
    pair.parts.push_back(gene(ids, 0));
    pair.parts.push_back(gene(ids, 1));
    Environment env;
    CHECK(fs.fitness(pair, env) == 1.0);
  }
  SECTION("observable is the share of roots that carry both types") {
    std::vector<Holon> pop;
    pop.push_back(gene(ids, 0));
    Holon linked;
    linked.id = ids.fresh();
    linked.traits.values = {0.0};
    linked.parts.push_back(gene(ids, 0));
    linked.parts.push_back(gene(ids, 1));
    pop.push_back(linked);
    Holon dud;
    dud.id = ids.fresh();
    dud.traits.values = {0.0};
    dud.parts.push_back(gene(ids, 0));
    dud.parts.push_back(gene(ids, 0));
    pop.push_back(dud);
    Environment env;
    REQUIRE(s.observable);
    CHECK_THAT(s.observable(pop, env), Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));
  }
}

TEST_CASE("division of labor rewards distinct roles superadditively") {
  EngineConfig cfg = base_config("division_of_labor");  // 3 roles, exponent 1.5
  const Scenario s = make_scenario(cfg);
  IdSource ids;
  Environment env;

  SECTION("a lone worker earns the baseline") {
    Holon w = worker(ids, 0.9, 1.0);
    CHECK(s.fitness(w, env) == 1.0);  // own defection taxes nobody yet
  }
  SECTION("two distinct roles beat two workers' worth of baseline") {
    Holon c = compartment(ids, {worker(ids, 0.0, 0.0), worker(ids, 0.0, 1.0)}, 0.0);
    CHECK(s.fitness(c, env) == std::pow(2.0, 1.5));
    CHECK(s.fitness(c, env) > 2.0);
  }
  SECTION("duplicate roles add nothing") {
    Holon c = compartment(ids, {worker(ids, 0.0, 1.0), worker(ids, 0.0, 1.0)}, 0.0);
    CHECK(s.fitness(c, env) == 1.0);
  }
  SECTION("three roles, full spread") {
    Holon c = compartment(
        ids, {worker(ids, 0.0, 0.0), worker(ids, 0.0, 1.0), worker(ids, 0.0, 2.0)}, 0.0);
    CHECK(s.fitness(c, env) == std::pow(3.0, 1.5));
  }
  SECTION("defection is taxed unless enforced away") {
    Holon c = compartment(ids, {worker(ids, 0.8, 0.0), worker(ids, 0.4, 1.0)}, 0.5);
    CHECK_THAT(s.fitness(c, env),
               Catch::Matchers::WithinAbs(std::pow(2.0, 1.5) - 0.6, 1e-12));
    Holon e = compartment(ids, {worker(ids, 0.8, 0.0), worker(ids, 0.4, 1.0)}, 1.0);
    CHECK(s.fitness(e, env) == std::pow(2.0, 1.5));
  }
  SECTION("fitness never goes negative") {
    Holon c = compartment(ids, {worker(ids, 1.0, 1.0), worker(ids, 1.0, 1.0)}, 0.0);
    CHECK(s.fitness(c, env) == 0.0);  // base 1, tax 2
  }
  SECTION("roles round and clamp into range") {
    Holon c = compartment(ids, {worker(ids, 0.0, 7.9), worker(ids, 0.0, -3.2)}, 0.0);
    CHECK(s.fitness(c, env) == std::pow(2.0, 1.5));  // clamps to roles 2 and 0
    Holon d = compartment(ids, {worker(ids, 0.0, 1.4), worker(ids, 0.0, 0.6)}, 0.0);
    CHECK(s.fitness(d, env) == 1.0);  // both round to role 1
  }
  CHECK_FALSE(s.goal);
  CHECK_FALSE(s.observable);
  CHECK_FALSE(s.fusion_root_traits);
}

TEST_CASE("fisher-muller multiplies gains past the threshold") {
  EngineConfig cfg = base_config("fisher_muller");  // s 0.5, threshold 0.5
  const Scenario s = make_scenario(cfg);
  IdSource ids;
  Environment env;

  auto org = [&](double l0, double l1) {
    Holon h;
    h.id = ids.fresh();
    h.traits.values = {l0, l1};
    return h;
  };

  CHECK(s.fitness(org(0.1, 0.2), env) == 1.0);
  CHECK(s.fitness(org(0.6, 0.4), env) == 1.5);
  CHECK(s.fitness(org(0.4, 0.6), env) == 1.5);
  CHECK(s.fitness(org(0.6, 0.9), env) == 2.25);
  CHECK(s.fitness(org(0.5, 0.5), env) == 1.0);  // strictly past, not at

  REQUIRE(s.goal);
  REQUIRE(s.observable);
  std::vector<Holon> pop = {org(0.6, 0.4), org(0.4, 0.6)};
  CHECK_FALSE(s.goal(pop, env));
  CHECK(s.observable(pop, env) == 0.0);
  pop.push_back(org(0.7, 0.8));
  CHECK(s.goal(pop, env));
  CHECK_THAT(s.observable(pop, env), Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));

  EngineConfig strong = base_config("fisher_muller");
  strong.scenario.num["selection_coefficient"] = 1.0;
  const Scenario ss = make_scenario(strong);
  CHECK(ss.fitness(org(0.9, 0.9), env) == 4.0);
}
