#include <gtest/gtest.h>

#include <random>
#include <set>

#include "popda/hierarchy.hpp"
#include "popda/stats.hpp"
#include "support/oracles.hpp"

using namespace popda;

namespace {

std::vector<Record> pooled(const std::vector<Dataset>& ds, auto keep) {
  std::vector<Record> out;
  for (const Dataset& d : ds) {
    for (const Record& r : d.records) {
      if (r.labeled() && keep(d, r)) out.push_back(r);
    }
  }
  return out;
}

}  // namespace

TEST(Hierarchy, FourDatasetsBothModes) {
  std::mt19937_64 rng(1);
  const auto ds = oracle::random_bundle(rng);
  const HierarchyGraph g = build_hierarchy(ds);
  EXPECT_EQ(g.size(), 14u);
  EXPECT_EQ(g.leaves().size(), 4u);
  std::set<std::string> labels;
  for (const NodeId& n : g.nodes()) labels.insert(n.label());
  EXPECT_EQ(labels.size(), g.size());

  const std::size_t root = g.index_of(NodeId::root());
  EXPECT_TRUE(g.parents(root).empty());
  for (AgeGroup a : kAgeGroups) {
    auto p = g.parents(g.index_of(NodeId::age_node(a)));
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0], root);
  }
  for (Gender s : kGenders) {
    auto p = g.parents(g.index_of(NodeId::gender_node(s)));
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0], root);
  }
  for (CollectionMode c : kCollectionModes) {
    auto p = g.parents(g.index_of(NodeId::env_node(c)));
    EXPECT_EQ(p.size(), 7u);
    std::set<NodeKind> kinds;
    for (std::size_t q : p) kinds.insert(g.node(q).kind);
    EXPECT_EQ(kinds, (std::set<NodeKind>{NodeKind::Age, NodeKind::Gender}));
  }
  for (const Dataset& d : ds) {
    auto p = g.parents(g.index_of(NodeId::leaf_node(d.name)));
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0], g.index_of(NodeId::env_node(d.mode)));
  }
  // Parents always precede their children, so the graph is acyclic.
  for (std::size_t n = 0; n < g.size(); ++n) {
    for (std::size_t p : g.parents(n)) EXPECT_LT(p, n);
  }
}

TEST(Hierarchy, SingleDatasetTenNodes) {
  std::mt19937_64 rng(2);
  std::vector<Dataset> ds{oracle::random_dataset(rng, "only", CollectionMode::HealthWorker,
                                                 20, Role::Target)};
  EXPECT_EQ(build_hierarchy(ds).size(), 10u);
}

TEST(Hierarchy, WithoutPopulationNodes) {
  std::mt19937_64 rng(3);
  const auto ds = oracle::random_bundle(rng);
  const HierarchyGraph g = build_hierarchy(ds, false);
  EXPECT_EQ(g.size(), 7u);
  EXPECT_FALSE(g.has_population_nodes());
  const std::size_t root = g.index_of(NodeId::root());
  for (CollectionMode c : kCollectionModes) {
    auto p = g.parents(g.index_of(NodeId::env_node(c)));
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0], root);
  }
}

TEST(Hierarchy, DuplicateNamesRejected) {
  std::mt19937_64 rng(4);
  std::vector<Dataset> ds{
      oracle::random_dataset(rng, "a", CollectionMode::HealthWorker, 5, Role::Target),
      oracle::random_dataset(rng, "a", CollectionMode::HealthWorker, 5, Role::Source)};
  EXPECT_THROW(build_hierarchy(ds), std::invalid_argument);
  EXPECT_THROW(build_hierarchy(std::vector<Dataset>{}), std::invalid_argument);
}

TEST(Centers, EmptyPoolIsHalf) {
  std::vector<Dataset> ds{{"t", CollectionMode::CitizenScience, Role::Target,
                           {{SymptomVector(1, 1, 0, 0), AgeGroup::A16_44,
                             Gender::Female, true}}}};
  const HierarchyGraph g = build_hierarchy(ds);
  const PriorCenters c = empirical_centers(g, ds);
  for (double v : c[g.index_of(NodeId::age_node(AgeGroup::A0_4))]) EXPECT_DOUBLE_EQ(v, 0.5);
  for (double v : c[g.index_of(NodeId::gender_node(Gender::Male))]) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(Centers, RootOnTenRecordCorpus) {
  // fever: present in rows 0-5, positives among them rows 0,1,2,3 -> (4+1)/(6+2).
  // cough: rows 0,6,7 present, positives 0,6 -> (2+1)/(3+2).
  // muscle: none -> 0.5. sore: rows 8,9, positives none -> 1/4.
  std::vector<Record> rs{
      {SymptomVector(1, 1, 0, 0), AgeGroup::A0_4, Gender::Male, true},
      {SymptomVector(1, 0, 0, 0), AgeGroup::A5_15, Gender::Male, true},
      {SymptomVector(1, 0, 0, 0), AgeGroup::A5_15, Gender::Female, true},
      {SymptomVector(1, 0, 0, 0), AgeGroup::A16_44, Gender::Female, true},
      {SymptomVector(1, 0, 0, 0), AgeGroup::A16_44, Gender::Female, false},
      {SymptomVector(1, 0, 0, 0), AgeGroup::A45_64, Gender::Male, false},
      {SymptomVector(0, 1, 0, 0), AgeGroup::A45_64, Gender::Male, true},
      {SymptomVector(0, 1, 0, 0), AgeGroup::A65plus, Gender::Female, false},
      {SymptomVector(0, 0, 0, 1), AgeGroup::A65plus, Gender::Female, false},
      {SymptomVector(0, 0, 0, 1), AgeGroup::A65plus, Gender::Male, false}};
  std::vector<Dataset> ds{{"a", CollectionMode::CitizenScience, Role::Target,
                           {rs.begin(), rs.begin() + 5}},
                          {"b", CollectionMode::HealthWorker, Role::Source,
                           {rs.begin() + 5, rs.end()}}};
  const HierarchyGraph g = build_hierarchy(ds);
  const ParamVector root = empirical_centers(g, ds)[g.index_of(NodeId::root())];
  EXPECT_DOUBLE_EQ(root[0], 5.0 / 8.0);
  EXPECT_DOUBLE_EQ(root[1], 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(root[2], 0.5);
  EXPECT_DOUBLE_EQ(root[3], 0.25);
}

TEST(Centers, RecountEveryNode) {
  std::mt19937_64 rng(5);
  auto ds = oracle::random_bundle(rng, 80);
  for (std::size_t i = 0; i < ds[0].records.size(); i += 3) ds[0].records[i].label.reset();
  const HierarchyGraph g = build_hierarchy(ds);
  const PriorCenters c = empirical_centers(g, ds);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const NodeId& id = g.node(n);
    const auto slice = pooled(ds, [&](const Dataset& d, const Record& r) {
      switch (id.kind) {
        case NodeKind::Root: return true;
        case NodeKind::Age: return r.age == id.age;
        case NodeKind::Gender: return r.gender == id.gender;
        case NodeKind::Env: return d.mode == id.mode;
        case NodeKind::Leaf: return d.name == id.dataset;
      }
      return false;
    });
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_DOUBLE_EQ(c[n][j], oracle::ppv_count(slice, j, 1.0)) << id.label();
      EXPECT_GE(c[n][j], 0.0);
      EXPECT_LE(c[n][j], 1.0);
    }
  }
}

TEST(Centers, AddingRecordTouchesOnlyItsFiveNodes) {
  std::mt19937_64 rng(6);
  auto ds = oracle::random_bundle(rng, 40);
  const HierarchyGraph g = build_hierarchy(ds);
  const PriorCenters before = empirical_centers(g, ds);
  const Record extra{SymptomVector(1, 1, 1, 1), AgeGroup::A65plus, Gender::Female, true};
  ds[2].records.push_back(extra);
  const PriorCenters after = empirical_centers(g, ds);
  const std::set<std::size_t> touched{
      g.index_of(NodeId::root()), g.index_of(NodeId::age_node(AgeGroup::A65plus)),
      g.index_of(NodeId::gender_node(Gender::Female)),
      g.index_of(NodeId::env_node(ds[2].mode)), g.index_of(NodeId::leaf_node(ds[2].name))};
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (touched.count(n)) {
      EXPECT_NE(before[n], after[n]) << g.node(n).label();
    } else {
      EXPECT_EQ(before[n], after[n]) << g.node(n).label();
    }
  }
}

TEST(Components, LookupAndUniqueness) {
  std::mt19937_64 rng(7);
  auto ds = oracle::random_bundle(rng, 10);
  ds[0].name = "goviral";
  const HierarchyGraph g = build_hierarchy(ds);
  const SubgroupComponents c =
      hierarchy_subgroup_components(g, {AgeGroup::A16_44, Gender::Female}, "goviral");
  EXPECT_EQ(c.leaf, g.index_of(NodeId::leaf_node("goviral")));
  EXPECT_EQ(c.age, g.index_of(NodeId::age_node(AgeGroup::A16_44)));
  EXPECT_EQ(c.gender, g.index_of(NodeId::gender_node(Gender::Female)));
  EXPECT_THROW(hierarchy_subgroup_components(g, SubgroupKey{}, "nope"),
               std::out_of_range);

  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
  for (const Dataset& d : ds) {
    for (SubgroupKey k : all_subgroups()) {
      const auto s = hierarchy_subgroup_components(g, k, d.name);
      EXPECT_EQ(g.node(s.leaf).kind, NodeKind::Leaf);
      EXPECT_EQ(g.node(s.age).age, k.age);
      EXPECT_EQ(g.node(s.gender).gender, k.gender);
      seen.insert({s.leaf, s.age, s.gender});
    }
  }
  EXPECT_EQ(seen.size(), 10u * ds.size());
}
