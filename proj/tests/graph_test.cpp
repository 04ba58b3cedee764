// Copyright 2026 The causalkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <set>

#include "causalkit/dot.hpp"
#include "causalkit/graph.hpp"
#include "causalkit/stats.hpp"
#include "test_util.hpp"

namespace causalkit {
namespace {

using testing::E;
using testing::make_graph;

std::vector<std::string> ids(const Linearization& lin) {
  std::vector<std::string> out;
  for (const auto& n : lin.nodes) out.push_back(n.id);
  return out;
}

std::vector<std::string> messages(const ValidationReport& r) {
  std::vector<std::string> out;
  for (const auto& v : r) out.push_back(v.message);
  return out;
}

TEST(Validate, WellFormedGraphHasNoViolations) {
  EXPECT_TRUE(validate(make_graph({{"a", "b"}})).empty());
}

TEST(Validate, DanglingTail) {
  CausalGraph g("g");
  g.add_node({"a", "a", NodeKind::Event, {}});
  g.add_edge({"a", "x", Relation::Enables, {}, false});
  EXPECT_EQ(messages(validate(g)), std::vector<std::string>{"dangling tail x"});
}

TEST(Validate, IncompatibleSubRelation) {
  CausalGraph g = make_graph({}, {"a", "b"});
  g.add_edge({"a", "b", Relation::Enables, SubRelation::Ends, false});
  EXPECT_EQ(messages(validate(g)),
            std::vector<std::string>{"incompatible sub-relation"});
}

TEST(Validate, SharedSubRelationsFitBothRelations) {
  for (SubRelation s : {SubRelation::WithoutEffect, SubRelation::Unknown}) {
    EXPECT_TRUE(is_compatible(Relation::Enables, s));
    EXPECT_TRUE(is_compatible(Relation::Blocks, s));
  }
  EXPECT_TRUE(is_compatible(Relation::Blocks, SubRelation::PreventsAction));
  EXPECT_FALSE(is_compatible(Relation::Blocks, SubRelation::Begins));
}

TEST(Validate, DuplicateTripleSelfLoopAndDuplicateNode) {
  CausalGraph g = make_graph({{"a", "b"}, {"a", "b"}});
  g.add_edge({"a", "a", Relation::Blocks, {}, false});
  g.add_node({"a", "again", NodeKind::Event, {}});
  const auto m = messages(validate(g));
  const std::set<std::string> got(m.begin(), m.end());
  EXPECT_TRUE(got.count("duplicate triple"));
  EXPECT_TRUE(got.count("self-loop a"));
  EXPECT_TRUE(got.count("duplicate node id a"));
}

TEST(Validate, SameEndpointsDifferentRelationIsNotDuplicate) {
  EXPECT_TRUE(validate(make_graph({{"a", "b"}, {"a", "b", Relation::Blocks}})).empty());
}

TEST(EdgeScalar, SignedUnits) {
  EXPECT_EQ(edge_scalar(Relation::Enables), 1.0);
  EXPECT_EQ(edge_scalar(Relation::Blocks), -1.0);
  EXPECT_EQ(edge_scalar("enables"), 1.0);
  EXPECT_EQ(edge_scalar("BLOCKS"), -1.0);
  EXPECT_EQ(edge_scalar(Relation::Enables), -edge_scalar(Relation::Blocks));
}

TEST(EdgeScalar, UnknownRelationNamesTheString) {
  try {
    edge_scalar("CAUSES");
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("CAUSES"), std::string::npos);
  }
}

TEST(RelationLabel, ParsesSubRelationSuffix) {
  auto [rel, sub] = parse_relation_label("Blocks-Prevents action");
  EXPECT_EQ(rel, Relation::Blocks);
  ASSERT_TRUE(sub);
  EXPECT_EQ(*sub, SubRelation::PreventsAction);
  EXPECT_FALSE(parse_relation_label("ENABLES").second);
  EXPECT_THROW(parse_relation_label("ENABLES-SOMETIMES"), Error);
}

TEST(BfsLinearize, StarFansOutLexicographically) {
  const auto g = make_graph({{"a", "d"}, {"a", "b"}, {"a", "c"}});
  EXPECT_EQ(ids(bfs_linearize(g)), (std::vector<std::string>{"a", "b", "c", "d"}));
}

TEST(BfsLinearize, RootlessCycleStartsAtSmallestId) {
  const auto g = make_graph({{"b", "a"}, {"a", "b"}});
  const auto lin = bfs_linearize(g);
  EXPECT_EQ(ids(lin), (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(lin.edges.size(), 2u);
  EXPECT_EQ(lin.edges[0].head, "a");
  EXPECT_EQ(lin.edges[1].head, "b");
}

TEST(BfsLinearize, ComponentsVisitedOneRootAtATime) {
  const auto g = make_graph({{"c", "d"}, {"a", "b"}});
  EXPECT_EQ(ids(bfs_linearize(g)), (std::vector<std::string>{"a", "b", "c", "d"}));
}

TEST(BfsLinearize, UnreachableCycleAppendedAfterRoots) {
  // z is the only root; {b, c} form a cycle nothing reaches.
  const auto g = make_graph({{"z", "y"}, {"b", "c"}, {"c", "b"}});
  EXPECT_EQ(ids(bfs_linearize(g)), (std::vector<std::string>{"z", "y", "b", "c"}));
}

TEST(BfsLinearize, PermutationOfNodesAndCanonicalUnderStorageOrder) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = testing::random_graph(rng, 1 + rng.uniform_index(9), 0.3);
    const auto lin = bfs_linearize(g);
    ASSERT_EQ(lin.nodes.size(), g.node_count());
    std::set<std::string> seen;
    for (const auto& n : lin.nodes) EXPECT_TRUE(seen.insert(n.id).second);
    EXPECT_EQ(lin.edges.size(), g.edge_count());

    // Shuffle storage but keep ids.
    std::vector<std::size_t> order(g.node_count());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    CausalGraph shuffled(g.id());
    for (std::size_t i : order) shuffled.add_node(g.nodes()[i]);
    auto edges = g.edges();
    rng.shuffle(edges);
    for (const auto& e : edges) shuffled.add_edge(e);
    const auto lin2 = bfs_linearize(shuffled);
    EXPECT_EQ(ids(lin), ids(lin2));
    EXPECT_EQ(lin.edges, lin2.edges);
  }
}

TEST(GraphStats, DirectedTriangle) {
  const auto s = graph_stats(make_graph({{"a", "b"}, {"b", "c"}, {"c", "a"}}));
  EXPECT_EQ(s.node_count, 3u);
  EXPECT_EQ(s.edge_count, 3u);
  EXPECT_DOUBLE_EQ(s.mean_degree, 2.0);
  EXPECT_DOUBLE_EQ(s.mean_clustering, 1.0);
  EXPECT_DOUBLE_EQ(s.transitivity, 1.0);
}

TEST(GraphStats, PathHasNoClustering) {
  const auto s = graph_stats(make_graph({{"a", "b"}, {"b", "c", Relation::Blocks}}));
  EXPECT_EQ(s.mean_clustering, 0.0);
  EXPECT_EQ(s.transitivity, 0.0);
  EXPECT_EQ(s.enables_count, 1u);
  EXPECT_EQ(s.blocks_count, 1u);
}

TEST(GraphStats, AntiparallelEdgesCollapseInUndirectedView) {
  const auto s = graph_stats(make_graph({{"a", "b"}, {"b", "a"}}));
  EXPECT_EQ(s.edge_count, 2u);
  EXPECT_DOUBLE_EQ(s.mean_degree, 1.0);
}

TEST(GraphStats, EmptyGraphRejected) {
  EXPECT_THROW(graph_stats(CausalGraph("empty")), Error);
}

TEST(GraphStats, InvariantsOnRandomGraphs) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testing::random_graph(rng, 1 + rng.uniform_index(10), 0.35);
    const auto s = graph_stats(g);
    EXPECT_EQ(s.enables_count + s.blocks_count, s.edge_count);
    EXPECT_GE(s.transitivity, 0.0);
    EXPECT_LE(s.transitivity, 1.0);
    EXPECT_GE(s.mean_clustering, 0.0);
    EXPECT_LE(s.mean_clustering, 1.0);
  }
}

TEST(CorpusStats, MeansAndPopulationStd) {
  const std::vector<CausalGraph> graphs = {make_graph({{"a", "b"}}),
                                           make_graph({{"a", "b"}, {"b", "c"}, {"c", "d"}})};
  const auto s = corpus_stats(graphs);
  EXPECT_DOUBLE_EQ(s.nodes.mean, 3.0);
  EXPECT_DOUBLE_EQ(s.nodes.max, 4.0);
  EXPECT_DOUBLE_EQ(s.nodes.stddev, 1.0);
  EXPECT_DOUBLE_EQ(s.edges.mean, 2.0);
}

TEST(SalientSubgraph, KeepsFlaggedEdgesAndEndpoints) {
  CausalGraph g = make_graph({}, {"a", "b", "c", "d"});
  g.add_edge({"a", "b", Relation::Enables, {}, true});
  g.add_edge({"b", "c", Relation::Blocks, {}, false});
  g.add_edge({"c", "d", Relation::Enables, {}, true});
  const auto s = salient_subgraph(g);
  EXPECT_EQ(s.edge_count(), 2u);
  EXPECT_EQ(s.node_count(), 4u);
  EXPECT_TRUE(validate(s).empty());
}

TEST(SalientSubgraph, NoneSalientYieldsEmptyGraph) {
  const auto s = salient_subgraph(make_graph({{"a", "b"}, {"b", "c"}}));
  EXPECT_EQ(s.edge_count(), 0u);
  EXPECT_EQ(s.node_count(), 0u);
}

TEST(SalientSubgraph, AllSalientIsIdentityAndIdempotent) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    CausalGraph g = testing::random_graph(rng, 2 + rng.uniform_index(6), 0.5);
    const auto once = salient_subgraph(g);
    EXPECT_EQ(salient_subgraph(once), once);
  }
  CausalGraph all = make_graph({}, {"a", "b", "c"});
  all.add_edge({"a", "b", Relation::Enables, {}, true});
  all.add_edge({"b", "c", Relation::Enables, {}, true});
  EXPECT_EQ(salient_subgraph(all), all);
}

CausalGraph rebels_graph() {
  CausalGraph g("rebels");
  g.add_node({"rebels", "rebels", NodeKind::Participant, {}});
  g.add_node({"leader", "leader", NodeKind::Participant, {}});
  g.add_node({"ousting", "rebels ousted the leader", NodeKind::Event, {}});
  g.add_node({"conflict", "conflict", NodeKind::Event, {}});
  g.add_node({"end", "conflict ended", NodeKind::Event, {}});
  g.add_edge({"rebels", "ousting", Relation::Enables, {}, false});
  g.add_edge({"rebels", "leader", Relation::Blocks, {}, false});
  g.add_edge({"ousting", "conflict", Relation::Blocks, {}, false});
  g.add_edge({"leader", "conflict", Relation::Enables, {}, false});
  g.add_edge({"ousting", "end", Relation::Enables, {}, false});
  return g;
}

TEST(ToDot, EmptyGraphSkeleton) {
  EXPECT_EQ(to_dot(CausalGraph("g")), "digraph \"g\" {\n}\n");
}

TEST(ToDot, ParticipantsStyledAndBlocksDashed) {
  const std::string dot = to_dot(rebels_graph());
  std::size_t nodes = 0, participants = 0, dashed = 0;
  std::istringstream in(dot);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("[label=") != std::string::npos &&
        line.find("->") == std::string::npos) {
      ++nodes;
      if (line.find("#f4a460") != std::string::npos) ++participants;
    }
    if (line.find("style=dashed") != std::string::npos) ++dashed;
  }
  EXPECT_EQ(nodes, 5u);
  EXPECT_EQ(participants, 2u);
  EXPECT_EQ(dashed, 2u);
  EXPECT_EQ(dot, to_dot(rebels_graph()));
}

TEST(ToDot, EscapesQuotes) {
  CausalGraph g("q");
  g.add_node({"say \"hi\"", "x\\y", NodeKind::Event, {}});
  const std::string dot = to_dot(g);
  EXPECT_NE(dot.find("\"say \\\"hi\\\"\""), std::string::npos);
  EXPECT_NE(dot.find("\"x\\\\y\""), std::string::npos);
}

TEST(ToDot, IndependentOfStorageOrder) {
  const CausalGraph g = rebels_graph();
  CausalGraph r("rebels");
  for (auto it = g.nodes().rbegin(); it != g.nodes().rend(); ++it) r.add_node(*it);
  for (auto it = g.edges().rbegin(); it != g.edges().rend(); ++it) r.add_edge(*it);
  EXPECT_EQ(to_dot(g), to_dot(r));
}

TEST(ValidGraphs, EveryOperationSucceeds) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = testing::random_graph(rng, 1 + rng.uniform_index(8), 0.4);
    ASSERT_TRUE(validate(g).empty());
    EXPECT_NO_THROW(bfs_linearize(g));
    EXPECT_NO_THROW(graph_stats(g));
    EXPECT_NO_THROW(salient_subgraph(g));
    EXPECT_NO_THROW(to_dot(g));
  }
}

}  // namespace
}  // namespace causalkit
