#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "spinclone/errors.hpp"
#include "spinclone/topology.hpp"

using namespace spinclone;

namespace {

std::set<std::pair<std::size_t, std::size_t>> adjacency(const SpinNetwork& net) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (const auto& e : net.edges()) out.insert(std::minmax(e.i, e.j));
  return out;
}

}  // namespace

TEST(Star, TwoLeaves) {
  const SpinNetwork s = star(2);
  EXPECT_EQ(s.n_sites(), 3u);
  EXPECT_EQ(adjacency(s), (std::set<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 2}}));
  EXPECT_EQ(s.input_sites(), std::vector<std::size_t>{0});
  EXPECT_EQ(s.output_sites(), (std::vector<std::size_t>{1, 2}));
}

TEST(Star, CountsAndDegenerateCases) {
  EXPECT_EQ(star(7).n_sites(), 8u);
  EXPECT_EQ(star(7).edges().size(), 7u);
  EXPECT_EQ(star(1).n_sites(), 2u);
  EXPECT_EQ(star(1).edges().size(), 1u);
  EXPECT_THROW(star(0), std::invalid_argument);
}

TEST(Star, CouplingIsStoredPerEdge) {
  for (const auto& e : star(4, 0.3).edges()) EXPECT_DOUBLE_EQ(e.coupling, 0.3);
}

TEST(Tree, PaperSizes) {
  const SpinNetwork t22 = tree(2, 2);
  EXPECT_EQ(t22.n_sites(), 15u);
  EXPECT_EQ(t22.output_sites().size(), 8u);
  const SpinNetwork t32 = tree(3, 2);
  EXPECT_EQ(t32.n_sites(), 40u);
  EXPECT_EQ(t32.output_sites().size(), 27u);
}

TEST(Tree, ZeroLevelsIsTheStar) {
  EXPECT_EQ(adjacency(tree(2, 0)), adjacency(star(2)));
  EXPECT_EQ(tree(2, 0).output_sites(), star(2).output_sites());
}

TEST(Tree, LeafCountAndBranching) {
  for (std::size_t k : {2u, 3u}) {
    for (std::size_t j : {0u, 1u, 2u}) {
      const SpinNetwork t = tree(k, j);
      EXPECT_EQ(t.output_sites().size(), static_cast<std::size_t>(std::pow(k, j + 1)));
      EXPECT_EQ(t.n_sites(), (static_cast<std::size_t>(std::pow(k, j + 2)) - 1) / (k - 1));
      EXPECT_EQ(tree_site_count(k, j), t.n_sites());
      std::vector<std::size_t> degree(t.n_sites(), 0);
      for (const auto& e : t.edges()) {
        ++degree[e.i];
        ++degree[e.j];
      }
      const std::set<std::size_t> leaves(t.output_sites().begin(), t.output_sites().end());
      for (std::size_t s = 0; s < t.n_sites(); ++s) {
        const std::size_t children = degree[s] - (s == 0 ? 0 : 1);
        EXPECT_EQ(children, leaves.count(s) ? 0u : k) << "site " << s;
      }
    }
  }
}

TEST(Tree, Rejections) {
  EXPECT_THROW(tree(1, 2), std::invalid_argument);
  EXPECT_THROW(tree(2, 2, 1.0, 10), ResourceExhausted);
  EXPECT_THROW(tree(3, 4), ResourceExhausted);  // 364 sites
}

TEST(Bipartite, Counting) {
  EXPECT_EQ(bipartite(2, 3).n_sites(), 5u);
  EXPECT_EQ(bipartite(2, 3).edges().size(), 6u);
  EXPECT_EQ(bipartite(4, 5).n_sites(), 9u);
  EXPECT_EQ(bipartite(4, 5).edges().size(), 20u);
}

TEST(Bipartite, NoEdgesWithinASide) {
  const SpinNetwork net = bipartite(3, 4);
  for (const auto& e : net.edges()) EXPECT_NE(e.i < 3, e.j < 3);
  EXPECT_EQ(net.input_sites(), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(net.output_sites(), (std::vector<std::size_t>{3, 4, 5, 6}));
}

TEST(Bipartite, OneInputIsAStar) {
  for (std::size_t m = 1; m <= 6; ++m) {
    if (m == 1) {
      EXPECT_THROW(bipartite(1, 1), std::invalid_argument);
      continue;
    }
    EXPECT_EQ(adjacency(bipartite(1, m)), adjacency(star(m)));
  }
}

TEST(Bipartite, DirectionEnforced) {
  EXPECT_THROW(bipartite(3, 3), std::invalid_argument);
  EXPECT_THROW(bipartite(4, 2), std::invalid_argument);
  EXPECT_THROW(bipartite(0, 2), std::invalid_argument);
}

TEST(Validation, RejectsMalformedGraphs) {
  EXPECT_THROW(from_edge_list(3, {{0, 3, 1.0}}, {0}, {1}), std::invalid_argument);
  EXPECT_THROW(from_edge_list(3, {{1, 1, 1.0}}, {0}, {1}), std::invalid_argument);
  EXPECT_THROW(from_edge_list(3, {{0, 1, 1.0}, {1, 0, 1.0}}, {0}, {1}), std::invalid_argument);
  EXPECT_THROW(from_edge_list(3, {{0, 1, 1.0}}, {0}, {1}, 0.0, 1.5), std::invalid_argument);
  EXPECT_THROW(from_edge_list(3, {{0, 1, 1.0}}, {0, 0}, {1}), std::invalid_argument);
  EXPECT_THROW(from_edge_list(64, {}, {0}, {1}), ResourceExhausted);
}

TEST(Jitter, ZeroWidthIsIdentity) {
  const SpinNetwork net = bipartite(2, 4);
  EXPECT_EQ(jitter(net, 0.0, 11), net);
}

TEST(Jitter, StaysInInterval) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    for (const auto& e : jitter(star(2), 0.1, seed).edges()) {
      EXPECT_GE(e.coupling, 0.9);
      EXPECT_LE(e.coupling, 1.1);
    }
  }
}

TEST(Jitter, DeterministicAndStructurePreserving) {
  const SpinNetwork net = tree(2, 1);
  const SpinNetwork a = jitter(net, 0.1, 42);
  const SpinNetwork b = jitter(net, 0.1, 42);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, jitter(net, 0.1, 43));
  EXPECT_EQ(adjacency(a), adjacency(net));
  EXPECT_EQ(a.input_sites(), net.input_sites());
  EXPECT_EQ(a.output_sites(), net.output_sites());
  EXPECT_THROW(jitter(net, 1.0, 1), std::invalid_argument);
}

TEST(Connectivity, BuiltGraphsAreConnectedFromEveryInput) {
  const std::vector<SpinNetwork> nets = {star(1), star(5), tree(2, 2), tree(3, 2), bipartite(2, 7), bipartite(4, 5)};
  for (const auto& net : nets) {
    for (std::size_t in : net.input_sites()) EXPECT_TRUE(is_connected(net, in));
  }
  EXPECT_FALSE(is_connected(from_edge_list(3, {{0, 1, 1.0}}, {0}, {1, 2})));
}

TEST(TextFormat, RoundTrip) {
  const SpinNetwork net = jitter(bipartite(2, 3), 0.1, 9).with_field(0.37).with_anisotropy(0.25);
  const std::string text = to_text(net);
  EXPECT_EQ(text.rfind("sites 5 lambda 0.25\n", 0), 0u);
  EXPECT_NE(text.find("field 4 0.37"), std::string::npos);
  EXPECT_EQ(parse_network(text), net);
}

TEST(TextFormat, RejectsGarbage) {
  EXPECT_THROW(parse_network(""), std::invalid_argument);
  EXPECT_THROW(parse_network("edge 0 1 1\n"), std::invalid_argument);
  EXPECT_THROW(parse_network("sites 2 lambda 0\nbond 0 1 1\n"), std::invalid_argument);
  EXPECT_THROW(parse_network("sites 2 lambda 0\nedge 0 5 1\n"), std::invalid_argument);
}
