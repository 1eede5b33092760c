#include <gtest/gtest.h>

#include <cavspin/cavspin.hpp>

using namespace cavspin;

TEST(Chain, OpenAndPeriodic) {
  EXPECT_EQ(chain(2, false).edges(), (std::vector<Edge>{{0, 1}}));
  const CavityGraph ring = chain(4, true);
  EXPECT_EQ(ring.edges().size(), 4u);
  EXPECT_NE(std::find(ring.edges().begin(), ring.edges().end(), Edge{0, 3}), ring.edges().end());  // the (3,0) bond
  EXPECT_EQ(chain(3, true).edges(), (std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}}));
  EXPECT_EQ(chain(7, false).edges().size(), 6u);
}

TEST(Chain, RejectsInvalidSizes) {
  EXPECT_THROW(chain(1, false), std::invalid_argument);
  EXPECT_THROW(chain(2, true), std::invalid_argument);
}

TEST(EdgeList, CanonicalizesAndValidates) {
  EXPECT_EQ(CavityGraph::from_edge_list(2, {{1, 0}}).edges(), (std::vector<Edge>{{0, 1}}));
  EXPECT_THROW(CavityGraph::from_edge_list(3, {{0, 1}, {1, 0}}), std::invalid_argument);
  EXPECT_THROW(CavityGraph::from_edge_list(3, {{1, 1}}), std::invalid_argument);
  EXPECT_THROW(CavityGraph::from_edge_list(3, {{0, 3}}), std::invalid_argument);
  EXPECT_THROW(CavityGraph::from_edge_list(0, {}), std::invalid_argument);
}

TEST(EdgeList, SixSiteWheel) {
  const CavityGraph wheel = CavityGraph::from_edge_list(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}});
  EXPECT_EQ(wheel, chain(6, true));
}

TEST(EdgeList, CanonicalFormIsIdempotent) {
  const CavityGraph g = CavityGraph::from_edge_list(5, {{4, 2}, {0, 3}, {1, 0}, {3, 2}});
  EXPECT_EQ(CavityGraph::from_edge_list(g.n_cavities(), g.edges()), g);
  EXPECT_NE(g, CavityGraph::from_edge_list(6, g.edges()));
}

TEST(SingleCavity, HasNoEdges) {
  EXPECT_EQ(single_cavity().n_cavities(), 1);
  EXPECT_TRUE(single_cavity().edges().empty());
}
