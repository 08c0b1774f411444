#include <gtest/gtest.h>

#include <set>

#include "hubbard/io.hpp"
#include "hubbard/lattice.hpp"

using namespace hubbard;

namespace {

std::vector<double> cell(std::initializer_list<double> c, int repeats) {
  std::vector<double> out;
  for (int r = 0; r < repeats; ++r) out.insert(out.end(), c);
  return out;
}

}  // namespace

TEST(ImpurityChain, TwoNeighbouringImpurities) {
  const auto s = make_impurity_chain(10, 1, 4, 3, 3, {3, 4}, 8, Boundary::periodic);
  EXPECT_EQ(s.potential, (std::vector<double>{0, 0, 0, 8, 8, 0, 0, 0, 0, 0}));
  EXPECT_EQ(s.impurity_sites(), (std::vector<int>{3, 4}));
  EXPECT_DOUBLE_EQ(s.filling(), 0.6);
}

TEST(ImpurityChain, ZeroStrengthOrNoSitesIsHomogeneous) {
  const auto hom = make_uniform_chain(10, 1, 4, 3, 3, Boundary::periodic);
  EXPECT_EQ(make_impurity_chain(10, 1, 4, 3, 3, {3, 4}, 0, Boundary::periodic), hom);
  EXPECT_EQ(make_impurity_chain(10, 1, 4, 3, 3, {}, 8, Boundary::periodic), hom);
}

TEST(ImpurityChain, RejectsSiteOutOfRange) {
  EXPECT_THROW((void)make_impurity_chain(10, 1, 4, 3, 3, {10}, 8, Boundary::periodic), ValidationError);
  EXPECT_THROW((void)make_impurity_chain(10, 1, 4, 3, 3, {-1}, 8, Boundary::periodic), ValidationError);
}

TEST(ChainSpec, ValidateEnforcesInvariants) {
  auto ok = make_uniform_chain(4, 1, 2, 1, 1, Boundary::open);
  EXPECT_NO_THROW(ok.validate());
  auto bad = ok;
  bad.t = 0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = ok;
  bad.U = -1;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = ok;
  bad.potential[2] = -0.5;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = ok;
  bad.potential.pop_back();
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = ok;
  bad.n_up = bad.n_down = 0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = ok;
  bad.n_up = bad.n_down = 4;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Superlattice, CellsFromNotation) {
  const auto sl1122 = make_superlattice_chain(12, 1, 4, 3, 3, SuperlatticePattern::from_notation({1, 1, 2, 2}), 8,
                                              Boundary::periodic);
  EXPECT_EQ(sl1122.potential, cell({8, 0, 8, 8, 0, 0}, 2));
  const auto sl12 =
      make_superlattice_chain(12, 1, 4, 3, 3, SuperlatticePattern::from_notation({1, 2}), 8, Boundary::periodic);
  EXPECT_EQ(sl12.potential, cell({8, 0, 0}, 4));
  const auto sl1434 = make_superlattice_chain(12, 1, 4, 3, 3, SuperlatticePattern::from_notation({1, 4, 3, 4}), 8,
                                              Boundary::periodic);
  EXPECT_EQ(sl1434.potential, (std::vector<double>{8, 0, 0, 0, 0, 8, 8, 8, 0, 0, 0, 0}));
}

TEST(Superlattice, LabelsAndCellStrings) {
  const auto p = SuperlatticePattern::from_notation({1, 1, 2, 2});
  EXPECT_EQ(p.label(), "SL[1,1,2,2]");
  EXPECT_EQ(p.cell_string(), "V0VV00");
  EXPECT_EQ(SuperlatticePattern::from_notation({1, 2}).cell_string(), "V00");
  EXPECT_EQ(SuperlatticePattern::from_notation({1, 4, 3, 4}).cell_string(), "V0000VVV0000");
}

TEST(Superlattice, IndivisibleLengthNamesBothLengths) {
  try {
    (void)make_superlattice_chain(10, 1, 4, 3, 3, SuperlatticePattern::from_notation({1, 2}), 8, Boundary::periodic);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("10"), std::string::npos) << msg;
    EXPECT_NE(msg.find("3"), std::string::npos) << msg;
  }
}

TEST(Superlattice, RejectsMalformedNotation) {
  EXPECT_THROW((void)SuperlatticePattern::from_notation({1, 2, 3}), ValidationError);
  EXPECT_THROW((void)SuperlatticePattern::from_notation({}), ValidationError);
  EXPECT_THROW((void)SuperlatticePattern::from_notation({-1, 2}), ValidationError);
}

TEST(Superlattice, PeriodicTilingAndImpurityArithmetic) {
  const std::vector<std::vector<int>> patterns{{1, 1, 2, 2}, {1, 2}, {1, 3}, {1, 5}, {2, 4}, {1, 1, 1, 3}, {1, 4, 3, 4}};
  for (const auto& n : patterns) {
    const auto p = SuperlatticePattern::from_notation(n);
    const int c = p.cell_length();
    const int L = 12;
    ASSERT_EQ(L % c, 0);
    const auto s = make_superlattice_chain(L, 1, 4, 3, 3, p, 8, Boundary::periodic);
    for (int i = 0; i < L; ++i) EXPECT_EQ(s.potential[static_cast<std::size_t>(i)], s.potential[static_cast<std::size_t>(i % c)]);
    const int a = n[0];
    const int b = n.size() == 4 ? n[2] : 0;
    EXPECT_EQ(s.impurity_count(), L * (a + b) / c) << p.label();
  }
}

TEST(Blocks, ContiguousWindows) {
  EXPECT_EQ(enumerate_blocks(10, 1, BlockMode::contiguous).size(), 10u);
  const auto w = enumerate_blocks(4, 2, BlockMode::contiguous, Boundary::periodic);
  ASSERT_EQ(w.size(), 4u);
  EXPECT_EQ(w[0].sites, (std::vector<int>{0, 1}));
  EXPECT_EQ(w[1].sites, (std::vector<int>{1, 2}));
  EXPECT_EQ(w[2].sites, (std::vector<int>{2, 3}));
  EXPECT_EQ(w[3].sites, (std::vector<int>{0, 3}));
  EXPECT_EQ(enumerate_blocks(6, 2, BlockMode::contiguous, Boundary::open).size(), 5u);
}

TEST(Blocks, AllSubsets) {
  EXPECT_EQ(enumerate_blocks(6, 2, BlockMode::all_subsets).size(), 15u);
  EXPECT_EQ(enumerate_blocks(8, 4, BlockMode::all_subsets).size(), 70u);
}

TEST(Blocks, PeriodicWindowsClosedUnderTranslation) {
  for (int L = 3; L <= 10; ++L)
    for (int x = 1; x < L; ++x) {
      std::set<std::vector<int>> set;
      for (const auto& b : enumerate_blocks(L, x, BlockMode::contiguous)) set.insert(b.sites);
      for (const auto& s : set) {
        std::vector<int> shifted;
        for (int i : s) shifted.push_back((i + 1) % L);
        std::sort(shifted.begin(), shifted.end());
        EXPECT_TRUE(set.count(shifted)) << "L=" << L << " x=" << x;
      }
    }
}

TEST(Blocks, RejectsBadSizesAndSites) {
  EXPECT_THROW((void)enumerate_blocks(5, 0, BlockMode::contiguous), ValidationError);
  EXPECT_THROW((void)enumerate_blocks(5, 5, BlockMode::contiguous), ValidationError);
  EXPECT_THROW((void)make_block({}, 5), ValidationError);
  EXPECT_THROW((void)make_block({0, 1, 2, 3, 4}, 5), ValidationError);
  EXPECT_THROW((void)make_block({5}, 5), ValidationError);
  EXPECT_EQ(make_block({4, 3, 4}, 10).sites, (std::vector<int>{3, 4}));
}

TEST(Blocks, InterfaceSites) {
  const auto b = make_block({3, 4}, 10);
  EXPECT_EQ(interface_sites(10, Boundary::periodic, b), (std::vector<int>{2, 5}));
  EXPECT_EQ(interface_sites(10, Boundary::periodic, make_block({0, 9}, 10)), (std::vector<int>{1, 8}));
  EXPECT_EQ(interface_sites(10, Boundary::open, make_block({0, 1}, 10)), (std::vector<int>{2}));
  EXPECT_EQ(interface_sites(10, Boundary::periodic, make_block({2, 5}, 10)), (std::vector<int>{1, 3, 4, 6}));
  EXPECT_EQ(block_border_sites(10, Boundary::periodic, make_block({3, 4, 5}, 10)), (std::vector<int>{3, 5}));
}

TEST(Blocks, ImpurityOffsets) {
  const auto s = make_impurity_chain(10, 1, 4, 3, 3, {3, 4}, 8, Boundary::periodic);
  EXPECT_EQ(impurity_offset(s, make_block({5}, 10)), 0);
  EXPECT_EQ(impurity_offset(s, make_block({2}, 10)), 0);
  EXPECT_EQ(impurity_offset(s, make_block({6}, 10)), 1);
  EXPECT_EQ(impurity_offset(s, make_block({7}, 10)), 2);
  EXPECT_EQ(impurity_offset(s, make_block({8}, 10)), 3);
  EXPECT_EQ(impurity_offset(s, make_block({9}, 10)), 3);
  EXPECT_FALSE(impurity_offset(s, make_block({4, 5}, 10)).has_value());
  EXPECT_FALSE(impurity_offset(make_uniform_chain(10, 1, 4, 3, 3, Boundary::periodic), make_block({5}, 10)).has_value());
}

TEST(Config, ParsesExplicitAndStructuredPotentials) {
  const auto a = chain_config_from_json(json::parse(
      R"({"L": 4, "t": 1, "U": 2, "V": [0, 1, 0, 0], "boundary": "open", "N_up": 1, "N_down": 2})"));
  EXPECT_EQ(a.spec().potential, (std::vector<double>{0, 1, 0, 0}));
  EXPECT_EQ(a.spec().boundary, Boundary::open);

  const auto b = chain_config_from_json(
      json::parse(R"({"L": 10, "U": 4, "N_up": 3, "N_down": 3, "V": {"impurities": {"sites": [3, 4], "V": 8}}})"));
  EXPECT_EQ(b.spec(), make_impurity_chain(10, 1, 4, 3, 3, {3, 4}, 8, Boundary::periodic));

  const auto c = chain_config_from_json(
      json::parse(R"({"L": 12, "U": 4, "N_up": 3, "N_down": 3, "superlattice": {"pattern": [1, 2], "V": 8}})"));
  EXPECT_EQ(c.spec().potential, cell({8, 0, 0}, 4));
  EXPECT_EQ(c.potential.label(), "SL[1,2]");
}

TEST(Config, RoundTripsThroughJson) {
  const auto spec = make_impurity_chain(6, 1.5, 3, 2, 1, {0, 5}, 2.5, Boundary::open);
  const json j = to_json(spec);
  EXPECT_EQ(chain_spec_from_json(j), spec);
  const auto cfg = chain_config_from_json(
      json::parse(R"({"L": 12, "U": 4, "N_up": 3, "N_down": 3, "V": {"superlattice": {"pattern": [1, 4, 3, 4], "V": 8}}})"));
  EXPECT_EQ(chain_config_from_json(to_json(cfg)).spec(), cfg.spec());
}

TEST(Config, RejectsInvalidDocuments) {
  EXPECT_THROW((void)chain_config_from_json(json::parse(R"({"U": 4, "N_up": 1, "N_down": 1})")), ValidationError);
  EXPECT_THROW((void)chain_config_from_json(json::parse(R"({"L": 4, "U": -1, "N_up": 1, "N_down": 1})")),
               ValidationError);
  EXPECT_THROW((void)chain_config_from_json(json::parse(R"({"L": 4, "U": 1, "N_up": 1, "N_down": 1, "V": [0, 0]})")),
               ValidationError);
  EXPECT_THROW((void)chain_config_from_json(json::parse(R"({"L": 4, "U": 1, "N_up": 1, "N_down": 1, "boundary": "twisted"})")),
               ValidationError);
  EXPECT_THROW((void)chain_config_from_json(json::parse(R"({"L": 4, "U": "x", "N_up": 1, "N_down": 1})")),
               ValidationError);
  EXPECT_THROW((void)chain_config_from_json(json::parse(R"({"L": 10, "U": 1, "N_up": 1, "N_down": 1, "V": {"superlattice": {"pattern": [1, 2], "V": 8}}})")),
               ValidationError);
}
