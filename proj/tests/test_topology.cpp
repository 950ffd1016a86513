#include <gtest/gtest.h>

#include <random>

#include "pgas/topology.hpp"

using namespace pgas;

namespace {

// Reference classification written from the placement definition alone:
// walk both units up the hierarchy and report the first level they share.
HopClass reference_class(std::uint32_t a, std::uint32_t b, std::uint32_t node_size, std::uint32_t blades,
                         std::uint32_t chassis_per_group) {
  const std::uint32_t na = a / node_size, nb = b / node_size;
  if (na == nb) return HopClass::IntraNode;
  const std::uint32_t ca = na / blades, cb = nb / blades;
  if (ca == cb) return HopClass::Rank1;
  if (ca / chassis_per_group == cb / chassis_per_group) return HopClass::Rank2;
  return HopClass::Rank3;
}

}  // namespace

TEST(Topology, SmpPlacementFillsNodeFirst) {
  Topology t{32, 16, 16, 1};
  for (std::uint32_t u = 0; u < 16; ++u) EXPECT_EQ(t.node_of(UnitId{u}), 0u);
  for (std::uint32_t u = 16; u < 32; ++u) EXPECT_EQ(t.node_of(UnitId{u}), 1u);
  EXPECT_EQ(t.num_nodes(), 2u);
}

TEST(Topology, ClassifyExamples) {
  Topology t16{32, 16, 16, 1};
  EXPECT_EQ(classify(t16, UnitId{0}, UnitId{15}), HopClass::IntraNode);
  EXPECT_EQ(classify(t16, UnitId{0}, UnitId{16}), HopClass::Rank1);

  Topology small{8, 1, 2, 2};
  EXPECT_EQ(classify(small, UnitId{0}, UnitId{3}), HopClass::Rank2);
  EXPECT_EQ(classify(small, UnitId{0}, UnitId{4}), HopClass::Rank3);
  EXPECT_EQ(classify(small, UnitId{0}, UnitId{1}), HopClass::Rank1);
}

TEST(Topology, ClassifyMatchesReferenceForAllPairs) {
  Topology t{8, 1, 2, 2};
  for (std::uint32_t a = 0; a < 8; ++a) {
    for (std::uint32_t b = 0; b < 8; ++b) {
      EXPECT_EQ(classify(t, UnitId{a}, UnitId{b}), reference_class(a, b, 1, 2, 2)) << a << "," << b;
    }
  }
}

TEST(Topology, ClassifyIsSymmetric) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    Topology t{256, static_cast<std::uint32_t>(1 + rng() % 16), static_cast<std::uint32_t>(1 + rng() % 8),
               static_cast<std::uint32_t>(1 + rng() % 4)};
    for (std::uint32_t a = 0; a < 256; ++a) {
      for (std::uint32_t b = a; b < 256; ++b) {
        ASSERT_EQ(classify(t, UnitId{a}, UnitId{b}), classify(t, UnitId{b}, UnitId{a}));
      }
    }
  }
}

TEST(Topology, WideningGroupingNeverRaisesHopClass) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Topology base{128, static_cast<std::uint32_t>(1 + rng() % 8), static_cast<std::uint32_t>(1 + rng() % 6),
                  static_cast<std::uint32_t>(1 + rng() % 4)};
    const UnitId a{static_cast<std::uint32_t>(rng() % 128)};
    const UnitId b{static_cast<std::uint32_t>(rng() % 128)};
    const auto before = classify(base, a, b);
    for (int which = 0; which < 3; ++which) {
      Topology wide = base;
      if (which == 0) wide.node_size *= 2;
      if (which == 1) wide.blades_per_chassis *= 2;
      if (which == 2) wide.chassis_per_group *= 2;
      EXPECT_LE(static_cast<int>(classify(wide, a, b)), static_cast<int>(before));
    }
  }
}

TEST(Topology, RejectsZeroCounts) {
  EXPECT_THROW((Topology{0, 1, 1, 1}.validate()), Error);
  EXPECT_THROW((Topology{4, 0, 1, 1}.validate()), Error);
  EXPECT_NO_THROW((Topology{4, 2, 1, 1}.validate()));
}

TEST(LatencyModel, CostIsBasePlusBytesTimesInverseBandwidth) {
  LatencyModel m;
  EXPECT_DOUBLE_EQ(m.cost(HopClass::Rank1, 0), 2e-6);
  EXPECT_EQ(m.cost(HopClass::Rank3, 1000), 8e-6 + 1000.0 * 1.0e-9);
  EXPECT_NO_THROW(m.validate());

  auto bad = m;
  bad.base_seconds[1] = 0.1e-6;  // rank1 cheaper than intra-node
  EXPECT_THROW(bad.validate(), Error);
  bad = m;
  bad.seconds_per_byte[2] = -1.0;
  EXPECT_THROW(bad.validate(), Error);
}
