#include <gtest/gtest.h>

#include <atomic>
#include <cstring>
#include <random>
#include <vector>

#include "pgas/runtime.hpp"

using namespace pgas;

namespace {

RuntimeConfig make_config(std::uint32_t units, std::uint32_t node_size) {
  RuntimeConfig c;
  c.num_units = units;
  c.node_size = node_size;
  return c;
}

template <class F>
Errc error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected pgas::Error";
  return Errc::InvalidArgument;
}

}  // namespace

TEST(Launch, SingleUnitCleanExit) {
  auto report = launch(make_config(1, 1), [](Unit&) { return 0; });
  ASSERT_EQ(report.exit_status.size(), 1u);
  EXPECT_EQ(report.exit_status[0], 0);
  EXPECT_EQ(report.leaked_segments, 0u);
}

TEST(Launch, UnitIdsAndPlacement) {
  std::vector<std::uint32_t> nodes(32, 99);
  std::vector<std::uint32_t> ids(32, 99);
  launch(make_config(32, 16), [&](Unit& u) {
    ids[u.myid().index] = myid().index;
    nodes[u.myid().index] = u.topology().node_of(u.myid());
    EXPECT_EQ(u.size(), 32u);
    EXPECT_EQ(pgas::size(), 32u);
  });
  for (std::uint32_t i = 0; i < 32; ++i) {
    EXPECT_EQ(ids[i], i);
    EXPECT_EQ(nodes[i], i < 16 ? 0u : 1u);
  }
}

TEST(Launch, SixteenUnitsOnOneNode) {
  std::atomic<int> on_node0{0};
  launch(make_config(16, 16), [&](Unit& u) {
    EXPECT_LT(u.myid().index, 16u);
    if (u.topology().node_of(u.myid()) == 0) ++on_node0;
  });
  EXPECT_EQ(on_node0.load(), 16);
}

TEST(Launch, RejectsInvalidConfig) {
  EXPECT_EQ(error_code_of([] { launch(make_config(0, 1), [](Unit&) {}); }), Errc::InvalidConfig);
  EXPECT_EQ(error_code_of([] { launch(make_config(4, 0), [](Unit&) {}); }), Errc::InvalidConfig);
  auto c = make_config(2, 1);
  c.latency.base_seconds[0] = -1.0;
  EXPECT_EQ(error_code_of([&] { launch(c, [](Unit&) {}); }), Errc::InvalidConfig);
}

TEST(Launch, FailingUnitAbortsRunAndIsNamed) {
  try {
    launch(make_config(4, 2), [](Unit& u) {
      if (u.myid().index == 2) throw std::runtime_error("boom");
      u.barrier(kTeamAll);  // would deadlock without abort propagation
    });
    FAIL() << "launch should have thrown";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Aborted);
    EXPECT_NE(std::string(e.what()).find("unit 2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos) << e.what();
  }
}

TEST(Launch, MyidOutsideRuntimeIsAnError) {
  EXPECT_EQ(error_code_of([] { (void)myid(); }), Errc::NotInRuntime);
  EXPECT_EQ(error_code_of([] { (void)pgas::size(); }), Errc::NotInRuntime);
}

TEST(Launch, TeardownFreesLeakedSegments) {
  auto report = launch(make_config(2, 1), [](Unit& u) {
    (void)u.team_memalloc_aligned(kTeamAll, 64);
    if (u.myid().index == 1) (void)u.memalloc(8);
  });
  EXPECT_EQ(report.leaked_segments, 2u);
}

TEST(Teams, CreateSizesAndRanks) {
  launch(make_config(8, 4), [](Unit& u) {
    const std::vector<UnitId> evens{UnitId{2}, UnitId{4}, UnitId{6}};
    auto t = u.team_create(kTeamAll, evens);
    const bool member = u.team_rank(t) >= 0;
    EXPECT_EQ(u.team_size(t), 3u);
    const auto me = u.myid().index;
    if (me == 2) {
      EXPECT_EQ(u.team_rank(t), 0);
    }
    if (me == 6) {
      EXPECT_EQ(u.team_rank(t), 2);
    }
    if (me == 1) {
      EXPECT_EQ(u.team_rank(t), -1);
    }

    std::vector<UnitId> all;
    for (std::uint32_t i = 0; i < u.size(); ++i) all.push_back(UnitId{i});
    auto whole = u.team_create(kTeamAll, all);
    EXPECT_EQ(u.team_members(whole), u.team_members(kTeamAll));
    EXPECT_NE(whole, t);

    u.barrier(kTeamAll);
    if (member) u.team_destroy(t);
    u.team_destroy(whole);
  });
}

TEST(Teams, AllocationOnSubTeamOnlyForMembers) {
  std::vector<int> outcome(4, -1);
  launch(make_config(4, 4), [&](Unit& u) {
    const std::vector<UnitId> odd{UnitId{1}, UnitId{3}};
    auto t = u.team_create(kTeamAll, odd);
    const auto me = u.myid().index;
    if (u.team_rank(t) >= 0) {
      auto g = u.team_memalloc_aligned(t, 128);
      EXPECT_EQ(g.unit, UnitId{1});  // lowest-ranked member
      outcome[me] = 1;
      u.team_memfree(t, g);
      u.team_destroy(t);
    } else {
      outcome[me] = error_code_of([&] { (void)u.team_memalloc_aligned(t, 128); }) == Errc::NotMember ? 0 : 2;
    }
  });
  EXPECT_EQ(outcome, (std::vector<int>{0, 1, 0, 1}));
}

TEST(Teams, SubsetViolationAndNonMemberCreateAreErrors) {
  launch(make_config(4, 4), [](Unit& u) {
    const std::vector<UnitId> pair{UnitId{0}, UnitId{1}};
    auto t = u.team_create(kTeamAll, pair);
    if (u.team_rank(t) >= 0) {
      const std::vector<UnitId> outside{UnitId{0}, UnitId{3}};
      EXPECT_EQ(error_code_of([&] { (void)u.team_create(t, outside); }), Errc::NotMember);
      u.team_destroy(t);
    } else {
      EXPECT_EQ(error_code_of([&] { (void)u.team_create(t, pair); }), Errc::NotMember);
    }
  });
}

TEST(Teams, DestroyRules) {
  launch(make_config(2, 2), [](Unit& u) {
    const std::vector<UnitId> both{UnitId{0}, UnitId{1}};
    auto empty_team = u.team_create(kTeamAll, both);
    u.team_destroy(empty_team);
    EXPECT_EQ(error_code_of([&] { (void)u.team_size(empty_team); }), Errc::InvalidTeam);

    auto t = u.team_create(kTeamAll, both);
    auto g = u.team_memalloc_aligned(t, 16);
    try {
      u.team_destroy(t);
      ADD_FAILURE() << "destroy with live segment must fail";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::LiveSegments);
      EXPECT_NE(std::string(e.what()).find("segment " + std::to_string(g.segment.id)), std::string::npos);
    }
    u.team_memfree(t, g);
    u.team_destroy(t);

    EXPECT_EQ(error_code_of([&] { u.team_destroy(kTeamAll); }), Errc::InvalidTeam);
  });
}

TEST(Teams, IdsAreNeverReused) {
  launch(make_config(2, 2), [](Unit& u) {
    const std::vector<UnitId> both{UnitId{0}, UnitId{1}};
    std::vector<TeamId> seen;
    for (int i = 0; i < 5; ++i) {
      auto t = u.team_create(kTeamAll, both);
      for (auto s : seen) EXPECT_NE(s, t);
      seen.push_back(t);
      u.team_destroy(t);
    }
  });
}

TEST(Memory, CollectiveAllocationIsConsistentAndDistinct) {
  std::vector<GlobalPointer> first(4), second(4);
  launch(make_config(4, 2), [&](Unit& u) {
    auto a = u.team_memalloc_aligned(kTeamAll, 1024);
    auto b = u.team_memalloc_aligned(kTeamAll, 1024);
    first[u.myid().index] = a;
    second[u.myid().index] = b;
    auto mine = u.local_region(gptr_setunit(a, u.myid()), 1024);
    EXPECT_EQ(reinterpret_cast<std::uintptr_t>(mine.data()) % 8, 0u);
    u.barrier(kTeamAll);
    u.team_memfree(kTeamAll, b);
    u.team_memfree(kTeamAll, a);
  });
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(first[i], first[0]);
    EXPECT_EQ(second[i], second[0]);
  }
  EXPECT_EQ(first[0].unit, UnitId{0});
  EXPECT_EQ(first[0].offset, 0u);
  EXPECT_NE(first[0].segment, second[0].segment);
}

TEST(Memory, EveryUnitReachesEveryByteWithoutEpochCalls) {
  launch(make_config(4, 2), [](Unit& u) {
    auto g = u.team_memalloc_aligned(kTeamAll, 1024);
    std::vector<std::byte> buf(1024);
    for (std::uint32_t t = 0; t < u.size(); ++t) {
      auto at = gptr_setunit(g, UnitId{t});
      EXPECT_NO_THROW(u.get_blocking(std::span(buf), at));
      EXPECT_NO_THROW(u.get_blocking(std::span(buf).subspan(0, 1), gptr_incaddr(at, 1023)));
    }
    u.barrier(kTeamAll);
    u.team_memfree(kTeamAll, g);
  });
}

TEST(Memory, ZeroByteSegment) {
  launch(make_config(2, 1), [](Unit& u) {
    auto g = u.team_memalloc_aligned(kTeamAll, 0);
    std::byte b{};
    u.get_blocking(std::span<std::byte>{}, g);
    EXPECT_EQ(error_code_of([&] { u.get_blocking(std::span(&b, 1), g); }), Errc::OutOfBounds);
    auto local = u.memalloc(0);
    EXPECT_EQ(error_code_of([&] { u.put_blocking(local, std::span<const std::byte>(&b, 1)); }), Errc::OutOfBounds);
    u.memfree(local);
    u.barrier(kTeamAll);
    u.team_memfree(kTeamAll, g);
  });
}

TEST(Memory, DoubleFreeAndAccessAfterFree) {
  launch(make_config(2, 2), [](Unit& u) {
    auto g = u.team_memalloc_aligned(kTeamAll, 64);
    u.team_memfree(kTeamAll, g);
    EXPECT_EQ(error_code_of([&] { u.team_memfree(kTeamAll, g); }), Errc::SegmentFreed);
    std::byte b{};
    EXPECT_EQ(error_code_of([&] { u.get_blocking(std::span(&b, 1), g); }), Errc::SegmentFreed);
    EXPECT_EQ(error_code_of([&] { u.put_blocking(g, std::span<const std::byte>(&b, 1)); }), Errc::SegmentFreed);
  });
}

TEST(Memory, FreeWithUnwaitedHandleIsRefused) {
  launch(make_config(2, 1), [](Unit& u) {
    auto g = u.team_memalloc_aligned(kTeamAll, 64);
    std::uint64_t v = 42;
    std::optional<OpHandle> h;
    if (u.myid().index == 0) h = u.put(gptr_setunit(g, UnitId{1}), std::as_bytes(std::span(&v, 1)));
    EXPECT_EQ(error_code_of([&] { u.team_memfree(kTeamAll, g); }), Errc::OutstandingOps);
    if (h) u.wait(*h);
    u.team_memfree(kTeamAll, g);
  });
}

TEST(Memory, NonCollectiveOwnership) {
  std::vector<GlobalPointer> owned(4);
  launch(make_config(4, 2), [&](Unit& u) {
    if (u.myid().index == 3) {
      owned[3] = u.memalloc(64);
      auto mem = u.local_region(owned[3], 64);
      for (std::size_t i = 0; i < 64; ++i) mem[i] = std::byte(i);
    }
    u.barrier(kTeamAll);
    const auto g = owned[3];
    if (u.myid().index == 0) {
      std::vector<std::byte> buf(64);
      u.get_blocking(std::span(buf), g);
      for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(buf[i], std::byte(i));
      EXPECT_EQ(error_code_of([&] { u.memfree(g); }), Errc::NotOwner);
      std::byte b{};
      EXPECT_EQ(error_code_of([&] { u.get_blocking(std::span(&b, 1), gptr_setunit(g, UnitId{1})); }),
                Errc::InvalidTarget);
    }
    u.barrier(kTeamAll);
    if (u.myid().index == 3) u.memfree(g);
  });
}

TEST(Memory, SetunitOutsideTeamFailsOnAccess) {
  launch(make_config(4, 4), [](Unit& u) {
    const std::vector<UnitId> pair{UnitId{0}, UnitId{1}};
    auto t = u.team_create(kTeamAll, pair);
    if (u.team_rank(t) >= 0) {
      auto g = u.team_memalloc_aligned(t, 8);
      std::byte b{};
      EXPECT_EQ(error_code_of([&] { u.get_blocking(std::span(&b, 1), gptr_setunit(g, UnitId{2})); }),
                Errc::InvalidTarget);
      EXPECT_EQ(error_code_of([&] { u.get_blocking(std::span(&b, 1), gptr_incaddr(g, 8)); }), Errc::OutOfBounds);
      u.team_memfree(t, g);
      u.team_destroy(t);
    }
  });
}

TEST(GlobalPointer, Algebra) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    GlobalPointer g{SegmentId{rng() % 100}, UnitId{static_cast<std::uint32_t>(rng() % 64)}, rng() % 4096};
    const auto a = rng() % 10000, b = rng() % 10000;
    EXPECT_EQ(gptr_incaddr(gptr_incaddr(g, a), b), gptr_incaddr(g, a + b));
    EXPECT_EQ(gptr_incaddr(g, 0), g);
    const UnitId other{static_cast<std::uint32_t>(rng() % 64)};
    EXPECT_EQ(gptr_setunit(gptr_setunit(g, other), g.unit), g);
  }
}

// Randomized schedules: every unit writes a stamp into random slots of
// random peers, barrier, then every unit verifies what it owns. No epoch
// or window call exists anywhere in the API.
TEST(Memory, ExposureTotalityRandomizedSchedules) {
  for (auto mode : {RoutingMode::LocalityAware, RoutingMode::Oblivious}) {
    auto c = make_config(6, 2);
    c.routing = mode;
    c.realize_latency = false;
    launch(c, [](Unit& u) {
      constexpr std::size_t kSlots = 64;
      auto g = u.team_memalloc_aligned(kTeamAll, kSlots * u.size() * sizeof(std::uint64_t));
      std::mt19937 rng(100 + u.myid().index);
      // Slot (writer, k) in each target region belongs to exactly one writer.
      std::vector<std::vector<std::uint64_t>> expected(u.size(), std::vector<std::uint64_t>(kSlots, 0));
      for (int round = 0; round < 40; ++round) {
        const UnitId target{static_cast<std::uint32_t>(rng() % u.size())};
        const std::size_t k = rng() % kSlots;
        const std::uint64_t stamp = (std::uint64_t{u.myid().index} << 32) | static_cast<std::uint64_t>(round + 1);
        const auto off = (u.myid().index * kSlots + k) * sizeof(std::uint64_t);
        u.put_blocking(gptr_incaddr(gptr_setunit(g, target), off), std::as_bytes(std::span(&stamp, 1)));
        expected[target.index][k] = stamp;
      }
      u.barrier(kTeamAll);
      for (std::uint32_t t = 0; t < u.size(); ++t) {
        std::vector<std::uint64_t> got(kSlots);
        u.get_blocking(std::as_writable_bytes(std::span(got)),
                       gptr_incaddr(gptr_setunit(g, UnitId{t}), u.myid().index * kSlots * sizeof(std::uint64_t)));
        EXPECT_EQ(got, expected[t]);
      }
      u.barrier(kTeamAll);
      u.team_memfree(kTeamAll, g);
    });
  }
}
