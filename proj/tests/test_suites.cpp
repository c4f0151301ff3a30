#include <gtest/gtest.h>

#include "twreg/suites.hpp"

using namespace twreg;

TEST(PartitionOracle, OddHalvesAndUntwisted) {
  // prod (1 - q^{n-1/2})^{-1}, indexed by half-units above the lowest weight
  EXPECT_EQ(partition_oracle(true, 6), (std::vector<long long>{1, 1, 1, 2, 2, 3, 4}));
  // prod (1 - q^n)^{-1} on even half-units
  auto p = partition_oracle(false, 8);
  EXPECT_EQ((std::vector<long long>{p[0], p[2], p[4], p[6], p[8]}), (std::vector<long long>{1, 1, 2, 3, 5}));
  EXPECT_EQ(p[1] + p[3] + p[5] + p[7], 0);
}

TEST(RunTasks, AssemblyOrderIndependentOfThreads) {
  std::vector<Task> tasks;
  for (int i = 0; i < 40; ++i)
    tasks.push_back([i] {
      std::this_thread::sleep_for(std::chrono::microseconds((40 - i) * 50));
      Entry e;
      e.identity = std::to_string(i);
      return std::vector<Entry>{e};
    });
  auto serial = run_tasks(tasks, 1), parallel = run_tasks(tasks, 6);
  ASSERT_EQ(serial.size(), parallel.size());
  for (size_t i = 0; i < serial.size(); ++i) EXPECT_EQ(serial[i].identity, parallel[i].identity);
}

TEST(RunTasks, ErrorsPropagate) {
  std::vector<Task> tasks{[]() -> std::vector<Entry> { throw std::runtime_error("boom"); }};
  EXPECT_THROW(run_tasks(tasks, 2), std::runtime_error);
}

TEST(Entries, NegativeControlsInvertStatus) {
  VerificationReport r;
  r.identity = "bridge-without-phase";
  r.fail("mismatch");
  auto e = entry_of("regular-rep-core", r, false);
  EXPECT_EQ(e.status, "pass");
  EXPECT_NE(e.params.find("negative control"), std::string::npos);
  VerificationReport ok;
  ok.identity = "bridge-without-phase";
  EXPECT_EQ(entry_of("regular-rep-core", ok, false).status, "fail");
}

TEST(Suites, EveryIdentityHasAnAnchorAndOrderIsSorted) {
  RunConfig c;
  c.suites = {"trace", "pz-correspondence"};
  c.window = Window{-2, 2};
  auto es = run_suites(c);
  ASSERT_FALSE(es.empty());
  for (size_t i = 0; i < es.size(); ++i) {
    EXPECT_NE(es[i].anchor, es[i].identity) << es[i].identity;
    EXPECT_EQ(es[i].status, "pass") << es[i].identity << " " << es[i].params << " " << es[i].failure;
    if (i) EXPECT_LE(std::tie(es[i - 1].suite, es[i - 1].identity, es[i - 1].params),
                     std::tie(es[i].suite, es[i].identity, es[i].params));
  }
}

TEST(Suites, TraceIdentitySkippedAwayFromMinusOne) {
  RunConfig c;
  c.suites = {"trace"};
  c.z = 2;
  int skipped = 0;
  for (auto& e : run_suites(c)) {
    EXPECT_NE(e.status, "fail") << e.identity;
    skipped += e.status == "skipped";
  }
  EXPECT_EQ(skipped, 2);
}

TEST(Suites, ExampleResolution) {
  EXPECT_EQ(resolve_example("free-boson"), "free-boson");
  EXPECT_THROW(resolve_example("/nonexistent/module"), std::invalid_argument);
  FockModule w(true);
  auto path = std::filesystem::temp_directory_path() / "twreg_example.module";
  {
    std::ofstream(path) << ModuleDescription::of(w, w.lowest_weight() + Rat(1)).serialize();
  }
  EXPECT_EQ(resolve_example(path.string()), "free-boson-twisted");
  auto d = ModuleDescription::of(w, w.lowest_weight());
  d.lowest_weight = Rat(1, 8);
  {
    std::ofstream(path) << d.serialize();
  }
  EXPECT_THROW(resolve_example(path.string()), std::invalid_argument);
  std::filesystem::remove(path);
}
