// Frozen results for a 20-device light-load scenario. Regenerate with
//   gridflex run --scenario data/light_20.json --scheduler <s> --no-timing
// only after a deliberate behaviour change.
#include <gtest/gtest.h>

#include <algorithm>

#include "gridflex/engine.hpp"
#include "gridflex/scenario_io.hpp"

using namespace gridflex;

class Golden : public ::testing::TestWithParam<std::string> {};

TEST_P(Golden, LightTwentyMatchesFrozenResult) {
  const Scenario sc = load_scenario(std::string(GRIDFLEX_DATA_DIR) + "/light_20.json");
  const RunResult r = run(sc, GetParam());
  std::string want =
      read_text_file(std::string(GRIDFLEX_GOLDEN_DIR) + "/light_20." + GetParam() + ".json");
  while (!want.empty() && want.back() == '\n') want.pop_back();
  std::string got = result_to_json(r, false);
  while (!got.empty() && got.back() == '\n') got.pop_back();
  const auto diff = std::mismatch(got.begin(), got.end(), want.begin(), want.end());
  EXPECT_TRUE(diff.first == got.end() && diff.second == want.end())
      << "first difference at byte " << (diff.first - got.begin()) << ": ..."
      << std::string(diff.first, got.begin() + std::min<size_t>(got.size(), (diff.first - got.begin()) + 80));
}

INSTANTIATE_TEST_SUITE_P(Schedulers, Golden, ::testing::Values("heuristic", "edf", "hp"));
