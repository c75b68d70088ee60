// Frozen outputs, checked by hand before freezing: the refinement column is
// sqrt(2/m) to within one ulp, the product is the Hermite linearization of
// (x1 + h2(x2))^2, and the Clark result is the worked product example.

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "wienerlab/clark_ocone.hpp"
#include "wienerlab/harness/dsl.hpp"

using namespace wienerlab;

namespace {

std::string golden(const std::string& name) {
  std::ifstream in(std::string(WIENERLAB_GOLDEN_DIR) + "/" + name, std::ios::binary);
  EXPECT_TRUE(in) << name;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Golden, RefinementTable) {
  const VField v(1, {ChaosPoly::hermite(1, 1, 2)});
  EXPECT_EQ(refinement_to_csv(refine_and_reconstruct(v, {1, 2, 4, 8})), golden("he2_refine.csv"));
}

TEST(Golden, ProductText) {
  const ChaosPoly p = dsl::lower_scalar(dsl::parse("(x1 + h2(x2))*(x1 + h2(x2))"), 2);
  EXPECT_EQ(to_text(p), golden("square.chaos"));
  EXPECT_EQ(from_text(golden("square.chaos"), 2), p);
}

TEST(Golden, ClarkResult) {
  const VField v(2, {ChaosPoly::coordinate(2, 1) * ChaosPoly::coordinate(2, 2)});
  EXPECT_EQ(clark_result_to_json(reconstruct(v)) + "\n", golden("clark_x1x2.json"));
}
