#include <gtest/gtest.h>

#include "property_checks.hpp"

namespace {

constexpr int kCases = 200;

std::vector<std::string> check_names() {
  std::vector<std::string> out;
  for (const auto& [name, check] : props::all_checks()) out.push_back(name);
  return out;
}

class Property : public ::testing::TestWithParam<std::string> {};

TEST_P(Property, HoldsOnRandomCases) {
  for (const auto& [name, check] : props::all_checks()) {
    if (name != GetParam()) continue;
    const props::Result r = check(kCases);
    EXPECT_EQ(r.cases, kCases);
    EXPECT_EQ(r.failures, 0) << r.name << ": " << r.first_failure;
  }
}

INSTANTIATE_TEST_SUITE_P(Invariants, Property, ::testing::ValuesIn(check_names()),
                         [](const auto& info) { return info.param; });

}  // namespace
