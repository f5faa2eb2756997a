#include "localis/verify.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

using namespace localis;

namespace {

std::vector<std::string> names_of(const std::vector<PropertyResult>& results) {
  std::vector<std::string> names;
  for (const PropertyResult& r : results) names.push_back(r.name);
  return names;
}

}  // namespace

TEST_CASE("each verify suite runs its pinned properties and passes") {
  const std::vector<PropertyResult> group = run_suite("group");
  CHECK(names_of(group) == std::vector<std::string>{"associativity", "dilation-automorphism",
                                                    "semidirect-axioms", "axb-specialization"});
  for (const PropertyResult& r : group) {
    CHECK(r.suite == "group");
    CHECK(r.passed);
    CHECK(r.residual < r.threshold);
    CHECK(r.threshold == 1e-12);
  }

  CHECK(names_of(run_suite("representation")) ==
        std::vector<std::string>{"homomorphism", "isometry", "projection-covariance",
                                 "presymbol-intertwining"});
  CHECK(names_of(run_suite("localization")) ==
        std::vector<std::string>{"symbol-covariance", "rigidity", "determination",
                                 "multiplication-localization"});
  CHECK(names_of(run_suite("synthesis")) ==
        std::vector<std::string>{"reconstruction-intertwining", "envelope-consistency",
                                 "round-trip"});
}

TEST_CASE("the full verify run concatenates the suites and stays green") {
  const std::vector<PropertyResult> all = run_suite("all");
  REQUIRE(all.size() == 15);
  for (const PropertyResult& r : all) {
    CAPTURE(r.suite);
    CAPTURE(r.name);
    CAPTURE(r.residual);
    CHECK(r.passed);
    CHECK(r.residual < r.threshold);
  }
  // Fixed seeds: a second run reproduces the residuals bit for bit.
  const std::vector<PropertyResult> again = run_suite("all");
  REQUIRE(again.size() == all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    CHECK(again[i].name == all[i].name);
    CHECK(again[i].residual == all[i].residual);
  }

  CHECK_THROWS_WITH_AS(run_suite("nosuch"), doctest::Contains("unknown verify suite"),
                       std::invalid_argument);
}

TEST_CASE("verify reports serialize to JSON") {
  const std::vector<PropertyResult> group = run_suite("group");
  const nlohmann::json report = nlohmann::json::parse(verify_report_json(group));
  CHECK(report.at("passed").get<bool>());
  CHECK(report.at("version").is_string());
  REQUIRE(report.at("properties").size() == group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    const nlohmann::json& p = report.at("properties")[i];
    CHECK(p.at("suite").get<std::string>() == group[i].suite);
    CHECK(p.at("name").get<std::string>() == group[i].name);
    CHECK(p.at("residual").get<double>() == group[i].residual);
    CHECK(p.at("threshold").get<double>() == group[i].threshold);
    CHECK(p.at("passed").get<bool>() == group[i].passed);
  }

  // A failing row flips the top-level flag.
  PropertyResult bad;
  bad.suite = "group";
  bad.name = "fabricated";
  bad.residual = 2.0;
  bad.threshold = 1.0;
  bad.passed = false;
  const nlohmann::json failing = nlohmann::json::parse(verify_report_json({bad}));
  CHECK_FALSE(failing.at("passed").get<bool>());
}
