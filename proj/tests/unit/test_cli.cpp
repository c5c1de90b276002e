#include "app/commands.hpp"
#include "app/config.hpp"
#include "app/output.hpp"

#include <cocyclelab/errors.hpp>

#include <gtest/gtest.h>

#include <algorithm>

using namespace cocyclelab;
using namespace cocyclelab::app;
using nlohmann::json;

namespace {

json rotation_config() {
  return json::parse(R"({
    "sft": {"alphabet": 2},
    "generator": {"builtin": "rotation-by-symbol", "params": {"angles": [0.5, 1.3]}},
    "measure": {"kind": "bernoulli", "probabilities": [0.5, 0.5]},
    "params": {"rho": 0.01, "tau": 0.01, "seed": 3, "steps": 2000}
  })");
}

std::vector<std::string> violations_of(const json& doc, const std::string& command,
                                       const Overrides& o = {}) {
  try {
    parse_config_json(doc, command, o);
  } catch (const SchemaError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST(Config, MinimalConfigParsesWithDefaults) {
  const auto cfg = parse_config_json(rotation_config(), "certify");
  EXPECT_EQ(cfg.builtin, "rotation-by-symbol");
  EXPECT_EQ(cfg.generator.dim(), 2);
  EXPECT_EQ(cfg.params.c, 2.0);
  EXPECT_EQ(cfg.params.max_period, 6);
  EXPECT_EQ(cfg.resolved["params"]["ground_truth"], true);
  EXPECT_TRUE(cfg.measure.has_value());
}

TEST(Config, WrongRowLengthNamesTheRow) {
  auto doc = rotation_config();
  doc["sft"]["transitions"] = json::parse("[[1, 1], [1]]");
  const auto v = violations_of(doc, "certify");
  EXPECT_TRUE(mentions(v, "sft.transitions[1]: must have length 2, got 1")) << json(v).dump();
}

TEST(Config, SeedRequiredForStochasticCommands) {
  auto doc = rotation_config();
  doc["params"].erase("seed");
  EXPECT_TRUE(mentions(violations_of(doc, "spectrum"), "params.seed: seed required"));
  EXPECT_TRUE(violations_of(doc, "certify").empty());
}

TEST(Config, ReportsEveryViolation) {
  auto doc = rotation_config();
  doc["params"]["rho"] = -1;
  doc["params"]["bogus"] = 1;
  doc["measure"]["probabilities"] = json::array({0.5});
  doc["extra"] = true;
  const auto v = violations_of(doc, "certify");
  EXPECT_GE(v.size(), 4u) << json(v).dump();
  EXPECT_TRUE(mentions(v, "params.rho"));
  EXPECT_TRUE(mentions(v, "bogus"));
  EXPECT_TRUE(mentions(v, "extra"));
  EXPECT_TRUE(mentions(v, "measure"));
}

TEST(Config, UnknownCommandAndMissingSections) {
  EXPECT_TRUE(mentions(violations_of(rotation_config(), "nonsense"), "unknown command"));
  auto doc = rotation_config();
  doc.erase("generator");
  EXPECT_TRUE(mentions(violations_of(doc, "certify"), "generator"));
  doc = rotation_config();
  doc.erase("measure");
  EXPECT_TRUE(mentions(violations_of(doc, "spectrum"), "measure"));
}

TEST(Config, Overrides) {
  const auto cfg = parse_config_json(rotation_config(), "certify",
                                     {{"rho", "0.02"}, {"sft.metric_base", "3"}, {"word", "0101"}});
  EXPECT_EQ(cfg.params.rho, 0.02);
  EXPECT_EQ(cfg.sft.metric_base(), 3.0);
  EXPECT_EQ(cfg.params.word, "0101");
  EXPECT_FALSE(violations_of(rotation_config(), "certify", {{"rho", "abc"}}).empty());
}

TEST(Config, OutputDirDoesNotLeakIntoDocument) {
  auto a = rotation_config();
  a["output"] = {{"dir", "/tmp/a"}};
  auto b = rotation_config();
  b["output"] = {{"dir", "/tmp/b"}};
  const auto ca = parse_config_json(a, "certify");
  const auto cb = parse_config_json(b, "certify");
  EXPECT_EQ(ca.out_dir, "/tmp/a");
  EXPECT_EQ(ca.resolved, cb.resolved);
}

TEST(Execute, DeterministicDocumentsAndExitCodes) {
  const auto doc = rotation_config();
  struct Case {
    std::string command;
    int code;
  };
  for (const auto& c : std::vector<Case>{{"spectrum", kExitSuccess},
                                         {"periodic-scan", kExitSuccess},
                                         {"certify", kExitSuccess},
                                         {"livsic-check", kExitNegative}}) {
    const auto cfg = parse_config_json(doc, c.command);
    const auto a = execute(cfg);
    const auto b = execute(cfg);
    EXPECT_EQ(a.exit_code, c.code) << c.command << " " << a.document.dump();
    EXPECT_EQ(dump(a.document), dump(b.document)) << c.command;
    EXPECT_EQ(a.document["command"], c.command);
    EXPECT_EQ(a.document["version"], version_string());
  }
  auto rejected = doc;
  rejected["params"]["rho"] = 0.3;
  rejected["params"]["tau"] = 0.3;
  const auto out = execute(parse_config_json(rejected, "certify"));
  EXPECT_EQ(out.exit_code, kExitNegative);
  EXPECT_EQ(out.document["status"], "negative");
}

TEST(Execute, BudgetExhaustionIsInconclusive) {
  auto doc = rotation_config();
  doc["params"]["budget"] = 4;
  const auto out = execute(parse_config_json(doc, "periodic-scan"));
  EXPECT_EQ(out.exit_code, kExitInconclusive);
}

TEST(Output, NonFiniteNumbersBecomeStrings) {
  EXPECT_EQ(number(-INFINITY), "-inf");
  EXPECT_EQ(number(INFINITY), "inf");
  EXPECT_EQ(number(NAN), "nan");
  EXPECT_EQ(number(1.5), 1.5);
}
