#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "hardedge/config.hpp"
#include "hardedge/error.hpp"

using namespace hardedge;

namespace {

ExperimentConfig parse(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  apply_config_text(cfg, in);
  return cfg;
}

ErrorCode code_of(const std::string& text) {
  try {
    (void)parse(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Empty;
}

}  // namespace

TEST_CASE("parse keys, arrays, strings and comments") {
  const auto cfg = parse(
      "# header\n"
      "experiment = clt   # trailing\n"
      "potential = [0.5, 0.125]\n"
      "sizes = [400, 800]\n"
      "beta = 1\n"
      "output_dir = \"out dir\"\n"
      "\n");
  CHECK(cfg.experiment == "clt");
  CHECK(cfg.potential == std::vector<double>{0.5, 0.125});
  CHECK(cfg.sizes == std::vector<std::size_t>{400, 800});
  CHECK(cfg.beta == 1.0);
  CHECK(cfg.output_dir == "out dir");
  CHECK(cfg.replicas == 2000);
}

TEST_CASE("unknown, repeated and malformed keys") {
  CHECK(code_of("nope = 1\n") == ErrorCode::ConfigError);
  CHECK(code_of("beta = 1\nbeta = 2\n") == ErrorCode::ConfigError);
  CHECK(code_of("beta = two\n") == ErrorCode::ConfigError);
  CHECK(code_of("sizes = [400,\n") == ErrorCode::ConfigError);
  CHECK(code_of("beta\n") == ErrorCode::ConfigError);
}

TEST_CASE("overrides") {
  ExperimentConfig cfg;
  apply_override(cfg, "replicas=500");
  apply_override(cfg, "potential=[1]");
  CHECK(cfg.replicas == 500);
  CHECK(cfg.potential == std::vector<double>{1.0});
  CHECK_THROWS_AS(apply_override(cfg, "replicas"), Error);
}

TEST_CASE("validation") {
  ExperimentConfig cfg;
  validate_config(cfg);
  cfg.beta = 0;
  CHECK_THROWS_AS(validate_config(cfg), Error);
  cfg = ExperimentConfig{};
  cfg.sizes.clear();
  CHECK_THROWS_AS(validate_config(cfg), Error);
}

TEST_CASE("canonical text round trip and hash") {
  ExperimentConfig cfg;
  apply_override(cfg, "potential=[0.5,0.125]");
  apply_override(cfg, "clt_times=[0.3]");
  apply_override(cfg, "master_seed=42");
  const std::string text = canonical_text(cfg);
  const auto back = parse(text);
  CHECK(canonical_text(back) == text);
  CHECK(config_hash(back) == config_hash(cfg));
  ExperimentConfig other = cfg;
  other.master_seed = 43;
  CHECK(config_hash(other) != config_hash(cfg));
  CHECK(hex64(0xabc) == "0000000000000abc");
}
