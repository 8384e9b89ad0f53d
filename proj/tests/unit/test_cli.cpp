#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hfa/cli.hpp"
#include "hfa/errors.hpp"

using namespace hfa;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("flags alone give a valid config") {
    const auto config = parse_command_line(
        {"--experiment", "converge", "--xi", "1", "--w", "1", "--q", "2", "--L", "500", "--seed", "7"});
    CHECK(config.experiment == "converge");
    CHECK(config.spec.xi == 1.0);
    CHECK(config.spec.w == 1.0);
    CHECK(config.spec.q == 2.0);
    CHECK(config.spec.L == 500);
    CHECK(config.spec.seed == 7);
  }

  TEST_CASE("flags override the config file") {
    const auto path = temp_file("hfa_cli_precedence.cfg", "# demo\nq = 2\nL = 40\n\nexperiment = verify\n");
    const auto config = parse_command_line({"--config", path.string(), "--q", "7"});
    CHECK(config.spec.q == 7.0);
    CHECK(config.spec.L == 40);
    CHECK(config.experiment == "verify");
    std::filesystem::remove(path);
  }

  TEST_CASE("equals-sign flags are accepted") {
    const auto config = parse_command_line({"--L=64", "--mu=aufbau"});
    CHECK(config.spec.L == 64);
    CHECK(config.spec.mu_rule == MuRule::aufbau);
  }

  TEST_CASE("unknown keys name a suggestion") {
    try {
      parse_command_line({"--zeta", "3"});
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.key() == "zeta");
      CHECK(std::string(e.what()).find("did you mean w") != std::string::npos);
    }
    try {
      parse_config_text("sede = 3\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("did you mean seed") != std::string::npos);
    }
  }

  TEST_CASE("malformed values are config errors naming the key") {
    RunConfig config;
    CHECK_THROWS_AS(apply_setting(config, "L", "ten"), ConfigError);
    CHECK_THROWS_AS(apply_setting(config, "xi", "1,5"), ConfigError);
    CHECK_THROWS_AS(apply_setting(config, "filling", "third"), ConfigError);
    CHECK_THROWS_AS(apply_setting(config, "oda_fallback", "maybe"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("L 40\n"), ConfigError);
    try {
      apply_setting(config, "samples", "0");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.key() == "samples");
    }
  }

  TEST_CASE("emit and parse round trip") {
    RunConfig config;
    CHECK(parse_config_text(emit_config(config)) == config);

    config.experiment = "wegner";
    config.spec.xi = 0.1;
    config.spec.w = 1.0 / 3.0;
    config.spec.L = 123;
    config.spec.d = 2;
    config.spec.filling = FillingRule::quarter;
    config.spec.mu_rule = MuRule::fixed;
    config.spec.mu = -0.7;
    config.spec.seed = 18446744073709551615ULL;
    config.spec.algorithm = Algorithm::oda;
    config.spec.oda_fallback = false;
    config.spec.tol = 3e-13;
    config.output = "out.csv";
    config.format = "json";
    config.site = 12;
    config.epsilons = {0.0, 1e-7};
    config.xi_values = {0.5};
    config.multiscale.radii = {2, 3, 4};
    config.multiscale.constants = {0.25, 0.125};
    config.multiscale.margin = 3;
    CHECK(parse_config_text(emit_config(config)) == config);

    config.spec.mu_rule = MuRule::aufbau;
    CHECK_THROWS_AS(validate(config), ConfigError);
    config.spec.mu = 0.0;
    CHECK_NOTHROW(validate(config));
    CHECK(parse_config_text(emit_config(config)) == config);
  }

  TEST_CASE("every key is emitted") {
    const auto text = emit_config(RunConfig{});
    for (const auto& key : config_keys()) {
      const bool present = text.find("\n" + key.name + " = ") != std::string::npos ||
                           text.rfind(key.name + " = ", 0) == 0;
      CHECK_MESSAGE(present, key.name);
    }
  }

  TEST_CASE("validation of experiment-specific settings") {
    RunConfig config;
    config.experiment = "sweep-periodic";
    config.spec.q = 2.0;
    CHECK_THROWS_AS(validate(config), ConfigError);
    config.spec.q = 0.0;
    CHECK_NOTHROW(validate(config));
    config.experiment = "nonsense";
    CHECK_THROWS_AS(validate(config), ConfigError);
    config.experiment = "locality";
    config.spec.L = 10;
    config.site = 10;
    CHECK_THROWS_AS(validate(config), ConfigError);
    config.experiment = "converge";
    config.format = "xml";
    CHECK_THROWS_AS(validate(config), ConfigError);
  }

  TEST_CASE("exit code 2 on config errors") {
    CHECK(invoke({"--experiment", "wegner", "--samples", "0"}).code == 2);
    const auto unknown = invoke({"--zeta", "3"});
    CHECK(unknown.code == 2);
    CHECK(unknown.err.find("did you mean w") != std::string::npos);
    CHECK(invoke({"--config", "/nonexistent/hfa.cfg"}).code == 2);
    CHECK(invoke({"stray"}).code == 2);
  }

  TEST_CASE("help and config dump") {
    const auto help = invoke({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("--zeta_box") != std::string::npos);
    const auto dump = invoke({"--L", "77", "--dump-config"});
    CHECK(dump.code == 0);
    CHECK(parse_config_text(dump.out).spec.L == 77);
  }

  TEST_CASE("converge writes the expected CSV columns and metadata") {
    const auto result = invoke({"--experiment", "converge", "--L", "60", "--seed", "7"});
    REQUIRE(result.code == 0);
    const auto table = ResultTable::from_csv(result.out);
    CHECK(table.has_column("iteration"));
    CHECK(table.has_column("residual"));
    CHECK(table.has_column("energy"));
    CHECK(table.metadata_value("experiment") == "converge");
    CHECK(table.metadata_value("version") == std::string(kArtifactVersion));
    CHECK(table.metadata_value("config.L") == "60");
    CHECK(table.metadata_value("run_id").has_value());
    CHECK(result.out.find("# timestamp: ") != std::string::npos);
  }

  TEST_CASE("identical runs differ only in the timestamp line") {
    const std::vector<std::string> args{"--experiment", "wegner", "--L", "40", "--samples", "3"};
    const auto a = invoke(args);
    const auto b = invoke(args);
    REQUIRE(a.code == 0);
    CHECK(deterministic_lines(a.out) == deterministic_lines(b.out));
  }

  TEST_CASE("json output and file output") {
    const auto path = std::filesystem::temp_directory_path() / "hfa_cli_output.json";
    const auto result = invoke({"--experiment", "verify", "--L", "30", "--format", "json",
                                "--output", path.string()});
    CHECK(result.code == 0);
    CHECK(result.out.empty());
    std::ifstream in(path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("\"metadata\"") != std::string::npos);
    std::filesystem::remove(path);
  }

  TEST_CASE("solver failure exits 1 with partial output") {
    const auto result = invoke({"--experiment", "converge", "--L", "60", "--max_iter", "2",
                                "--oda_fallback", "false"});
    CHECK(result.code == 1);
    const auto table = ResultTable::from_csv(result.out);
    CHECK(table.metadata_value("status") == "failed");
    CHECK(table.rows().size() == 2);
  }
}
