#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "afs/cli.hpp"
#include "afs/config.hpp"
#include "afs/io.hpp"

using namespace afs;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write_config(const std::string& dir, const std::string& body) {
  fs::create_directories(dir);
  std::string path = dir + "/config.json";
  std::ofstream out(path);
  out << body;
  return path;
}

int run(const std::vector<std::string>& args, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  int rc = run_cli(args, out, err);
  if (out_text) *out_text = out.str() + err.str();
  return rc;
}

const char* kEstimateConfig = R"({
  "model": {"d": 1},
  "base": {"b0": "5", "p0": "23^-4", "L0": "9", "k_max": 1},
  "disorder": {"family": "uniform", "lambda": 10.0, "master_seed": 2718},
  "probe": {"E": -156.0, "n": 400, "scale_k": 0},
  "out": {"dir": "OUTDIR"}
})";

}  // namespace

TEST_CASE("exact literal parsing") {
  CHECK(parse_rational("5") == mpq_class(5));
  CHECK(parse_rational("5/3") == mpq_class(5, 3));
  CHECK(parse_rational("0.25") == mpq_class(1, 4));
  CHECK(parse_rational("23^-4") == mpq_class(1, 279841));
  CHECK(parse_bigint("3^11") == mpz_class(177147));
  CHECK(parse_bigint("11^256") == [] {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 11, 256);
    return r;
  }());
  CHECK_THROWS_AS(parse_rational("abc"), ConfigError);
  CHECK_THROWS_AS(parse_bigint("11^-3"), ConfigError);
}

TEST_CASE("config validation errors exit with code 2") {
  std::string dir = "cli_test_cfg";
  CHECK(run({"certify", "--config", "no_such_file.json"}) == 2);
  auto bad_json = write_config(dir, "{ not json");
  CHECK(run({"certify", "--config", bad_json}) == 2);
  auto bad_family = write_config(dir, R"({"disorder": {"family": "gaussian"}})");
  CHECK(run({"certify", "--config", bad_family}) == 2);
  CHECK(run({"certify"}) == 2);  // missing --config
  fs::remove_all(dir);
}

TEST_CASE("certify: reference base passes, violated bases fail with exit 1") {
  std::string dir = "cli_test_certify";
  fs::create_directories(dir);
  auto ok_cfg = write_config(dir, R"({
    "model": {"d": 1},
    "base": {"b0": "5", "p0": "23^-4", "L0": "11^256", "k_max": 12},
    "out": {"dir": ")" + dir + R"(/run"}
  })");
  std::string text;
  CHECK(run({"certify", "--config", ok_cfg}, &text) == 0);
  CHECK(text.find("PASS") != std::string::npos);
  auto cert = nlohmann::json::parse(slurp(dir + "/run/certificate.json"));
  CHECK(cert["overall"] == "pass");
  CHECK(cert["base"]["K"] == 30);
  CHECK(fs::exists(dir + "/run/esl_exponents.csv"));
  CHECK(fs::exists(dir + "/run/manifest.json"));

  // p0 above the scale-free threshold
  auto bad_p0 = write_config(dir, R"({
    "model": {"d": 1},
    "base": {"b0": "5", "p0": "23^-1", "L0": "11^256", "k_max": 5},
    "out": {"dir": ")" + dir + R"(/run2"}
  })");
  CHECK(run({"certify", "--config", bad_p0}, &text) == 1);
  CHECK(text.find("threshold-violated") != std::string::npos);

  // initial scale below the admissible threshold
  auto small_l0 = write_config(dir, R"({
    "model": {"d": 1},
    "base": {"b0": "5", "p0": "23^-4", "L0": "9", "k_max": 1},
    "out": {"dir": ")" + dir + R"(/run3"}
  })");
  CHECK(run({"certify", "--config", small_l0}) == 1);
  auto cert3 = nlohmann::json::parse(slurp(dir + "/run3/certificate.json"));
  CHECK(cert3["overall"] == "fail");
  CHECK(cert3["reason"] == "L0-threshold");
  fs::remove_all(dir);
}

TEST_CASE("byte-identical reruns and worker invariance") {
  std::string dir = "cli_test_repro";
  fs::create_directories(dir);
  std::string body(kEstimateConfig);
  auto cfg = write_config(dir, body);

  auto run_to = [&](const std::string& sub, int workers) {
    std::vector<std::string> args{"estimate-p0", "--config", cfg, "--out", dir + "/" + sub,
                                  "--workers", std::to_string(workers)};
    REQUIRE(run(args) == 0);
  };
  run_to("a", 1);
  run_to("b", 1);
  run_to("c", 8);
  CHECK(slurp(dir + "/a/estimate.csv") == slurp(dir + "/b/estimate.csv"));
  CHECK(slurp(dir + "/a/estimates.jsonl") == slurp(dir + "/b/estimates.jsonl"));
  CHECK(slurp(dir + "/a/estimate.csv") == slurp(dir + "/c/estimate.csv"));
  CHECK(slurp(dir + "/a/estimates.jsonl") == slurp(dir + "/c/estimates.jsonl"));

  // the manifest tracks identical data digests
  auto ma = nlohmann::json::parse(slurp(dir + "/a/manifest.json"));
  auto mc = nlohmann::json::parse(slurp(dir + "/c/manifest.json"));
  CHECK(ma["outputs"][1]["digest"] == mc["outputs"][1]["digest"]);

  // a different seed changes the estimate and the config digest
  std::string text;
  REQUIRE(run({"estimate-p0", "--config", cfg, "--out", dir + "/d", "--seed", "999"}, &text) == 0);
  auto da = nlohmann::json::parse(slurp(dir + "/a/manifest.json"));
  auto dd = nlohmann::json::parse(slurp(dir + "/d/manifest.json"));
  CHECK(da["config_digest"] != dd["config_digest"]);
  fs::remove_all(dir);
}

TEST_CASE("every output row carries the config digest") {
  std::string dir = "cli_test_digest";
  fs::create_directories(dir);
  auto cfg = write_config(dir, std::string(kEstimateConfig));
  REQUIRE(run({"estimate-p0", "--config", cfg, "--out", dir + "/run"}) == 0);
  auto conf = ExperimentConfig::load(cfg);
  std::string csv = slurp(dir + "/run/estimate.csv");
  CHECK(csv.find("config_digest") != std::string::npos);
  CHECK(csv.find(conf.digest) != std::string::npos);
  std::string jsonl = slurp(dir + "/run/estimates.jsonl");
  CHECK(jsonl.find(conf.digest) != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("output directory can come from the environment") {
  std::string dir = "cli_test_env";
  fs::create_directories(dir);
  auto cfg = write_config(dir, std::string(kEstimateConfig));
  setenv("AFSLAB_OUT", (dir + "/from_env").c_str(), 1);
  REQUIRE(run({"estimate-p0", "--config", cfg}) == 0);
  unsetenv("AFSLAB_OUT");
  CHECK(fs::exists(dir + "/from_env/estimate.csv"));
  fs::remove_all(dir);
}

TEST_CASE("certify imports p0 from an estimate file with provenance") {
  std::string dir = "cli_test_p0import";
  fs::create_directories(dir);
  // feed a tiny upper confidence limit so the threshold check passes
  {
    std::ofstream f(dir + "/estimates.jsonl");
    f << R"({"name":"singular_prob","n":10000,"successes":0,"p_hat":0.0,)"
      << R"("ci_lower":0.0,"ci_upper":0.0001,"master_seed":1,"params":"","config_digest":"x"})"
      << "\n";
  }
  auto cfg = write_config(dir, R"({
    "model": {"d": 1},
    "base": {"b0": "5", "p0": "23^-4", "p0_source": ")" + dir + R"(/estimates.jsonl",
              "L0": "11^256", "k_max": 5},
    "out": {"dir": ")" + dir + R"(/run"}
  })");
  REQUIRE(run({"certify", "--config", cfg}) == 0);
  auto cert = nlohmann::json::parse(slurp(dir + "/run/certificate.json"));
  std::string prov = cert["base"]["p0_provenance"];
  CHECK(prov.find("upper 95% confidence limit") != std::string::npos);
  // the imported rational is the dyadic value of 1e-4
  CHECK(cert["base"]["p0"].get<std::string>() != "1/279841");
  fs::remove_all(dir);
}

TEST_CASE("wegner and recursion subcommands run end to end") {
  std::string dir = "cli_test_cmds";
  fs::create_directories(dir);
  auto wegner_cfg = write_config(dir, R"({
    "model": {"d": 1},
    "disorder": {"family": "uniform", "lambda": 1.0, "master_seed": 101},
    "probe": {"E": 4.72, "L": 9, "n": 500, "eps_grid": [1e-2, 1e-3]},
    "out": {"dir": ")" + dir + R"(/w"}
  })");
  std::string text;
  CHECK(run({"wegner", "--config", wegner_cfg, "--workers", "4"}, &text) == 0);
  CHECK(fs::exists(dir + "/w/wegner_curve.csv"));

  auto rec_cfg = write_config(dir, R"({
    "model": {"d": 1},
    "base": {"b0": "5", "p0": "23^-4", "L0": "3", "k_max": 1},
    "disorder": {"family": "uniform", "lambda": 10.0, "master_seed": 1001},
    "probe": {"E": -17493.8, "n": 600, "scale_k": 0},
    "out": {"dir": ")" + dir + R"(/r"}
  })");
  CHECK(run({"recursion", "--config", rec_cfg, "--workers", "4"}, &text) == 0);
  CHECK(text.find("pass") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("remaining subcommands produce their data files") {
  std::string dir = "cli_test_rest";
  fs::create_directories(dir);
  auto cfg = write_config(dir, R"({
    "model":    {"d": 1},
    "base":     {"b0": "5", "p0": "23^-4", "L0": "3", "k_max": 1},
    "disorder": {"family": "uniform", "lambda": 10.0, "master_seed": 7},
    "probe":    {"E": -1e5, "n": 40, "scale_k": 0, "L": 9, "L_list": [9, 15],
                 "eps": 0.25, "x": -15, "y": 15, "ambient_L": 45,
                 "grid_step": 0.1, "I_lo": 0.0, "I_hi": 4.0,
                 "sweep_a": 2.0, "sweep_c": 0.05},
    "out":      {"dir": ")" + dir + R"(/o"}
  })");
  struct Case { const char* cmd; const char* file; };
  for (auto& c : std::vector<Case>{{"cnr", "cnr_failure.csv"},
                                   {"dominated-decay", "dominated_decay.csv"},
                                   {"appendix-chain", "appendix_chain.csv"},
                                   {"sweep", "sweep.csv"},
                                   {"efc", "efc.jsonl"},
                                   {"esl-curve", "esl_curve.csv"}}) {
    std::string text;
    INFO(std::string(c.cmd), ": ", text);
    CHECK(run({c.cmd, "--config", cfg, "--out", dir + "/" + c.cmd, "--workers", "4"},
              &text) == 0);
    CHECK(fs::exists(dir + "/" + c.cmd + "/" + c.file));
    CHECK(fs::exists(dir + "/" + c.cmd + "/manifest.json"));
  }
  fs::remove_all(dir);
}
