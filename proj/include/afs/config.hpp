// Declarative experiment configuration: one JSON document with nested
// sections (model / base / disorder / probe / numerics / out). Exact values
// accept "num/den" rationals and "base^exp" big-integer powers so configs
// stay byte-exact. See README for the schema.

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "afs/disorder.hpp"
#include "afs/operators.hpp"
#include "json.hpp"

namespace afs {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "5", "-3", "1/2", "0.25", "23^-4" -> exact rational
mpq_class parse_rational(const std::string& s);
// "11^256", "177147", "3^11" -> big integer (nonnegative)
mpz_class parse_bigint(const std::string& s);

struct ExperimentConfig {
  // model
  int d = 1;
  mpq_class beta = 1;

  // base parameters for the scale recursion
  mpq_class b0 = 5;
  mpq_class p0;
  std::string p0_text = "23^-4";
  std::string p0_source = "literal";  // or a path to an estimate CSV
  mpz_class L0 = 3;
  bool l0_auto = false;               // L0 = "auto-threshold"
  int k_max = 60;
  int exact_k_cap = 120;
  int digits = 50;

  // disorder
  DisorderSpec disorder;

  // probe knobs (used per subcommand)
  double e = 0.0;
  std::vector<double> e_grid;
  int64_t l = 9;
  std::vector<int64_t> l_list;
  uint64_t n = 1000;
  int scale_k = 0;
  std::vector<double> eps_grid;
  double eps = 1e-3;
  int64_t x = 0, y = 0;               // first-axis offsets for pair probes
  int64_t ambient_l = 45;
  double grid_step = 0.05;
  double i_lo = 0.0, i_hi = 4.0;
  double sweep_a = 0.1, sweep_c = 0.01;

  // numerics
  OperatorConfig op;
  double rel_tol = 1e-8;

  // orchestration
  std::string out_dir = "out";
  int workers = 1;

  std::string digest;                 // FNV-1a over the canonical dump

  static ExperimentConfig load(const std::string& path);
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json canonical() const;
};

}  // namespace afs
