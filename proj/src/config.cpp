#include "afs/config.hpp"

#include <fstream>
#include <sstream>

#include "afs/io.hpp"

namespace afs {

mpz_class parse_bigint(const std::string& s) {
  try {
    auto caret = s.find('^');
    if (caret != std::string::npos) {
      mpz_class base(s.substr(0, caret), 10);
      long e = std::stol(s.substr(caret + 1));
      if (e < 0) throw ConfigError("negative exponent in integer literal: " + s);
      mpz_class r;
      mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(e));
      return r;
    }
    return mpz_class(s, 10);  // always base 10; never auto-detect octal/hex
  } catch (const std::invalid_argument&) {
    throw ConfigError("cannot parse integer literal: " + s);
  }
}

mpq_class parse_rational(const std::string& s) {
  try {
    auto caret = s.find('^');
    if (caret != std::string::npos) {
      mpz_class base(s.substr(0, caret), 10);
      long e = std::stol(s.substr(caret + 1));
      mpz_class p;
      mpz_pow_ui(p.get_mpz_t(), base.get_mpz_t(),
                 static_cast<unsigned long>(e < 0 ? -e : e));
      mpq_class q(p);
      if (e < 0) q = 1 / q;
      return q;
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      mpz_class num(digits, 10);
      mpz_class den = 1;
      for (size_t i = dot + 1; i < s.size(); ++i) den *= 10;
      mpq_class q(num, den);
      q.canonicalize();
      return q;
    }
    mpq_class q(s, 10);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw ConfigError("cannot parse rational literal: " + s);
  }
}

namespace {

std::string as_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_float()) {
    std::ostringstream os;
    os << v.get<double>();
    return os.str();
  }
  throw ConfigError("expected string or number, got: " + v.dump());
}

DisorderFamily parse_family(const std::string& f) {
  if (f == "uniform") return DisorderFamily::Uniform;
  if (f == "holder") return DisorderFamily::Holder;
  if (f == "almost_zero_order") return DisorderFamily::AlmostZeroOrder;
  throw ConfigError("unknown disorder family: " + f);
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("model")) {
      const auto& m = j["model"];
      if (m.contains("d")) c.d = m["d"].get<int>();
      if (m.contains("beta")) c.beta = parse_rational(as_text(m["beta"]));
    }
    if (j.contains("base")) {
      const auto& b = j["base"];
      if (b.contains("b0")) c.b0 = parse_rational(as_text(b["b0"]));
      if (b.contains("p0")) {
        c.p0_text = as_text(b["p0"]);
        c.p0 = parse_rational(c.p0_text);
      }
      if (b.contains("p0_source")) c.p0_source = b["p0_source"].get<std::string>();
      if (b.contains("L0")) {
        std::string t = as_text(b["L0"]);
        if (t == "auto-threshold") c.l0_auto = true;
        else c.L0 = parse_bigint(t);
      }
      if (b.contains("k_max")) c.k_max = b["k_max"].get<int>();
      if (b.contains("exact_k_cap")) c.exact_k_cap = b["exact_k_cap"].get<int>();
      if (b.contains("digits")) c.digits = b["digits"].get<int>();
    }
    if (c.p0 == 0) c.p0 = parse_rational(c.p0_text);
    if (j.contains("disorder")) {
      const auto& d = j["disorder"];
      if (d.contains("family")) c.disorder.family = parse_family(d["family"].get<std::string>());
      if (d.contains("a")) c.disorder.a = d["a"].get<double>();
      if (d.contains("b")) c.disorder.b = d["b"].get<double>();
      if (d.contains("beta")) c.disorder.beta = d["beta"].get<double>();
      if (d.contains("C")) c.disorder.C = d["C"].get<double>();
      if (d.contains("Cp")) c.disorder.Cp = d["Cp"].get<double>();
      if (d.contains("lambda")) c.disorder.lambda = d["lambda"].get<double>();
      if (d.contains("master_seed")) c.disorder.master_seed = d["master_seed"].get<uint64_t>();
      c.disorder.validate();
    }
    if (j.contains("probe")) {
      const auto& p = j["probe"];
      if (p.contains("E")) c.e = p["E"].get<double>();
      if (p.contains("E_grid")) c.e_grid = p["E_grid"].get<std::vector<double>>();
      if (p.contains("L")) c.l = p["L"].get<int64_t>();
      if (p.contains("L_list")) c.l_list = p["L_list"].get<std::vector<int64_t>>();
      if (p.contains("n")) c.n = p["n"].get<uint64_t>();
      if (p.contains("scale_k")) c.scale_k = p["scale_k"].get<int>();
      if (p.contains("eps_grid")) c.eps_grid = p["eps_grid"].get<std::vector<double>>();
      if (p.contains("eps")) c.eps = p["eps"].get<double>();
      if (p.contains("x")) c.x = p["x"].get<int64_t>();
      if (p.contains("y")) c.y = p["y"].get<int64_t>();
      if (p.contains("ambient_L")) c.ambient_l = p["ambient_L"].get<int64_t>();
      if (p.contains("grid_step")) c.grid_step = p["grid_step"].get<double>();
      if (p.contains("I_lo")) c.i_lo = p["I_lo"].get<double>();
      if (p.contains("I_hi")) c.i_hi = p["I_hi"].get<double>();
      if (p.contains("sweep_a")) c.sweep_a = p["sweep_a"].get<double>();
      if (p.contains("sweep_c")) c.sweep_c = p["sweep_c"].get<double>();
    }
    if (j.contains("numerics")) {
      const auto& nn = j["numerics"];
      if (nn.contains("dense_cap")) c.op.dense_cap = nn["dense_cap"].get<size_t>();
      if (nn.contains("w_norm_mode")) {
        std::string m = nn["w_norm_mode"].get<std::string>();
        if (m == "exact") c.op.w_norm_exact = true;
        else if (m == "bound") c.op.w_norm_exact = false;
        else throw ConfigError("w_norm_mode must be \"bound\" or \"exact\"");
      }
      if (nn.contains("rel_tol")) c.rel_tol = nn["rel_tol"].get<double>();
    }
    if (j.contains("out")) {
      const auto& o = j["out"];
      if (o.contains("dir")) c.out_dir = o["dir"].get<std::string>();
      if (o.contains("workers")) c.workers = o["workers"].get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  if (c.d < 1) throw ConfigError("model.d must be >= 1");
  if (c.k_max < 1) throw ConfigError("base.k_max must be >= 1");
  if (c.workers < 1) throw ConfigError("out.workers must be >= 1");
  c.digest = hex64(fnv1a64(c.canonical().dump()));
  return c;
}

nlohmann::ordered_json ExperimentConfig::canonical() const {
  nlohmann::ordered_json j;
  j["model"] = {{"d", d}, {"beta", beta.get_str()}};
  j["base"] = {{"b0", b0.get_str()},     {"p0", p0.get_str()},
               {"p0_source", p0_source}, {"L0", l0_auto ? "auto-threshold" : L0.get_str()},
               {"k_max", k_max},         {"exact_k_cap", exact_k_cap},
               {"digits", digits}};
  j["disorder"] = {{"family", disorder.family_name()},
                   {"a", disorder.a},
                   {"b", disorder.b},
                   {"beta", disorder.beta},
                   {"C", disorder.C},
                   {"Cp", disorder.Cp},
                   {"lambda", disorder.lambda},
                   {"master_seed", disorder.master_seed}};
  j["probe"] = {{"E", e},           {"E_grid", e_grid},   {"L", l},
                {"L_list", l_list}, {"n", n},             {"scale_k", scale_k},
                {"eps_grid", eps_grid}, {"eps", eps},     {"x", x},
                {"y", y},           {"ambient_L", ambient_l}, {"grid_step", grid_step},
                {"I_lo", i_lo},     {"I_hi", i_hi},       {"sweep_a", sweep_a},
                {"sweep_c", sweep_c}};
  // out.dir and out.workers are excluded: neither may affect results
  j["numerics"] = {{"dense_cap", op.dense_cap},
                   {"w_norm_mode", op.w_norm_exact ? "exact" : "bound"},
                   {"rel_tol", rel_tol}};
  return j;
}

}  // namespace afs
