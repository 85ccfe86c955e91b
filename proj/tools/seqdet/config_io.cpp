#include "config_io.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "seqdet/optimizer_pair.hpp"

namespace seqdet::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
  const std::size_t hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

double parse_double(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  if (t.empty()) throw ConfigError(what + ": empty numeric value");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (errno != 0 || end != t.c_str() + t.size())
    throw ConfigError(what + ": '" + t + "' is not a number");
  return v;
}

long parse_long(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (errno != 0 || t.empty() || end != t.c_str() + t.size())
    throw ConfigError(what + ": '" + t + "' is not an integer");
  return v;
}

bool parse_bool(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw ConfigError(what + ": '" + t + "' is not a boolean");
}

ParamSet parse_set(const std::string& s, int grid_n, const std::string& what) {
  const std::size_t colon = s.find(':');
  if (colon == std::string::npos) return ParamSet::singleton(parse_double(s, what));
  const double lo = parse_double(s.substr(0, colon), what + " lower endpoint");
  const double hi = parse_double(s.substr(colon + 1), what + " upper endpoint");
  if (lo == hi) return ParamSet::singleton(lo);
  return ParamSet::interval(lo, hi, grid_n);
}

Family parse_family(const std::string& s) {
  const std::string t = trim(s);
  if (t == "normal") return Family::normal_mean_unit_var();
  if (t == "exponential") return Family::exponential_rate();
  throw ConfigError("family: '" + t + "' (expected normal or exponential)");
}

}  // namespace

DetectorConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, value).second)
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key +
                        "'");
  }

  static const char* known[] = {"procedure", "family",     "theta",
                                "lambda",    "a",          "beta",
                                "eta_grid_n", "grid_n",    "pair",
                                "pair_tol",  "require_verified_pair"};
  for (const auto& [key, value] : kv) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known))
      throw ConfigError("config: unknown key '" + key + "'");
  }
  auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  DetectorConfig cfg;
  int grid_n = 512;
  if (const auto* v = get("grid_n")) {
    grid_n = static_cast<int>(parse_long(*v, "grid_n"));
    if (grid_n < 2) throw ConfigError("grid_n must be at least 2");
  }
  if (const auto* v = get("family")) cfg.family = parse_family(*v);
  if (const auto* v = get("procedure")) cfg.procedure = procedure_from_string(trim(*v));
  if (const auto* v = get("theta")) cfg.theta = parse_set(*v, grid_n, "theta");
  if (const auto* v = get("lambda")) cfg.lambda = parse_set(*v, grid_n, "lambda");
  if (const auto* v = get("a")) cfg.a = parse_double(*v, "a");
  if (const auto* v = get("beta")) cfg.beta = parse_double(*v, "beta");
  if (const auto* v = get("eta_grid_n"))
    cfg.eta_grid_n = static_cast<int>(parse_long(*v, "eta_grid_n"));
  if (const auto* v = get("pair_tol")) cfg.pair_residual_tol = parse_double(*v, "pair_tol");
  if (const auto* v = get("require_verified_pair"))
    cfg.require_verified_pair = parse_bool(*v, "require_verified_pair");

  if (const auto* v = get("pair")) {
    const std::string specv = trim(*v);
    if (specv == "beta") {
      if (cfg.family.kind() != Family::Kind::normal_mean)
        throw ConfigError("pair = beta requires the normal family");
      cfg.pair = std::make_shared<const OptimizerPair>(
          normal_beta_pair(cfg.beta, cfg.theta, cfg.lambda));
    } else if (specv.rfind("q0-const:", 0) == 0) {
      const double q0v = parse_double(specv.substr(9), "pair q0 constant");
      if (!(q0v > 0.0)) throw ConfigError("pair q0 constant must be positive");
      const TabulatedFn p =
          optimizer_from(TabulatedFn::constant(cfg.lambda, q0v), cfg.family, cfg.theta);
      cfg.pair = std::make_shared<const OptimizerPair>(
          pair_close(p, cfg.family, cfg.lambda, cfg.pair_residual_tol));
    } else if (specv.rfind("q0-csv:", 0) == 0) {
      const OptimizerPair seed_pair = load_pair_csv(specv.substr(7));
      const TabulatedFn p = optimizer_from(seed_pair.q, cfg.family, cfg.theta);
      cfg.pair = std::make_shared<const OptimizerPair>(
          pair_close(p, cfg.family, cfg.lambda, cfg.pair_residual_tol));
    } else if (specv.rfind("csv:", 0) == 0) {
      OptimizerPair pair = load_pair_csv(specv.substr(4));
      pair.residual =
          verify_pair(pair, cfg.family, cfg.theta, cfg.lambda, cfg.pair_residual_tol).residual;
      cfg.pair = std::make_shared<const OptimizerPair>(std::move(pair));
    } else {
      throw ConfigError("pair: '" + specv +
                        "' (expected beta, q0-const:V, q0-csv:PATH, or csv:PATH)");
    }
  }
  return cfg;
}

DetectorConfig load_config(const std::string& path, std::string* raw_text) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (raw_text) *raw_text = buf.str();
  return parse_config_text(buf.str());
}

namespace {

const std::pair<const char*, const char*> kPresets[] = {
    {"table1-m-star",
     "# windowed two-branch rule, normal mean\n"
     "procedure = m_star\nfamily = normal\ntheta = -1:-0.5\nlambda = 0\na = 18.50\n"},
    {"table1-cusum-half",
     "# single-parameter recursion pinned at -0.5\n"
     "procedure = cusum\nfamily = normal\ntheta = -0.5\nlambda = 0\na = 2.92\n"},
    {"table1-cusum-one",
     "# single-parameter recursion pinned at -1.0\n"
     "procedure = cusum\nfamily = normal\ntheta = -1.0\nlambda = 0\na = 9.88\n"},
    {"table2-scaled-glr",
     "# scaled GLR over composite windows, exponential rates\n"
     "procedure = t_hat_star_glr\nfamily = exponential\ntheta = 0.8:1\nlambda = 2:3\n"
     "a = 22.50\npair = q0-const:1\n"},
    {"table2-glr",
     "# GLR with a nominal pre-change rate\n"
     "procedure = tau_glr\nfamily = exponential\ntheta = 1\nlambda = 2:3\na = 5.02\n"},
};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : kPresets) out.emplace_back(name);
  return out;
}

std::optional<std::string> preset_text(const std::string& name) {
  for (const auto& [pname, text] : kPresets)
    if (name == pname) return std::string(text);
  return std::nullopt;
}

bool next_observation(std::istream& in, double& x, std::int64_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(body.c_str(), &end);
    if (errno != 0 || end != body.c_str() + body.size())
      throw ParseError("parse error at line " + std::to_string(line_no) + ": '" + body +
                       "' is not a number");
    x = v;
    return true;
  }
  return false;
}

std::vector<double> read_observations(std::istream& in) {
  std::vector<double> xs;
  double x = 0.0;
  std::int64_t line_no = 0;
  while (next_observation(in, x, line_no)) xs.push_back(x);
  return xs;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "NA";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void append_csv_row(const std::string& path, const std::string& header,
                    const std::string& row) {
  bool need_header = true;
  {
    std::ifstream probe(path);
    if (probe) {
      std::string first;
      if (std::getline(probe, first) && !first.empty()) {
        if (first != kCsvMagic)
          throw IoError("'" + path + "' exists and is not a seqdet csv file");
        need_header = false;
      }
    }
  }
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot write '" + path + "'");
  if (need_header) out << kCsvMagic << "\n" << header << "\n";
  out << row << "\n";
  if (!out) throw IoError("write to '" + path + "' failed");
}

void write_manifest(const std::string& out_path, const std::string& command,
                    const std::string& replay_json_text,
                    const std::vector<std::string>& outputs) {
  nlohmann::json m;
  m["tool"] = "seqdet";
  m["version"] = kVersion;
  m["command"] = command;
  m["replay"] = nlohmann::json::parse(replay_json_text);
  m["outputs"] = outputs;
  char stamp[64] = {0};
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  m["created_utc"] = stamp;

  const std::string path = out_path + ".manifest.json";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << m.dump(2) << "\n";
}

void write_pair_csv(const std::string& path, const OptimizerPair& pair) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << kCsvMagic << "\n"
      << "set,parameter,value\n";
  for (double x : pair.p.xs()) out << "p," << fmt(x) << "," << fmt(pair.eval_p(x)) << "\n";
  for (double x : pair.q.xs()) out << "q," << fmt(x) << "," << fmt(pair.eval_q(x)) << "\n";
  if (!out) throw IoError("write to '" + path + "' failed");
}

OptimizerPair load_pair_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read pair file '" + path + "'");
  std::string line;
  std::vector<double> pxs, pys, qxs, qys;
  bool saw_header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (!saw_header) {
      if (body != "set,parameter,value")
        throw ParseError("pair file '" + path + "' line " + std::to_string(line_no) +
                         ": expected header set,parameter,value");
      saw_header = true;
      continue;
    }
    std::istringstream row(body);
    std::string set_name, param, value;
    if (!std::getline(row, set_name, ',') || !std::getline(row, param, ',') ||
        !std::getline(row, value))
      throw ParseError("pair file '" + path + "' line " + std::to_string(line_no) +
                       ": expected set,parameter,value");
    const double xv = parse_double(param, "pair parameter");
    const double yv = parse_double(value, "pair value");
    if (set_name == "p") {
      pxs.push_back(xv);
      pys.push_back(yv);
    } else if (set_name == "q") {
      qxs.push_back(xv);
      qys.push_back(yv);
    } else {
      throw ParseError("pair file '" + path + "' line " + std::to_string(line_no) +
                       ": set must be p or q");
    }
  }
  if (pxs.empty() || qxs.empty())
    throw ParseError("pair file '" + path + "' is missing p or q rows");
  OptimizerPair pair{TabulatedFn(std::move(pxs), std::move(pys)),
                     TabulatedFn(std::move(qxs), std::move(qys))};
  return pair;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_value) {
  if (flag_value) return *flag_value;
  if (const char* env = std::getenv("SEQDET_SEED")) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || *env == '\0' || *end != '\0')
      throw ConfigError(std::string("SEQDET_SEED: '") + env + "' is not an unsigned integer");
    return static_cast<std::uint64_t>(v);
  }
  return 1;
}

}  // namespace seqdet::cli
