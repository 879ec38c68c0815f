#include "nidreg/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "nidreg/error.hpp"

namespace nidreg::config {

namespace {

using nlohmann::json;

std::size_t line_at(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Tracks which keys of one object were consumed so leftovers can be reported.
class Reader {
public:
  explicit Reader(const std::string& text) : text_(text) {
    try {
      root_ = json::parse(text);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::config, "line " + std::to_string(line_at(text, e.byte == 0 ? 0 : e.byte - 1)) +
                                  ": malformed JSON (" + e.what() + ")");
    }
    if (!root_.is_object()) fail(ErrorKind::config, "config must be a JSON object");
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!root_.contains(key)) return;
    seen_.insert(key);
    try {
      out = root_.at(key).get<T>();
    } catch (const json::exception&) {
      bad(key, "wrong type");
    }
  }

  void get_size(const std::string& key, std::size_t& out) {
    if (!root_.contains(key)) return;
    seen_.insert(key);
    const json& v = root_.at(key);
    if (!v.is_number_unsigned()) bad(key, "expected a nonnegative integer");
    out = v.get<std::size_t>();
  }

  void get_sizes(const std::string& key, std::vector<std::size_t>& out) {
    if (!root_.contains(key)) return;
    seen_.insert(key);
    const json& v = root_.at(key);
    if (!v.is_array()) bad(key, "expected an array of nonnegative integers");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number_unsigned()) bad(key, "expected an array of nonnegative integers");
      out.push_back(e.get<std::size_t>());
    }
  }

  void get_j0(const std::string& key, std::optional<int>& out) {
    if (!root_.contains(key)) return;
    seen_.insert(key);
    out = j0_value(key, root_.at(key));
  }

  void get_j0s(const std::string& key, std::vector<std::optional<int>>& out) {
    if (!root_.contains(key)) return;
    seen_.insert(key);
    const json& v = root_.at(key);
    if (!v.is_array()) bad(key, "expected an array");
    out.clear();
    for (const auto& e : v) out.push_back(j0_value(key, e));
  }

  void get_kernel(npiv::KernelSpec& k) {
    get("h_z", k.h_z);
    get("h_w", k.h_w);
    std::string name;
    if (root_.contains("kernel")) {
      get("kernel", name);
      if (name == "gaussian") {
        k.kernel = npiv::KernelKind::gaussian;
      } else if (name == "epanechnikov") {
        k.kernel = npiv::KernelKind::epanechnikov;
      } else {
        bad("kernel", "unknown kernel '" + name + "'");
      }
    }
  }

  void get_alpha_rule(const std::string& key, bench::AlphaRule& rule) {
    if (!root_.contains(key)) return;
    seen_.insert(key);
    const json& v = root_.at(key);
    if (!v.is_object()) bad(key, "expected an object with scale and exponent");
    for (const auto& [k, e] : v.items()) {
      if (k != "scale" && k != "exponent") bad(key + "." + k, "unknown key", k);
      if (!e.is_number()) bad(key + "." + k, "expected a number", k);
    }
    if (v.contains("scale")) rule.scale = v.at("scale").get<double>();
    if (v.contains("exponent")) rule.exponent = v.at("exponent").get<double>();
  }

  void finish() const {
    for (const auto& [k, v] : root_.items()) {
      if (!seen_.contains(k)) bad(k, "unknown key");
    }
  }

  [[noreturn]] void bad(const std::string& field, const std::string& what, std::string needle = {}) const {
    if (needle.empty()) needle = field;
    const auto pos = text_.find("\"" + needle + "\"");
    const std::string where = pos == std::string::npos ? "" : "line " + std::to_string(line_at(text_, pos)) + ", ";
    fail(ErrorKind::config, where + "field '" + field + "': " + what);
  }

private:
  std::optional<int> j0_value(const std::string& key, const json& e) const {
    if (e.is_string()) {
      const auto s = e.get<std::string>();
      if (s == "inf" || s == "infinity") return std::nullopt;
      bad(key, "expected a positive integer or \"inf\"");
    }
    if (!e.is_number_integer() || e.get<long long>() < 1) bad(key, "expected a positive integer or \"inf\"");
    return static_cast<int>(e.get<long long>());
  }

  const std::string& text_;
  json root_;
  std::set<std::string> seen_;
};

void get_seed(Reader& r, std::uint64_t& seed) {
  std::size_t s = seed;
  r.get_size("seed", s);
  seed = s;
}

void get_threads(Reader& r, unsigned& threads) {
  std::size_t t = threads;
  r.get_size("threads", t);
  threads = static_cast<unsigned>(t);
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::config, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scheme parse_scheme(const std::string& name) {
  if (name == "tikhonov") return Scheme::tikhonov;
  if (name == "spectral_cutoff" || name == "cutoff") return Scheme::spectral_cutoff;
  if (name == "iterated_tikhonov") return Scheme::iterated_tikhonov;
  if (name == "landweber") return Scheme::landweber;
  fail(ErrorKind::config, "unknown scheme '" + name + "'");
}

bench::McConfig load_mc(const std::string& text) {
  Reader r(text);
  bench::McConfig c;
  r.get_j0s("j0", c.j0s);
  r.get_sizes("n", c.ns);
  r.get_size("reps", c.reps);
  r.get("alpha", c.alpha);
  std::string scheme = to_string(c.scheme.scheme);
  r.get("scheme", scheme);
  c.scheme.scheme = parse_scheme(scheme);
  r.get("iterations", c.scheme.iterations);
  r.get("step", c.scheme.step);
  r.get_kernel(c.kspec);
  r.get_size("grid_size", c.grid_size);
  r.get("k_max", c.k_max);
  get_seed(r, c.seed);
  get_threads(r, c.threads);
  r.finish();
  return c;
}

bench::CoverageConfig load_coverage(const std::string& text) {
  Reader r(text);
  bench::CoverageConfig c;
  r.get_j0s("j0", c.j0s);
  r.get_sizes("n", c.ns);
  r.get_size("reps", c.reps);
  r.get("gamma", c.gammas);
  r.get("c_const", c.c_consts);
  r.get_alpha_rule("flir_alpha", c.flir_alpha);
  r.get_alpha_rule("npiv_alpha", c.npiv_alpha);
  r.get_kernel(c.kspec);
  r.get_size("grid_size", c.grid_size);
  r.get("k_max", c.k_max);
  r.get_size("sim_draws", c.sim_draws);
  std::vector<std::string> models;
  r.get("models", models);
  if (!models.empty()) {
    c.flir = std::find(models.begin(), models.end(), "flir") != models.end();
    c.npiv = std::find(models.begin(), models.end(), "npiv") != models.end();
    for (const auto& m : models) {
      if (m != "flir" && m != "npiv") r.bad("models", "unknown model '" + m + "'");
    }
  }
  get_seed(r, c.seed);
  get_threads(r, c.threads);
  r.finish();
  return c;
}

bench::LimitRunConfig load_limit_check(const std::string& text) {
  Reader r(text);
  bench::LimitRunConfig c;
  r.get_sizes("n", c.ns);
  r.get_size("seeds", c.seeds);
  r.get("mu0_scales", c.mu0_scales);
  r.get("mu0_index", c.mu0_index);
  r.get_size("reps", c.base.reps);
  r.get("alpha_scale", c.base.alpha_scale);
  r.get("alpha_exponent", c.base.alpha_exponent);
  r.get("noise_sd", c.base.design.noise_sd);
  r.get_kernel(c.base.kspec);
  r.get_size("grid_size", c.base.grid_size);
  r.get_size("mixture_sample", c.base.mixture_sample);
  r.get_size("mixture_draws", c.base.mixture_draws);
  r.get("energy", c.base.energy);
  get_seed(r, c.base.seed);
  get_threads(r, c.base.threads);
  r.finish();
  return c;
}

bench::BoundConfig load_bound(const std::string& text) {
  Reader r(text);
  bench::BoundConfig c;
  r.get_j0("j0", c.j0);
  r.get_size("n", c.n);
  r.get_size("reps", c.reps);
  r.get("beta", c.beta);
  r.get("alpha_min", c.alpha_min);
  r.get("alpha_max", c.alpha_max);
  r.get_size("alpha_points", c.alpha_points);
  r.get_kernel(c.kspec);
  r.get_size("grid_size", c.grid_size);
  r.get("k_max", c.k_max);
  get_seed(r, c.seed);
  get_threads(r, c.threads);
  r.finish();
  return c;
}

bench::FiltersConfig load_filters(const std::string& text) {
  Reader r(text);
  bench::FiltersConfig c;
  r.get("alphas", c.alphas);
  r.get("iterations", c.iterations);
  r.get("step", c.step);
  r.get_size("points", c.points);
  r.get("lambda_max", c.lambda_max);
  r.finish();
  return c;
}

}  // namespace nidreg::config
