#include "sree/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <variant>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

namespace sree {

bool OutputBlock::wants(const std::string& name) const {
  return std::find(csv.begin(), csv.end(), name) != csv.end();
}

namespace {

using Slot = std::variant<double*, std::int64_t*, bool*, std::string*, std::vector<std::string>*>;

struct Key {
  const char* section;
  const char* name;
  Slot (*bind)(RunConfig&);
};

#define SREE_KEY(sec, field) \
  Key { #sec, #field, [](RunConfig& c) -> Slot { return &c.sec.field; } }

const Key kKeys[] = {
    SREE_KEY(primitives, A),
    SREE_KEY(primitives, alpha),
    SREE_KEY(primitives, beta),
    SREE_KEY(primitives, delta),
    SREE_KEY(primitives, sigma),
    SREE_KEY(primitives, r),
    SREE_KEY(kernel, family),
    SREE_KEY(kernel, length),
    SREE_KEY(kernel, inhibit_length),
    SREE_KEY(kernel, inhibit_weight),
    SREE_KEY(kernel, a),
    SREE_KEY(kernel, b),
    SREE_KEY(kernel, I_lo),
    SREE_KEY(kernel, I_hi),
    SREE_KEY(grid, spatial_nodes),
    SREE_KEY(grid, periodic),
    SREE_KEY(grid, time_nodes),
    SREE_KEY(grid, tail_epsilon),
    SREE_KEY(grid, horizon_floor),
    SREE_KEY(solver, gamma),
    SREE_KEY(solver, tol),
    SREE_KEY(solver, max_sweeps),
    SREE_KEY(solver, oracle),
    SREE_KEY(solver, terminal_tol),
    SREE_KEY(solver, oracle_grad_tol),
    SREE_KEY(solver, oracle_max_fine_nodes),
    SREE_KEY(solver, certify_consistency),
    SREE_KEY(solver, certify_dynamics),
    SREE_KEY(solver, certify_euler),
    SREE_KEY(k0, profile),
    SREE_KEY(k0, level),
    SREE_KEY(k0, slope),
    SREE_KEY(k0, amplitude),
    SREE_KEY(k0, center),
    SREE_KEY(k0, width),
    SREE_KEY(location, K),
    SREE_KEY(location, K_table),
    SREE_KEY(location, k0),
    SREE_KEY(output, directory),
    SREE_KEY(output, csv),
};

#undef SREE_KEY

const Key* find_key(std::string_view section, std::string_view name) {
  for (const Key& k : kKeys)
    if (section == k.section && name == k.name) return &k;
  return nullptr;
}

std::string where(std::string_view section, std::string_view name) {
  return std::string(section) + "." + std::string(name);
}

void assign_toml(const Key& key, RunConfig& cfg, const toml::node& node, std::vector<std::string>& errors) {
  const std::string at = where(key.section, key.name);
  std::visit(
      [&](auto* slot) {
        using T = std::remove_pointer_t<decltype(slot)>;
        if constexpr (std::is_same_v<T, double>) {
          if (auto v = node.value<double>())
            *slot = *v;
          else
            errors.push_back(at + ": expected a number");
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          if (node.is_integer())
            *slot = *node.value<std::int64_t>();
          else
            errors.push_back(at + ": expected an integer");
        } else if constexpr (std::is_same_v<T, bool>) {
          if (auto v = node.value<bool>())
            *slot = *v;
          else
            errors.push_back(at + ": expected a boolean");
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (auto v = node.value<std::string>())
            *slot = *v;
          else
            errors.push_back(at + ": expected a string");
        } else {
          const auto* arr = node.as_array();
          if (!arr) {
            errors.push_back(at + ": expected an array of strings");
            return;
          }
          std::vector<std::string> out;
          for (const auto& el : *arr) {
            auto v = el.value<std::string>();
            if (!v) {
              errors.push_back(at + ": expected an array of strings");
              return;
            }
            out.push_back(*v);
          }
          *slot = std::move(out);
        }
      },
      key.bind(cfg));
}

std::string trim(std::string s) {
  const auto ws = [](unsigned char ch) { return std::isspace(ch) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

template <class T>
bool parse_number(const std::string& text, T& out) {
  const std::string s = trim(text);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

void assign_text(const Key& key, RunConfig& cfg, const std::string& text, const std::string& var) {
  std::visit(
      [&](auto* slot) {
        using T = std::remove_pointer_t<decltype(slot)>;
        bool ok = true;
        if constexpr (std::is_same_v<T, double> || std::is_same_v<T, std::int64_t>) {
          ok = parse_number(text, *slot);
        } else if constexpr (std::is_same_v<T, bool>) {
          const std::string s = trim(text);
          if (s == "true" || s == "1")
            *slot = true;
          else if (s == "false" || s == "0")
            *slot = false;
          else
            ok = false;
        } else if constexpr (std::is_same_v<T, std::string>) {
          *slot = text;
        } else {
          slot->clear();
          std::stringstream ss(text);
          std::string item;
          while (std::getline(ss, item, ','))
            if (!trim(item).empty()) slot->push_back(trim(item));
        }
        if (!ok) throw ConfigError(var + ": cannot parse '" + text + "'");
      },
      key.bind(cfg));
}

std::string upper(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& toml_text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
    throw ConfigError(os.str());
  }
  RunConfig cfg;
  std::vector<std::string> errors;
  for (const auto& [sec_key, sec_node] : root) {
    const std::string_view section = sec_key.str();
    if (section == "seed") {
      auto v = sec_node.value<std::int64_t>();
      if (!v || *v < 0)
        errors.push_back("seed: expected a nonnegative integer");
      else
        cfg.seed = static_cast<std::uint64_t>(*v);
      continue;
    }
    const auto* tbl = sec_node.as_table();
    if (!tbl) {
      errors.push_back(std::string(section) + ": unknown top-level key");
      continue;
    }
    for (const auto& [k, node] : *tbl) {
      const Key* key = find_key(section, k.str());
      if (!key) {
        errors.push_back(where(section, k.str()) + ": unknown key");
        continue;
      }
      assign_toml(*key, cfg, node, errors);
    }
  }
  if (!errors.empty()) {
    std::string msg = source + ": invalid configuration";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::vector<std::string> apply_env_overrides(RunConfig& cfg,
                                             const std::function<const char*(const char*)>& getenv_fn) {
  std::vector<std::string> applied;
  for (const Key& key : kKeys) {
    const std::string var = "SREE_" + upper(key.section) + "_" + upper(key.name);
    if (const char* v = getenv_fn(var.c_str())) {
      assign_text(key, cfg, v, var);
      applied.push_back(var);
    }
  }
  if (const char* v = getenv_fn("SREE_SEED")) {
    if (!parse_number(v, cfg.seed)) throw ConfigError(std::string("SREE_SEED: cannot parse '") + v + "'");
    applied.emplace_back("SREE_SEED");
  }
  return applied;
}

double k0_profile(const K0Block& block, double z) {
  if (block.profile == "constant") return block.level;
  if (block.profile == "linear_ramp") return block.level + block.slope * (z - 0.5);
  if (block.profile == "gaussian_bump") {
    const double d = (z - block.center) / block.width;
    return block.level + block.amplitude * std::exp(-0.5 * d * d);
  }
  throw std::invalid_argument("unknown k0 profile '" + block.profile + "'");
}

namespace {

void require(bool cond, std::vector<std::string>& errors, const std::string& msg) {
  if (!cond) errors.push_back(msg);
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

ValidationResult validate_config(const RunConfig& cfg) {
  ValidationResult out;
  auto& errors = out.errors;

  ModelPrimitives prim;
  prim.production = {cfg.primitives.A, cfg.primitives.alpha, cfg.primitives.beta, cfg.primitives.delta};
  prim.utility = {cfg.primitives.sigma, 0.0};
  prim.r = cfg.primitives.r;
  require(prim.r > 0.0 && std::isfinite(prim.r), errors, "primitives.r: discount rate must be > 0 (got " + num(prim.r) + ")");

  const auto& kb = cfg.kernel;
  require(kb.I_lo > 0.0, errors, "kernel.I_lo: the externality interval must be bounded away from 0 (got " + num(kb.I_lo) + ")");
  require(kb.I_hi > kb.I_lo, errors, "kernel.I_hi: must exceed kernel.I_lo (got " + num(kb.I_hi) + ")");
  for (auto& e : audit_production(prim.production, kb.I_lo, kb.I_hi)) errors.push_back(std::move(e));
  for (auto& e : audit_utility(prim.utility)) errors.push_back(std::move(e));

  ExternalityKernel kernel;
  bool kernel_ok = true;
  try {
    kernel.w.family = parse_kernel_family(kb.family);
  } catch (const std::exception& e) {
    errors.push_back(std::string("kernel.family: ") + e.what());
    kernel_ok = false;
  }
  kernel.w.length = kb.length;
  kernel.w.inhibit_length = kb.inhibit_length;
  kernel.w.inhibit_weight = kb.inhibit_weight;
  kernel.psi = {kb.a, kb.b, kb.I_lo, kb.I_hi};
  if (kernel_ok)
    for (auto& e : audit_kernel(kernel)) {
      errors.push_back(std::move(e));
      kernel_ok = false;
    }

  const auto& g = cfg.grid;
  require(g.spatial_nodes >= 2, errors, "grid.spatial_nodes: need at least 2 (got " + std::to_string(g.spatial_nodes) + ")");
  require(g.time_nodes >= 2, errors, "grid.time_nodes: need at least 2 (got " + std::to_string(g.time_nodes) + ")");
  require(g.tail_epsilon > 0.0, errors, "grid.tail_epsilon: must be > 0 (got " + num(g.tail_epsilon) + ")");
  require(g.horizon_floor > 0.0, errors, "grid.horizon_floor: must be > 0 (got " + num(g.horizon_floor) + ")");

  const auto& s = cfg.solver;
  require(s.gamma > 0.0 && s.gamma <= 1.0, errors, "solver.gamma: damping must lie in (0, 1] (got " + num(s.gamma) + ")");
  require(s.tol > 0.0, errors, "solver.tol: must be > 0 (got " + num(s.tol) + ")");
  require(s.max_sweeps >= 0, errors, "solver.max_sweeps: must be >= 0");
  require(s.terminal_tol > 0.0, errors, "solver.terminal_tol: must be > 0");
  require(s.oracle_grad_tol > 0.0, errors, "solver.oracle_grad_tol: must be > 0");
  require(s.oracle_max_fine_nodes >= 3, errors, "solver.oracle_max_fine_nodes: must be >= 3");
  require(s.certify_consistency > 0.0 && s.certify_dynamics > 0.0 && s.certify_euler > 0.0, errors,
          "solver.certify_*: thresholds must be > 0");

  std::vector<double> k0;
  if (g.spatial_nodes >= 2) {
    const SpatialGrid sg = SpatialGrid::uniform(static_cast<std::size_t>(g.spatial_nodes), g.periodic);
    try {
      for (double z : sg.locations) {
        const double v = k0_profile(cfg.k0, z);
        if (!(v > 0.0) || !std::isfinite(v)) {
          errors.push_back("k0: profile must be positive on D (got " + num(v) + " at z = " + num(z) + ")");
          break;
        }
        k0.push_back(v);
      }
    } catch (const std::exception& e) {
      errors.push_back(std::string("k0.profile: ") + e.what());
    }
  }
  require(cfg.location.K > 0.0, errors, "location.K: must be > 0 (got " + num(cfg.location.K) + ")");
  require(cfg.location.k0 >= 0.0, errors, "location.k0: must be >= 0 (0 selects the k0 profile)");

  if (!errors.empty() || !kernel_ok) return out;

  const SpatialGrid sg = SpatialGrid::uniform(static_cast<std::size_t>(g.spatial_nodes), g.periodic);
  ExternalityOperator op(kernel, sg);
  auto& sum = out.summary;
  sum.lipschitz_S = lipschitz_constant(op);
  sum.S_zero_sup = sup_at_zero(op);
  const double k0_sup = *std::max_element(k0.begin(), k0.end());
  try {
    sum.schauder_M = schauder_bound_M(op, k0_sup, prim.production);
  } catch (const std::exception& e) {
    errors.push_back(std::string("kernel: ") + e.what());
    return out;
  }
  sum.K_sup = std::min(kb.I_hi, sum.schauder_M);
  sum.C1 = f_sup(sum.K_sup, prim.production);
  const double k0_single = cfg.location.k0 > 0.0 ? cfg.location.k0 : k0_profile(cfg.k0, 0.5);
  const TailBoundParams tp = make_tail_params(sum.C1, std::max(k0_sup, k0_single), prim.utility.sigma, prim.r);
  TimeGrid time;
  try {
    time = choose_horizon(g.tail_epsilon, tp, g.horizon_floor, static_cast<std::size_t>(g.time_nodes));
  } catch (const std::exception& e) {
    errors.push_back(std::string("grid: ") + e.what());
    return out;
  }
  sum.horizon_T = time.horizon;
  sum.phi_T = tail_bound_phi(time.horizon, tp);

  Economy eco{prim, std::move(op), std::move(time), std::move(k0), {}, false, {}};
  eco.shooting.terminal_tol = s.terminal_tol;
  eco.oracle.grad_tol = s.oracle_grad_tol;
  eco.oracle.max_fine_nodes = static_cast<std::size_t>(s.oracle_max_fine_nodes);
  out.economy = std::move(eco);
  return out;
}

}  // namespace sree
