#include "kslab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace kslab {

using nlohmann::json;

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::S1: return "S1";
    case Scenario::S2: return "S2";
    case Scenario::S3: return "S3";
    case Scenario::free: return "free";
  }
  return "free";
}

ConfigError::ConfigError(std::string field, const std::string& message,
                         std::optional<int> line)
    : std::runtime_error(
          (line ? "config line " + std::to_string(*line) + ": " : std::string("config ")) +
          (field.empty() ? std::string() : "field '" + field + "': ") + message),
      field_(std::move(field)),
      line_(line) {}

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Walks one JSON object, remembering which keys were consumed so that typos
// are reported instead of silently ignored.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& raw(const std::string& key) {
    if (!node_.contains(key)) throw ConfigError(join(path_, key), "missing required key");
    seen_.insert(key);
    return node_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (v.is_string() && (v == "inf" || v == "infinity")) {
      return std::numeric_limits<double>::infinity();
    }
    if (!v.is_number()) throw ConfigError(join(path_, key), "expected a number");
    return v.get<double>();
  }

  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key) || node_.at(key).is_null()) {
      seen_.insert(key);
      return std::nullopt;
    }
    return number(key);
  }

  int integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(join(path_, key), "expected an integer");
    return v.get<int>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(join(path_, key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(join(path_, key), "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const json& e = v[i];
      if (e.is_string() && (e == "inf" || e == "infinity")) {
        out.push_back(std::numeric_limits<double>::infinity());
      } else if (e.is_number()) {
        out.push_back(e.get<double>());
      } else {
        throw ConfigError(join(path_, key) + "[" + std::to_string(i) + "]",
                          "expected a number");
      }
    }
    return out;
  }

  Section child(const std::string& key) { return Section(raw(key), join(path_, key)); }
  const std::string& path() const { return path_; }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(join(path_, it.key()), "unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

json number_json(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

json numbers_json(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number_json(x));
  return a;
}

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

}  // namespace

Grid SimConfig::grid() const {
  try {
    return Grid::build(domain.dim, domain.lengths, domain.cells);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("domain", e.what());
  }
}

RadonMeasure SimConfig::measure() const {
  const Grid g = grid();
  std::vector<Atom> atoms = initial_measure.atoms;
  std::optional<GridField> density;
  std::optional<double> p;
  if (initial_measure.density_file) {
    const auto path = initial_measure.density_file->is_absolute()
                          ? *initial_measure.density_file
                          : base_dir / *initial_measure.density_file;
    RadonMeasure loaded = load_density(path, g, initial_measure.density_p);
    density = *loaded.density();
    p = initial_measure.density_p;
  }
  if (initial_measure.uniform_mass) {
    GridField uniform(g, *initial_measure.uniform_mass / g.domain_volume());
    if (density) {
      *density += uniform;
    } else {
      density = std::move(uniform);
    }
  }
  RadonMeasure m(std::move(atoms), std::move(density));
  if (p) m.set_lp_exponent(*p);
  if (initial_measure.total_mass) return m.scaled_to_mass(*initial_measure.total_mass);
  return m;
}

std::string SimConfig::canonical_json() const {
  json j;
  j["scenario"] = to_string(scenario);
  j["domain"] = {{"dim", domain.dim}, {"lengths", domain.lengths}, {"cells", domain.cells}};
  json phys = {{"chi", physics.chi}, {"eps", physics.eps}};
  if (physics.mollifier_eps) phys["mollifier_eps"] = *physics.mollifier_eps;
  if (!physics.eps_ladder.empty()) phys["eps_ladder"] = physics.eps_ladder;
  if (physics.estimated_critical_mass) {
    phys["estimated_critical_mass"] = *physics.estimated_critical_mass;
  }
  j["physics"] = phys;
  json atoms = json::array();
  for (const Atom& a : initial_measure.atoms) {
    atoms.push_back({{"position", std::vector<double>(a.position.begin(),
                                                      a.position.begin() + domain.dim)},
                     {"weight", a.weight}});
  }
  json meas = {{"atoms", atoms}};
  if (initial_measure.density_file) {
    meas["density_file"] = initial_measure.density_file->generic_string();
    meas["density_p"] = initial_measure.density_p;
  }
  if (initial_measure.uniform_mass) meas["uniform_mass"] = *initial_measure.uniform_mass;
  if (initial_measure.total_mass) meas["total_mass"] = *initial_measure.total_mass;
  j["initial_measure"] = meas;
  json tm = {{"T", time.T},
             {"cfl", time.cfl},
             {"dt_max", time.dt_max},
             {"record_start", time.record_start},
             {"record_every", time.record_every}};
  if (time.record_interval) tm["record_interval"] = *time.record_interval;
  j["time"] = tm;
  j["diagnostics"] = {{"p_list", numbers_json(diagnostics.p_list)},
                      {"dictionary_order", diagnostics.dictionary_order},
                      {"delta_grid", diagnostics.delta_grid},
                      {"r_star", diagnostics.r_star},
                      {"vague_acceptance_factor", diagnostics.vague_acceptance_factor},
                      {"vague_acceptance_floor", diagnostics.vague_acceptance_floor},
                      {"vague_window", {diagnostics.vague_window_lo, diagnostics.vague_window_hi}}};
  json bu = {{"linf_factor", blowup.linf_factor},
             {"dt_min", blowup.dt_min},
             {"positivity_tol", blowup.positivity_tol}};
  if (blowup.cell_mass_fraction) bu["cell_mass_fraction"] = *blowup.cell_mass_fraction;
  j["blowup"] = bu;
  j["solver"] = {{"elliptic", to_string(solver.method)}, {"tol", solver.tol}};
  j["output"] = {{"directory", output.directory.generic_string()},
                 {"snapshot_times", output.snapshot_times}};
  json lad = {{"t0", ladder.t0},
              {"uniformity_p", ladder.uniformity_p},
              {"uniformity_lo", ladder.uniformity_lo}};
  if (ladder.uniformity_hi) lad["uniformity_hi"] = *ladder.uniformity_hi;
  j["ladder"] = lad;
  j["seed"] = seed;
  return j.dump(2);
}

std::vector<std::string> SimConfig::validate() const {
  std::vector<std::string> warnings;
  require(domain.dim == 2 || domain.dim == 3, "domain.dim", "must be 2 or 3");
  require(domain.lengths.size() == static_cast<std::size_t>(domain.dim), "domain.lengths",
          "needs one entry per axis");
  require(domain.cells.size() == static_cast<std::size_t>(domain.dim), "domain.cells",
          "needs one entry per axis");
  const Grid g = grid();
  require(physics.eps > 0.0 && physics.eps <= 1.0, "physics.eps", "must lie in (0, 1]");
  if (physics.mollifier_eps) {
    require(*physics.mollifier_eps > 0.0 && *physics.mollifier_eps <= 1.0,
            "physics.mollifier_eps", "must lie in (0, 1]");
  }
  for (double e : physics.eps_ladder) {
    require(e > 0.0 && e <= 1.0, "physics.eps_ladder", "entries must lie in (0, 1]");
  }
  const bool has_atoms = !initial_measure.atoms.empty();
  const bool has_density = initial_measure.density_file || initial_measure.uniform_mass;
  require(has_atoms || has_density, "initial_measure", "needs atoms or a density");
  for (std::size_t i = 0; i < initial_measure.atoms.size(); ++i) {
    const Atom& a = initial_measure.atoms[i];
    const std::string f = "initial_measure.atoms[" + std::to_string(i) + "]";
    require(a.weight > 0.0, f + ".weight", "must be positive");
    require(g.contains(a.position), f + ".position", "lies outside the closed box");
  }
  if (initial_measure.uniform_mass) {
    require(*initial_measure.uniform_mass > 0.0, "initial_measure.uniform_mass",
            "must be positive");
  }
  if (initial_measure.total_mass) {
    require(*initial_measure.total_mass > 0.0, "initial_measure.total_mass",
            "must be positive");
  }
  require(initial_measure.density_p >= 1.0, "initial_measure.density_p", "must be >= 1");
  require(time.T > 0.0, "time.T", "must be positive");
  require(time.cfl > 0.0 && time.cfl < 1.0, "time.cfl", "must lie in (0, 1)");
  if (time.cfl > 0.5) {
    warnings.push_back("time.cfl above 0.5 does not guarantee positivity");
  }
  require(time.dt_max > 0.0, "time.dt_max", "must be positive");
  require(time.record_start > 0.0, "time.record_start", "must be positive");
  if (time.record_interval) {
    require(*time.record_interval > 0.0, "time.record_interval", "must be positive");
  }
  require(time.record_every >= 1, "time.record_every", "must be >= 1");
  require(!diagnostics.p_list.empty(), "diagnostics.p_list", "must not be empty");
  for (double p : diagnostics.p_list) {
    require(p >= 1.0, "diagnostics.p_list", "exponents must be >= 1");
  }
  require(diagnostics.dictionary_order >= 0, "diagnostics.dictionary_order", "must be >= 0");
  require(diagnostics.r_star >= 1.0, "diagnostics.r_star", "must be >= 1");
  require(solver.tol > 0.0 && solver.tol <= 1e-6, "solver.tol", "must lie in (0, 1e-6]");
  require(blowup.dt_min > 0.0, "blowup.dt_min", "must be positive");
  require(blowup.linf_factor > 0.0, "blowup.linf_factor", "must be positive");
  if (blowup.cell_mass_fraction) {
    require(*blowup.cell_mass_fraction > 0.0 && *blowup.cell_mass_fraction <= 1.0,
            "blowup.cell_mass_fraction", "must lie in (0, 1]");
  }
  for (double t : output.snapshot_times) {
    require(t > 0.0 && t <= time.T, "output.snapshot_times", "times must lie in (0, T]");
  }

  switch (scenario) {
    case Scenario::S1:
      require(domain.dim == 2, "domain.dim", "scenario S1 needs n = 2");
      require(physics.chi < 0.0, "physics.chi", "scenario S1 needs chi < 0");
      break;
    case Scenario::S2: {
      require(domain.dim == 2, "domain.dim", "scenario S2 needs n = 2");
      require(physics.chi > 0.0, "physics.chi", "scenario S2 needs chi > 0");
      if (physics.estimated_critical_mass) {
        double mass = initial_measure.total_mass.value_or(0.0);
        if (!initial_measure.total_mass) {
          for (const Atom& a : initial_measure.atoms) mass += a.weight;
          mass += initial_measure.uniform_mass.value_or(0.0);
        }
        if (mass > *physics.estimated_critical_mass) {
          warnings.push_back("scenario S2: initial mass exceeds the estimated critical mass");
        }
      }
      break;
    }
    case Scenario::S3:
      require(domain.dim == 3, "domain.dim", "scenario S3 needs n = 3");
      require(physics.chi < 0.0, "physics.chi", "scenario S3 needs chi < 0");
      require(!has_atoms && has_density, "initial_measure",
              "scenario S3 needs density-type initial data");
      break;
    case Scenario::free:
      break;
  }
  return warnings;
}

SimConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i) {
      if (text[i] == '\n') ++line;
    }
    throw ConfigError("", std::string("syntax error: ") + e.what(), line);
  }

  SimConfig cfg;
  cfg.base_dir = base_dir;
  try {
    Section top(root, "");
    if (top.has("scenario")) {
      const std::string s = top.string("scenario");
      if (s == "S1") cfg.scenario = Scenario::S1;
      else if (s == "S2") cfg.scenario = Scenario::S2;
      else if (s == "S3") cfg.scenario = Scenario::S3;
      else if (s == "free") cfg.scenario = Scenario::free;
      else throw ConfigError("scenario", "must be one of S1, S2, S3, free");
    }
    {
      Section d = top.child("domain");
      cfg.domain.dim = d.integer("dim");
      if (cfg.domain.dim != 2 && cfg.domain.dim != 3) {
        throw ConfigError("domain.dim", "must be 2 or 3 (got " +
                                            std::to_string(cfg.domain.dim) + ")");
      }
      cfg.domain.lengths = d.numbers("lengths");
      cfg.domain.cells.clear();
      for (double c : d.numbers("cells")) {
        if (c != std::floor(c)) throw ConfigError("domain.cells", "expected integers");
        cfg.domain.cells.push_back(static_cast<int>(c));
      }
      d.finish();
    }
    if (top.has("physics")) {
      Section p = top.child("physics");
      cfg.physics.chi = p.number("chi", cfg.physics.chi);
      cfg.physics.eps = p.number("eps", cfg.physics.eps);
      cfg.physics.mollifier_eps = p.optional_number("mollifier_eps");
      if (p.has("eps_ladder")) cfg.physics.eps_ladder = p.numbers("eps_ladder");
      cfg.physics.estimated_critical_mass = p.optional_number("estimated_critical_mass");
      p.finish();
    }
    {
      Section m = top.child("initial_measure");
      if (m.has("atoms")) {
        const json& atoms = m.raw("atoms");
        if (!atoms.is_array()) throw ConfigError("initial_measure.atoms", "expected an array");
        for (std::size_t i = 0; i < atoms.size(); ++i) {
          Section a(atoms[i], "initial_measure.atoms[" + std::to_string(i) + "]");
          const auto pos = a.numbers("position");
          if (pos.size() != static_cast<std::size_t>(cfg.domain.dim)) {
            throw ConfigError(a.path() + ".position", "needs one coordinate per axis");
          }
          Atom atom;
          for (std::size_t k = 0; k < pos.size(); ++k) atom.position[k] = pos[k];
          atom.weight = a.number("weight");
          a.finish();
          cfg.initial_measure.atoms.push_back(atom);
        }
      }
      if (m.has("density_file")) cfg.initial_measure.density_file = m.string("density_file");
      cfg.initial_measure.density_p = m.number("density_p", cfg.initial_measure.density_p);
      cfg.initial_measure.uniform_mass = m.optional_number("uniform_mass");
      cfg.initial_measure.total_mass = m.optional_number("total_mass");
      m.finish();
    }
    {
      Section t = top.child("time");
      cfg.time.T = t.number("T");
      cfg.time.cfl = t.number("cfl", cfg.time.cfl);
      cfg.time.dt_max = t.number("dt_max", cfg.time.dt_max);
      cfg.time.record_start = t.number("record_start", cfg.time.record_start);
      cfg.time.record_interval = t.optional_number("record_interval");
      if (t.has("record_every")) cfg.time.record_every = t.integer("record_every");
      t.finish();
    }
    if (top.has("diagnostics")) {
      Section d = top.child("diagnostics");
      if (d.has("p_list")) cfg.diagnostics.p_list = d.numbers("p_list");
      if (d.has("dictionary_order")) {
        cfg.diagnostics.dictionary_order = d.integer("dictionary_order");
      }
      if (d.has("delta_grid")) cfg.diagnostics.delta_grid = d.numbers("delta_grid");
      cfg.diagnostics.r_star = d.number("r_star", cfg.diagnostics.r_star);
      cfg.diagnostics.vague_acceptance_factor =
          d.number("vague_acceptance_factor", cfg.diagnostics.vague_acceptance_factor);
      cfg.diagnostics.vague_acceptance_floor =
          d.number("vague_acceptance_floor", cfg.diagnostics.vague_acceptance_floor);
      if (d.has("vague_window")) {
        const auto w = d.numbers("vague_window");
        if (w.size() != 2) throw ConfigError("diagnostics.vague_window", "expected [lo, hi]");
        cfg.diagnostics.vague_window_lo = w[0];
        cfg.diagnostics.vague_window_hi = w[1];
      }
      d.finish();
    }
    if (top.has("blowup")) {
      Section b = top.child("blowup");
      cfg.blowup.linf_factor = b.number("linf_factor", cfg.blowup.linf_factor);
      cfg.blowup.dt_min = b.number("dt_min", cfg.blowup.dt_min);
      cfg.blowup.positivity_tol = b.number("positivity_tol", cfg.blowup.positivity_tol);
      cfg.blowup.cell_mass_fraction = b.optional_number("cell_mass_fraction");
      b.finish();
    }
    if (top.has("solver")) {
      Section s = top.child("solver");
      if (s.has("elliptic")) {
        const std::string m = s.string("elliptic");
        if (m == "transform") cfg.solver.method = EllipticMethod::transform;
        else if (m == "cg" || m == "conjugate_gradient") {
          cfg.solver.method = EllipticMethod::conjugate_gradient;
        } else {
          throw ConfigError("solver.elliptic", "must be 'transform' or 'cg'");
        }
      }
      cfg.solver.tol = s.number("tol", cfg.solver.tol);
      s.finish();
    }
    if (top.has("output")) {
      Section o = top.child("output");
      if (o.has("directory")) cfg.output.directory = o.string("directory");
      if (o.has("snapshot_times")) cfg.output.snapshot_times = o.numbers("snapshot_times");
      o.finish();
    }
    if (top.has("ladder")) {
      Section l = top.child("ladder");
      cfg.ladder.t0 = l.number("t0", cfg.ladder.t0);
      cfg.ladder.uniformity_p = l.number("uniformity_p", cfg.ladder.uniformity_p);
      cfg.ladder.uniformity_lo = l.number("uniformity_lo", cfg.ladder.uniformity_lo);
      cfg.ladder.uniformity_hi = l.optional_number("uniformity_hi");
      l.finish();
    }
    if (top.has("seed")) {
      const json& s = top.raw("seed");
      if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
        throw ConfigError("seed", "expected a nonnegative integer");
      }
      cfg.seed = s.get<unsigned long>();
    }
    top.finish();
  } catch (const json::exception& e) {
    throw ConfigError("", std::string("missing or malformed entry: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace kslab
