#include "mlwf/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace mlwf {

namespace {

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(strip(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(strip(cur));
  return out;
}

double to_double(const std::string& s, const std::string& where) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": cannot parse number '" + s + "'");
  }
}

int to_int(const std::string& s, const std::string& where) {
  try {
    size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": cannot parse integer '" + s + "'");
  }
}

/// One-value-per-key access with a whitelist.
class Section {
 public:
  Section(const RawConfig& raw, const std::string& name) : name_(name) {
    auto it = raw.sections.find(name);
    if (it != raw.sections.end()) entries_ = &it->second;
  }

  bool present() const { return entries_ != nullptr; }

  std::optional<std::string> get(const std::string& key) const {
    if (!entries_) return std::nullopt;
    std::optional<std::string> found;
    for (const auto& [k, v] : *entries_) {
      if (k == key) found = v;
    }
    return found;
  }

  std::vector<std::string> get_all(const std::string& key) const {
    std::vector<std::string> out;
    if (!entries_) return out;
    for (const auto& [k, v] : *entries_) {
      if (k == key) out.push_back(v);
    }
    return out;
  }

  void check_keys(const std::set<std::string>& allowed) const {
    if (!entries_) return;
    for (const auto& [k, v] : *entries_) {
      if (!allowed.count(k)) {
        throw ConfigError("[" + name_ + "]: unknown key '" + k + "'");
      }
    }
  }

  const std::string& name() const { return name_; }

 private:
  const std::vector<std::pair<std::string, std::string>>* entries_ = nullptr;
  std::string name_;
};

}  // namespace

RawConfig parse_ini(std::istream& in, const std::string& filename) {
  RawConfig raw;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    const std::string where = filename + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = strip(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      raw.sections[section];  // sections may be empty
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    if (section.empty()) throw ConfigError(where + ": key outside any [section]");
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    raw.sections[section].push_back({key, value});
  }
  return raw;
}

RawConfig parse_ini_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_ini(in, path);
}

RunConfig RunConfig::load(const RawConfig& raw, const std::vector<std::string>& required) {
  for (const auto& name : required) {
    if (!raw.has(name)) throw ConfigError("missing required section [" + name + "]");
  }

  RunConfig cfg;

  {
    Section lat(raw, "lattice");
    lat.check_keys({"dim", "a1", "a2", "a3"});
    if (lat.present()) {
      const auto dim = lat.get("dim");
      if (!dim) throw ConfigError("[lattice]: missing key 'dim'");
      cfg.dim = to_int(*dim, "[lattice] dim");
      if (cfg.dim < 1 || cfg.dim > 3) throw ConfigError("[lattice]: dim must be 1, 2 or 3");
      cfg.basis.resize(cfg.dim, cfg.dim);
      for (int j = 0; j < cfg.dim; ++j) {
        const std::string key = "a" + std::to_string(j + 1);
        const auto row = lat.get(key);
        if (!row) throw ConfigError("[lattice]: missing key '" + key + "'");
        const auto parts = split_ws(*row);
        if (static_cast<int>(parts.size()) != cfg.dim) {
          throw ConfigError("[lattice] " + key + ": expected " + std::to_string(cfg.dim) +
                            " components");
        }
        for (int i = 0; i < cfg.dim; ++i) {
          cfg.basis(i, j) = to_double(parts[i], "[lattice] " + key);
        }
      }
    }
  }

  {
    Section pot(raw, "potential");
    pot.check_keys({"preset", "V0", "G"});
    if (pot.present()) {
      const auto preset = pot.get("preset");
      if (preset) {
        const double v0 = pot.get("V0") ? to_double(*pot.get("V0"), "[potential] V0") : 0.0;
        // presets put the potential wells at the lattice sites: V = -2 V0 sum_j cos
        if (*preset == "mathieu1d") {
          cfg.potential = cosine_potential(1, -v0);
        } else if (*preset == "cos2d") {
          cfg.potential = cosine_potential(2, -v0);
        } else if (*preset == "cos3d") {
          cfg.potential = cosine_potential(3, -v0);
        } else {
          throw ConfigError("[potential]: unknown preset '" + *preset + "'");
        }
      } else {
        std::vector<std::pair<std::array<int, 3>, cdouble>> entries;
        for (const auto& lineval : pot.get_all("G")) {
          const auto halves = split_on(lineval, ';');
          if (halves.size() != 2) {
            throw ConfigError("[potential] G: expected 'a,b,c ; re,im', got '" + lineval +
                              "'");
          }
          const auto coords = split_on(halves[0], ',');
          const auto complex_parts = split_on(halves[1], ',');
          if (coords.empty() || coords.size() > 3 || complex_parts.size() != 2) {
            throw ConfigError("[potential] G: malformed line '" + lineval + "'");
          }
          std::array<int, 3> g{0, 0, 0};
          for (size_t i = 0; i < coords.size(); ++i) {
            g[i] = to_int(coords[i], "[potential] G coords");
          }
          entries.push_back({g, cdouble(to_double(complex_parts[0], "[potential] G re"),
                                        to_double(complex_parts[1], "[potential] G im"))});
        }
        if (entries.empty()) {
          throw ConfigError("[potential]: give either 'preset' or 'G = ...' lines");
        }
        cfg.potential = PotentialSpec(entries);
      }
    }
  }

  {
    Section win(raw, "window");
    win.check_keys({"n", "m", "gap_tol"});
    if (win.present()) {
      const auto n = win.get("n");
      const auto m = win.get("m");
      if (!n || !m) throw ConfigError("[window]: keys 'n' and 'm' are required");
      cfg.first_band = to_int(*n, "[window] n");
      cfg.band_count = to_int(*m, "[window] m");
      if (cfg.first_band < 0 || cfg.band_count < 1) {
        throw ConfigError("[window]: need n >= 0 and m >= 1");
      }
      if (win.get("gap_tol")) cfg.gap_tol = to_double(*win.get("gap_tol"), "[window] gap_tol");
    }
  }

  {
    Section grid(raw, "grid");
    grid.check_keys({"nk", "cutoff", "samples_per_cell"});
    if (grid.present()) {
      const auto nk = grid.get("nk");
      const auto cutoff = grid.get("cutoff");
      if (!nk || !cutoff) throw ConfigError("[grid]: keys 'nk' and 'cutoff' are required");
      for (const auto& tok : split_ws(*nk)) cfg.nk.push_back(to_int(tok, "[grid] nk"));
      cfg.cutoff = to_double(*cutoff, "[grid] cutoff");
      if (grid.get("samples_per_cell")) {
        for (const auto& tok : split_ws(*grid.get("samples_per_cell"))) {
          cfg.samples_per_cell.push_back(to_int(tok, "[grid] samples_per_cell"));
        }
      }
    }
    if (cfg.dim > 0) {
      if (cfg.samples_per_cell.empty()) {
        cfg.samples_per_cell.assign(cfg.dim, cfg.dim == 3 ? 8 : 16);
      }
      if (static_cast<int>(cfg.samples_per_cell.size()) == 1 && cfg.dim > 1) {
        cfg.samples_per_cell.assign(cfg.dim, cfg.samples_per_cell[0]);
      }
      if (static_cast<int>(cfg.nk.size()) == 1 && cfg.dim > 1) {
        cfg.nk.assign(cfg.dim, cfg.nk[0]);
      }
    }
  }

  {
    Section opt(raw, "optimizer");
    opt.check_keys({"max_iter", "grad_tol", "armijo_c", "initial_step", "step_shrink",
                    "recenter_every", "seed", "fd_check_every"});
    if (opt.present()) {
      auto& oc = cfg.optimizer;
      if (opt.get("max_iter")) oc.max_iter = to_int(*opt.get("max_iter"), "[optimizer]");
      if (opt.get("grad_tol")) oc.grad_tol = to_double(*opt.get("grad_tol"), "[optimizer]");
      if (opt.get("armijo_c")) oc.armijo_c = to_double(*opt.get("armijo_c"), "[optimizer]");
      if (opt.get("initial_step")) {
        oc.initial_step = to_double(*opt.get("initial_step"), "[optimizer]");
      }
      if (opt.get("step_shrink")) {
        oc.step_shrink = to_double(*opt.get("step_shrink"), "[optimizer]");
      }
      if (opt.get("recenter_every")) {
        oc.recenter_every = to_int(*opt.get("recenter_every"), "[optimizer]");
      }
      if (opt.get("seed")) {
        oc.seed = static_cast<std::uint64_t>(std::stoull(*opt.get("seed")));
      }
      if (opt.get("fd_check_every")) {
        oc.fd_check_every = to_int(*opt.get("fd_check_every"), "[optimizer]");
      }
      oc.validate();
    }
  }

  {
    Section out(raw, "output");
    out.check_keys({"directory", "formats"});
    if (out.present() && out.get("directory")) cfg.output_dir = *out.get("directory");
  }

  // reject sections this tool does not know at all
  for (const auto& [name, entries] : raw.sections) {
    static const std::set<std::string> known{"lattice", "potential", "window",
                                             "grid",    "optimizer", "output"};
    if (!known.count(name)) throw ConfigError("unknown section [" + name + "]");
  }

  return cfg;
}

}  // namespace mlwf
