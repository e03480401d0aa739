#include "carlab/io.hpp"

#include <cmath>
#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "carlab/errors.hpp"

namespace carlab {

using nlohmann::json;

std::unique_ptr<Density> InitialCondition::density(int d) const {
  if (type == "maxwellian") return std::make_unique<Maxwellian>(d, mass, temperature);
  if (type == "indicator") return std::make_unique<Indicator>(d, radius, height);
  if (type == "two_bumps") {
    if (centers.empty()) {
      Velocity a(d), b(d);
      a[0] = 1.5;
      b[0] = -1.5;
      return std::make_unique<TwoBumps>(std::vector<Velocity>{a, b}, radius, height);
    }
    std::vector<Velocity> cs;
    for (const auto& c : centers) {
      if (static_cast<int>(c.size()) != d) throw ConfigError("bump center dimension differs from d");
      Velocity v(d);
      for (int k = 0; k < d; ++k) v[k] = c[k];
      cs.push_back(v);
    }
    return std::make_unique<TwoBumps>(cs, radius, height);
  }
  if (type == "csv") return nullptr;
  throw ConfigError("unknown initial condition type '" + type + "'");
}

void RunConfig::validate() const {
  kernel.validate();
  if (!(v_max > 0.0) || !std::isfinite(v_max)) throw ConfigError("grid.v_max must be positive");
  if (n < 2 || n % 2 != 0) throw ConfigError("grid.n must be an even integer >= 2");
  if (!(dt_init > 0.0) || !std::isfinite(dt_init)) throw ConfigError("solver.dt_init must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("solver.t_end must be nonnegative");
  for (double r : plateau_radii)
    if (!(r >= 0.0) || r > v_max) throw ConfigError("plateau radii must lie in [0, v_max]");
  if (initial.type == "csv") {
    if (initial.path.empty()) throw ConfigError("initial.path is required for csv");
  } else {
    if (!(initial.mass > 0.0) || !(initial.temperature > 0.0)) throw ConfigError("initial mass/temperature must be positive");
    if (!(initial.radius > 0.0) || !(initial.height >= 0.0)) throw ConfigError("initial radius > 0 and height >= 0 required");
    initial.density(kernel.d);
  }
  if (!(T0 > 0.0 && T0 <= 1.0)) throw ConfigError("lowerbound.T0 must lie in (0, 1]");
  if (!(c_s > 0.0)) throw ConfigError("lowerbound.c_s must be positive");
  if (n_max < 0) throw ConfigError("lowerbound.n_max must be nonnegative");
  if (ell0 && !(*ell0 > 0.0 && *ell0 < 1.0)) throw ConfigError("lowerbound.ell0 must lie in (0, 1)");
  if (mc_samples == 0) throw ConfigError("verify.mc_samples must be positive");
  if (threads < 0) throw ConfigError("threads must be nonnegative");
}

VelocityGrid RunConfig::grid() const { return VelocityGrid(kernel.d, v_max, n); }

DistributionField RunConfig::initial_field() const {
  const VelocityGrid g = grid();
  if (initial.type == "csv") {
    DistributionField f = read_field_csv(initial.path);
    if (f.grid() != g) throw ConfigError("field CSV grid does not match the configured grid");
    for (double x : f.values())
      if (!(x >= 0.0)) throw ConfigError("field CSV has negative or non-finite values");
    return f;
  }
  return rasterize(*initial.density(kernel.d), g);
}

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
void get(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig c;
  try {
    check_keys(j, "config", {"kernel", "grid", "solver", "initial", "lowerbound", "verify", "seeds", "threads"});
    if (j.contains("kernel")) {
      const json& k = j["kernel"];
      check_keys(k, "kernel", {"d", "gamma", "s", "tilde_b", "theta_min", "hyperplane_nodes"});
      get(k, "d", c.kernel.d);
      get(k, "gamma", c.kernel.gamma);
      get(k, "s", c.kernel.s);
      get(k, "hyperplane_nodes", c.kernel.hyperplane_nodes);
      if (k.contains("theta_min") && !k["theta_min"].is_null()) c.kernel.theta_min = k["theta_min"].get<double>();
      if (k.contains("tilde_b")) {
        const json& b = k["tilde_b"];
        if (b.is_number()) {
          c.kernel.tilde_b = AngularProfile::constant(b.get<double>());
        } else if (b.is_array()) {
          c.kernel.tilde_b = AngularProfile::cos_polynomial(b.get<std::vector<double>>());
        } else {
          throw ConfigError("kernel.tilde_b must be a number or an array of cos-polynomial coefficients");
        }
      }
    }
    if (j.contains("grid")) {
      const json& g = j["grid"];
      check_keys(g, "grid", {"v_max", "n"});
      get(g, "v_max", c.v_max);
      get(g, "n", c.n);
    }
    if (j.contains("solver")) {
      const json& s = j["solver"];
      check_keys(s, "solver", {"dt_init", "t_end", "plateau_radii"});
      get(s, "dt_init", c.dt_init);
      get(s, "t_end", c.t_end);
      get(s, "plateau_radii", c.plateau_radii);
    }
    if (j.contains("initial")) {
      const json& i = j["initial"];
      check_keys(i, "initial", {"type", "mass", "temperature", "radius", "height", "centers", "path"});
      get(i, "type", c.initial.type);
      get(i, "mass", c.initial.mass);
      get(i, "temperature", c.initial.temperature);
      get(i, "radius", c.initial.radius);
      get(i, "height", c.initial.height);
      get(i, "centers", c.initial.centers);
      get(i, "path", c.initial.path);
    }
    if (j.contains("lowerbound")) {
      const json& l = j["lowerbound"];
      check_keys(l, "lowerbound", {"T0", "c_s", "n_max", "ell0"});
      get(l, "T0", c.T0);
      get(l, "c_s", c.c_s);
      get(l, "n_max", c.n_max);
      if (l.contains("ell0") && !l["ell0"].is_null()) c.ell0 = l["ell0"].get<double>();
    }
    if (j.contains("verify")) {
      check_keys(j["verify"], "verify", {"mc_samples"});
      get(j["verify"], "mc_samples", c.mc_samples);
    }
    if (j.contains("seeds")) {
      check_keys(j["seeds"], "seeds", {"mc"});
      get(j["seeds"], "mc", c.seed);
    }
    get(j, "threads", c.threads);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const RunConfig& c) {
  json k = {{"d", c.kernel.d},
            {"gamma", c.kernel.gamma},
            {"s", c.kernel.s},
            {"hyperplane_nodes", c.kernel.hyperplane_nodes}};
  if (c.kernel.tilde_b.is_constant())
    k["tilde_b"] = c.kernel.tilde_b.coefficients().front();
  else
    k["tilde_b"] = c.kernel.tilde_b.coefficients();
  k["theta_min"] = c.kernel.theta_min ? json(*c.kernel.theta_min) : json(nullptr);
  json init = {{"type", c.initial.type}};
  if (c.initial.type == "maxwellian") {
    init["mass"] = c.initial.mass;
    init["temperature"] = c.initial.temperature;
  } else if (c.initial.type == "csv") {
    init["path"] = c.initial.path;
  } else {
    init["radius"] = c.initial.radius;
    init["height"] = c.initial.height;
    if (c.initial.type == "two_bumps") init["centers"] = c.initial.centers;
  }
  return {{"kernel", k},
          {"grid", {{"v_max", c.v_max}, {"n", c.n}}},
          {"solver", {{"dt_init", c.dt_init}, {"t_end", c.t_end}, {"plateau_radii", c.plateau_radii}}},
          {"initial", init},
          {"lowerbound",
           {{"T0", c.T0}, {"c_s", c.c_s}, {"n_max", c.n_max}, {"ell0", c.ell0 ? json(*c.ell0) : json(nullptr)}}},
          {"verify", {{"mc_samples", c.mc_samples}}},
          {"seeds", {{"mc", c.seed}}},
          {"threads", c.threads}};
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_field_csv(std::ostream& os, const GridFunction& f) {
  const VelocityGrid& g = f.grid();
  const int d = g.dim();
  for (int a = 0; a < d; ++a) os << 'i' << a + 1 << ',';
  for (int a = 0; a < d; ++a) os << 'v' << a + 1 << ',';
  os << "f\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto idx = g.index(i);
    for (int a = 0; a < d; ++a) os << idx[a] << ',';
    for (int a = 0; a < d; ++a) os << format_double(g.coord(idx[a])) << ',';
    os << format_double(f[i]) << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double x;
  try {
    x = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("field CSV: bad number '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError("field CSV: bad number '" + s + "'");
  return x;
}

}  // namespace

DistributionField read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("field CSV is empty");
  const std::vector<std::string> head = split(line);
  const int d = static_cast<int>((head.size() - 1) / 2);
  if (head.size() != static_cast<std::size_t>(2 * d + 1) || (d != 2 && d != 3) || head.back() != "f")
    throw ConfigError("field CSV header must be i1..id,v1..vd,f");
  std::vector<std::array<int, 3>> idx;
  std::vector<double> vals;
  int n = 0;
  // One (index, coordinate) pair off the centre fixes the spacing.
  int i_off = 0;
  double v_off = 0.0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != head.size()) throw ConfigError("field CSV: wrong number of columns");
    std::array<int, 3> ix{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      const double x = to_double(cells[a]);
      if (x != std::floor(x) || x < 0) throw ConfigError("field CSV: indices must be nonnegative integers");
      ix[a] = static_cast<int>(x);
      n = std::max(n, ix[a] + 1);
    }
    if (v_off == 0.0) {
      i_off = ix[0];
      v_off = to_double(cells[d]);
    }
    idx.push_back(ix);
    vals.push_back(to_double(cells.back()));
  }
  if (n < 2 || n % 2 != 0) throw ConfigError("field CSV: grid size must be even");
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= n;
  if (vals.size() != total) throw ConfigError("field CSV: expected " + std::to_string(total) + " rows");
  const double h = i_off != n / 2 ? v_off / (i_off - n / 2) : 0.0;
  if (!(h > 0.0)) throw ConfigError("field CSV: cannot infer grid spacing");
  const VelocityGrid g(d, 0.5 * n * h, n);
  std::vector<double> values(g.size(), 0.0);
  std::vector<char> seen(g.size(), 0);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const std::size_t flat = g.flat(idx[r]);
    if (seen[flat]) throw ConfigError("field CSV: duplicate node");
    seen[flat] = 1;
    values[flat] = vals[r];
  }
  return DistributionField(g, std::move(values));
}

DistributionField read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open field CSV '" + path + "'");
  return read_field_csv(in);
}

void write_trace_csv(std::ostream& os, const SolveTrace& tr) {
  os << "t,mass,energy,entropy,sup_f";
  for (double r : tr.plateau_radii) os << ",plateau_R" << format_double(r);
  os << ",dt,clamped_mass\n";
  for (std::size_t i = 0; i < tr.rows(); ++i) {
    os << format_double(tr.t[i]) << ',' << format_double(tr.mass[i]) << ',' << format_double(tr.energy[i])
       << ',' << format_double(tr.entropy[i]) << ',' << format_double(tr.sup_f[i]);
    for (const auto& p : tr.plateau) os << ',' << format_double(p[i]);
    os << ',' << format_double(tr.dt[i]) << ',' << format_double(tr.clamped_mass[i]) << '\n';
  }
}

void write_states_csv(std::ostream& os, const std::vector<SpreadingState>& states) {
  os << "n,xi_n,R_n,T_n,ell_n,log_ell_n\n";
  for (const auto& s : states)
    os << s.n << ',' << format_double(s.xi) << ',' << format_double(s.R) << ',' << format_double(s.T) << ','
       << format_double(s.ell) << ',' << format_double(s.log_ell) << '\n';
}

json certificate_to_json(const CertificateReport& c) {
  std::vector<double> node;
  for (int k = 0; k < c.worst_node.dim(); ++k) node.push_back(c.worst_node[k]);
  return {{"a", c.a},
          {"b", c.b},
          {"radius", std::isfinite(c.radius) ? json(c.radius) : json(nullptr)},
          {"nodes_checked", c.nodes_checked},
          {"worst_margin", c.worst_margin},
          {"worst_node", node},
          {"pass", c.pass}};
}

json report_to_json(const EstimateReport& r) {
  json details = json::object();
  for (const auto& [k, v] : r.details) details[k] = std::isfinite(v) ? json(v) : json(nullptr);
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  return {{"name", r.name},
          {"sweep", r.sweep},
          {"measured_constant", num(r.measured_constant)},
          {"measured_exponent", num(r.measured_exponent)},
          {"expected_exponent", num(r.expected_exponent)},
          {"tolerance", r.tolerance},
          {"pass", r.pass},
          {"details", details}};
}

void write_summary_csv(std::ostream& os, const std::vector<EstimateReport>& reports) {
  os << "name,measured_constant,measured_exponent,expected_exponent,tolerance,pass\n";
  for (const auto& r : reports)
    os << r.name << ',' << format_double(r.measured_constant) << ',' << format_double(r.measured_exponent) << ','
       << format_double(r.expected_exponent) << ',' << format_double(r.tolerance) << ',' << (r.pass ? 1 : 0)
       << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

}  // namespace carlab
