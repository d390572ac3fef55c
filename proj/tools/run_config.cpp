#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bouss/errors.hpp"
#include "csv.hpp"

namespace bouss::cli {

using nlohmann::json;

namespace {

// Walks one JSON object, records type errors with their dotted path and
// rejects keys nobody asked for.
class Reader {
 public:
  Reader(const json* obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {}

  bool has(const char* key) const { return obj_ && obj_->contains(key); }

  void number(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (v->is_number()) out = v->get<double>();
      else fail(key, "expected a number");
    }
  }
  void number(const char* key, std::optional<double>& out) {
    if (const json* v = take(key)) {
      if (v->is_null()) out.reset();
      else if (v->is_number()) out = v->get<double>();
      else fail(key, "expected a number or null");
    }
  }
  void integer(const char* key, int& out) {
    if (const json* v = take(key)) {
      if (v->is_number_integer()) out = v->get<int>();
      else fail(key, "expected an integer");
    }
  }
  void boolean(const char* key, bool& out) {
    if (const json* v = take(key)) {
      if (v->is_boolean()) out = v->get<bool>();
      else fail(key, "expected true or false");
    }
  }
  void string(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (v->is_string()) out = v->get<std::string>();
      else fail(key, "expected a string");
    }
  }
  void numbers(const char* key, std::vector<double>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) return fail(key, "expected an array of numbers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) return fail(key, "expected an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }
  static bool as_complex(const json& v, cplx& out) {
    if (v.is_number()) {
      out = v.get<double>();
      return true;
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      out = {v[0].get<double>(), v[1].get<double>()};
      return true;
    }
    return false;
  }
  void complex(const char* key, std::optional<cplx>& out) {
    if (const json* v = take(key)) {
      cplx z;
      if (v->is_null()) out.reset();
      else if (as_complex(*v, z)) out = z;
      else fail(key, "expected a number or a [re, im] pair");
    }
  }
  void complexes(const char* key, std::vector<cplx>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) return fail(key, "expected an array of numbers or [re, im] pairs");
      out.clear();
      for (const auto& e : *v) {
        cplx z;
        if (!as_complex(e, z)) return fail(key, "expected an array of numbers or [re, im] pairs");
        out.push_back(z);
      }
    }
  }
  Reader object(const char* key) {
    const json* v = take(key);
    if (v && !v->is_object()) {
      fail(key, "expected an object");
      v = nullptr;
    }
    return Reader(v, join(key), errors_);
  }
  const json* raw(const char* key) { return take(key); }

  void fail(const std::string& key, const std::string& what) { errors_.push_back(join(key) + ": " + what); }
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  // Reports every key that was never read.
  void finish() {
    if (!obj_) return;
    for (const auto& [k, v] : obj_->items())
      if (!seen_.count(k)) errors_.push_back(join(k) + ": unknown key");
  }

 private:
  const json* take(const char* key) {
    seen_.insert(key);
    if (!obj_ || !obj_->contains(key)) return nullptr;
    return &(*obj_)[key];
  }

  const json* obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

template <class E>
bool parse_enum(const std::string& s, const std::vector<std::pair<const char*, E>>& table, E& out) {
  for (const auto& [name, value] : table)
    if (s == name) {
      out = value;
      return true;
    }
  return false;
}

const std::vector<std::pair<const char*, DataKind>> kDataKinds{
    {"soliton", DataKind::soliton},
    {"gaussian", DataKind::gaussian},
    {"three-gaussians", DataKind::three_gaussians},
    {"perturbed-soliton", DataKind::perturbed_soliton},
    {"samples-file", DataKind::samples_file}};
const std::vector<std::pair<const char*, ReferenceKind>> kReferenceKinds{
    {"none", ReferenceKind::none},
    {"exact-soliton", ReferenceKind::exact_soliton},
    {"u_sol", ReferenceKind::u_sol},
    {"self", ReferenceKind::self}};
const std::vector<std::pair<const char*, ProductMethod>> kProducts{
    {"dealiased", ProductMethod::dealiased}, {"direct", ProductMethod::direct}};

template <class E>
std::string choices(const std::vector<std::pair<const char*, E>>& table) {
  std::string s;
  for (const auto& [name, value] : table) s += (s.empty() ? "" : ", ") + std::string(name);
  return s;
}

void read_scheme(Reader r, RunConfig& c, std::vector<std::string>& errors) {
  auto& s = c.scheme;
  r.number("L", s.L);
  r.integer("N", s.N);
  r.number("d0", s.d0);
  r.integer("Nd", s.Nd);
  r.boolean("damping", s.damping_enabled);
  r.number("dt", s.dt);
  r.number("t_final", s.t_final);
  r.numbers("snapshots", c.snapshots);
  r.number("snapshot_every", c.snapshot_every);
  std::string product = s.product == ProductMethod::dealiased ? "dealiased" : "direct";
  r.string("product", product);
  if (!parse_enum(product, kProducts, s.product))
    r.fail("product", "expected one of " + choices(kProducts));
  r.finish();

  if (s.N < 0) {
    errors.push_back("scheme.N: must be >= 0 (0 selects floor(L/pi))");
    return;
  }
  try {
    auto resolved = s.resolved();
    resolved.validate();
    s = resolved;
  } catch (const ConfigError& e) {
    errors.push_back(std::string("scheme.") + e.what());
  }
  if (!(c.snapshot_every >= 0.0)) errors.push_back("scheme.snapshot_every: must be >= 0");
  for (double t : c.snapshots)
    if (!(t >= 0.0) || t > s.t_final) {
      errors.push_back("scheme.snapshots: every time must lie in [0, t_final]");
      break;
    }
}

void read_initial_data(Reader r, RunConfig& c) {
  auto& d = c.initial_data;
  std::string kind = to_string(d.kind);
  r.string("kind", kind);
  if (!parse_enum(kind, kDataKinds, d.kind)) r.fail("kind", "expected one of " + choices(kDataKinds));
  switch (d.kind) {
    case DataKind::soliton:
      r.number("A", d.A);
      r.number("x0", d.x0);
      if (!(d.A > 0.0)) r.fail("A", "must be positive");
      break;
    case DataKind::perturbed_soliton:
      r.number("A", d.A);
      if (!(d.A > 0.0)) r.fail("A", "must be positive");
      break;
    case DataKind::gaussian:
      if (const json* v = r.raw("terms")) {
        if (!v->is_array()) {
          r.fail("terms", "expected an array");
          break;
        }
        d.terms.clear();
        for (const auto& e : *v) {
          if (!e.is_array() || e.size() != 3 || !e[0].is_number() || !e[1].is_number() || !e[2].is_number()) {
            r.fail("terms", "each term is [amplitude, center, rate]");
            break;
          }
          d.terms.push_back({e[0].get<double>(), e[1].get<double>(), e[2].get<double>()});
          if (!(d.terms.back().rate > 0.0)) r.fail("terms", "rates must be positive");
        }
      }
      break;
    case DataKind::three_gaussians:
      r.number("a", d.a);
      r.number("b", d.b);
      r.number("c", d.c);
      if (!(d.c > 0.0)) r.fail("c", "must be positive");
      break;
    case DataKind::samples_file:
      r.string("path", d.path);
      if (d.path.empty()) r.fail("path", "required for samples-file data");
      break;
  }
  r.finish();
}

void read_reference(Reader r, RunConfig& c) {
  auto& ref = c.reference;
  std::string kind = to_string(ref.kind);
  r.string("kind", kind);
  if (!parse_enum(kind, kReferenceKinds, ref.kind))
    r.fail("kind", "expected one of " + choices(kReferenceKinds));
  r.number("zeta_min", ref.zeta_min);
  r.number("zeta_max", ref.zeta_max);
  r.finish();
  if (ref.kind == ReferenceKind::exact_soliton && c.initial_data.kind != DataKind::soliton)
    r.fail("kind", "exact-soliton needs soliton initial data");
  if (!(ref.zeta_min > 1.0) || !(ref.zeta_max > ref.zeta_min))
    r.fail("zeta_min", "need 1 < zeta_min < zeta_max");
}

void read_output(Reader r, RunConfig& c) {
  auto& o = c.output;
  r.integer("grid_points", o.grid_points);
  r.number("x_min", o.x_min);
  r.number("x_max", o.x_max);
  r.integer("error_points", o.error_points);
  r.finish();
  if (o.grid_points < 2) r.fail("grid_points", "must be at least 2");
  if (o.error_points < 1) r.fail("error_points", "must be at least 1");
  if (!(c.x_lo() < c.x_hi())) r.fail("x_min", "must be below x_max");
}

void read_scattering(Reader r, RunConfig& c) {
  auto& s = c.scattering;
  r.complexes("k", s.k);
  r.boolean("root_search", s.root_search);
  std::vector<double> interval{s.root_lo, s.root_hi};
  r.numbers("root_interval", interval);
  if (interval.size() != 2) r.fail("root_interval", "expected [lo, hi]");
  else {
    s.root_lo = interval[0];
    s.root_hi = interval[1];
  }
  r.number("step", s.step);
  r.number("tolerance", s.tolerance);
  r.integer("max_refinements", s.max_refinements);
  r.boolean("norming", s.norming);
  r.finish();
  for (cplx k : s.k)
    if (k == 0.0 || !std::isfinite(k.real()) || !std::isfinite(k.imag())) {
      r.fail("k", "points must be finite and nonzero");
      break;
    }
  if (!(s.root_lo > 1.0) || !(s.root_hi > s.root_lo)) r.fail("root_interval", "need 1 < lo < hi");
  if (!(s.step > 0.0)) r.fail("step", "must be positive");
  if (!(s.tolerance > 0.0)) r.fail("tolerance", "must be positive");
  if (s.max_refinements < 0) r.fail("max_refinements", "must be >= 0");
}

void read_asymptotics(Reader r, RunConfig& c) {
  auto& a = c.asymptotics;
  Reader z = r.object("zeta");
  z.number("from", a.zeta_from);
  z.number("to", a.zeta_to);
  z.number("step", a.zeta_step);
  z.finish();
  r.complex("k1", a.k1);
  r.number("k0", a.k0);
  r.number("circle_step", a.circle_step);
  r.numbers("usol_times", a.usol_times);
  r.finish();
  if (!(a.zeta_from >= 0.0) || !(a.zeta_to >= a.zeta_from)) r.fail("zeta", "need 0 <= from <= to");
  if (!(a.zeta_step > 0.0)) r.fail("zeta.step", "must be positive");
  if (a.k1 && std::abs(std::abs(*a.k1) - 1.0) > 1e-12) r.fail("k1", "must lie on the unit circle");
  if (a.k0 && !(*a.k0 > 1.0)) r.fail("k0", "must exceed 1");
  if (!(a.circle_step > 0.0)) r.fail("circle_step", "must be positive");
  for (double t : a.usol_times)
    if (!(t > 0.0)) {
      r.fail("usol_times", "times must be positive");
      break;
    }
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

// Trigonometric interpolant of grid samples, zero outside [-L, L].
Profile interpolant(const PhysicalField& f, int derivative = 0) {
  auto F = std::make_shared<SpectralField>(spectral_derivative(forward_dft(f), derivative));
  const double L = f.grid.half_period();
  return [F, L](double x) { return std::abs(x) <= L ? eval_at(*F, x) : 0.0; };
}

InitialProfile samples_profile(const RunConfig& cfg) {
  const auto path = cfg.base_dir / cfg.initial_data.path;
  const auto table = read_csv(path);
  const auto g = cfg.scheme.grid();
  auto column = [&](const char* name) -> const std::vector<double>* {
    auto it = table.find(name);
    return it == table.end() ? nullptr : &it->second;
  };
  const auto* xs = column("x");
  const auto* u0 = column("u0");
  const auto* u1 = column("u1");
  if (!xs || !u0 || !u1) throw ConfigError("initial_data.path: samples need columns x, u0, u1");
  if (xs->size() != g.size()) {
    std::ostringstream msg;
    msg << "initial_data.path: expected " << g.size() << " rows on the grid x_j = j L / N, got " << xs->size();
    throw ConfigError(msg.str());
  }
  for (int j = -g.modes(); j < g.modes(); ++j)
    if (std::abs((*xs)[g.slot(j)] - g.point(j)) > 1e-9 * g.half_period())
      throw ConfigError("initial_data.path: x column does not match the grid points");

  PhysicalField f0(g, *u0), f1(g, *u1);
  PhysicalField v0 = column("v0") ? PhysicalField(g, *column("v0")) : cumulative_integral(f1);
  if (!column("v0")) (void)prepare_initial_state(f0, f1);  // zero-mean check on u1

  InitialProfile p;
  p.name = "samples-file";
  p.u0 = interpolant(f0);
  p.u0x = interpolant(f0, 1);
  p.u1 = interpolant(f1);
  p.v0 = interpolant(v0);
  return p;
}

}  // namespace

const char* to_string(DataKind k) {
  for (const auto& [name, value] : kDataKinds)
    if (value == k) return name;
  return "?";
}

const char* to_string(ReferenceKind k) {
  for (const auto& [name, value] : kReferenceKinds)
    if (value == k) return name;
  return "?";
}

std::vector<double> RunConfig::effective_snapshots() const {
  std::vector<double> out = snapshots;
  if (snapshot_every > 0.0) {
    const auto n = static_cast<long>(std::floor(scheme.t_final / snapshot_every + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(std::min(scheme.t_final, static_cast<double>(i) * snapshot_every));
  }
  if (out.empty()) out.push_back(scheme.t_final);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            out.end());
  return out;
}

std::vector<double> RunConfig::zeta_grid() const {
  const auto& a = asymptotics;
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((a.zeta_to - a.zeta_from) / a.zeta_step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(a.zeta_from + static_cast<double>(i) * a.zeta_step);
  return out;
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
  std::vector<std::string> errors;
  RunConfig c;
  c.base_dir = base_dir;
  Reader top(&doc, "", errors);
  if (!top.has("schema_version")) errors.push_back("schema_version: required");
  top.integer("schema_version", c.schema_version);
  if (c.schema_version != kSchemaVersion)
    errors.push_back("schema_version: expected " + std::to_string(kSchemaVersion));

  read_scheme(top.object("scheme"), c, errors);
  read_initial_data(top.object("initial_data"), c);
  read_reference(top.object("reference"), c);
  read_output(top.object("output"), c);
  read_scattering(top.object("scattering"), c);
  read_asymptotics(top.object("asymptotics"), c);
  top.finish();

  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config: cannot open " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  // A run manifest carries its effective config.
  if (doc.is_object() && doc.contains("manifest_version") && doc.contains("config")) doc = doc["config"];
  return parse_config(doc, file.parent_path());
}

json to_json(const RunConfig& c) {
  const auto& s = c.scheme;
  json j;
  j["schema_version"] = c.schema_version;
  j["scheme"] = {{"L", s.L},
                 {"N", s.N},
                 {"d0", s.d0},
                 {"Nd", s.Nd},
                 {"damping", s.damping_enabled},
                 {"dt", s.dt},
                 {"t_final", s.t_final},
                 {"snapshots", c.snapshots},
                 {"snapshot_every", c.snapshot_every},
                 {"product", s.product == ProductMethod::dealiased ? "dealiased" : "direct"}};

  const auto& d = c.initial_data;
  json data{{"kind", to_string(d.kind)}};
  switch (d.kind) {
    case DataKind::soliton:
      data["A"] = d.A;
      data["x0"] = d.x0;
      break;
    case DataKind::perturbed_soliton:
      data["A"] = d.A;
      break;
    case DataKind::gaussian:
      data["terms"] = json::array();
      for (const auto& t : d.terms) data["terms"].push_back({t.amplitude, t.center, t.rate});
      break;
    case DataKind::three_gaussians:
      data["a"] = d.a;
      data["b"] = d.b;
      data["c"] = d.c;
      break;
    case DataKind::samples_file:
      data["path"] = d.path;
      break;
  }
  j["initial_data"] = data;
  j["reference"] = {{"kind", to_string(c.reference.kind)},
                    {"zeta_min", c.reference.zeta_min},
                    {"zeta_max", c.reference.zeta_max}};
  j["output"] = {{"grid_points", c.output.grid_points},
                 {"x_min", c.x_lo()},
                 {"x_max", c.x_hi()},
                 {"error_points", c.output.error_points}};

  const auto& sc = c.scattering;
  json ks = json::array();
  for (cplx k : sc.k) ks.push_back(complex_json(k));
  j["scattering"] = {{"k", ks},
                     {"root_search", sc.root_search},
                     {"root_interval", {sc.root_lo, sc.root_hi}},
                     {"step", sc.step},
                     {"tolerance", sc.tolerance},
                     {"max_refinements", sc.max_refinements},
                     {"norming", sc.norming}};

  const auto& a = c.asymptotics;
  j["asymptotics"] = {{"zeta", {{"from", a.zeta_from}, {"to", a.zeta_to}, {"step", a.zeta_step}}},
                      {"k1", a.k1 ? complex_json(*a.k1) : json(nullptr)},
                      {"k0", a.k0 ? json(*a.k0) : json(nullptr)},
                      {"circle_step", a.circle_step},
                      {"usol_times", a.usol_times}};
  return j;
}

InitialProfile make_profile(const RunConfig& cfg) {
  const auto& d = cfg.initial_data;
  switch (d.kind) {
    case DataKind::soliton:
      return soliton_initial_data(SolitonDescriptor::from_amplitude(d.A, d.x0));
    case DataKind::gaussian:
      return gaussian_data(d.terms);
    case DataKind::three_gaussians:
      return three_gaussians(d.a, d.b, d.c);
    case DataKind::perturbed_soliton:
      return perturbed_soliton_data(d.A);
    case DataKind::samples_file:
      return samples_profile(cfg);
  }
  throw ConfigError("initial_data.kind: unsupported");
}

}  // namespace bouss::cli
