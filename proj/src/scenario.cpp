#include "gas/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "gas/forms/gasforms.hpp"
#include "json.hpp"

namespace gas {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("scenario: " + path + ": " + what);
}

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown key");
}

double need_number(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) fail(path + "." + key, "missing");
  if (!j[key].is_number()) fail(path + "." + key, "expected a number");
  return j[key].get<double>();
}

std::string need_string(const json& j, const std::string& key,
                        const std::string& path) {
  if (!j.contains(key)) fail(path + "." + key, "missing");
  if (!j[key].is_string()) fail(path + "." + key, "expected a string");
  return j[key].get<std::string>();
}

expr::NodePtr parse_checked(const std::string& text, const std::string& path,
                            bool allow_m, bool allow_x) {
  expr::NodePtr ast;
  try {
    ast = expr::parse_expr(text);
  } catch (const expr::ParseError& e) {
    fail(path, std::string(e.what()) + " at column " + std::to_string(e.column));
  }
  for (const std::string& v : expr::free_variables(ast)) {
    if (v[0] == 'm' && !allow_m) fail(path, "labels m1..m3 not allowed here");
    if (v[0] == 'x' && !allow_x) fail(path, "positions x1..x3 not allowed here");
  }
  return ast;
}

ScalarFn label_fn(const std::string& text, const std::string& path) {
  auto ast = parse_checked(text, path, true, false);
  return [ast](const Point3& m) {
    expr::Bindings b;
    b.m = m;
    return expr::eval(ast, b);
  };
}

}  // namespace

Potential PotentialSpec::build(int n) const {
  switch (kind) {
    case Kind::zero:
      return Potential::zero();
    case Kind::uniform:
      return Potential::uniform(g);
    case Kind::expression: {
      auto ast = parse_checked(expr, "potential.expr", false, true);
      std::vector<expr::NodePtr> grads;
      for (int i = 0; i < n; ++i)
        grads.push_back(expr::differentiate(ast, "x" + std::to_string(i + 1)));
      Potential p;
      p.value = [ast](const Point3& x) {
        expr::Bindings b;
        b.x = x;
        return expr::eval(ast, b);
      };
      p.grad = [grads, n](const Point3& x) {
        expr::Bindings b;
        b.x = x;
        Point3 out{0, 0, 0};
        for (int i = 0; i < int(grads.size()); ++i) out[i] = expr::eval(grads[i], b);
        return out;
      };
      return p;
    }
  }
  throw std::logic_error("PotentialSpec::build");
}

SimState Scenario::make_state() const {
  std::vector<ScalarFn> disp;
  for (std::size_t i = 0; i < displacement.size(); ++i)
    disp.push_back(label_fn(displacement[i], "initial.displacement"));
  const ScalarFn S0 = label_fn(entropy, "initial.entropy");
  if (clebsch) {
    std::vector<ScalarFn> l0, m0;
    for (const auto& e : lambda0) l0.push_back(label_fn(e, "initial.clebsch.lambda0"));
    for (const auto& e : mu0) m0.push_back(label_fn(e, "initial.clebsch.mu0"));
    return init_clebsch(grid, thermo, disp, label_fn(phi0, "initial.clebsch.phi0"),
                        label_fn(r0, "initial.clebsch.r0"), S0, l0, m0);
  }
  std::vector<ScalarFn> u0;
  for (const auto& e : velocity) u0.push_back(label_fn(e, "initial.velocity"));
  return init_direct(grid, disp, u0, S0, label_fn(r0, "initial.r0"));
}

SimConfig Scenario::make_config() const {
  SimConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.integrator = integrator;
  cfg.thermo = thermo;
  cfg.potential = potential.build(grid.n);
  return cfg;
}

cons::LawContext Scenario::make_law_context() const {
  cons::LawContext ctx;
  ctx.thermo = thermo;
  ctx.potential = potential.build(grid.n);
  if (ertel_psi) ctx.ertel_psi = label_fn(*ertel_psi, "diagnostics.ertel_psi");
  return ctx;
}

namespace {

LabelGrid grid_from_json(const json& j, const std::string& path) {
  reject_unknown(j, {"n", "sizes", "dm", "fd_order"}, path);
  if (!j.contains("n")) fail(path + ".n", "missing");
  const int n = j["n"].get<int>();
  if (n != 2 && n != 3) fail(path + ".n", "n must be 2 or 3");
  if (!j.contains("sizes") || !j["sizes"].is_array() || int(j["sizes"].size()) != n)
    fail(path + ".sizes", "expected an array of n sizes");
  if (!j.contains("dm") || !j["dm"].is_array() || int(j["dm"].size()) != n)
    fail(path + ".dm", "expected an array of n spacings");
  std::array<int, 3> sizes{1, 1, 1};
  std::array<double, 3> dm{1, 1, 1};
  for (int a = 0; a < n; ++a) {
    sizes[a] = j["sizes"][a].get<int>();
    dm[a] = j["dm"][a].get<double>();
  }
  const int fd = j.value("fd_order", 4);
  try {
    return LabelGrid(n, sizes, dm, fd);
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
}

ThermoModel thermo_from_json(const json& j, const std::string& path) {
  reject_unknown(j, {"gamma", "c_v", "A0"}, path);
  ThermoModel m;
  m.gamma = j.value("gamma", m.gamma);
  m.c_v = j.value("c_v", m.c_v);
  m.A0 = j.value("A0", m.A0);
  try {
    m.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return m;
}

PotentialSpec potential_from_json(const json& j, int n, const std::string& path) {
  reject_unknown(j, {"type", "g", "expr"}, path);
  PotentialSpec p;
  const std::string type = need_string(j, "type", path);
  if (type == "zero") {
    p.kind = PotentialSpec::Kind::zero;
  } else if (type == "uniform") {
    p.kind = PotentialSpec::Kind::uniform;
    if (!j.contains("g") || !j["g"].is_array() || int(j["g"].size()) != n)
      fail(path + ".g", "expected an array of n components");
    for (int i = 0; i < n; ++i) p.g[i] = j["g"][i].get<double>();
  } else if (type == "expression") {
    p.kind = PotentialSpec::Kind::expression;
    p.expr = need_string(j, "expr", path);
    parse_checked(p.expr, path + ".expr", false, true);
  } else {
    fail(path + ".type", "expected zero | uniform | expression");
  }
  return p;
}

json potential_to_json(const PotentialSpec& p, int n) {
  ordered_json j;
  switch (p.kind) {
    case PotentialSpec::Kind::zero:
      j["type"] = "zero";
      break;
    case PotentialSpec::Kind::uniform: {
      j["type"] = "uniform";
      std::vector<double> g;
      for (int i = 0; i < n; ++i) g.push_back(p.g[i]);
      j["g"] = g;
      break;
    }
    case PotentialSpec::Kind::expression:
      j["type"] = "expression";
      j["expr"] = p.expr;
      break;
  }
  return j;
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("scenario: JSON parse error: ") + e.what());
  }
  reject_unknown(j,
                 {"grid", "thermo", "potential", "initial", "integrator", "dt",
                  "t_end", "diagnostics", "output_dir", "seed"},
                 "scenario");
  Scenario sc;
  if (!j.contains("grid")) fail("scenario.grid", "missing");
  sc.grid = grid_from_json(j["grid"], "grid");
  if (j.contains("thermo")) sc.thermo = thermo_from_json(j["thermo"], "thermo");
  if (j.contains("potential"))
    sc.potential = potential_from_json(j["potential"], sc.grid.n, "potential");

  if (!j.contains("initial")) fail("scenario.initial", "missing");
  const json& ini = j["initial"];
  reject_unknown(ini, {"displacement", "entropy", "clebsch", "velocity", "r0"},
                 "initial");
  if (!ini.contains("displacement") || !ini["displacement"].is_array() ||
      int(ini["displacement"].size()) != sc.grid.n)
    fail("initial.displacement", "expected an array of n expressions");
  for (const auto& e : ini["displacement"]) {
    sc.displacement.push_back(e.get<std::string>());
    parse_checked(sc.displacement.back(), "initial.displacement", true, false);
  }
  sc.entropy = ini.value("entropy", std::string("0"));
  parse_checked(sc.entropy, "initial.entropy", true, false);
  const bool has_clebsch = ini.contains("clebsch");
  const bool has_velocity = ini.contains("velocity");
  if (has_clebsch == has_velocity)
    fail("initial", "exactly one of 'clebsch' or 'velocity' must be given");
  if (has_clebsch) {
    sc.clebsch = true;
    const json& c = ini["clebsch"];
    reject_unknown(c, {"phi0", "r0", "lambda0", "mu0"}, "initial.clebsch");
    sc.phi0 = c.value("phi0", std::string("0"));
    sc.r0 = c.value("r0", std::string("0"));
    if (c.contains("lambda0")) {
      if (!c["lambda0"].is_array() || !c.contains("mu0") || !c["mu0"].is_array() ||
          c["lambda0"].size() != c["mu0"].size())
        fail("initial.clebsch", "lambda0 and mu0 must be arrays of equal length");
      for (const auto& e : c["lambda0"]) sc.lambda0.push_back(e.get<std::string>());
      for (const auto& e : c["mu0"]) sc.mu0.push_back(e.get<std::string>());
    } else if (c.contains("mu0")) {
      fail("initial.clebsch.mu0", "mu0 without lambda0");
    }
    for (const auto& e : {sc.phi0, sc.r0}) parse_checked(e, "initial.clebsch", true, false);
    for (const auto& e : sc.lambda0) parse_checked(e, "initial.clebsch.lambda0", true, false);
    for (const auto& e : sc.mu0) parse_checked(e, "initial.clebsch.mu0", true, false);
  } else {
    if (!ini["velocity"].is_array() || int(ini["velocity"].size()) != sc.grid.n)
      fail("initial.velocity", "expected an array of n expressions");
    for (const auto& e : ini["velocity"]) {
      sc.velocity.push_back(e.get<std::string>());
      parse_checked(sc.velocity.back(), "initial.velocity", true, false);
    }
    sc.r0 = ini.value("r0", std::string("0"));
    parse_checked(sc.r0, "initial.r0", true, false);
  }

  const std::string integ = j.value("integrator", std::string("rk4"));
  if (integ == "rk4")
    sc.integrator = Integrator::rk4;
  else if (integ == "leapfrog")
    sc.integrator = Integrator::leapfrog;
  else
    fail("scenario.integrator", "expected rk4 | leapfrog");
  if (!j.contains("dt")) fail("scenario.dt", "missing");
  sc.dt = need_number(j, "dt", "scenario");
  if (!(sc.dt > 0)) fail("scenario.dt", "must be positive");
  if (!j.contains("t_end")) fail("scenario.t_end", "missing");
  sc.t_end = need_number(j, "t_end", "scenario");
  if (sc.t_end < 0) fail("scenario.t_end", "must be >= 0");

  // Diagnostics: default is every law applicable to this run.
  const bool clebsch_mode = sc.clebsch;
  if (j.contains("diagnostics")) {
    const json& d = j["diagnostics"];
    reject_unknown(d, {"laws", "cadence", "tolerances", "ertel_psi"}, "diagnostics");
    if (d.contains("laws")) {
      if (d["laws"].is_string() && d["laws"].get<std::string>() == "all") {
        for (cons::Law l : cons::all_laws())
          if (cons::law_applicable(l, sc.grid.n, clebsch_mode)) sc.laws.push_back(l);
      } else if (d["laws"].is_array()) {
        for (const auto& e : d["laws"]) {
          cons::Law l;
          try {
            l = cons::law_from_name(e.get<std::string>());
          } catch (const std::exception& ex) {
            fail("diagnostics.laws", ex.what());
          }
          if (!cons::law_applicable(l, sc.grid.n, clebsch_mode))
            fail("diagnostics.laws",
                 "law '" + cons::law_name(l) + "' not applicable to this run");
          sc.laws.push_back(l);
        }
      } else {
        fail("diagnostics.laws", "expected \"all\" or an array of law names");
      }
    }
    sc.cadence = d.value("cadence", 10);
    if (sc.cadence <= 0) fail("diagnostics.cadence", "must be positive");
    if (d.contains("tolerances")) {
      for (auto it = d["tolerances"].begin(); it != d["tolerances"].end(); ++it) {
        cons::law_from_name(it.key());  // validates the name
        sc.tolerances[it.key()] = it.value().get<double>();
      }
    }
    if (d.contains("ertel_psi")) {
      sc.ertel_psi = d["ertel_psi"].get<std::string>();
      parse_checked(*sc.ertel_psi, "diagnostics.ertel_psi", true, false);
    }
  }
  if (sc.laws.empty())
    for (cons::Law l : cons::all_laws())
      if (cons::law_applicable(l, sc.grid.n, clebsch_mode)) sc.laws.push_back(l);

  sc.output_dir = j.value("output_dir", std::string("out"));
  sc.seed = j.value("seed", 0u);
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("scenario: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json_text(ss.str());
}

// ---------------------------------------------------------------------------
// Snapshot I/O.

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json field_to_json(const ScalarField& f) {
  const LabelGrid& g = f.grid();
  // Row-major nesting by dimension.
  if (g.n == 2) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < g.sizes[0]; ++i) {
      ordered_json row = ordered_json::array();
      for (int j = 0; j < g.sizes[1]; ++j) row.push_back(f[g.index({i, j, 0})]);
      rows.push_back(std::move(row));
    }
    return rows;
  }
  ordered_json planes = ordered_json::array();
  for (int i = 0; i < g.sizes[0]; ++i) {
    ordered_json rows = ordered_json::array();
    for (int j = 0; j < g.sizes[1]; ++j) {
      ordered_json row = ordered_json::array();
      for (int k = 0; k < g.sizes[2]; ++k) row.push_back(f[g.index({i, j, k})]);
      rows.push_back(std::move(row));
    }
    planes.push_back(std::move(rows));
  }
  return planes;
}

ScalarField field_from_json(const json& j, const LabelGrid& g,
                            const std::string& path) {
  ScalarField f(g);
  try {
    if (g.n == 2) {
      for (int i = 0; i < g.sizes[0]; ++i)
        for (int jj = 0; jj < g.sizes[1]; ++jj)
          f[g.index({i, jj, 0})] = j.at(i).at(jj).get<double>();
    } else {
      for (int i = 0; i < g.sizes[0]; ++i)
        for (int jj = 0; jj < g.sizes[1]; ++jj)
          for (int k = 0; k < g.sizes[2]; ++k)
            f[g.index({i, jj, k})] = j.at(i).at(jj).at(k).get<double>();
    }
  } catch (const std::exception& e) {
    fail(path, std::string("bad field shape: ") + e.what());
  }
  return f;
}

}  // namespace

cons::LawContext Snapshot::make_law_context() const {
  cons::LawContext ctx;
  ctx.thermo = thermo;
  ctx.potential = potential.build(state.grid().n);
  if (ertel_psi) ctx.ertel_psi = label_fn(*ertel_psi, "snapshot.ertel_psi");
  return ctx;
}

void write_snapshot(const Snapshot& snap, const std::filesystem::path& path) {
  const SimState& s = snap.state;
  const LabelGrid& g = s.grid();
  ordered_json j;
  j["format"] = "gas-snapshot";
  j["version"] = 1;
  j["t"] = s.t;
  {
    ordered_json gj;
    gj["n"] = g.n;
    gj["sizes"] = std::vector<int>(g.sizes.begin(), g.sizes.begin() + g.n);
    gj["dm"] = std::vector<double>(g.dm.begin(), g.dm.begin() + g.n);
    gj["fd_order"] = g.fd_order;
    j["grid"] = gj;
  }
  {
    ordered_json tj;
    tj["gamma"] = snap.thermo.gamma;
    tj["c_v"] = snap.thermo.c_v;
    tj["A0"] = snap.thermo.A0;
    j["thermo"] = tj;
  }
  j["potential"] = potential_to_json(snap.potential, g.n);
  j["k_lin"] = s.k_lin();
  j["clebsch_initialized"] = s.clebsch_initialized;
  {
    std::vector<std::string> names;
    for (cons::Law l : snap.laws) names.push_back(cons::law_name(l));
    j["laws"] = names;
  }
  j["tolerances"] = snap.tolerances;
  if (snap.ertel_psi) j["ertel_psi"] = *snap.ertel_psi;
  ordered_json fields;
  {
    ordered_json xs = ordered_json::array(), us = ordered_json::array();
    for (int c = 0; c < g.n; ++c) xs.push_back(field_to_json(s.x.comp(c)));
    for (int c = 0; c < g.n; ++c) us.push_back(field_to_json(s.u.comp(c)));
    fields["x"] = xs;
    fields["u"] = us;
    fields["S"] = field_to_json(s.S);
    fields["r"] = field_to_json(s.r);
    fields["phi"] = field_to_json(s.phi);
    ordered_json la = ordered_json::array(), mu = ordered_json::array();
    for (const auto& f : s.lamt) la.push_back(field_to_json(f));
    for (const auto& f : s.mu) mu.push_back(field_to_json(f));
    fields["lamt"] = la;
    fields["mu"] = mu;
  }
  j["fields"] = fields;
  {
    ordered_json b;
    ordered_json mm = ordered_json::array(), w = ordered_json::array();
    for (const auto& f : snap.baseline.mm0) mm.push_back(field_to_json(f));
    for (const auto& f : snap.baseline.w0) w.push_back(field_to_json(f));
    b["sympl_mm"] = mm;
    b["ertel_q"] = field_to_json(snap.baseline.q0);
    b["vorticity"] = w;
    j["baseline"] = b;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("snapshot: cannot write " + path.string());
  out << j.dump(1, '\t') << '\n';
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("snapshot: cannot open " + path.string());
  json j;
  in >> j;
  if (j.value("format", std::string()) != "gas-snapshot")
    throw std::runtime_error("snapshot: not a gas-snapshot file");
  Snapshot snap;
  const json& gj = j.at("grid");
  std::array<int, 3> sizes{1, 1, 1};
  std::array<double, 3> dm{1, 1, 1};
  const int n = gj.at("n").get<int>();
  for (int a = 0; a < n; ++a) {
    sizes[a] = gj.at("sizes").at(a).get<int>();
    dm[a] = gj.at("dm").at(a).get<double>();
  }
  const LabelGrid grid(n, sizes, dm, gj.at("fd_order").get<int>());
  snap.thermo.gamma = j.at("thermo").at("gamma").get<double>();
  snap.thermo.c_v = j.at("thermo").at("c_v").get<double>();
  snap.thermo.A0 = j.at("thermo").at("A0").get<double>();
  snap.potential = potential_from_json(j.at("potential"), n, "snapshot.potential");
  for (const auto& e : j.at("laws"))
    snap.laws.push_back(cons::law_from_name(e.get<std::string>()));
  if (j.contains("tolerances"))
    for (auto it = j["tolerances"].begin(); it != j["tolerances"].end(); ++it)
      snap.tolerances[it.key()] = it.value().get<double>();
  if (j.contains("ertel_psi")) snap.ertel_psi = j["ertel_psi"].get<std::string>();

  SimState& s = snap.state;
  s.t = j.at("t").get<double>();
  s.clebsch_initialized = j.value("clebsch_initialized", false);
  const json& f = j.at("fields");
  s.x = VectorField(grid);
  s.u = VectorField(grid);
  for (int c = 0; c < n; ++c) {
    s.x.comp(c) = field_from_json(f.at("x").at(c), grid, "fields.x");
    s.u.comp(c) = field_from_json(f.at("u").at(c), grid, "fields.u");
  }
  s.S = field_from_json(f.at("S"), grid, "fields.S");
  s.r = field_from_json(f.at("r"), grid, "fields.r");
  s.phi = field_from_json(f.at("phi"), grid, "fields.phi");
  const int k_lin = j.value("k_lin", 0);
  for (int k = 0; k < k_lin; ++k) {
    s.lamt.push_back(field_from_json(f.at("lamt").at(k), grid, "fields.lamt"));
    s.mu.push_back(field_from_json(f.at("mu").at(k), grid, "fields.mu"));
  }
  const json& b = j.at("baseline");
  for (const auto& e : b.at("sympl_mm"))
    snap.baseline.mm0.push_back(field_from_json(e, grid, "baseline.sympl_mm"));
  snap.baseline.q0 = field_from_json(b.at("ertel_q"), grid, "baseline.ertel_q");
  for (const auto& e : b.at("vorticity"))
    snap.baseline.w0.push_back(field_from_json(e, grid, "baseline.vorticity"));
  return snap;
}

// ---------------------------------------------------------------------------
// CSV and commands.

std::string csv_header(const std::vector<cons::Law>& laws) {
  std::string h = "t";
  for (cons::Law l : cons::all_laws())
    for (cons::Law x : laws)
      if (x == l) h += "," + cons::law_name(l);
  return h + "\n";
}

std::string csv_row(double t, const std::vector<cons::DiagnosticRecord>& records,
                    const std::vector<cons::Law>& laws) {
  std::string row = g17(t);
  for (cons::Law l : cons::all_laws()) {
    bool wanted = false;
    for (cons::Law x : laws) wanted |= (x == l);
    if (!wanted) continue;
    const std::string name = cons::law_name(l);
    double v = 0.0;
    bool found = false;
    for (const auto& r : records)
      if (r.name == name) {
        v = r.norm_max;
        found = true;
      }
    if (!found) throw std::logic_error("csv_row: missing record for " + name);
    row += "," + g17(v);
  }
  return row + "\n";
}

RunOutcome run_command(const Scenario& sc, const std::filesystem::path& out_dir,
                       bool strict) {
  std::filesystem::create_directories(out_dir);
  RunOutcome outcome;
  outcome.csv_path = out_dir / "diagnostics.csv";
  outcome.snapshot_path = out_dir / "snapshot.json";

  SimState s0 = sc.make_state();
  const cons::LawContext ctx = sc.make_law_context();
  const cons::Baseline baseline = cons::capture_baseline(s0, ctx);
  std::ofstream csv(outcome.csv_path);
  if (!csv) throw std::runtime_error("run: cannot write " + outcome.csv_path.string());
  csv << csv_header(sc.laws);
  std::vector<cons::DiagnosticRecord> last;
  const SimConfig cfg = sc.make_config();
  SimState final_state =
      run(s0, cfg, sc.cadence, [&](const SimState& s) {
        last = cons::run_diagnostics(s, ctx, sc.laws, &baseline);
        csv << csv_row(s.t, last, sc.laws);
      });
  csv.close();

  Snapshot snap;
  snap.state = std::move(final_state);
  snap.thermo = sc.thermo;
  snap.potential = sc.potential;
  snap.laws = sc.laws;
  snap.tolerances = sc.tolerances;
  snap.ertel_psi = sc.ertel_psi;
  snap.baseline = baseline;
  write_snapshot(snap, outcome.snapshot_path);

  if (strict) {
    for (const auto& r : last) {
      auto it = sc.tolerances.find(r.name);
      if (it != sc.tolerances.end() && !(r.norm_max <= it->second)) {
        std::cerr << "strict: " << r.name << " = " << g17(r.norm_max)
                  << " exceeds tolerance " << g17(it->second) << "\n";
        outcome.exit_code = 1;
      }
    }
  }
  return outcome;
}

int check_command(const std::filesystem::path& snapshot_path, bool strict) {
  const Snapshot snap = load_snapshot(snapshot_path);
  const cons::LawContext ctx = snap.make_law_context();
  const auto records =
      cons::run_diagnostics(snap.state, ctx, snap.laws, &snap.baseline);
  const std::string header = csv_header(snap.laws);
  const std::string row = csv_row(snap.state.t, records, snap.laws);
  const std::filesystem::path out = snapshot_path.parent_path() / "check.csv";
  std::ofstream f(out);
  f << header << row;
  std::cout << header << row;
  int rc = 0;
  if (strict) {
    for (const auto& r : records) {
      auto it = snap.tolerances.find(r.name);
      if (it != snap.tolerances.end() && !(r.norm_max <= it->second)) {
        std::cerr << "strict: " << r.name << " exceeds tolerance\n";
        rc = 1;
      }
    }
  }
  return rc;
}

int ms_residual_command(const std::filesystem::path& snapshot_path) {
  const Snapshot snap = load_snapshot(snapshot_path);
  const SimState& s = snap.state;
  const ms::ZLayout lo = ms::ZLayout::build(s.grid().n, s.k_lin());
  const Potential pot = snap.potential.build(s.grid().n);
  const ms::JetField jets = ms::assemble_jets(s, snap.thermo, pot, lo);
  const ms::KMatrices K = ms::build_K(lo);
  std::vector<double> row_max(lo.N, 0.0);
  for (const auto& jet : jets.jets) {
    const auto res = ms::ms_residual(jet, K, lo, snap.thermo, pot);
    for (int i = 0; i < lo.N; ++i)
      row_max[i] = std::max(row_max[i], std::fabs(res[i]));
  }
  // Group rows into the paper's blocks.
  struct Block {
    std::string name;
    double v = 0.0;
  };
  std::vector<Block> blocks = {{"x", 0},  {"u", 0},  {"pi", 0},
                               {"S", 0},  {"r", 0},  {"xg", 0},
                               {"mu", 0}, {"lambda", 0}};
  const int n = lo.n;
  for (int i = 0; i < lo.N; ++i) {
    int b;
    if (i < n) b = 0;
    else if (i < 2 * n) b = 1;
    else if (i < 2 * n + n * n) b = 2;
    else if (i == lo.S()) b = 3;
    else if (i == lo.r()) b = 4;
    else if (i < 2 * n * n + 2 * n + 2) b = 5;
    else b = (i - (2 * n * n + 2 * n + 2)) % 2 == 0 ? 6 : 7;
    blocks[b].v = std::max(blocks[b].v, row_max[i]);
  }
  std::printf("%-8s %s\n", "block", "max|residual|");
  for (const auto& b : blocks) {
    if ((b.name == "mu" || b.name == "lambda") && lo.k_lin == 0) continue;
    std::printf("%-8s %.3e\n", b.name.c_str(), b.v);
  }
  return 0;
}

int forms_verify_command(int n, int trials, double tol, unsigned seed) {
  ThermoModel th;  // gamma = 5/3, c_v = A0 = 1
  const forms::FiberContext ctx = forms::FiberContext::make(n, th);
  // Quadratic potential so the id3 Hessian term is exercised.
  forms::Expr Phi = forms::cst(0.0);
  for (int i = 0; i < n; ++i) {
    const forms::Expr xi = forms::coord(ctx.fiber(ctx.layout.x(i)));
    Phi = forms::add(Phi, forms::mul(forms::cst(0.15), forms::mul(xi, xi)));
  }
  const forms::IdealReport rep = forms::ideal_closure_check(ctx, Phi, trials, seed);
  std::printf("%-10s %-14s %s\n", "identity", "max|LHS-RHS|", "scale");
  int rc = 0;
  for (const auto& row : rep.rows) {
    std::printf("%-10s %-14.3e %.3e\n", row.name.c_str(), row.max_residual, row.scale);
    if (!(row.max_residual <= tol)) rc = 1;
  }
  std::printf("n=%d trials=%d tol=%.1e -> %s\n", n, trials, tol,
              rc == 0 ? "ok" : "FAILED");
  return rc;
}

}  // namespace gas
