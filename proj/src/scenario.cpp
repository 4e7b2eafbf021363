#include <wavemap/scenario.hpp>
#include <wavemap/builders.hpp>
#include <wavemap/diagnostics.hpp>
#include <wavemap/functionals.hpp>
#include <wavemap/harmonic.hpp>
#include <wavemap/io.hpp>
#include <wavemap/linear.hpp>
#include <wavemap/modulation.hpp>

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <thread>

namespace wavemap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double number_or(const json& obj, const char* key, double fallback) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : it->get<double>();
}

json::json_pointer pointer_target(const std::string& path) {
  std::string ptr = "/" + path;
  std::replace(ptr.begin(), ptr.end(), '.', '/');
  return json::json_pointer(ptr);
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& path, const char* header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << header << '\n';
  return out;
}

} // namespace

void validate_scenario(const json& config) {
  validate_against(config, scenario_schema());
  for (const auto& axis : config.value("sweep", json::array())) {
    if (!config.contains(pointer_target(axis["path"].get<std::string>()))) throw ConfigError("config /sweep: path '" + axis["path"].get<std::string>() + "' names no key");
  }
  // Every sweep point must satisfy the schema as well.
  for (const auto& run : expand_sweep(config)) validate_against(run.doc, scenario_schema());
}

json load_scenario(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  validate_scenario(config);
  return config;
}

std::vector<RunSpec> expand_sweep(const json& config) {
  json base = config;
  const json axes = base.value("sweep", json::array());
  base.erase("sweep");
  std::vector<RunSpec> runs;
  std::size_t total = 1;
  for (const auto& axis : axes) total *= axis["values"].size();
  for (std::size_t k = 0; k < total; ++k) {
    RunSpec spec;
    spec.index = k;
    spec.doc = base;
    std::size_t rest = k;
    std::string label;
    // First axis varies slowest.
    std::vector<std::size_t> pick(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      const std::size_t n = axes[a]["values"].size();
      pick[a] = rest % n;
      rest /= n;
    }
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const std::string path = axes[a]["path"].get<std::string>();
      const json& value = axes[a]["values"][pick[a]];
      spec.doc[pointer_target(path)] = value;
      if (!label.empty()) label += ';';
      label += path + "=" + (value.is_string() ? value.get<std::string>() : value.dump());
    }
    spec.label = label;
    runs.push_back(std::move(spec));
  }
  return runs;
}

GridPtr build_grid(const json& grid) {
  const double dr = grid.at("dr").get<double>();
  const double r_max = grid.at("r_max").get<double>();
  if (const auto it = grid.find("stretch"); it != grid.end())
    return share(RadialGrid::stretched(dr, it->at("r_uniform").get<double>(), it->at("ratio").get<double>(),
                                       it->at("h_max").get<double>(), r_max));
  return share(RadialGrid::uniform_spacing(dr, r_max));
}

FieldState build_data(const json& doc, GridPtr grid, json& details) {
  const json& data = doc.at("data");
  const std::string builder = data.at("builder").get<std::string>();
  const int ell = doc.value("ell", 1);
  const TargetGeometry target = TargetGeometry::from_name(doc.value("target", std::string("sphere")));
  details = json::object();
  details["builder"] = builder;

  if (builder == "ground_state") {
    return ground_state(ell, target, number_or(data, "lambda", 1.0)).sample(std::move(grid));
  }
  if (builder == "rate_ansatz") {
    RateAnsatzOptions o;
    o.ell = ell;
    o.target = target;
    o.cap_inner = number_or(data, "cap_inner", o.cap_inner);
    o.cap_outer = number_or(data, "cap_outer", o.cap_outer);
    const double nu = data.at("nu").get<double>();
    const double t0 = number_or(data, "t0", 0.0);
    details["lambda0"] = std::pow(1.0 - t0, 1.0 + nu);
    return build_rate_ansatz(std::move(grid), nu, t0, o);
  }
  if (builder == "below_threshold") {
    if (target.kind() != TargetKind::sphere) throw std::invalid_argument("below_threshold: sphere target only");
    const auto shape = parse_bump_shape(data.value("shape", std::string("ring")));
    const BelowThresholdData b = build_below_threshold_family(std::move(grid), data.at("energy").get<double>(), shape, ell);
    details["amplitude"] = b.amplitude;
    details["energy"] = b.energy;
    return b.state;
  }
  if (builder == "bump") {
    const auto shape = parse_bump_shape(data.value("shape", std::string("ring")));
    const double a = data.at("amplitude").get<double>();
    return FieldState::sample(
        std::move(grid), [&](double r) { return target.lower_vacuum() + a * bump_profile(shape, r); },
        [](double) { return 0.0; }, ell, target);
  }
  if (builder == "glued") {
    if (target.kind() != TargetKind::sphere || ell != 1) throw std::invalid_argument("glued: sphere target with ell = 1 only");
    GluedOptions o;
    o.inner_scale = number_or(data, "inner_scale", o.inner_scale);
    o.match_radius = number_or(data, "match_radius", o.match_radius);
    o.collar_half_width = number_or(data, "collar_half_width", o.collar_half_width);
    o.probe_dr = number_or(data, "probe_dr", o.probe_dr);
    o.probe_t_final = number_or(data, "probe_t_final", o.probe_t_final);
    o.bisection_steps = data.value("bisection_steps", o.bisection_steps);
    const GluedData g = build_glued_threshold_data(std::move(grid), data.at("delta").get<double>(), o);
    details["delta"] = data.at("delta");
    details["kick_amplitude"] = g.kick_amplitude;
    details["lambda_glue"] = g.lambda_glue;
    details["matching_residual"] = g.matching_residual;
    details["inner_energy"] = g.inner_energy;
    details["collar_energy"] = g.collar_energy;
    details["energy"] = g.energy;
    details["certification_runs"] = g.certification_runs;
    return g.state;
  }
  throw std::invalid_argument("unknown builder '" + builder + "'");
}

SolverConfig solver_config(const json& doc, const RadialGrid& grid) {
  const json& s = doc.at("solver");
  SolverConfig c;
  c.dr = grid.h_min();
  c.r_max = grid.r_max();
  c.cfl = number_or(s, "cfl", c.cfl);
  c.t_final = s.at("t_final").get<double>();
  c.snapshot_stride = s.value("snapshot_stride", c.snapshot_stride);
  c.support_radius = number_or(s, "support_radius", c.support_radius);
  if (s.contains("formulation")) c.formulation = parse_formulation(s["formulation"].get<std::string>());
  if (s.contains("t_plus")) c.t_plus = s["t_plus"].get<double>();
  if (s.contains("t_plus_rule")) c.t_plus_rule = parse_t_plus_rule(s["t_plus_rule"].get<std::string>());
  if (const auto it = s.find("stop"); it != s.end()) {
    c.stop.min_lambda_cells = number_or(*it, "min_lambda_cells", c.stop.min_lambda_cells);
    c.stop.max_gradient_factor = number_or(*it, "max_gradient_factor", c.stop.max_gradient_factor);
  }
  c.validate();
  return c;
}

namespace {

using Metrics = std::map<std::string, double>;

json point_series(const std::vector<WindowPoint>& pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back({p.t, p.value});
  return out;
}

void analyse_diagnostics(const json& opts, const EvolutionTrace& trace, const fs::path& dir, Metrics& m) {
  nlohmann::ordered_json doc;
  if (const auto tp = trace.t_plus()) {
    doc["t_plus"] = *tp;
    const auto window = self_similar_window(trace, number_or(opts, "lambda_frac", 0.25));
    doc["self_similar_window"] = {{"lambda_frac", number_or(opts, "lambda_frac", 0.25)}, {"series", point_series(window)}};
    if (!window.empty() && window.front().value > 0.0) m["window_ratio"] = window.back().value / window.front().value;
    std::vector<WindowPoint> avg;
    for (const auto& s : trace.snapshots)
      if (s.t < *tp) avg.push_back({s.t, averaged_kinetic_cone(trace, s.t)});
    doc["averaged_kinetic_cone"] = point_series(avg);
    const auto sel = select_times(trace, {number_or(opts, "theta0", 1.5), number_or(opts, "power", 1.0)});
    json times = json::array();
    for (const auto& t : sel) times.push_back({{"t", t.t}, {"averaged", t.averaged}, {"instant", t.instant}});
    doc["selected_times"] = times;
    m["selected_times"] = static_cast<double>(sel.size());
  }
  if (const auto it = opts.find("virial_R"); it != opts.end()) {
    const double T = number_or(opts, "virial_T", trace.snapshots.back().t - trace.snapshots.front().t);
    json reports = json::array();
    bool inside = true;
    for (const auto& Rv : *it) {
      const double R = Rv.get<double>();
      const VirialReport v = virial_check(trace, R, T);
      inside = inside && v.inside_band();
      reports.push_back({{"R", v.R}, {"T", v.T}, {"lhs", v.lhs}, {"kinetic_integral", v.kinetic_integral},
                         {"exterior_correction", v.exterior_correction}, {"residual", v.residual},
                         {"exact_correction", v.exact_correction}, {"sup_exterior", v.sup_exterior},
                         {"inside_band", v.inside_band()}});
      const std::string tag = format_double(R);
      m["virial_residual_R" + tag] = v.residual;
      m["virial_band_R" + tag] = v.exterior_correction;
      m["virial_sup_R" + tag] = v.sup_exterior;
    }
    doc["virial"] = reports;
    m["virial_inside_band"] = inside ? 1.0 : 0.0;
  }
  write_json(dir / "diagnostics.json", doc);
}

void analyse_modulation(const json& opts, const EvolutionTrace& trace, const fs::path& dir, Metrics& m) {
  auto csv = open_csv(dir / "modulation.csv", "t,lambda,distance_H,remainder_energy,sign");
  if (!trace.t_plus()) {
    std::size_t rows = 0;
    for (const auto& s : trace.snapshots) {
      ModulationFit f;
      try {
        f = fit_scale(s);
      } catch (const std::domain_error&) {
        continue;
      }
      const int sign = s.psi[s.grid->locate(f.lambda)] < s.target.lower_vacuum() ? -1 : 1;
      csv << format_double(s.t) << ',' << format_double(f.lambda) << ',' << format_double(f.distance_H) << ','
          << format_double(f.remainder_energy) << ',' << sign << '\n';
      ++rows;
    }
    m["modulation_rows"] = static_cast<double>(rows);
    return;
  }
  const BubblingReport b = bubbling_extract(trace, {number_or(opts, "theta0", 1.5), number_or(opts, "power", 1.0)});
  bool all_plus = true;
  for (const auto& p : b.points) {
    const ModulationFit f = fit_scale(trace.snapshots[p.snapshot]);
    csv << format_double(p.t) << ',' << format_double(p.lambda) << ',' << format_double(p.distance) << ','
        << format_double(f.remainder_energy) << ',' << p.sign << '\n';
    all_plus = all_plus && p.sign == 1;
  }
  m["bubbling_points"] = static_cast<double>(b.points.size());
  m["bubbling_ratio_decreasing"] = b.ratio_strictly_decreasing ? 1.0 : 0.0;
  m["bubbling_last_distance"] = b.points.back().distance;
  m["bubbling_sign_plus"] = all_plus ? 1.0 : 0.0;
  if (!opts.value("remainder", true)) return;
  RadiationOptions ro;
  ro.t_ref = number_or(opts, "t_ref", -1.0);
  ro.r_ref = number_or(opts, "r_ref", -1.0);
  const RemainderReport r = remainder_sequence(trace, b, ro);
  auto rc = open_csv(dir / "remainder.csv", "t,lambda,norm,energy,energy_defect");
  for (const auto& p : r.points)
    rc << format_double(p.t) << ',' << format_double(p.lambda) << ',' << format_double(p.norm) << ','
       << format_double(p.energy) << ',' << format_double(p.energy_defect) << '\n';
  m["remainder_decreasing"] = r.norm_decreasing ? 1.0 : 0.0;
  m["remainder_last_norm"] = r.points.back().norm;
  m["remainder_last_defect"] = r.points.back().energy_defect;
  m["radiation_cap_energy"] = r.cap_energy;
}

void analyse_invariants(const EvolutionTrace& trace, Metrics& m) {
  std::optional<Degree> first;
  bool constant = true;
  double max_abs = 0.0, g_excess = -infinity, var_excess = infinity;
  for (const auto& s : trace.snapshots) {
    std::optional<Degree> d;
    try {
      d = classify_degree(s);
    } catch (const std::domain_error&) {
      constant = false;
    }
    if (d && !first) first = d;
    constant = constant && d && *d == *first;
    max_abs = std::max(max_abs, pointwise_bound(s));
    // 2 ell |G(psi(r)) - G(psi(0))| <= E_0^r(psi, 0) at every node.
    const RadialGrid& g = *s.grid;
    const std::vector<double> static_acc = static_energy_profile(s);
    double g_acc = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
      // G(b) - G(a) = ∫_a^b |g|; cells are short, so a fixed rule suffices.
      g_acc += boost::math::quadrature::gauss<double, 10>::integrate(
          [&](double x) { return std::abs(s.target.g(x)); }, s.psi[i - 1], s.psi[i]);
      const double lhs = 2.0 * s.ell * std::abs(g_acc);
      g_excess = std::max(g_excess, (lhs - static_acc[i]) / std::max(1.0, static_acc[i]));
    }
    if (d) {
      const EnergyReport e = energy(s);
      const double floor = s.target.ground_state_energy(s.ell) * std::abs(d->n - d->m);
      var_excess = std::min(var_excess, e.total - e.kinetic - floor);
    }
  }
  m["degree_constant"] = constant ? 1.0 : 0.0;
  m["max_abs_psi"] = max_abs;
  m["g_bound_excess"] = g_excess;
  if (first) m["variational_excess"] = var_excess;
}

void analyse_dispersion(const json& opts, const EvolutionTrace& trace, Metrics& m) {
  const double R = number_or(opts, "radius", 1.0);
  const double e0 = energy(trace.snapshots.front(), 0.0, R).total;
  const double e1 = energy(trace.snapshots.back(), 0.0, R).total;
  m["dispersion_ratio"] = e0 > 0.0 ? e1 / e0 : std::numeric_limits<double>::quiet_NaN();
}

void analyse_blowup(const json& opts, const EvolutionTrace& trace, Metrics& m) {
  const auto tp = trace.t_plus();
  m["blowup_diagnosed"] = tp ? 1.0 : 0.0;
  m["lambda_threshold"] = trace.config.stop.min_lambda_cells * trace.config.dr;
  m["lambda_final"] = trace.series.back().lambda;
  if (!tp) {
    m["blowup_ratio_decreasing"] = 0.0;
    return;
  }
  const std::size_t windows = opts.value("windows", std::size_t{10});
  const auto& snaps = trace.snapshots;
  if (snaps.size() < windows) throw std::runtime_error("blowup analysis: fewer snapshots than windows");
  bool decreasing = true;
  double prev = infinity;
  for (std::size_t k = snaps.size() - windows; k < snaps.size(); ++k) {
    const auto lam = half_energy_scale(snaps[k], 0.5 * snaps[k].target.ground_state_energy(snaps[k].ell));
    if (!lam) throw std::runtime_error("blowup analysis: scale not resolved in a window");
    const double ratio = *lam / (*tp - snaps[k].t);
    decreasing = decreasing && ratio < prev;
    prev = ratio;
  }
  m["blowup_ratio_decreasing"] = decreasing ? 1.0 : 0.0;
  m["blowup_last_ratio"] = prev;
}

} // namespace

RunRecord execute_run(const RunSpec& spec, const fs::path& dir) {
  RunRecord rec;
  rec.index = spec.index;
  rec.label = spec.label;
  try {
    fs::create_directories(dir);
    const json& doc = spec.doc;
    if (!doc.contains("data") || !doc.contains("grid") || !doc.contains("solver"))
      throw ConfigError("scenario needs data, grid and solver blocks");
    const GridPtr grid = build_grid(doc["grid"]);
    json details;
    const FieldState data = build_data(doc, grid, details);
    write_json(dir / "data.json", details);
    rec.energy = energy(data).total;
    try {
      const Degree d = classify_degree(data);
      rec.degree_m = d.m;
      rec.degree_n = d.n;
    } catch (const std::domain_error&) {
    }
    const SolverConfig config = solver_config(doc, *grid);
    const EvolutionTrace trace = evolve(data, config);
    write_trace(dir, trace, doc.value("output", json::object()).value("snapshot_every", std::size_t{1}));
    rec.stop_reason = to_string(trace.stop_reason);
    rec.t_end = trace.t_end;
    rec.energy_drift = trace.energy_drift;
    rec.t_plus = trace.t_plus();
    for (const auto& a : doc.value("analyses", json::array())) {
      const std::string kind = a.at("kind").get<std::string>();
      if (kind == "diagnostics") analyse_diagnostics(a, trace, dir, rec.metrics);
      else if (kind == "modulation") analyse_modulation(a, trace, dir, rec.metrics);
      else if (kind == "invariants") analyse_invariants(trace, rec.metrics);
      else if (kind == "dispersion") analyse_dispersion(a, trace, rec.metrics);
      else if (kind == "blowup") analyse_blowup(a, trace, rec.metrics);
    }
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

std::size_t SweepResult::failures() const {
  return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const RunRecord& r) { return !r.ok; }));
}

std::size_t workers_from_env() {
  const char* v = std::getenv("WAVEMAP_WORKERS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw ConfigError("WAVEMAP_WORKERS must be a positive integer");
  return static_cast<std::size_t>(n);
}

SweepResult run_scenario(const json& config, const fs::path& out, std::size_t workers) {
  const std::vector<RunSpec> runs = expand_sweep(config);
  fs::create_directories(out);
  SweepResult result;
  result.runs.resize(runs.size());
  auto dir_of = [&](std::size_t k) {
    std::string name = std::to_string(k);
    name.insert(0, name.size() < 3 ? 3 - name.size() : 0, '0');
    return out / ("run_" + name);
  };
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < runs.size(); k = next++) result.runs[k] = execute_run(runs[k], dir_of(k));
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(workers, runs.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  write_summary(out / "summary.csv", result);
  return result;
}

void write_summary(const fs::path& path, const SweepResult& result) {
  std::vector<std::string> keys;
  for (const auto& r : result.runs)
    for (const auto& [k, v] : r.metrics) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "run,label,status,stop_reason,t_end,energy,energy_drift,t_plus,degree_m,degree_n";
  for (const auto& k : keys) out << ',' << k;
  out << ",error\n";
  auto clean = [](std::string s) {
    std::replace(s.begin(), s.end(), ',', ' ');
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '"', '\'');
    return s;
  };
  for (const auto& r : result.runs) {
    out << r.index << ',' << clean(r.label) << ',' << (r.ok ? "ok" : "failed") << ',' << r.stop_reason << ',';
    if (r.ok) out << format_double(r.t_end) << ',' << format_double(r.energy) << ',' << format_double(r.energy_drift);
    else out << ",,";
    out << ',' << (r.t_plus ? format_double(*r.t_plus) : "") << ',';
    out << (r.degree_m ? std::to_string(*r.degree_m) : "") << ',' << (r.degree_n ? std::to_string(*r.degree_n) : "");
    for (const auto& k : keys) {
      out << ',';
      if (const auto it = r.metrics.find(k); it != r.metrics.end()) out << format_double(it->second);
    }
    out << ',' << clean(r.error) << '\n';
  }
}

ExteriorReport run_exterior(const json& config, const fs::path& out) {
  const json& ext = config.at("exterior");
  fs::create_directories(out);
  ProfileOptions po;
  po.dr = number_or(ext, "dr", po.dr);
  po.cfl = number_or(ext, "cfl", po.cfl);
  const std::vector<double> times = ext.at("times").get<std::vector<double>>();
  const bool repulsive = ext.value("repulsive", false);

  ExteriorReport rep;
  auto summary = open_csv(out / "exterior_summary.csv", "member,dim,min_ratio");
  nlohmann::ordered_json floors = nlohmann::ordered_json::object();
  std::map<int, double> floor_by_dim;
  std::size_t member = 0;
  for (const auto& f : ext.at("family")) {
    SplineDatum datum;
    datum.coefficients = f.at("coefficients").get<std::vector<double>>();
    datum.spacing = number_or(f, "spacing", datum.spacing);
    std::vector<RatioPoint> rows;
    for (const auto& dj : ext.at("dims")) {
      const int dim = dj.get<int>();
      ProfileOptions o = po;
      o.repulsive = repulsive && dim == 4;
      const ExteriorProfile p = exterior_ratio_profile(datum, dim, times, o);
      rows.insert(rows.end(), p.points.begin(), p.points.end());
      summary << member << ',' << dim << ',' << format_double(p.min_free) << '\n';
      floor_by_dim.try_emplace(dim, infinity);
      floor_by_dim[dim] = std::min(floor_by_dim[dim], p.min_free);
      if (o.repulsive) {
        summary << member << ",2," << format_double(p.min_repulsive) << '\n';
        floor_by_dim.try_emplace(2, infinity);
        floor_by_dim[2] = std::min(floor_by_dim[2], p.min_repulsive);
      }
    }
    write_exterior_csv(out / ("exterior_" + std::to_string(member) + ".csv"), rows);
    rep.rows += rows.size();
    ++member;
  }
  for (const auto& [dim, v] : floor_by_dim) floors[std::to_string(dim)] = v;
  rep.summary["floors"] = floors;

  if (const auto it = ext.find("search"); it != ext.end()) {
    ChannelSearchOptions so;
    so.dim = it->value("dim", so.dim);
    so.t = number_or(*it, "t", so.t);
    so.basis = it->value("basis", so.basis);
    so.spacing = number_or(*it, "spacing", so.spacing);
    so.dr = number_or(*it, "dr", so.dr);
    so.initial_step = number_or(*it, "initial_step", so.initial_step);
    so.min_step = number_or(*it, "min_step", so.min_step);
    so.max_evaluations = it->value("max_evaluations", so.max_evaluations);
    const ChannelSearchResult r = minimize_exterior_ratio(so);
    nlohmann::ordered_json s;
    s["dim"] = so.dim;
    s["t"] = so.t;
    s["spacing"] = r.datum.spacing;
    s["coefficients"] = r.datum.coefficients;
    s["ratio"] = r.ratio;
    s["refined_ratio"] = r.refined_ratio;
    s["evaluations"] = r.evaluations;
    write_json(out / "search.json", s);
    rep.summary["search"] = s;
  }
  write_json(out / "exterior.json", rep.summary);
  return rep;
}

} // namespace wavemap
