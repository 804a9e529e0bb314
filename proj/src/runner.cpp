#include "qprobe/runner.hpp"

#include "qprobe/homodyne.hpp"
#include "qprobe/io.hpp"
#include "qprobe/special.hpp"
#include "qprobe/stats.hpp"
#include "qprobe/version.hpp"

#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace qprobe {

namespace {

using nlohmann::json;

Complex parse_complex(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(what + ": expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

StateSpec parse_state(const json& j) {
  if (!j.is_object() || !j.contains("family")) throw ConfigError("state: missing 'family'");
  const std::string family = j.at("family").get<std::string>();
  if (family == "vacuum") {
    reject_unknown(j, {"family"}, "state");
    return StateSpec::vacuum();
  }
  if (family == "coherent") {
    reject_unknown(j, {"family", "alpha"}, "state");
    return StateSpec::coherent(parse_complex(j.at("alpha"), "state.alpha"));
  }
  if (family == "fock") {
    reject_unknown(j, {"family", "n"}, "state");
    return StateSpec::fock(j.at("n").get<int>());
  }
  if (family == "thermal") {
    reject_unknown(j, {"family", "nbar"}, "state");
    return StateSpec::thermal(j.at("nbar").get<double>());
  }
  if (family == "squeezed") {
    reject_unknown(j, {"family", "r"}, "state");
    return StateSpec::squeezed_vacuum(j.at("r").get<double>());
  }
  if (family == "cat") {
    reject_unknown(j, {"family", "alpha"}, "state");
    return StateSpec::cat(parse_complex(j.at("alpha"), "state.alpha"));
  }
  if (family == "mixture") {
    reject_unknown(j, {"family", "components"}, "state");
    std::vector<std::pair<double, StateSpec>> parts;
    for (const json& c : j.at("components")) {
      reject_unknown(c, {"weight", "state"}, "state.components");
      parts.emplace_back(c.at("weight").get<double>(), parse_state(c.at("state")));
    }
    return StateSpec::mixture(std::move(parts));
  }
  throw ConfigError("state: unknown family '" + family + "'");
}

json state_json(const StateSpec& spec) {
  json j;
  switch (spec.family()) {
    case StateSpec::Family::Vacuum: j["family"] = "vacuum"; break;
    case StateSpec::Family::Coherent:
      j["family"] = "coherent";
      j["alpha"] = {spec.amplitude().real(), spec.amplitude().imag()};
      break;
    case StateSpec::Family::Fock:
      j["family"] = "fock";
      j["n"] = spec.photon_number();
      break;
    case StateSpec::Family::Thermal:
      j["family"] = "thermal";
      j["nbar"] = spec.mean_thermal_photons();
      break;
    case StateSpec::Family::SqueezedVacuum:
      j["family"] = "squeezed";
      j["r"] = spec.squeeze();
      break;
    case StateSpec::Family::Cat:
      j["family"] = "cat";
      j["alpha"] = {spec.amplitude().real(), spec.amplitude().imag()};
      break;
    case StateSpec::Family::Mixture: {
      j["family"] = "mixture";
      json parts = json::array();
      for (const auto& [w, part] : spec.parts())
        parts.push_back({{"weight", w}, {"state", state_json(part)}});
      j["components"] = parts;
      break;
    }
    case StateSpec::Family::Explicit:
      j["family"] = "explicit";
      j["dim"] = spec.matrix().rows();
      break;
  }
  return j;
}

void emit(const RunConfig& config, const std::string& text) {
  if (config.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(config.out, std::ios::binary);
  if (!os) throw ConfigError("cannot open output path '" + config.out + "'");
  os << text;
}

// Closed-form families evaluated point by point; everything else through
// one shared spectral grid pass.
bool has_closed_form(const StateSpec& spec) {
  switch (spec.family()) {
    case StateSpec::Family::Vacuum:
    case StateSpec::Family::Coherent:
    case StateSpec::Family::Fock:
    case StateSpec::Family::Thermal:
    case StateSpec::Family::Cat:
      return true;
    case StateSpec::Family::Mixture: {
      for (const auto& [_, part] : spec.parts())
        if (!has_closed_form(part)) return false;
      return true;
    }
    default:
      return false;
  }
}

}  // namespace

RunConfig RunConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"state", "detector", "s", "grid", "runs", "seed", "format", "out", "strict",
                  "beta", "stats", "homodyne"},
                 "config");
  RunConfig c;
  try {
    if (j.contains("state")) c.state = parse_state(j.at("state"));
    if (j.contains("detector")) {
      const json& d = j.at("detector");
      reject_unknown(d, {"eta", "T", "xi", "visibility", "cutoff"}, "detector");
      DetectorModel det;
      det.efficiency = d.value("eta", 1.0);
      det.transmission = d.value("T", 0.99);
      if (d.contains("xi") && d.contains("visibility"))
        throw ConfigError("detector: give exactly one of 'xi' or 'visibility'");
      if (d.contains("xi")) det.overlap = d.at("xi").get<double>();
      if (d.contains("visibility"))
        det.overlap = visibility_to_overlap(d.at("visibility").get<double>());
      if (d.contains("cutoff")) det.cutoff = d.at("cutoff").get<int>();
      det.validate();
      c.detector = det;
    }
    c.s = j.value("s", 0.0);
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      const std::string type = g.value("type", "cartesian");
      if (type == "cartesian") {
        reject_unknown(g, {"type", "re_min", "re_max", "re_step", "im_min", "im_max", "im_step"},
                       "grid");
        GridSpec spec;
        spec.re_min = g.at("re_min").get<double>();
        spec.re_step = g.at("re_step").get<double>();
        spec.im_min = g.at("im_min").get<double>();
        spec.im_step = g.at("im_step").get<double>();
        if (!(spec.re_step > 0.0) || !(spec.im_step > 0.0))
          throw ConfigError("grid: steps must be > 0");
        spec.re_count =
            int(std::floor((g.at("re_max").get<double>() - spec.re_min) / spec.re_step + 1.5));
        spec.im_count =
            int(std::floor((g.at("im_max").get<double>() - spec.im_min) / spec.im_step + 1.5));
        spec.validate();
        c.cartesian = spec;
      } else if (type == "polar") {
        reject_unknown(g, {"type", "radius_count", "radius_max", "phase_count"}, "grid");
        PolarScan p;
        p.radius_count = g.at("radius_count").get<int>();
        p.radius_max = g.at("radius_max").get<double>();
        p.phase_count = g.at("phase_count").get<int>();
        if (p.radius_count < 1 || p.phase_count < 1 || !(p.radius_max > 0.0))
          throw ConfigError("grid: polar scan needs positive counts and radius");
        c.polar = p;
      } else {
        throw ConfigError("grid: unknown type '" + type + "'");
      }
    }
    c.runs = j.value("runs", std::int64_t(1000));
    if (c.runs < 1) throw ConfigError("runs must be >= 1");
    c.seed = j.value("seed", std::uint64_t(1));
    c.format = j.value("format", std::string("csv"));
    if (c.format != "csv" && c.format != "json")
      throw ConfigError("format must be 'csv' or 'json'");
    c.out = j.value("out", std::string());
    c.strict = j.value("strict", false);
    if (j.contains("beta")) c.beta = parse_complex(j.at("beta"), "beta");
    if (j.contains("stats")) {
      const json& t = j.at("stats");
      reject_unknown(t, {"sweep", "from", "to", "steps", "nbar", "levels"}, "stats");
      c.sweep = t.value("sweep", std::string("thermal"));
      if (c.sweep != "thermal" && c.sweep != "coherent" && c.sweep != "reconstruction")
        throw ConfigError("stats.sweep must be thermal, coherent or reconstruction");
      c.sweep_from = t.value("from", 0.0);
      c.sweep_to = t.value("to", 3.0);
      c.sweep_steps = t.value("steps", 31);
      c.reconstruction_nbar = t.value("nbar", 2.0);
      c.reconstruction_levels = t.value("levels", 12);
      if (c.sweep_steps < 1) throw ConfigError("stats.steps must be >= 1");
      if (c.reconstruction_levels < 1) throw ConfigError("stats.levels must be >= 1");
    }
    if (j.contains("homodyne")) {
      const json& h = j.at("homodyne");
      reject_unknown(h,
                     {"mode", "phases", "x_min", "x_max", "x_step", "filter_cutoff", "grid_extent",
                      "grid_step"},
                     "homodyne");
      c.homodyne_mode = h.value("mode", std::string("reconstruct"));
      if (c.homodyne_mode != "marginals" && c.homodyne_mode != "reconstruct" &&
          c.homodyne_mode != "randomphase")
        throw ConfigError("homodyne.mode must be marginals, reconstruct or randomphase");
      c.phases = h.value("phases", 64);
      c.x_min = h.value("x_min", -6.0);
      c.x_max = h.value("x_max", 6.0);
      c.x_step = h.value("x_step", 0.05);
      c.filter_cutoff = h.value("filter_cutoff", 8.0);
      c.grid_extent = h.value("grid_extent", 2.5);
      c.grid_step = h.value("grid_step", 0.05);
      if (c.phases < 2) throw ConfigError("homodyne.phases must be >= 2");
      if (!(c.x_step > 0.0) || !(c.x_max > c.x_min))
        throw ConfigError("homodyne: invalid x grid");
      if (!(c.filter_cutoff >= 0.0)) throw ConfigError("homodyne.filter_cutoff must be >= 0");
      if (!(c.grid_step > 0.0) || !(c.grid_extent > 0.0))
        throw ConfigError("homodyne: invalid output grid");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  return c;
}

std::string RunConfig::resolved_json(const std::string& command) const {
  json j;
  j["command"] = command;
  j["state"] = state_json(state);
  j["detector"] = {{"eta", detector.efficiency},
                   {"T", detector.transmission},
                   {"xi", detector.overlap}};
  if (detector.cutoff) j["detector"]["cutoff"] = *detector.cutoff;
  j["s"] = s;
  if (cartesian) {
    j["grid"] = {{"type", "cartesian"},
                 {"re_min", cartesian->re_min},
                 {"re_step", cartesian->re_step},
                 {"re_count", cartesian->re_count},
                 {"im_min", cartesian->im_min},
                 {"im_step", cartesian->im_step},
                 {"im_count", cartesian->im_count}};
  } else if (polar) {
    j["grid"] = {{"type", "polar"},
                 {"radius_count", polar->radius_count},
                 {"radius_max", polar->radius_max},
                 {"phase_count", polar->phase_count}};
  }
  j["runs"] = runs;
  j["seed"] = seed;
  j["format"] = format;
  j["strict"] = strict;
  if (command == "counts") j["beta"] = {beta.real(), beta.imag()};
  if (command == "stats") {
    j["stats"] = {{"sweep", sweep}};
    if (sweep == "reconstruction") {
      j["stats"]["nbar"] = reconstruction_nbar;
      j["stats"]["levels"] = reconstruction_levels;
    } else {
      j["stats"]["from"] = sweep_from;
      j["stats"]["to"] = sweep_to;
      j["stats"]["steps"] = sweep_steps;
    }
  }
  if (command == "homodyne") {
    j["homodyne"] = {{"mode", homodyne_mode},   {"phases", phases},
                     {"x_min", x_min},          {"x_max", x_max},
                     {"x_step", x_step},        {"filter_cutoff", filter_cutoff},
                     {"grid_extent", grid_extent}, {"grid_step", grid_step}};
  }
  return j.dump();
}

std::vector<Complex> RunConfig::scan_points() const {
  std::vector<Complex> points;
  if (polar) {
    // Circles of increasing radius, phase-major within each circle.
    points.reserve(std::size_t(polar->radius_count) * std::size_t(polar->phase_count));
    for (int k = 1; k <= polar->radius_count; ++k) {
      const double r = polar->radius_max * double(k) / double(polar->radius_count);
      for (int j = 0; j < polar->phase_count; ++j) {
        const double phi = 2.0 * kPi * double(j) / double(polar->phase_count);
        points.push_back(std::polar(r, phi));
      }
    }
    return points;
  }
  GridSpec g = cartesian.value_or(GridSpec::centered(2.0, 0.25));
  points.reserve(std::size_t(g.re_count) * std::size_t(g.im_count));
  for (int i = 0; i < g.re_count; ++i)
    for (int j = 0; j < g.im_count; ++j) points.push_back(g.point(i, j));
  return points;
}

int cmd_quasi(const RunConfig& config) {
  if (config.polar) throw ConfigError("quasi: needs a cartesian grid");
  const io::Meta meta{config.resolved_json("quasi")};
  const GridSpec grid = config.cartesian.value_or(GridSpec::centered(2.0, 0.25));
  QuasiGrid result;
  if (has_closed_form(config.state)) {
    result.grid = grid;
    result.s = config.s;
    result.values.resize(grid.re_count, grid.im_count);
    for (int i = 0; i < grid.re_count; ++i)
      for (int j = 0; j < grid.im_count; ++j)
        result.values(i, j) = quasi_of_spec(config.state, grid.point(i, j), config.s);
  } else {
    QuasiOptions options;
    options.allow_unbounded_ordering = config.s > 0.0;
    result = quasi_grid(to_density_matrix(config.state, default_dim(config.state)), grid,
                        config.s, options);
  }
  if (config.format == "json") {
    emit(config, io::quasi_grid_json(result, meta));
  } else {
    std::ostringstream os;
    io::write_quasi_grid_csv(os, result, meta);
    emit(config, os.str());
  }
  return 0;
}

int cmd_counts(const RunConfig& config) {
  const io::Meta meta{config.resolved_json("counts")};
  const CountDistribution counts = count_statistics_displaced(
      config.state, config.beta, config.detector.effective_efficiency(), config.detector.cutoff);
  if (config.format == "json") {
    emit(config, io::counts_json(counts, meta));
  } else {
    std::ostringstream os;
    io::write_counts_csv(os, counts, meta);
    emit(config, os.str());
  }
  return 0;
}

int cmd_simulate(const RunConfig& config) {
  const io::Meta meta{config.resolved_json("simulate")};
  const double eta_t = config.detector.effective_efficiency();
  const std::vector<Complex> points = config.scan_points();
  std::vector<io::ScanRow> rows;
  rows.reserve(points.size());
  bool any_diverged = false;
  for (std::size_t index = 0; index < points.size(); ++index) {
    const Complex beta = points[index];
    const CountDistribution counts =
        count_statistics_displaced(config.state, beta, eta_t, config.detector.cutoff);
    const int k = counts.cutoff();
    const VectorXd kernel_row = pcgf_kernel(k, config.s);

    ExperimentDesign design;
    design.probabilities = counts.p.transpose();
    design.runs = config.runs;
    const EstimatorKernel kernel = EstimatorKernel::single(kernel_row);
    const Moments moments = exact_moments(design, kernel);
    const PcgfEval exact = pcgf_eval(counts, config.s);

    const Histogram histogram =
        sample_histogram(counts.p, config.runs, derive_seed(config.seed, index));
    const double sampled = estimate({histogram}, kernel);

    io::ScanRow row;
    row.point = beta;
    row.parity = pcgf(counts, 0.0);
    row.pcgf_mean = moments.mean;
    row.pcgf_error = std::sqrt(std::max(0.0, moments.variance));
    row.pcgf_sampled = sampled;
    const PcgfResult mapped = pcgf_to_quasi_displaced(moments.mean, beta, eta_t, config.s);
    row.quasi = mapped.quasi;
    row.ordering = mapped.ordering;
    row.quasi_sampled = pcgf_to_quasi_displaced(sampled, beta, eta_t, config.s).quasi;
    row.diverged = exact.diverged;
    any_diverged = any_diverged || row.diverged;
    rows.push_back(row);
  }
  if (config.format == "json") {
    emit(config, io::simulation_json(rows, meta));
  } else {
    std::ostringstream os;
    io::write_simulation_csv(os, rows, meta);
    emit(config, os.str());
  }
  if (any_diverged && config.strict)
    throw DivergenceError("simulate: PCGF series flagged divergent at one or more points");
  return 0;
}

int cmd_stats(const RunConfig& config) {
  const io::Meta meta{config.resolved_json("stats")};
  const double eta = config.detector.efficiency;
  std::ostringstream os;
  nlohmann::json data = nlohmann::json::array();
  const bool csv = config.format == "csv";
  if (csv) {
    os << "# version=" << kVersion << "\n";
    os << "# config=" << meta.config_json << "\n";
  }
  if (config.sweep == "thermal") {
    if (csv) os << "nbar,mean_exists,mean,variance_exists,variance\n";
    for (int i = 0; i < config.sweep_steps; ++i) {
      const double nbar =
          config.sweep_from + (config.sweep_to - config.sweep_from) *
                                  (config.sweep_steps == 1 ? 0.0 : double(i) / (config.sweep_steps - 1));
      const ThermalParityStats stats = parity_stats_thermal(nbar, eta, config.runs);
      if (csv) {
        os << io::format_number(nbar) << ',' << (stats.mean ? 1 : 0) << ','
           << io::format_number(stats.mean.value_or(0.0)) << ',' << (stats.variance ? 1 : 0)
           << ',' << io::format_number(stats.variance.value_or(0.0)) << "\n";
      } else {
        nlohmann::json row = {{"nbar", nbar}, {"mean_exists", bool(stats.mean)},
                              {"variance_exists", bool(stats.variance)}};
        if (stats.mean) row["mean"] = *stats.mean;
        if (stats.variance) row["variance"] = *stats.variance;
        data.push_back(row);
      }
    }
  } else if (config.sweep == "coherent") {
    if (csv) os << "alpha2,mean,variance\n";
    for (int i = 0; i < config.sweep_steps; ++i) {
      const double a2 =
          config.sweep_from + (config.sweep_to - config.sweep_from) *
                                  (config.sweep_steps == 1 ? 0.0 : double(i) / (config.sweep_steps - 1));
      const double mean = std::exp(-2.0 * a2);
      const double variance = parity_variance_coherent(std::sqrt(a2), eta, config.runs);
      if (csv)
        os << io::format_number(a2) << ',' << io::format_number(mean) << ','
           << io::format_number(variance) << "\n";
      else
        data.push_back({{"alpha2", a2}, {"mean", mean}, {"variance", variance}});
    }
  } else {  // reconstruction demo
    const StateSpec state = StateSpec::thermal(config.reconstruction_nbar);
    const int levels = config.reconstruction_levels;
    const int k = std::max(levels + 8, fock_cap(eta * config.reconstruction_nbar));
    const VectorXd counts_p = count_statistics_displaced(state, 0.0, eta, k).p;
    const VectorXd truth = photon_number_distribution(state, levels);
    const Histogram histogram = sample_histogram(counts_p, config.runs, config.seed);

    ExperimentDesign design;
    design.probabilities = counts_p.transpose();
    design.runs = config.runs;
    const MatrixXd r = inverse_bernoulli_matrix(k, eta);
    if (csv) os << "nu,true,reconstructed,stddev,corr_next\n";
    for (int nu = 0; nu <= levels; ++nu) {
      const EstimatorKernel kernel = EstimatorKernel::single(r.row(nu).transpose());
      const EstimatorKernel kernel_next = EstimatorKernel::single(r.row(nu + 1).transpose());
      const Moments moments = exact_moments(design, kernel);
      const double reconstructed = estimate({histogram}, kernel);
      const double corr = correlation(design, kernel, kernel_next);
      if (csv) {
        os << nu << ',' << io::format_number(truth(nu)) << ','
           << io::format_number(reconstructed) << ','
           << io::format_number(std::sqrt(std::max(0.0, moments.variance))) << ','
           << io::format_number(corr) << "\n";
      } else {
        data.push_back({{"nu", nu},
                        {"true", truth(nu)},
                        {"reconstructed", reconstructed},
                        {"stddev", std::sqrt(std::max(0.0, moments.variance))},
                        {"corr_next", corr}});
      }
    }
  }
  if (csv) {
    emit(config, os.str());
  } else {
    nlohmann::json out;
    out["meta"] = {{"version", kVersion}, {"config", nlohmann::json::parse(meta.config_json)}};
    out["data"] = data;
    emit(config, out.dump(2) + "\n");
  }
  return 0;
}

int cmd_homodyne(const RunConfig& config) {
  const io::Meta meta{config.resolved_json("homodyne")};
  const int nx = int(std::floor((config.x_max - config.x_min) / config.x_step + 1.5));
  const FockDensityMatrix state = to_density_matrix(config.state, default_dim(config.state));

  if (config.homodyne_mode == "randomphase") {
    const VectorXd p = state.photon_distribution();
    const VectorXd density = random_phase_distribution(p, config.x_min, config.x_step, nx);
    if (config.format == "json") {
      nlohmann::json out;
      out["meta"] = {{"version", kVersion}, {"config", nlohmann::json::parse(meta.config_json)}};
      std::vector<double> d(density.data(), density.data() + density.size());
      out["data"] = {{"x_min", config.x_min}, {"x_step", config.x_step}, {"density", d}};
      emit(config, out.dump(2) + "\n");
    } else {
      std::ostringstream os;
      os << "# version=" << kVersion << "\n# config=" << meta.config_json << "\n";
      os << "x,density\n";
      for (int i = 0; i < nx; ++i)
        os << io::format_number(config.x_min + i * config.x_step) << ','
           << io::format_number(density(i)) << "\n";
      emit(config, os.str());
    }
    return 0;
  }

  RadonFamily family;
  family.marginals.reserve(std::size_t(config.phases));
  for (int j = 0; j < config.phases; ++j) {
    const double theta = kPi * double(j) / double(config.phases);
    family.marginals.push_back(
        quadrature_distribution(state, theta, config.x_min, config.x_step, nx));
  }

  if (config.homodyne_mode == "marginals") {
    if (config.format == "json") {
      emit(config, io::marginals_json(family, meta));
    } else {
      std::ostringstream os;
      io::write_marginals_csv(os, family, meta);
      emit(config, os.str());
    }
    return 0;
  }

  const GridSpec grid = GridSpec::centered(config.grid_extent, config.grid_step);
  const QuasiGrid reconstruction = inverse_radon(family, config.filter_cutoff, grid);
  if (config.format == "json") {
    emit(config, io::quasi_grid_json(reconstruction, meta));
  } else {
    std::ostringstream os;
    io::write_quasi_grid_csv(os, reconstruction, meta);
    emit(config, os.str());
  }
  return 0;
}

}  // namespace qprobe
