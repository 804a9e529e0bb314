#include "qprobe/io.hpp"

#include "qprobe/version.hpp"

#include <json.hpp>

#include <cstdio>

namespace qprobe::io {

namespace {

using nlohmann::json;

void write_header(std::ostream& os, const Meta& meta) {
  os << "# version=" << kVersion << "\n";
  os << "# config=" << meta.config_json << "\n";
}

json meta_block(const Meta& meta) {
  json m;
  m["version"] = kVersion;
  m["config"] = json::parse(meta.config_json.empty() ? "{}" : meta.config_json);
  return m;
}

json grid_block(const QuasiGrid& grid) {
  json g;
  g["s"] = grid.s;
  g["re_min"] = grid.grid.re_min;
  g["re_step"] = grid.grid.re_step;
  g["re_count"] = grid.grid.re_count;
  g["im_min"] = grid.grid.im_min;
  g["im_step"] = grid.grid.im_step;
  g["im_count"] = grid.grid.im_count;
  std::vector<double> values;
  values.reserve(std::size_t(grid.grid.re_count) * std::size_t(grid.grid.im_count));
  for (int i = 0; i < grid.grid.re_count; ++i)
    for (int j = 0; j < grid.grid.im_count; ++j) values.push_back(grid.values(i, j));
  g["values"] = values;  // row-major over (re, im)
  return g;
}

}  // namespace

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void write_quasi_grid_csv(std::ostream& os, const QuasiGrid& grid, const Meta& meta) {
  write_header(os, meta);
  os << "re,im,value\n";
  for (int i = 0; i < grid.grid.re_count; ++i) {
    for (int j = 0; j < grid.grid.im_count; ++j) {
      os << format_number(grid.grid.re(i)) << ',' << format_number(grid.grid.im(j)) << ','
         << format_number(grid.values(i, j)) << "\n";
    }
  }
}

std::string quasi_grid_json(const QuasiGrid& grid, const Meta& meta) {
  json out;
  out["meta"] = meta_block(meta);
  out["data"] = grid_block(grid);
  return out.dump(2) + "\n";
}

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows, const Meta& meta) {
  write_header(os, meta);
  os << "re,im,parity,quasi_value,ordering\n";
  for (const ScanRow& r : rows) {
    os << format_number(r.point.real()) << ',' << format_number(r.point.imag()) << ','
       << format_number(r.parity) << ',' << format_number(r.quasi) << ','
       << format_number(r.ordering) << "\n";
  }
}

std::string scan_json(const std::vector<ScanRow>& rows, const Meta& meta) {
  json out;
  out["meta"] = meta_block(meta);
  json data = json::array();
  for (const ScanRow& r : rows) {
    data.push_back({{"re", r.point.real()},
                    {"im", r.point.imag()},
                    {"parity", r.parity},
                    {"quasi_value", r.quasi},
                    {"ordering", r.ordering}});
  }
  out["data"] = data;
  return out.dump(2) + "\n";
}

void write_simulation_csv(std::ostream& os, const std::vector<ScanRow>& rows, const Meta& meta) {
  write_header(os, meta);
  os << "re,im,pcgf_mean,pcgf_error,pcgf_sampled,quasi_value,quasi_sampled,ordering,diverged\n";
  for (const ScanRow& r : rows) {
    os << format_number(r.point.real()) << ',' << format_number(r.point.imag()) << ','
       << format_number(r.pcgf_mean) << ',' << format_number(r.pcgf_error) << ','
       << format_number(r.pcgf_sampled) << ',' << format_number(r.quasi) << ','
       << format_number(r.quasi_sampled) << ',' << format_number(r.ordering) << ','
       << (r.diverged ? 1 : 0) << "\n";
  }
}

std::string simulation_json(const std::vector<ScanRow>& rows, const Meta& meta) {
  json out;
  out["meta"] = meta_block(meta);
  json data = json::array();
  for (const ScanRow& r : rows) {
    data.push_back({{"re", r.point.real()},
                    {"im", r.point.imag()},
                    {"pcgf_mean", r.pcgf_mean},
                    {"pcgf_error", r.pcgf_error},
                    {"pcgf_sampled", r.pcgf_sampled},
                    {"quasi_value", r.quasi},
                    {"quasi_sampled", r.quasi_sampled},
                    {"ordering", r.ordering},
                    {"diverged", r.diverged}});
  }
  out["data"] = data;
  return out.dump(2) + "\n";
}

void write_histogram_csv(std::ostream& os, const Histogram& histogram, std::uint64_t seed,
                         const Meta& meta) {
  write_header(os, meta);
  os << "# N=" << histogram.runs << "\n";
  os << "# seed=" << seed << "\n";
  os << "n,k_n\n";
  for (std::size_t n = 0; n < histogram.counts.size(); ++n)
    os << n << ',' << histogram.counts[n] << "\n";
}

std::string design_json(const ExperimentDesign& design) {
  design.validate();
  json out;
  out["runs"] = design.runs;
  json rows = json::array();
  for (int i = 0; i < design.probabilities.rows(); ++i) {
    std::vector<double> row(design.probabilities.cols());
    for (int j = 0; j < design.probabilities.cols(); ++j) row[std::size_t(j)] = design.probabilities(i, j);
    rows.push_back(row);
  }
  out["probabilities"] = rows;
  if (design.settings.size() == design.probabilities.rows()) {
    std::vector<double> settings(design.settings.data(),
                                 design.settings.data() + design.settings.size());
    out["settings"] = settings;
  }
  return out.dump() + "\n";
}

ExperimentDesign design_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentDesign design;
  design.runs = j.at("runs").get<std::int64_t>();
  const json& rows = j.at("probabilities");
  if (!rows.is_array() || rows.empty()) throw std::invalid_argument("design: empty probability table");
  const int cols = int(rows[0].size());
  design.probabilities.resize(int(rows.size()), cols);
  for (int i = 0; i < int(rows.size()); ++i) {
    if (int(rows[std::size_t(i)].size()) != cols)
      throw std::invalid_argument("design: ragged probability table");
    for (int c = 0; c < cols; ++c) design.probabilities(i, c) = rows[std::size_t(i)][std::size_t(c)].get<double>();
  }
  if (j.contains("settings")) {
    const auto settings = j.at("settings").get<std::vector<double>>();
    design.settings = Eigen::Map<const VectorXd>(settings.data(), Eigen::Index(settings.size()));
  }
  design.validate();
  return design;
}

void write_counts_csv(std::ostream& os, const CountDistribution& counts, const Meta& meta) {
  write_header(os, meta);
  os << "# tail=" << format_number(counts.tail) << "\n";
  os << "n,p_n\n";
  for (int n = 0; n < counts.p.size(); ++n) os << n << ',' << format_number(counts.p(n)) << "\n";
}

std::string counts_json(const CountDistribution& counts, const Meta& meta) {
  json out;
  out["meta"] = meta_block(meta);
  std::vector<double> p(counts.p.data(), counts.p.data() + counts.p.size());
  out["data"] = {{"p", p}, {"tail", counts.tail}};
  return out.dump(2) + "\n";
}

void write_marginals_csv(std::ostream& os, const RadonFamily& family, const Meta& meta) {
  write_header(os, meta);
  os << "theta,x,density\n";
  for (const QuadratureDistribution& m : family.marginals) {
    for (int i = 0; i < m.density.size(); ++i) {
      os << format_number(m.theta) << ',' << format_number(m.x(i)) << ','
         << format_number(m.density(i)) << "\n";
    }
  }
}

std::string marginals_json(const RadonFamily& family, const Meta& meta) {
  json out;
  out["meta"] = meta_block(meta);
  json data = json::array();
  for (const QuadratureDistribution& m : family.marginals) {
    std::vector<double> d(m.density.data(), m.density.data() + m.density.size());
    data.push_back({{"theta", m.theta}, {"x_min", m.x_min}, {"x_step", m.x_step}, {"density", d}});
  }
  out["data"] = data;
  return out.dump(2) + "\n";
}

}  // namespace qprobe::io
