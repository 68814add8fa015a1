#pragma once

/// Model-parameter files: a structured text file describes every POD and
/// severity family plus release/amount parameters; empirical PMFs load from
/// `index,mass` CSVs referenced by relative path.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "railrisk/config.hpp"
#include "railrisk/csv.hpp"
#include "railrisk/pmf.hpp"
#include "railrisk/severity.hpp"

namespace railrisk {

/// CSV with header `index,mass`; indices must be dense from 0 or 1 upward.
inline std::vector<double> load_empirical_pmf(const std::string& path) {
  auto rows = csv::read_file(path, {"index", "mass"});
  if (rows.empty()) throw ParseError(path + ": empty pmf");
  long first = csv::parse_long(rows.front().at(0, path), path);
  if (first != 0 && first != 1) {
    throw ParseError(path + ": pmf support must start at 0 or 1");
  }
  std::vector<double> mass;
  long expect = first;
  for (const auto& row : rows) {
    const std::string where = path + ":" + std::to_string(row.line_no);
    if (csv::parse_long(row.at(0, path), where) != expect) {
      throw ParseError(where + ": non-contiguous pmf support");
    }
    double m = csv::parse_double(row.at(1, path), where);
    if (m < 0.0) throw ParseError(where + ": negative mass");
    mass.push_back(m);
    ++expect;
  }
  return mass;
}

namespace detail {

inline std::string resolve(const std::string& base_file, const std::string& rel) {
  std::filesystem::path p(rel);
  if (p.is_absolute()) return rel;
  return (std::filesystem::path(base_file).parent_path() / p).string();
}

inline PodModel read_pod(const ConfigFile& cfg, const std::string& section) {
  PodModel m;
  const std::string family = cfg.get(section, "family");
  if (family == "uniform") {
    m.family = PodFamily::uniform;
  } else if (family == "geometric") {
    m.family = PodFamily::geometric;
    m.decay = cfg.get_double(section, "decay");
  } else if (family == "gamma") {
    m.family = PodFamily::gamma_like;
    m.shape = cfg.get_double(section, "shape");
    m.rate = cfg.get_double(section, "rate");
  } else if (family == "empirical") {
    m.family = PodFamily::empirical;
    m.empirical = load_empirical_pmf(detail::resolve(cfg.path(), cfg.get(section, "file")));
  } else {
    throw ParseError(cfg.path() + ": unknown pod family '" + family + "'");
  }
  return m;
}

inline SeverityModel read_severity(const ConfigFile& cfg, const std::string& section) {
  SeverityModel m;
  const std::string family = cfg.get_or(section, "family", "truncated_geometric");
  if (family == "truncated_geometric") {
    m.family = SeverityFamily::truncated_geometric;
    m.mean_cars = cfg.get_double(section, "mean_cars");
    if (!(m.mean_cars >= 1.0)) {
      throw ParseError(cfg.path() + " [" + section + "]: mean_cars must be >= 1");
    }
  } else if (family == "empirical") {
    m.family = SeverityFamily::empirical_pmf;
    m.empirical = load_empirical_pmf(detail::resolve(cfg.path(), cfg.get(section, "file")));
  } else {
    throw ParseError(cfg.path() + ": unknown severity family '" + family + "'");
  }
  m.speed_exponent = cfg.get_double_or(section, "speed_exponent", 0.0);
  m.base_speed_mph = cfg.get_double_or(section, "base_speed_mph", 15.0);
  m.max_cars = static_cast<int>(cfg.get_long_or(section, "max_cars", 0));
  return m;
}

inline void write_pod(std::ostream& out, const std::string& section,
                      const PodModel& m) {
  out << "[" << section << "]\n";
  char buf[64];
  switch (m.family) {
    case PodFamily::uniform:
      out << "family = uniform\n";
      break;
    case PodFamily::geometric:
      std::snprintf(buf, sizeof buf, "%.12g", m.decay);
      out << "family = geometric\ndecay = " << buf << "\n";
      break;
    case PodFamily::gamma_like:
      std::snprintf(buf, sizeof buf, "%.12g", m.shape);
      out << "family = gamma\nshape = " << buf << "\n";
      std::snprintf(buf, sizeof buf, "%.12g", m.rate);
      out << "rate = " << buf << "\n";
      break;
    case PodFamily::empirical:
      throw Error("cannot serialize an empirical pod family inline; keep its CSV");
  }
  out << "\n";
}

inline void write_severity(std::ostream& out, const std::string& section,
                           const SeverityModel& m) {
  if (m.family != SeverityFamily::truncated_geometric) {
    throw Error("cannot serialize an empirical severity family inline; keep its CSV");
  }
  char buf[64];
  out << "[" << section << "]\n";
  std::snprintf(buf, sizeof buf, "%.12g", m.mean_cars);
  out << "mean_cars = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.12g", m.speed_exponent);
  out << "speed_exponent = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.12g", m.base_speed_mph);
  out << "base_speed_mph = " << buf << "\n";
  out << "max_cars = " << m.max_cars << "\n\n";
}

}  // namespace detail

inline ModelSet load_model_params(const std::string& path) {
  ConfigFile cfg = ConfigFile::load(path);
  ModelSet m;
  m.pod_line_haul_unit = detail::read_pod(cfg, "pod.line_haul.unit");
  m.pod_line_haul_manifest = detail::read_pod(cfg, "pod.line_haul.manifest");
  m.pod_ad_unit = detail::read_pod(cfg, "pod.ad.unit");
  m.pod_ad_manifest = detail::read_pod(cfg, "pod.ad.manifest");
  m.pod_switching = detail::read_pod(cfg, "pod.switching");
  m.sev_line_haul = detail::read_severity(cfg, "severity.line_haul");
  m.sev_ad_unit = detail::read_severity(cfg, "severity.ad.unit");
  m.sev_ad_manifest = detail::read_severity(cfg, "severity.ad.manifest");
  m.sev_switching_flat = detail::read_severity(cfg, "severity.switching.flat");
  m.sev_switching_hump = detail::read_severity(cfg, "severity.switching.hump");

  m.release.base_cpr = cfg.get_double("release", "base_cpr");
  m.release.yard_cpr_multiplier = cfg.get_double("release", "yard_cpr_multiplier");
  m.release.cpr_speed_exponent = cfg.get_double_or("release", "cpr_speed_exponent", 0.0);
  m.release.line_haul_base_speed_mph =
      cfg.get_double_or("release", "line_haul_base_speed_mph", 25.0);
  m.release.yard_base_speed_mph =
      cfg.get_double_or("release", "yard_base_speed_mph", 15.0);

  const double step = cfg.get_double_or("amount", "grid_step_gallons", 1000.0);
  const double max_total = cfg.get_double_or("amount", "max_total_gallons", 3.2e6);
  if (cfg.has("amount", "file")) {
    AmountModel a;
    a.step_gallons = step;
    a.max_total_gallons = max_total;
    a.per_car = Pmf(load_empirical_pmf(detail::resolve(path, cfg.get("amount", "file"))));
    m.amount = a;
  } else {
    m.amount = AmountModel::point_mass(cfg.get_double("amount", "per_car_gallons"),
                                       step, max_total);
  }
  m.pod_includes_locomotives =
      cfg.get_or("pod", "include_locomotives", "true") == "true";
  m.validate();
  return m;
}

/// Writes fitted parameters back out in the same format load_model_params
/// reads.
inline void save_model_params(const ModelSet& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  detail::write_pod(out, "pod.line_haul.unit", m.pod_line_haul_unit);
  detail::write_pod(out, "pod.line_haul.manifest", m.pod_line_haul_manifest);
  detail::write_pod(out, "pod.ad.unit", m.pod_ad_unit);
  detail::write_pod(out, "pod.ad.manifest", m.pod_ad_manifest);
  detail::write_pod(out, "pod.switching", m.pod_switching);
  detail::write_severity(out, "severity.line_haul", m.sev_line_haul);
  detail::write_severity(out, "severity.ad.unit", m.sev_ad_unit);
  detail::write_severity(out, "severity.ad.manifest", m.sev_ad_manifest);
  detail::write_severity(out, "severity.switching.flat", m.sev_switching_flat);
  detail::write_severity(out, "severity.switching.hump", m.sev_switching_hump);
  char buf[64];
  out << "[release]\n";
  std::snprintf(buf, sizeof buf, "%.12g", m.release.base_cpr);
  out << "base_cpr = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.12g", m.release.yard_cpr_multiplier);
  out << "yard_cpr_multiplier = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.12g", m.release.cpr_speed_exponent);
  out << "cpr_speed_exponent = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.12g", m.release.line_haul_base_speed_mph);
  out << "line_haul_base_speed_mph = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.12g", m.release.yard_base_speed_mph);
  out << "yard_base_speed_mph = " << buf << "\n\n";
  out << "[amount]\n";
  std::snprintf(buf, sizeof buf, "%.12g",
                double(m.amount.per_car.max_support()) * m.amount.step_gallons);
  out << "per_car_gallons = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.12g", m.amount.step_gallons);
  out << "grid_step_gallons = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.12g", m.amount.max_total_gallons);
  out << "max_total_gallons = " << buf << "\n\n";
  out << "[pod]\n";
  out << "include_locomotives = " << (m.pod_includes_locomotives ? "true" : "false")
      << "\n";
}

}  // namespace railrisk
