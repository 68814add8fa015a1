#pragma once

/// Derailment likelihoods per shipment: line-haul from per-cause rate
/// tables, arrival/departure and yard-switching from per-event yard rates.
/// Per-shipment values are small enough (<= 1e-3) that they are combined
/// linearly as expected event counts; no Poisson complement is applied.

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "railrisk/consist.hpp"
#include "railrisk/csv.hpp"
#include "railrisk/error.hpp"

namespace railrisk {

enum class ExposureMetric { train_mile, car_mile, ton_mile };

inline ExposureMetric metric_from(const std::string& s) {
  if (s == "train_mile") return ExposureMetric::train_mile;
  if (s == "car_mile") return ExposureMetric::car_mile;
  if (s == "ton_mile") return ExposureMetric::ton_mile;
  throw ParseError("unknown exposure metric '" + s + "'");
}

inline std::string to_string(ExposureMetric m) {
  switch (m) {
    case ExposureMetric::train_mile: return "train_mile";
    case ExposureMetric::car_mile: return "car_mile";
    default: return "ton_mile";
  }
}

/// per_shipment_mile: values are already-converted derailment probabilities
/// for one train shipment on a one-mile segment (the published tables).
/// per_exposure_unit: values are raw rates per exposure unit and get
/// multiplied by the consist's exposure.
enum class RateMode { per_shipment_mile, per_exposure_unit };

struct CauseRate {
  std::string cause;
  ExposureMetric metric = ExposureMetric::train_mile;
  double value = 0.0;
};

struct CauseRateTable {
  RateMode mode = RateMode::per_shipment_mile;
  std::vector<CauseRate> rows;
};

/// Cause-rate CSV: header `cause,metric,value`. Duplicate cause names and
/// negative values are rejected.
inline CauseRateTable load_cause_rates(const std::string& path,
                                       RateMode mode = RateMode::per_shipment_mile) {
  CauseRateTable table;
  table.mode = mode;
  std::set<std::string> seen;
  for (const auto& row : csv::read_file(path, {"cause", "metric", "value"})) {
    const std::string where = path + ":" + std::to_string(row.line_no);
    CauseRate r;
    r.cause = row.at(0, path);
    r.metric = metric_from(row.at(1, path));
    r.value = csv::parse_double(row.at(2, path), where);
    if (r.value < 0.0) throw ParseError(where + ": negative rate");
    if (!seen.insert(r.cause).second) {
      throw ParseError(where + ": duplicate cause '" + r.cause + "'");
    }
    table.rows.push_back(std::move(r));
  }
  return table;
}

/// Train derailment probability for one shipment over `segment_miles` of
/// mainline. In per_exposure_unit mode `count_locomotives` controls whether
/// locomotives enter the car-mile exposure (they do on the mainline view of
/// the case study, never in yards).
inline double mainline_derailment_prob(const TrainConsist& consist,
                                       double segment_miles,
                                       const CauseRateTable& table,
                                       bool count_locomotives = true) {
  if (segment_miles < 0.0) throw ValidationError("segment_miles must be >= 0");
  if (table.mode == RateMode::per_shipment_mile) {
    double per_mile = 0.0;
    for (const auto& r : table.rows) per_mile += r.value;
    return per_mile * segment_miles;
  }
  const double vehicles =
      count_locomotives ? consist.length()
                        : consist.length() - consist.count(CarKind::locomotive);
  double p = 0.0;
  for (const auto& r : table.rows) {
    switch (r.metric) {
      case ExposureMetric::train_mile: p += r.value * segment_miles; break;
      case ExposureMetric::car_mile: p += r.value * segment_miles * vehicles; break;
      case ExposureMetric::ton_mile:
        p += r.value * segment_miles * gross_tonnage(consist);
        break;
    }
  }
  return p;
}

/// Expected line-haul derailments per traffic demand: per-mile probability
/// scaled over the route and the train count. Values stay well below one,
/// so this doubles as the probability weight for consequence integration.
inline double route_derailment_prob(double per_mile, double route_miles,
                                    int n_trains) {
  if (per_mile < 0.0 || route_miles < 0.0 || n_trains < 0) {
    throw ValidationError("route exposure terms must be >= 0");
  }
  return per_mile * route_miles * n_trains;
}

struct YardRateRow {
  TrainType train_type = TrainType::unit;
  YardType yard_type = YardType::terminal;
  double ad_train_rate = 0.0;  // derailments per million train A/D events
  double ad_car_rate = 0.0;    // derailments per million car A/D events
  std::optional<double> switch_car_rate;  // derailments per million cars processed
};

struct YardRateTable {
  std::vector<YardRateRow> rows;

  const YardRateRow& find(TrainType t, YardType y) const {
    for (const auto& r : rows) {
      if (r.train_type == t && r.yard_type == y) return r;
    }
    throw ValidationError("no yard rates for (" + railrisk::to_string(t) + ", " +
                          railrisk::to_string(y) + ")");
  }

  double switch_rate(YardType y) const {
    for (const auto& r : rows) {
      if (r.yard_type == y && r.switch_car_rate) return *r.switch_car_rate;
    }
    throw ValidationError("no switching rate for yard type " + railrisk::to_string(y));
  }
};

/// Yard-rate CSV: header `train_type,yard_type,ad_train_rate,ad_car_rate,
/// switch_car_rate`; the switching field may be empty (terminals).
inline YardRateTable load_yard_rates(const std::string& path) {
  YardRateTable table;
  for (const auto& row : csv::read_file(
           path, {"train_type", "yard_type", "ad_train_rate", "ad_car_rate",
                  "switch_car_rate"})) {
    const std::string where = path + ":" + std::to_string(row.line_no);
    YardRateRow r;
    r.train_type = train_type_from(row.at(0, path));
    r.yard_type = yard_type_from(row.at(1, path));
    r.ad_train_rate = csv::parse_double(row.at(2, path), where);
    r.ad_car_rate = csv::parse_double(row.at(3, path), where);
    if (!row.at(4, path).empty()) {
      r.switch_car_rate = csv::parse_double(row.at(4, path), where);
    }
    if (r.ad_train_rate < 0.0 || r.ad_car_rate < 0.0 ||
        (r.switch_car_rate && *r.switch_car_rate < 0.0)) {
      throw ParseError(where + ": negative rate");
    }
    table.rows.push_back(r);
  }
  return table;
}

/// Share of yard/terminal derailments attributed to train-mile vs car-mile
/// causes, per train type.
struct MetricProportions {
  struct Shares {
    double train_mile = 0.0;
    double car_mile = 0.0;
  };
  std::map<TrainType, Shares> by_train_type;

  const Shares& find(TrainType t) const {
    auto it = by_train_type.find(t);
    if (it == by_train_type.end()) {
      throw ValidationError("no metric proportions for " + railrisk::to_string(t));
    }
    return it->second;
  }
};

inline MetricProportions load_metric_proportions(const std::string& path) {
  MetricProportions props;
  for (const auto& row :
       csv::read_file(path, {"train_type", "train_share", "car_share"})) {
    const std::string where = path + ":" + std::to_string(row.line_no);
    TrainType t = train_type_from(row.at(0, path));
    MetricProportions::Shares s;
    s.train_mile = csv::parse_double(row.at(1, path), where);
    s.car_mile = csv::parse_double(row.at(2, path), where);
    if (s.train_mile < 0.0 || s.car_mile < 0.0 ||
        std::abs(s.train_mile + s.car_mile - 1.0) > 1e-9) {
      throw ParseError(where + ": shares must be >= 0 and sum to 1");
    }
    props.by_train_type[t] = s;
  }
  return props;
}

/// A/D derailment probability per shipment: the train-mile and car-mile
/// rate components are blended with the Table-2 proportions.
inline double ad_derailment_prob(TrainType train_type, YardType yard_type,
                                 int cars, int ad_events,
                                 const YardRateTable& rates,
                                 const MetricProportions& shares) {
  if (cars < 1) throw ValidationError("A/D car count must be >= 1");
  if (ad_events < 0) throw ValidationError("A/D event count must be >= 0");
  const YardRateRow& r = rates.find(train_type, yard_type);
  const auto& s = shares.find(train_type);
  const double train_term = r.ad_train_rate * 1e-6 * ad_events;
  const double car_term = r.ad_car_rate * 1e-6 * cars * ad_events;
  return s.train_mile * train_term + s.car_mile * car_term;
}

/// Yard-switching derailment probability per shipment.
inline double switching_derailment_prob(int cut_size, int events,
                                        YardType yard_type,
                                        const YardRateTable& rates) {
  if (cut_size < 1) throw ValidationError("switching cut size must be >= 1");
  if (events < 0) throw ValidationError("switching event count must be >= 0");
  return rates.switch_rate(yard_type) * 1e-6 * cut_size * events;
}

struct RateTables {
  CauseRateTable cause_unit;
  CauseRateTable cause_manifest;
  YardRateTable yard;
  MetricProportions proportions;

  const CauseRateTable& cause_table(TrainType t) const {
    return t == TrainType::unit ? cause_unit : cause_manifest;
  }
};

/// Per-shipment likelihoods in the summary-table layout: line-haul per mile,
/// A/D per shipment, switching per shipment (absent for unit trains).
struct LikelihoodSummary {
  std::string scenario_code;
  double line_haul_per_mile = 0.0;
  double ad_per_shipment = 0.0;
  std::optional<double> switching_per_shipment;
};

inline LikelihoodSummary summarize_likelihoods(const ScenarioSpec& spec,
                                               const RateTables& tables) {
  ShipmentPlan plan = make_shipment_plan(spec);
  LikelihoodSummary out;
  out.scenario_code = spec.code;
  // Rates are placement-independent, so the geometric-center fallback for
  // middle placement is exact here.
  TrainConsist mainline = build_consist(spec, ConsistView::mainline);
  out.line_haul_per_mile =
      mainline_derailment_prob(mainline, 1.0, tables.cause_table(spec.train_type));
  out.ad_per_shipment = ad_derailment_prob(
      spec.train_type, spec.yard_type, spec.total_railcars,
      plan.ad_events_per_shipment, tables.yard, tables.proportions);
  if (spec.train_type == TrainType::manifest) {
    out.switching_per_shipment = switching_derailment_prob(
        plan.cut_size_switched, plan.switching_events_per_shipment,
        spec.yard_type, tables.yard);
  }
  return out;
}

/// True when `value` rounds to the same `digits`-significant-figure string
/// as `target`, give or take one unit in the last kept digit. The published
/// tables print three significant figures.
inline bool within_display_rounding(double value, double target, int digits = 3) {
  if (target == 0.0) return std::abs(value) < 1e-15;
  const double mag = std::floor(std::log10(std::abs(target)));
  const double unit = std::pow(10.0, mag - (digits - 1));
  return std::abs(value - target) <= unit * (1.0 + 1e-9);
}

}  // namespace railrisk
