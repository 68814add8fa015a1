#pragma once

/// Release-amount distributions to expected casualties. The gallons ->
/// casualties map is a pluggable monotone piecewise-linear table (the
/// bundled preset assumes evacuation two hours after the derailment) with a
/// single scale factor; every ranking is invariant to the scale.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "railrisk/config.hpp"
#include "railrisk/consist.hpp"
#include "railrisk/error.hpp"
#include "railrisk/pmf.hpp"
#include "railrisk/severity.hpp"

namespace railrisk {

class ConsequenceModel {
 public:
  ConsequenceModel() = default;

  /// Breakpoints (gallons, casualties), gallons ascending from 0, casualties
  /// non-decreasing from 0. Values are multiplied by `scale`.
  ConsequenceModel(std::string preset_name,
                   std::vector<std::pair<double, double>> points, double scale)
      : preset_name_(std::move(preset_name)),
        points_(std::move(points)),
        scale_(scale) {
    if (points_.empty() || points_.front().first != 0.0 ||
        points_.front().second != 0.0) {
      throw ValidationError("casualty table must start at (0, 0)");
    }
    for (std::size_t i = 1; i < points_.size(); ++i) {
      if (points_[i].first <= points_[i - 1].first) {
        throw ValidationError("casualty table gallons must be strictly increasing");
      }
      if (points_[i].second < points_[i - 1].second) {
        throw ValidationError("casualty table must be monotone non-decreasing");
      }
    }
    if (!(scale_ >= 0.0)) throw ValidationError("consequence scale must be >= 0");
  }

  double casualties(double gallons) const {
    if (gallons < 0.0 || gallons > points_.back().first) {
      throw ValidationError("gallons outside the casualty table domain");
    }
    auto it = std::lower_bound(
        points_.begin(), points_.end(), gallons,
        [](const std::pair<double, double>& p, double g) { return p.first < g; });
    if (it->first == gallons) return scale_ * it->second;
    const auto& [g1, c1] = *it;
    const auto& [g0, c0] = *(it - 1);
    return scale_ * (c0 + (c1 - c0) * (gallons - g0) / (g1 - g0));
  }

  double max_gallons() const { return points_.back().first; }
  double scale() const { return scale_; }
  void set_scale(double s) {
    if (!(s >= 0.0)) throw ValidationError("consequence scale must be >= 0");
    scale_ = s;
  }
  const std::string& preset_name() const { return preset_name_; }
  const std::vector<std::pair<double, double>>& points() const { return points_; }

 private:
  std::string preset_name_ = "unset";
  std::vector<std::pair<double, double>> points_{{0.0, 0.0}};
  double scale_ = 1.0;
};

/// Preset file: `[consequence]` with `preset`, `scale` and a `points` list
/// of gallons:casualties pairs.
inline ConsequenceModel load_consequence(const std::string& path) {
  ConfigFile cfg = ConfigFile::load(path);
  std::vector<std::pair<double, double>> points;
  for (const std::string& item : cfg.get_list("consequence", "points")) {
    auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ParseError(path + ": point '" + item + "' is not gallons:casualties");
    }
    points.emplace_back(csv::parse_double(item.substr(0, colon), path),
                        csv::parse_double(item.substr(colon + 1), path));
  }
  return ConsequenceModel(cfg.get_or("consequence", "preset", "unnamed"), points,
                          cfg.get_double("consequence", "scale"));
}

inline void save_consequence(const ConsequenceModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "[consequence]\n";
  out << "preset = " << model.preset_name() << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", model.scale());
  out << "scale = " << buf << "\n";
  out << "points = ";
  for (std::size_t i = 0; i < model.points().size(); ++i) {
    if (i) out << ", ";
    std::snprintf(buf, sizeof buf, "%.12g", model.points()[i].first);
    out << buf << ":";
    std::snprintf(buf, sizeof buf, "%.12g", model.points()[i].second);
    out << buf;
  }
  out << "\n";
}

/// Reverse cumulative curve: (gallons, weight * P(total > gallons)) at every
/// grid point. Non-increasing; the final point is zero.
inline std::vector<std::pair<double, double>> exceedance_curve(
    const AmountDist& dist, double weight) {
  if (weight < 0.0) throw ValidationError("curve weight must be >= 0");
  std::vector<std::pair<double, double>> curve;
  const std::size_t top = dist.pmf.empty() ? 0 : dist.pmf.max_support();
  double tail = 0.0;
  std::vector<double> survival(top + 1, 0.0);
  for (std::size_t k = top + 1; k-- > 0;) {
    survival[k] = tail;  // P(X > k); the zero-release mass never enters
    if (k > 0) tail += dist.pmf(k);
  }
  for (std::size_t k = 0; k <= top; ++k) {
    curve.emplace_back(dist.gallons(k), weight * survival[k]);
  }
  return curve;
}

/// Pointwise sum of exceedance curves sharing a grid (rare-event additivity
/// of component weights).
inline std::vector<std::pair<double, double>> add_curves(
    const std::vector<std::pair<double, double>>& a,
    const std::vector<std::pair<double, double>>& b) {
  const auto& longer = a.size() >= b.size() ? a : b;
  const auto& shorter = a.size() >= b.size() ? b : a;
  std::vector<std::pair<double, double>> out = longer;
  for (std::size_t i = 0; i < shorter.size(); ++i) {
    if (std::abs(out[i].first - shorter[i].first) > 1e-9) {
      throw ValidationError("exceedance curves on different gallon grids");
    }
    out[i].second += shorter[i].second;
  }
  return out;
}

/// weight * E[casualties(Q)] over the release-amount distribution.
inline double expected_casualties_component(double weight, const AmountDist& dist,
                                            const ConsequenceModel& model) {
  if (weight < 0.0) throw ValidationError("component weight must be >= 0");
  if (weight == 0.0) return 0.0;
  double e = 0.0;
  for (std::size_t k = 0; k < dist.pmf.size(); ++k) {
    if (dist.pmf(k) == 0.0) continue;
    e += dist.pmf(k) * model.casualties(dist.gallons(k));
  }
  return weight * e;
}

struct ComponentRisk {
  RiskComponent component = RiskComponent::line_haul;
  double derailment_weight = 0.0;  // probability per traffic demand
  AmountDist conditional_release_dist;
  double expected_casualties = 0.0;
};

struct ScenarioRiskReport {
  std::string scenario_code;
  std::vector<ComponentRisk> components;
  double total_expected_casualties = 0.0;
  int rank = 0;

  const ComponentRisk* component(RiskComponent c) const {
    for (const auto& comp : components) {
      if (comp.component == c) return &comp;
    }
    return nullptr;
  }
};

/// Sums the components into the per-traffic-demand total. Unit trains must
/// not carry a switching component.
inline ScenarioRiskReport aggregate_scenario(const ScenarioSpec& spec,
                                             std::vector<ComponentRisk> components) {
  spec.validate();
  ScenarioRiskReport report;
  report.scenario_code = spec.code;
  bool saw_line_haul = false, saw_ad = false;
  for (const auto& c : components) {
    if (c.component == RiskComponent::line_haul) saw_line_haul = true;
    if (c.component == RiskComponent::ad) saw_ad = true;
    if (c.component == RiskComponent::switching &&
        spec.train_type == TrainType::unit) {
      throw ValidationError(spec.code + ": unit trains have no switching component");
    }
    report.total_expected_casualties += c.expected_casualties;
  }
  if (!saw_line_haul || !saw_ad) {
    throw ValidationError(spec.code + ": line-haul and A/D components are required");
  }
  if (spec.train_type == TrainType::manifest &&
      !std::any_of(components.begin(), components.end(), [](const ComponentRisk& c) {
        return c.component == RiskComponent::switching;
      })) {
    throw ValidationError(spec.code + ": manifest scenarios need a switching component");
  }
  report.components = std::move(components);
  return report;
}

/// Ascending ranks by total expected casualties, ties broken by scenario
/// code so repeated runs agree.
inline void assign_ranks(std::vector<ScenarioRiskReport>& reports) {
  std::vector<std::size_t> order(reports.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (reports[a].total_expected_casualties != reports[b].total_expected_casualties) {
      return reports[a].total_expected_casualties < reports[b].total_expected_casualties;
    }
    return reports[a].scenario_code < reports[b].scenario_code;
  });
  for (std::size_t r = 0; r < order.size(); ++r) {
    reports[order[r]].rank = static_cast<int>(r + 1);
  }
}

}  // namespace railrisk
