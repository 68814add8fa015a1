#pragma once

/// Trains, scenarios and shipment plans. A consist is an ordered vehicle
/// list, position 1 at the front. The five case-study scenarios are shipped
/// as presets; user scenarios load from a config file with the same fields.

#include <algorithm>
#include <ostream>
#include <string>
#include <vector>

#include "railrisk/config.hpp"
#include "railrisk/error.hpp"

namespace railrisk {

enum class CarKind { locomotive, tank_car, non_tank_car };
enum class TrainType { unit, manifest };
enum class BlockPlacement { back, middle, not_applicable };
enum class SwitchingApproach { alone, en_masse, not_applicable };
enum class YardType { terminal, flat, hump };
enum class YardRole { origin, intermediate, destination };
enum class ConsistView { mainline, yard };

/// Case-study weights: loaded railcars 143 t regardless of type, road
/// locomotives 212.5 t, five of them on every mainline consist.
inline constexpr double kRailcarTons = 143.0;
inline constexpr double kLocomotiveTons = 212.5;
inline constexpr int kMainlineLocomotives = 5;

/// An en-masse cut couples this many non-tank cars ahead of the tank block.
inline constexpr int kEnMasseLeadCars = 19;

struct Vehicle {
  CarKind kind = CarKind::non_tank_car;
  double gross_weight_tons = kRailcarTons;
};

struct YardStop {
  YardRole role = YardRole::origin;
  YardType type = YardType::terminal;
};

struct ScenarioSpec {
  std::string code;
  TrainType train_type = TrainType::unit;
  int n_trains = 1;
  int total_railcars = 100;
  int tank_block_size = 100;
  BlockPlacement placement = BlockPlacement::not_applicable;
  SwitchingApproach switching = SwitchingApproach::not_applicable;
  YardType yard_type = YardType::terminal;
  double route_miles = 400.0;
  std::vector<YardStop> yards;

  void validate() const {
    if (code.empty()) throw ValidationError("scenario code must not be empty");
    if (n_trains < 1) throw ValidationError(code + ": n_trains must be >= 1");
    if (total_railcars < 0 || tank_block_size < 0 ||
        tank_block_size > total_railcars) {
      throw ValidationError(code + ": tank block must fit in the railcar count");
    }
    if (route_miles < 0.0) throw ValidationError(code + ": route_miles must be >= 0");
    if (yards.empty()) throw ValidationError(code + ": at least one yard stop required");
    if (train_type == TrainType::unit) {
      if (placement != BlockPlacement::not_applicable) {
        throw ValidationError(code + ": block placement does not apply to unit trains");
      }
      if (switching != SwitchingApproach::not_applicable) {
        throw ValidationError(code + ": yard switching does not apply to unit trains");
      }
      if (tank_block_size != total_railcars) {
        throw ValidationError(code + ": a unit train is all tank cars");
      }
    } else {
      if (placement == BlockPlacement::not_applicable) {
        throw ValidationError(code + ": manifest scenarios need a block placement");
      }
      if (switching == SwitchingApproach::not_applicable) {
        throw ValidationError(code + ": manifest scenarios need a switching approach");
      }
    }
  }
};

class TrainConsist {
 public:
  TrainConsist() = default;
  explicit TrainConsist(std::vector<Vehicle> vehicles)
      : vehicles_(std::move(vehicles)) {
    for (const auto& v : vehicles_) {
      if (!(v.gross_weight_tons > 0.0)) {
        throw ValidationError("vehicle gross weight must be > 0");
      }
    }
  }

  int length() const { return static_cast<int>(vehicles_.size()); }
  const std::vector<Vehicle>& vehicles() const { return vehicles_; }
  const Vehicle& at(int position) const { return vehicles_.at(position - 1); }

  bool is_tank(int position) const {
    return at(position).kind == CarKind::tank_car;
  }

  int count(CarKind kind) const {
    return static_cast<int>(
        std::count_if(vehicles_.begin(), vehicles_.end(),
                      [&](const Vehicle& v) { return v.kind == kind; }));
  }

  /// 1-based prefix counts of tank cars; tanks_upto(k) = #tanks in [1, k].
  int tanks_upto(int position) const {
    if (tank_prefix_.empty()) build_prefix();
    position = std::clamp(position, 0, length());
    return tank_prefix_[position];
  }

  /// Tank cars in the inclusive position range [first, last].
  int tanks_in(int first, int last) const {
    if (last < first) return 0;
    return tanks_upto(last) - tanks_upto(first - 1);
  }

 private:
  void build_prefix() const {
    tank_prefix_.assign(vehicles_.size() + 1, 0);
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      tank_prefix_[i + 1] =
          tank_prefix_[i] + (vehicles_[i].kind == CarKind::tank_car ? 1 : 0);
    }
  }

  std::vector<Vehicle> vehicles_;
  mutable std::vector<int> tank_prefix_;
};

/// 1-based positions of tank cars, ascending.
inline std::vector<int> tank_positions(const TrainConsist& consist) {
  std::vector<int> out;
  for (int p = 1; p <= consist.length(); ++p) {
    if (consist.is_tank(p)) out.push_back(p);
  }
  return out;
}

inline double gross_tonnage(const TrainConsist& consist) {
  double t = 0.0;
  for (const auto& v : consist.vehicles()) t += v.gross_weight_tons;
  return t;
}

/// Builds the ordered railcar layout for a scenario and view. The yard view
/// carries railcars only; the mainline view prepends the five locomotives.
///
/// For middle placement the caller passes the 1-based railcar index where
/// the block starts (the severity engine's placement query finds the window
/// of maximum position-dependent derailment probability). Passing 0 falls
/// back to the geometric center of the railcar sequence.
inline TrainConsist build_consist(const ScenarioSpec& spec, ConsistView view,
                                  int middle_railcar_start = 0) {
  spec.validate();
  int block_start;  // 1-based railcar index of the first tank car
  switch (spec.placement) {
    case BlockPlacement::middle:
      if (middle_railcar_start > 0) {
        block_start = middle_railcar_start;
      } else {
        block_start = (spec.total_railcars - spec.tank_block_size) / 2 + 1;
      }
      if (block_start < 1 ||
          block_start + spec.tank_block_size - 1 > spec.total_railcars) {
        throw ValidationError(spec.code + ": middle block start out of range");
      }
      break;
    case BlockPlacement::back:
    case BlockPlacement::not_applicable:
      block_start = spec.total_railcars - spec.tank_block_size + 1;
      break;
    default:
      throw ValidationError(spec.code + ": unknown block placement");
  }

  std::vector<Vehicle> vehicles;
  if (view == ConsistView::mainline) {
    vehicles.insert(vehicles.end(), kMainlineLocomotives,
                    Vehicle{CarKind::locomotive, kLocomotiveTons});
  }
  for (int r = 1; r <= spec.total_railcars; ++r) {
    bool tank = spec.tank_block_size > 0 && r >= block_start &&
                r < block_start + spec.tank_block_size;
    vehicles.push_back(Vehicle{tank ? CarKind::tank_car : CarKind::non_tank_car,
                               kRailcarTons});
  }
  return TrainConsist(std::move(vehicles));
}

/// The cut of cars moved in one switching event: the tank block alone, or
/// the tank block trailing the en-masse lead group.
inline TrainConsist build_switching_cut(const ScenarioSpec& spec) {
  spec.validate();
  if (spec.switching == SwitchingApproach::not_applicable) {
    throw ValidationError(spec.code + ": scenario has no switching component");
  }
  std::vector<Vehicle> vehicles;
  if (spec.switching == SwitchingApproach::en_masse) {
    int lead = std::min(kEnMasseLeadCars, spec.total_railcars - spec.tank_block_size);
    vehicles.insert(vehicles.end(), lead,
                    Vehicle{CarKind::non_tank_car, kRailcarTons});
  }
  vehicles.insert(vehicles.end(), spec.tank_block_size,
                  Vehicle{CarKind::tank_car, kRailcarTons});
  return TrainConsist(std::move(vehicles));
}

struct ShipmentPlan {
  ScenarioSpec scenario;
  int ad_events_per_shipment = 0;
  int switching_events_per_shipment = 0;
  int cut_size_switched = 0;
};

/// Derives event counts from the yard sequence: an origin contributes one
/// departure, a destination one arrival, an intermediate yard both; tank
/// cars are re-switched at the origin and at intermediate yards only.
inline ShipmentPlan make_shipment_plan(const ScenarioSpec& spec) {
  spec.validate();
  ShipmentPlan plan;
  plan.scenario = spec;
  for (const auto& stop : spec.yards) {
    switch (stop.role) {
      case YardRole::origin: plan.ad_events_per_shipment += 1; break;
      case YardRole::intermediate: plan.ad_events_per_shipment += 2; break;
      case YardRole::destination: plan.ad_events_per_shipment += 1; break;
    }
  }
  if (spec.train_type == TrainType::manifest) {
    for (const auto& stop : spec.yards) {
      if (stop.role == YardRole::origin || stop.role == YardRole::intermediate) {
        plan.switching_events_per_shipment += 1;
      }
    }
    plan.cut_size_switched = build_switching_cut(spec).length();
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Enum <-> text and file I/O

inline std::string to_string(TrainType t) {
  return t == TrainType::unit ? "unit" : "manifest";
}
inline std::string to_string(YardType y) {
  switch (y) {
    case YardType::terminal: return "terminal";
    case YardType::flat: return "flat";
    default: return "hump";
  }
}
inline std::string to_string(BlockPlacement p) {
  switch (p) {
    case BlockPlacement::back: return "back";
    case BlockPlacement::middle: return "middle";
    default: return "na";
  }
}
inline std::string to_string(SwitchingApproach s) {
  switch (s) {
    case SwitchingApproach::alone: return "alone";
    case SwitchingApproach::en_masse: return "en_masse";
    default: return "na";
  }
}
inline std::string to_string(CarKind k) {
  switch (k) {
    case CarKind::locomotive: return "locomotive";
    case CarKind::tank_car: return "tank_car";
    default: return "non_tank_car";
  }
}

inline TrainType train_type_from(const std::string& s) {
  if (s == "unit") return TrainType::unit;
  if (s == "manifest") return TrainType::manifest;
  throw ParseError("unknown train type '" + s + "'");
}
inline YardType yard_type_from(const std::string& s) {
  if (s == "terminal") return YardType::terminal;
  if (s == "flat") return YardType::flat;
  if (s == "hump") return YardType::hump;
  throw ParseError("unknown yard type '" + s + "'");
}
inline BlockPlacement placement_from(const std::string& s) {
  if (s == "back") return BlockPlacement::back;
  if (s == "middle") return BlockPlacement::middle;
  if (s == "na") return BlockPlacement::not_applicable;
  throw ParseError("unknown block placement '" + s + "'");
}
inline SwitchingApproach switching_from(const std::string& s) {
  if (s == "alone") return SwitchingApproach::alone;
  if (s == "en_masse") return SwitchingApproach::en_masse;
  if (s == "na") return SwitchingApproach::not_applicable;
  throw ParseError("unknown switching approach '" + s + "'");
}
inline YardRole yard_role_from(const std::string& s) {
  if (s == "origin") return YardRole::origin;
  if (s == "intermediate") return YardRole::intermediate;
  if (s == "destination") return YardRole::destination;
  throw ParseError("unknown yard role '" + s + "'");
}

/// Loads scenarios from `[scenario.<CODE>]` sections. The `yards` list uses
/// `role:yard_type` entries, e.g. `origin:hump, intermediate:hump,
/// destination:hump`.
inline std::vector<ScenarioSpec> load_scenarios(const std::string& path) {
  ConfigFile cfg = ConfigFile::load(path);
  std::vector<ScenarioSpec> out;
  for (const std::string& name : cfg.section_names()) {
    if (name.rfind("scenario.", 0) != 0) continue;
    ScenarioSpec s;
    s.code = name.substr(9);
    s.train_type = train_type_from(cfg.get(name, "train_type"));
    s.n_trains = static_cast<int>(cfg.get_long(name, "n_trains"));
    s.total_railcars = static_cast<int>(cfg.get_long(name, "total_railcars"));
    s.tank_block_size = static_cast<int>(cfg.get_long(name, "tank_block_size"));
    s.placement = placement_from(cfg.get(name, "placement"));
    s.switching = switching_from(cfg.get(name, "switching"));
    s.yard_type = yard_type_from(cfg.get(name, "yard_type"));
    s.route_miles = cfg.get_double(name, "route_miles");
    for (const std::string& item : cfg.get_list(name, "yards")) {
      auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw ParseError(path + ": yard entry '" + item + "' is not role:type");
      }
      s.yards.push_back(YardStop{yard_role_from(csv::trim(item.substr(0, colon))),
                                 yard_type_from(csv::trim(item.substr(colon + 1)))});
    }
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

/// The five Table-1 scenarios.
inline std::vector<ScenarioSpec> scenario_presets() {
  auto manifest = [](std::string code, BlockPlacement p, SwitchingApproach sw,
                     YardType y) {
    ScenarioSpec s;
    s.code = std::move(code);
    s.train_type = TrainType::manifest;
    s.n_trains = 5;
    s.total_railcars = 100;
    s.tank_block_size = 20;
    s.placement = p;
    s.switching = sw;
    s.yard_type = y;
    s.route_miles = 400.0;
    s.yards = {{YardRole::origin, y}, {YardRole::intermediate, y},
               {YardRole::destination, y}};
    return s;
  };
  ScenarioSpec ut;
  ut.code = "U-T";
  ut.train_type = TrainType::unit;
  ut.n_trains = 1;
  ut.total_railcars = 100;
  ut.tank_block_size = 100;
  ut.placement = BlockPlacement::not_applicable;
  ut.switching = SwitchingApproach::not_applicable;
  ut.yard_type = YardType::terminal;
  ut.route_miles = 400.0;
  ut.yards = {{YardRole::origin, YardType::terminal},
              {YardRole::destination, YardType::terminal}};
  return {
      ut,
      manifest("MBAF", BlockPlacement::back, SwitchingApproach::alone, YardType::flat),
      manifest("MBAH", BlockPlacement::back, SwitchingApproach::alone, YardType::hump),
      manifest("MMEF", BlockPlacement::middle, SwitchingApproach::en_masse, YardType::flat),
      manifest("MMEH", BlockPlacement::middle, SwitchingApproach::en_masse, YardType::hump),
  };
}

/// CSV export: position,kind,gross_weight_tons.
inline void write_consist_csv(const TrainConsist& consist, std::ostream& out) {
  out << "position,kind,gross_weight_tons\n";
  for (int p = 1; p <= consist.length(); ++p) {
    const Vehicle& v = consist.at(p);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v.gross_weight_tons);
    out << p << ',' << to_string(v.kind) << ',' << buf << '\n';
  }
}

}  // namespace railrisk
