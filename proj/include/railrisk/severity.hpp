#pragma once

/// Conditional severity chain given a derailment: point of derailment (POD),
/// cars derailed, tank cars derailed, tank cars releasing, gallons released.
///
/// A derailment starting at POD position i spreads rearward through a
/// contiguous block of x vehicles, [i, i+x-1]. Everything downstream of that
/// geometry follows by marginalizing over (i, x): tank cars derailed is the
/// overlap of the block with the tank positions, each derailed tank car
/// releases independently with the context's conditional probability of
/// release, and per-car release amounts add on a fixed gallon grid.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "railrisk/consist.hpp"
#include "railrisk/error.hpp"
#include "railrisk/pmf.hpp"

namespace railrisk {

enum class RiskComponent { line_haul, ad, switching };

inline std::string to_string(RiskComponent c) {
  switch (c) {
    case RiskComponent::line_haul: return "line_haul";
    case RiskComponent::ad: return "ad";
    default: return "switching";
  }
}

struct OperationalContext {
  RiskComponent component = RiskComponent::line_haul;
  TrainType train_type = TrainType::unit;
  YardType yard_type = YardType::terminal;
  double speed_mph = 25.0;
  SwitchingApproach approach = SwitchingApproach::not_applicable;
};

inline OperationalContext line_haul_context(TrainType t, double speed_mph = 25.0) {
  return {RiskComponent::line_haul, t, YardType::terminal, speed_mph,
          SwitchingApproach::not_applicable};
}

inline OperationalContext ad_context(TrainType t, YardType y) {
  return {RiskComponent::ad, t, y, 15.0, SwitchingApproach::not_applicable};
}

inline OperationalContext switching_context(YardType y, SwitchingApproach a) {
  return {RiskComponent::switching, TrainType::manifest, y, 15.0, a};
}

// ---------------------------------------------------------------------------
// Point-of-derailment families

/// `geometric` decays from the front (unit-train shape); `gamma_like` is the
/// unimodal family pmf(i) ~ i^(shape-1) * exp(-rate*i) used for manifest
/// trains, whose first positions carry little mass; `empirical` is a loaded
/// PMF stretched or truncated to the consist length.
enum class PodFamily { uniform, geometric, gamma_like, empirical };

struct PodModel {
  PodFamily family = PodFamily::uniform;
  double decay = 0.0;   // geometric: pmf(i) ~ (1-decay)^(i-1)
  double shape = 1.0;   // gamma_like
  double rate = 0.0;    // gamma_like
  std::vector<double> empirical;  // mass for positions 1, 2, ...

  std::vector<double> weights(int n) const {
    if (n < 1) throw ValidationError("pod support length must be >= 1");
    std::vector<double> w(n, 1.0);
    switch (family) {
      case PodFamily::uniform:
        break;
      case PodFamily::geometric: {
        if (!(decay > 0.0 && decay < 1.0)) {
          throw ValidationError("geometric pod decay must be in (0,1)");
        }
        double m = 1.0;
        for (int i = 0; i < n; ++i) {
          w[i] = m;
          m *= (1.0 - decay);
        }
        break;
      }
      case PodFamily::gamma_like: {
        if (!(shape >= 1.0) || !(rate > 0.0)) {
          throw ValidationError("gamma pod needs shape >= 1 and rate > 0");
        }
        for (int i = 1; i <= n; ++i) {
          w[i - 1] = std::exp((shape - 1.0) * std::log(double(i)) - rate * i);
        }
        break;
      }
      case PodFamily::empirical: {
        if (empirical.empty()) {
          throw ValidationError("empirical pod family has no data (unconfigured context)");
        }
        for (int i = 0; i < n; ++i) {
          w[i] = i < int(empirical.size()) ? empirical[i] : 0.0;
        }
        break;
      }
    }
    return w;
  }
};

/// POD probability per 1-based position of a consist.
struct PodDistribution {
  std::vector<double> pmf;  // pmf[i-1] = P(POD = position i)

  int length() const { return static_cast<int>(pmf.size()); }
  double at(int position) const { return pmf.at(position - 1); }

  void validate() const {
    double s = 0.0;
    for (double p : pmf) {
      if (!(p >= 0.0)) throw ValidationError("pod mass must be >= 0");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-12) {
      throw ValidationError("pod distribution must sum to 1");
    }
  }
};

// ---------------------------------------------------------------------------
// Severity (cars derailed) and release parameters

enum class SeverityFamily { truncated_geometric, empirical_pmf };

struct SeverityModel {
  SeverityFamily family = SeverityFamily::truncated_geometric;
  double mean_cars = 3.0;       // at base_speed_mph
  double speed_exponent = 0.0;  // mean(v) = mean_cars * (v/base)^exponent
  double base_speed_mph = 15.0;
  int max_cars = 0;             // 0 = no cap; switching uses 20
  std::vector<double> empirical;  // mass for x = 1, 2, ...

  double mean_at(double speed_mph) const {
    if (!(speed_mph > 0.0)) throw ValidationError("speed must be > 0");
    double m = mean_cars * std::pow(speed_mph / base_speed_mph, speed_exponent);
    return std::max(m, 1.0);  // at least the POD car derails
  }
};

struct ReleaseParams {
  double base_cpr = 0.043;          // DOT-117 at reference conditions
  double yard_cpr_multiplier = 0.35;
  double cpr_speed_exponent = 0.0;
  double line_haul_base_speed_mph = 25.0;
  double yard_base_speed_mph = 15.0;

  void validate() const {
    if (base_cpr < 0.0 || base_cpr > 1.0 || yard_cpr_multiplier < 0.0 ||
        yard_cpr_multiplier > 1.0) {
      throw ValidationError("release probabilities must lie in [0,1]");
    }
  }
};

/// Effective conditional probability of release per derailed tank car. Yard
/// components carry the yard multiplier and reference 15 mph, so at the
/// case-study settings this is 0.043 on the mainline and 0.015 in yards.
/// Speed scaling is anchored at the component's reference speed; the result
/// is clamped into [0,1].
inline double effective_cpr(const ReleaseParams& params,
                            const OperationalContext& ctx) {
  params.validate();
  double p = params.base_cpr;
  double ref = params.line_haul_base_speed_mph;
  if (ctx.component != RiskComponent::line_haul) {
    p *= params.yard_cpr_multiplier;
    ref = params.yard_base_speed_mph;
  }
  p *= std::pow(ctx.speed_mph / ref, params.cpr_speed_exponent);
  return std::clamp(p, 0.0, 1.0);
}

/// Release amount of a single releasing car on a fixed gallon grid
/// (index * step_gallons), plus the grid's overflow bound.
struct AmountModel {
  double step_gallons = 1000.0;
  Pmf per_car;  // grid-indexed; default is a point mass at full capacity
  double max_total_gallons = 3.2e6;

  static AmountModel point_mass(double gallons_per_car, double step,
                                double max_total) {
    AmountModel m;
    m.step_gallons = step;
    m.max_total_gallons = max_total;
    m.per_car = Pmf::point(static_cast<std::size_t>(std::llround(gallons_per_car / step)));
    return m;
  }
};

struct AmountDist {
  double step_gallons = 1000.0;
  Pmf pmf;  // over grid indices; gallons = index * step_gallons

  double gallons(std::size_t index) const { return double(index) * step_gallons; }
  double mean_gallons() const { return pmf.mean() * step_gallons; }
};

// ---------------------------------------------------------------------------
// Model catalog keyed by operational context

struct ModelSet {
  PodModel pod_line_haul_unit;
  PodModel pod_line_haul_manifest;
  PodModel pod_ad_unit;
  PodModel pod_ad_manifest;
  PodModel pod_switching;
  SeverityModel sev_line_haul;
  SeverityModel sev_ad_unit;
  SeverityModel sev_ad_manifest;
  SeverityModel sev_switching_flat;
  SeverityModel sev_switching_hump;
  ReleaseParams release;
  AmountModel amount;
  bool pod_includes_locomotives = true;

  const PodModel& pod_for(const OperationalContext& ctx) const {
    switch (ctx.component) {
      case RiskComponent::line_haul:
        return ctx.train_type == TrainType::unit ? pod_line_haul_unit
                                                 : pod_line_haul_manifest;
      case RiskComponent::ad:
        return ctx.train_type == TrainType::unit ? pod_ad_unit : pod_ad_manifest;
      default:
        return pod_switching;
    }
  }

  const SeverityModel& severity_for(const OperationalContext& ctx) const {
    switch (ctx.component) {
      case RiskComponent::line_haul:
        return sev_line_haul;
      case RiskComponent::ad:
        return ctx.train_type == TrainType::unit ? sev_ad_unit : sev_ad_manifest;
      default:
        return ctx.yard_type == YardType::flat ? sev_switching_flat
                                               : sev_switching_hump;
    }
  }

  /// Checks the documented family shapes at a reference length: unit-train
  /// POD non-increasing from the front, manifest POD with pmf(1) below the
  /// peak.
  void validate(int reference_length = 100) const;
};

// ---------------------------------------------------------------------------
// Chain operations

/// POD distribution over the consist's 1-based positions. When locomotives
/// are excluded from POD support (config flag), the family spans the
/// railcars and the leading locomotive positions carry zero mass.
inline PodDistribution pod_pmf(const ModelSet& models,
                               const OperationalContext& ctx, int n,
                               int leading_locomotives = 0) {
  if (n < 1) throw ValidationError("consist length must be >= 1");
  const PodModel& model = models.pod_for(ctx);
  int skip = 0;
  if (ctx.component == RiskComponent::line_haul && !models.pod_includes_locomotives) {
    skip = std::min(leading_locomotives, n - 1);
  }
  std::vector<double> w = model.weights(n - skip);
  double s = 0.0;
  for (double v : w) s += v;
  if (!(s > 0.0)) throw ValidationError("pod family places no mass on the consist");
  PodDistribution pod;
  pod.pmf.assign(n, 0.0);
  for (int i = 0; i < n - skip; ++i) pod.pmf[skip + i] = w[i] / s;
  pod.validate();
  return pod;
}

/// Conditional PMF of the number of cars derailed given POD position `pod`
/// in a consist of length `n`. Support is {1, ..., min(n-pod+1, cap)};
/// truncation renormalizes. Index = car count.
inline Pmf cars_derailed_pmf(const OperationalContext& ctx, int pod, int n,
                             const SeverityModel& model) {
  if (pod < 1 || pod > n) throw ValidationError("pod position out of range");
  int limit = n - pod + 1;
  if (model.max_cars > 0) limit = std::min(limit, model.max_cars);
  std::vector<double> mass(limit, 0.0);
  if (model.family == SeverityFamily::truncated_geometric) {
    const double m = model.mean_at(ctx.speed_mph);
    const double q = std::clamp(1.0 - 1.0 / m, 0.0, 1.0 - 1e-12);
    double w = 1.0;
    for (int x = 1; x <= limit; ++x) {
      mass[x - 1] = w;
      w *= q;
    }
  } else {
    if (model.empirical.empty()) {
      throw ValidationError("empirical severity model has no data");
    }
    for (int x = 1; x <= limit; ++x) {
      mass[x - 1] = x <= int(model.empirical.size()) ? model.empirical[x - 1] : 0.0;
    }
  }
  return renormalize(mass, 1, "cars_derailed_pmf");
}

/// P(position k derails | derailment) for each position: the POD at i <= k
/// reaches k when the block length covers k-i+1 cars.
inline std::vector<double> position_derail_prob(const TrainConsist& consist,
                                                const PodDistribution& pod_dist,
                                                const SeverityModel& model,
                                                const OperationalContext& ctx) {
  const int n = consist.length();
  if (pod_dist.length() != n) {
    throw ValidationError("pod distribution length does not match consist");
  }
  std::vector<double> prob(n, 0.0);
  for (int i = 1; i <= n; ++i) {
    const double pi = pod_dist.at(i);
    if (pi == 0.0) continue;
    Pmf x = cars_derailed_pmf(ctx, i, n, model);
    // Suffix sums: P(x >= k-i+1) for k = i..n.
    double tail = 0.0;
    std::vector<double> reach(x.size(), 0.0);
    for (std::size_t j = x.size(); j-- > 1;) {
      tail += x(j);
      reach[j] = tail;
    }
    for (int k = i; k <= n; ++k) {
      std::size_t need = std::size_t(k - i + 1);
      if (need < reach.size()) prob[k - 1] += pi * reach[need];
    }
  }
  return prob;
}

/// Conditional PMF of the number of tank cars derailed, marginalized over
/// POD and block length. Index = tank-car count; the zero bin carries the
/// all-non-tank outcomes, so the total is exactly one.
inline Pmf tank_derailed_pmf(const TrainConsist& consist,
                             const PodDistribution& pod_dist,
                             const SeverityModel& model,
                             const OperationalContext& ctx) {
  const int n = consist.length();
  if (pod_dist.length() != n) {
    throw ValidationError("pod distribution length does not match consist");
  }
  std::vector<double> mass(std::size_t(consist.count(CarKind::tank_car)) + 1, 0.0);
  for (int i = 1; i <= n; ++i) {
    const double pi = pod_dist.at(i);
    if (pi == 0.0) continue;
    Pmf x = cars_derailed_pmf(ctx, i, n, model);
    for (std::size_t len = 1; len < x.size(); ++len) {
      const double px = x(len);
      if (px == 0.0) continue;
      int t = consist.tanks_in(i, i + int(len) - 1);
      mass[std::size_t(t)] += pi * px;
    }
  }
  return Pmf(std::move(mass));
}

/// Conditional PMF of the number of tank cars releasing: each derailed tank
/// car releases independently with the effective CPR, so r | t is binomial.
inline Pmf release_count_pmf(const Pmf& tank_pmf, const ReleaseParams& params,
                             const OperationalContext& ctx) {
  const double p = effective_cpr(params, ctx);
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("effective release probability outside [0,1]");
  }
  std::vector<double> out(tank_pmf.size(), 0.0);
  for (std::size_t t = 0; t < tank_pmf.size(); ++t) {
    const double pt = tank_pmf(t);
    if (pt == 0.0) continue;
    // Binomial(t, p) row by the ratio recurrence.
    double b = std::pow(1.0 - p, double(t));
    if (p == 1.0) {
      out[t] += pt;
      continue;
    }
    for (std::size_t r = 0; r <= t; ++r) {
      out[r] += pt * b;
      b *= (double(t - r) / double(r + 1)) * (p / (1.0 - p));
    }
  }
  return Pmf(std::move(out));
}

/// Total gallons released: the release count mixes r-fold convolutions of
/// the per-car amount on the fixed gallon grid.
inline AmountDist release_amount_dist(const Pmf& release_pmf,
                                      const AmountModel& amount) {
  const std::size_t limit =
      std::size_t(amount.max_total_gallons / amount.step_gallons) + 1;
  AmountDist out;
  out.step_gallons = amount.step_gallons;
  Pmf acc = Pmf::point(0);
  acc.scale(release_pmf(0));
  Pmf running = Pmf::point(0);
  for (std::size_t r = 1; r < release_pmf.size(); ++r) {
    running = convolve(running, amount.per_car);
    if (running.size() > limit) {
      throw Error("release amount support exceeds the configured gallon grid");
    }
    if (release_pmf(r) > 0.0) acc.add_scaled(running, release_pmf(r));
  }
  out.pmf = std::move(acc);
  return out;
}

/// Full chain: gallons released per derailment in the given context.
inline AmountDist conditional_release_dist(const TrainConsist& consist,
                                           const ModelSet& models,
                                           const OperationalContext& ctx) {
  PodDistribution pod =
      pod_pmf(models, ctx, consist.length(), consist.count(CarKind::locomotive));
  Pmf tanks = tank_derailed_pmf(consist, pod, models.severity_for(ctx), ctx);
  Pmf releases = release_count_pmf(tanks, models.release, ctx);
  return release_amount_dist(releases, models.amount);
}

/// The contiguous railcar window of `block` cars with the highest total
/// position-dependent derailment probability on the mainline view; this is
/// the operational definition of "middle of the train". Returns the 1-based
/// railcar index of the window start. Evaluated at the severity model's base
/// speed.
inline int middle_block_start_railcar(const ModelSet& models,
                                      TrainType train_type, int total_railcars,
                                      int block,
                                      int locomotives = kMainlineLocomotives) {
  if (block < 1 || block > total_railcars) {
    throw ValidationError("tank block does not fit in the railcar count");
  }
  const int n = locomotives + total_railcars;
  OperationalContext ctx =
      line_haul_context(train_type, models.sev_line_haul.base_speed_mph);
  PodDistribution pod = pod_pmf(models, ctx, n, locomotives);
  // Tank placement does not influence position_derail_prob, so any layout of
  // the right length works here.
  std::vector<Vehicle> vehicles(std::size_t(n),
                                Vehicle{CarKind::non_tank_car, kRailcarTons});
  for (int i = 0; i < locomotives; ++i) {
    vehicles[std::size_t(i)] = Vehicle{CarKind::locomotive, kLocomotiveTons};
  }
  std::vector<double> pdp =
      position_derail_prob(TrainConsist(vehicles), pod, models.sev_line_haul, ctx);

  double window = 0.0;
  for (int k = 0; k < block; ++k) window += pdp[std::size_t(locomotives + k)];
  double best = window;
  int best_start = 1;
  for (int start = 2; start + block - 1 <= total_railcars; ++start) {
    window += pdp[std::size_t(locomotives + start + block - 2)] -
              pdp[std::size_t(locomotives + start - 2)];
    if (window > best + 1e-15) {
      best = window;
      best_start = start;
    }
  }
  return best_start;
}

/// Scenario consist with middle placement resolved through the placement
/// query above.
inline TrainConsist build_scenario_consist(const ScenarioSpec& spec,
                                           ConsistView view,
                                           const ModelSet& models) {
  int middle_start = 0;
  if (spec.placement == BlockPlacement::middle) {
    middle_start = middle_block_start_railcar(models, spec.train_type,
                                              spec.total_railcars,
                                              spec.tank_block_size);
  }
  return build_consist(spec, view, middle_start);
}

inline void ModelSet::validate(int reference_length) const {
  release.validate();
  auto front_skewed = [&](const PodModel& m, const std::string& name) {
    std::vector<double> w = m.weights(reference_length);
    for (std::size_t i = 1; i < w.size(); ++i) {
      if (w[i] > w[i - 1] + 1e-12) {
        throw ValidationError(name + ": unit-train pod family must be front-skewed");
      }
    }
  };
  auto interior_peak = [&](const PodModel& m, const std::string& name) {
    std::vector<double> w = m.weights(reference_length);
    double peak = *std::max_element(w.begin(), w.end());
    if (!(w.front() < peak)) {
      throw ValidationError(name + ": manifest pod family must peak after position 1");
    }
  };
  front_skewed(pod_line_haul_unit, "pod.line_haul.unit");
  front_skewed(pod_ad_unit, "pod.ad.unit");
  interior_peak(pod_line_haul_manifest, "pod.line_haul.manifest");
  interior_peak(pod_ad_manifest, "pod.ad.manifest");
  if (sev_switching_flat.max_cars < 1 || sev_switching_hump.max_cars < 1) {
    throw ValidationError("switching severity must carry a car cap");
  }
  if (amount.per_car.empty()) {
    throw ValidationError("per-car release amount model is empty");
  }
}

}  // namespace railrisk
