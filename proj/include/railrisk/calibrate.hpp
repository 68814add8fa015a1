#pragma once

/// Fits POD-family and severity parameters so that computable chain
/// statistics hit published anchor probabilities. The exact distribution
/// forms behind the published figures are not available, so the parametric
/// families are tuned to reproduce the anchor values instead; residuals are
/// always reported and an anchor the family cannot reach is flagged rather
/// than silently absorbed.

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "railrisk/consist.hpp"
#include "railrisk/csv.hpp"
#include "railrisk/error.hpp"
#include "railrisk/severity.hpp"

namespace railrisk {

enum class AnchorStatistic { p_zero_tanks, mean_tanks_derailed };

struct Anchor {
  AnchorStatistic statistic = AnchorStatistic::p_zero_tanks;
  RiskComponent component = RiskComponent::ad;
  TrainType train_type = TrainType::manifest;
  YardType yard_type = YardType::terminal;          // ignored for A/D severity
  SwitchingApproach approach = SwitchingApproach::not_applicable;
  BlockPlacement placement = BlockPlacement::back;  // tank block in the train
  int total_railcars = 100;
  int tank_block_size = 20;
  double target = 0.0;
};

struct AnchorResidual {
  Anchor anchor;
  double achieved = 0.0;
  double residual = 0.0;
  bool feasible = true;
};

struct CalibrationResult {
  ModelSet models;
  std::vector<AnchorResidual> residuals;

  double sum_squared_residual() const {
    double s = 0.0;
    for (const auto& r : residuals) s += r.residual * r.residual;
    return s;
  }
};

namespace detail {

inline ScenarioSpec anchor_scenario(const Anchor& a) {
  ScenarioSpec s;
  s.code = "anchor";
  s.train_type = a.train_type;
  s.n_trains = 1;
  s.total_railcars = a.total_railcars;
  s.tank_block_size = a.tank_block_size;
  s.route_miles = 1.0;
  if (a.train_type == TrainType::unit) {
    s.placement = BlockPlacement::not_applicable;
    s.switching = SwitchingApproach::not_applicable;
    s.yard_type = YardType::terminal;
    s.yards = {{YardRole::origin, YardType::terminal},
               {YardRole::destination, YardType::terminal}};
  } else {
    s.placement = a.placement == BlockPlacement::not_applicable
                      ? BlockPlacement::back
                      : a.placement;
    s.switching = a.approach == SwitchingApproach::not_applicable
                      ? SwitchingApproach::alone
                      : a.approach;
    s.yard_type = a.yard_type;
    s.yards = {{YardRole::origin, a.yard_type},
               {YardRole::intermediate, a.yard_type},
               {YardRole::destination, a.yard_type}};
  }
  return s;
}

}  // namespace detail

/// Evaluates the anchor's statistic under the given models.
inline double eval_anchor_statistic(const ModelSet& models, const Anchor& a) {
  ScenarioSpec spec = detail::anchor_scenario(a);
  TrainConsist consist;
  OperationalContext ctx;
  switch (a.component) {
    case RiskComponent::line_haul:
      consist = build_scenario_consist(spec, ConsistView::mainline, models);
      ctx = line_haul_context(a.train_type, models.sev_line_haul.base_speed_mph);
      break;
    case RiskComponent::ad:
      consist = build_scenario_consist(spec, ConsistView::yard, models);
      ctx = ad_context(a.train_type, a.yard_type);
      break;
    case RiskComponent::switching:
      consist = build_switching_cut(spec);
      ctx = switching_context(a.yard_type, spec.switching);
      break;
  }
  PodDistribution pod =
      pod_pmf(models, ctx, consist.length(), consist.count(CarKind::locomotive));
  Pmf tanks = tank_derailed_pmf(consist, pod, models.severity_for(ctx), ctx);
  switch (a.statistic) {
    case AnchorStatistic::p_zero_tanks: return tanks(0);
    case AnchorStatistic::mean_tanks_derailed: return tanks.mean();
  }
  throw ValidationError("unknown anchor statistic");
}

// ---------------------------------------------------------------------------
// Deterministic derivative-free minimizer (Nelder-Mead with a fixed start
// simplex), used on transformed unconstrained parameters.

inline std::vector<double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> start, int max_iter = 400, double step = 0.35) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> pts(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  for (int iter = 0; iter < max_iter; ++iter) {
    // Order by value, ties by index for determinism.
    std::vector<std::size_t> order(n + 1);
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return vals[a] != vals[b] ? vals[a] < vals[b] : a < b;
    });
    std::size_t best = order[0], worst = order[n], second = order[n - 1];
    if (vals[worst] - vals[best] < 1e-14) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d] / double(n);
    }
    auto blend = [&](double c) {
      std::vector<double> p(n);
      for (std::size_t d = 0; d < n; ++d) {
        p[d] = centroid[d] + c * (pts[worst][d] - centroid[d]);
      }
      return p;
    };

    std::vector<double> refl = blend(-1.0);
    double frefl = f(refl);
    if (frefl < vals[best]) {
      std::vector<double> exp_pt = blend(-2.0);
      double fexp = f(exp_pt);
      if (fexp < frefl) {
        pts[worst] = exp_pt;
        vals[worst] = fexp;
      } else {
        pts[worst] = refl;
        vals[worst] = frefl;
      }
    } else if (frefl < vals[second]) {
      pts[worst] = refl;
      vals[worst] = frefl;
    } else {
      std::vector<double> contr = blend(0.5);
      double fcontr = f(contr);
      if (fcontr < vals[worst]) {
        pts[worst] = contr;
        vals[worst] = fcontr;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t d = 0; d < n; ++d) {
            pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
          }
          vals[i] = f(pts[i]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (vals[i] < vals[best]) best = i;
  }
  return pts[best];
}

namespace detail {

// Unconstrained <-> model parameter transforms.
inline double pos1(double u) { return 1.0 + std::exp(u); }   // (1, inf)
inline double inv_pos1(double x) { return std::log(std::max(x - 1.0, 1e-6)); }
inline double pos(double u) { return std::exp(u); }          // (0, inf)
inline double inv_pos(double x) { return std::log(std::max(x, 1e-9)); }

/// The free parameters a group of anchors is allowed to move: the context's
/// POD family parameters and the context's severity means.
struct ParamBinding {
  std::function<void(ModelSet&, double)> set;
  std::function<double(const ModelSet&)> get;
};

inline std::vector<ParamBinding> bindings_for(const ModelSet& base,
                                              const std::vector<Anchor>& group) {
  bool ad_manifest = false, ad_unit = false, sw_flat = false, sw_hump = false;
  bool lh_manifest = false, lh_unit = false;
  for (const auto& a : group) {
    if (a.component == RiskComponent::ad) {
      (a.train_type == TrainType::manifest ? ad_manifest : ad_unit) = true;
    } else if (a.component == RiskComponent::switching) {
      (a.yard_type == YardType::flat ? sw_flat : sw_hump) = true;
    } else {
      (a.train_type == TrainType::manifest ? lh_manifest : lh_unit) = true;
    }
  }
  std::vector<ParamBinding> out;
  auto bind_pod = [&](PodModel ModelSet::* pod) {
    if ((base.*pod).family == PodFamily::gamma_like) {
      out.push_back({[pod](ModelSet& m, double u) { (m.*pod).shape = pos1(u); },
                     [pod](const ModelSet& m) { return inv_pos1((m.*pod).shape); }});
      out.push_back({[pod](ModelSet& m, double u) { (m.*pod).rate = pos(u); },
                     [pod](const ModelSet& m) { return inv_pos((m.*pod).rate); }});
    } else if ((base.*pod).family == PodFamily::geometric) {
      out.push_back(
          {[pod](ModelSet& m, double u) { (m.*pod).decay = 1.0 / (1.0 + std::exp(-u)); },
           [pod](const ModelSet& m) {
             double d = std::clamp((m.*pod).decay, 1e-9, 1.0 - 1e-9);
             return std::log(d / (1.0 - d));
           }});
    }
    // uniform and empirical pod families carry no tunable parameters
  };
  auto bind_mean = [&](SeverityModel ModelSet::* sev) {
    out.push_back({[sev](ModelSet& m, double u) { (m.*sev).mean_cars = pos1(u); },
                   [sev](const ModelSet& m) { return inv_pos1((m.*sev).mean_cars); }});
  };
  if (ad_manifest) {
    bind_pod(&ModelSet::pod_ad_manifest);
    bind_mean(&ModelSet::sev_ad_manifest);
  }
  if (ad_unit) {
    bind_pod(&ModelSet::pod_ad_unit);
    bind_mean(&ModelSet::sev_ad_unit);
  }
  if (sw_flat) bind_mean(&ModelSet::sev_switching_flat);
  if (sw_hump) bind_mean(&ModelSet::sev_switching_hump);
  if (lh_manifest) {
    bind_pod(&ModelSet::pod_line_haul_manifest);
    bind_mean(&ModelSet::sev_line_haul);
  }
  if (lh_unit) {
    bind_pod(&ModelSet::pod_line_haul_unit);
    if (!lh_manifest) bind_mean(&ModelSet::sev_line_haul);
  }
  return out;
}

}  // namespace detail

/// Least-squares fit of the anchors' context parameters, starting from (and
/// defaulting to) the given models. Anchors whose residual exceeds
/// `feasible_tol` after the fit are flagged infeasible.
inline CalibrationResult calibrate(const ModelSet& defaults,
                                   const std::vector<Anchor>& anchors,
                                   double feasible_tol = 0.02) {
  CalibrationResult result;
  result.models = defaults;
  if (anchors.empty()) return result;

  auto bindings = detail::bindings_for(defaults, anchors);
  if (!bindings.empty()) {
    auto objective = [&](const std::vector<double>& u) {
      ModelSet m = defaults;
      for (std::size_t i = 0; i < bindings.size(); ++i) bindings[i].set(m, u[i]);
      double ss = 0.0;
      try {
        for (const auto& a : anchors) {
          double v = eval_anchor_statistic(m, a);
          ss += (v - a.target) * (v - a.target);
        }
      } catch (const Error&) {
        return 1e9;  // outside the family's valid region
      }
      return ss;
    };
    std::vector<double> start(bindings.size());
    for (std::size_t i = 0; i < bindings.size(); ++i) {
      start[i] = bindings[i].get(defaults);
    }
    std::vector<double> best = nelder_mead(objective, start);
    // A second polish run from the first optimum tightens multi-parameter
    // fits noticeably.
    best = nelder_mead(objective, best, 400, 0.12);
    for (std::size_t i = 0; i < bindings.size(); ++i) {
      bindings[i].set(result.models, best[i]);
    }
  }

  for (const auto& a : anchors) {
    AnchorResidual r;
    r.anchor = a;
    r.achieved = eval_anchor_statistic(result.models, a);
    r.residual = r.achieved - a.target;
    r.feasible = std::abs(r.residual) <= feasible_tol;
    result.residuals.push_back(r);
  }
  return result;
}

/// Anchors CSV: header `statistic,component,train_type,yard_type,approach,
/// placement,total_railcars,tank_block_size,target`; `na` is accepted where
/// a field does not apply.
inline std::vector<Anchor> load_anchors(const std::string& path) {
  std::vector<Anchor> out;
  for (const auto& row : csv::read_file(
           path, {"statistic", "component", "train_type", "yard_type", "approach",
                  "placement", "total_railcars", "tank_block_size", "target"})) {
    const std::string where = path + ":" + std::to_string(row.line_no);
    Anchor a;
    const std::string stat = row.at(0, path);
    if (stat == "p_zero_tanks") {
      a.statistic = AnchorStatistic::p_zero_tanks;
    } else if (stat == "mean_tanks_derailed") {
      a.statistic = AnchorStatistic::mean_tanks_derailed;
    } else {
      throw ParseError(where + ": unknown statistic '" + stat + "'");
    }
    const std::string comp = row.at(1, path);
    if (comp == "line_haul") {
      a.component = RiskComponent::line_haul;
    } else if (comp == "ad") {
      a.component = RiskComponent::ad;
    } else if (comp == "switching") {
      a.component = RiskComponent::switching;
    } else {
      throw ParseError(where + ": unknown component '" + comp + "'");
    }
    a.train_type = train_type_from(row.at(2, path));
    a.yard_type = row.at(3, path) == "na" ? YardType::terminal
                                          : yard_type_from(row.at(3, path));
    a.approach = switching_from(row.at(4, path));
    a.placement = placement_from(row.at(5, path));
    a.total_railcars = static_cast<int>(csv::parse_long(row.at(6, path), where));
    a.tank_block_size = static_cast<int>(csv::parse_long(row.at(7, path), where));
    a.target = csv::parse_double(row.at(8, path), where);
    out.push_back(a);
  }
  return out;
}

}  // namespace railrisk
