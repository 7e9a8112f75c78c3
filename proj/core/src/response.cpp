#include "perfsim/response.hpp"

#include <cmath>
#include <stdexcept>

#include "perfsim/numerics.hpp"

namespace perfsim {

ResponseModel ResponseModel::standard(CostFunction cost) {
  return ResponseModel(ResponseKind::kStandard, ResponseKind::kStandard, 0.0, 0.0,
                       std::move(cost));
}

ResponseModel ResponseModel::noisy(double sigma, CostFunction cost) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("ResponseModel::noisy: sigma must be finite and positive");
  }
  return ResponseModel(ResponseKind::kNoisy, ResponseKind::kNoisy, sigma, 0.0,
                       std::move(cost));
}

ResponseModel ResponseModel::non_strategic(CostFunction cost) {
  return ResponseModel(ResponseKind::kNonStrategic, ResponseKind::kNonStrategic, 0.0, 1.0,
                       std::move(cost));
}

ResponseModel ResponseModel::mixture(double p, const ResponseModel& inner) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("ResponseModel::mixture: p must lie in [0, 1]");
  }
  if (inner.kind() == ResponseKind::kMixture) {
    throw std::invalid_argument("ResponseModel::mixture: mixtures nest one level only");
  }
  return ResponseModel(ResponseKind::kMixture, inner.kind(), inner.sigma(), p,
                       inner.cost());
}

double ResponseModel::non_strategic_mass() const {
  switch (kind_) {
    case ResponseKind::kNonStrategic:
      return 1.0;
    case ResponseKind::kMixture:
      return effective_kind_ == ResponseKind::kNonStrategic ? 1.0 : p_;
    default:
      return 0.0;
  }
}

bool ResponseModel::aggregate_smooth() const {
  if (effective_kind_ != ResponseKind::kStandard) return true;
  // A standard component with positive weight puts an atom at the boundary.
  return non_strategic_mass() >= 1.0;
}

Interval ResponseModel::extended_support(Interval support) const {
  double pad = (effective_kind_ == ResponseKind::kNoisy) ? 6.0 * sigma_ : 0.0;
  return {support.lo - pad, support.hi + pad};
}

std::string ResponseModel::describe() const {
  switch (kind_) {
    case ResponseKind::kStandard:
      return "standard;" + cost_.describe();
    case ResponseKind::kNoisy:
      return "noisy(sigma=" + num::format_double(sigma_) + ");" + cost_.describe();
    case ResponseKind::kNonStrategic:
      return "non_strategic;" + cost_.describe();
    case ResponseKind::kMixture: {
      std::string inner = effective_kind_ == ResponseKind::kStandard ? "standard"
                          : effective_kind_ == ResponseKind::kNoisy
                              ? "noisy(sigma=" + num::format_double(sigma_) + ")"
                              : "non_strategic";
      return "mixture(p=" + num::format_double(p_) + "," + inner + ");" + cost_.describe();
    }
  }
  return "?";
}

AgentTraits draw_traits(const ResponseModel& model, RandomSource& rng) {
  AgentTraits t;
  if (model.kind() == ResponseKind::kMixture) {
    t.strategic = !rng.bernoulli(model.mixture_p());
  } else if (model.kind() == ResponseKind::kNonStrategic) {
    t.strategic = false;
  }
  if (model.effective_kind() == ResponseKind::kNoisy && t.strategic) {
    t.eta = rng.normal(0.0, model.sigma());
  }
  return t;
}

AgentDraw draw_agent(const ResponseModel& model, const BaseDistribution& base,
                     RandomSource& rng) {
  auto [x, y] = base.sample_one(rng);
  AgentTraits t = draw_traits(model, rng);
  return {x, y, t.eta, t.strategic};
}

double respond(const ResponseModel& model, double x, const AgentTraits& traits,
               double theta, Interval target_clamp) {
  if (!traits.strategic) return x;
  switch (model.effective_kind()) {
    case ResponseKind::kNonStrategic:
      return x;
    case ResponseKind::kStandard:
      // Move exactly to the boundary or stay. Ties at
      // c(x, theta) = gamma move: the argmax permits equality.
      if (x < theta && model.cost()(x, theta) <= model.cost().gamma()) return theta;
      return x;
    case ResponseKind::kNoisy: {
      double perceived = target_clamp.clamp(theta + traits.eta);
      if (x < perceived && model.cost()(x, perceived) <= model.cost().gamma()) {
        return perceived;
      }
      return x;
    }
    case ResponseKind::kMixture:
      break;
  }
  throw std::logic_error("respond: unreachable");
}

ExpenditureReport check_expenditure_constraint(const ResponseModel& model,
                                               const BaseDistribution& base,
                                               Interval theta_range, int trials,
                                               RandomSource& rng) {
  if (trials < 1) throw std::invalid_argument("check_expenditure_constraint: trials >= 1");
  Interval clamp = model.extended_support(base.support());
  ExpenditureReport rep;
  for (int i = 0; i < trials; ++i) {
    auto [x, y] = base.sample_one(rng);
    (void)y;
    double theta = rng.uniform(theta_range.lo, theta_range.hi);
    AgentTraits t = draw_traits(model, rng);
    double spent = model.cost()(x, respond(model, x, t, theta, clamp));
    if (spent > rep.max_expenditure) {
      rep.max_expenditure = spent;
      rep.witness_x = x;
      rep.witness_theta = theta;
      rep.witness_eta = t.eta;
    }
  }
  rep.ok = rep.max_expenditure <= model.cost().gamma() + 1e-12;
  return rep;
}

ExpenditureReport check_expenditure_constraint(
    const std::function<double(double, double)>& response_fn, const CostFunction& cost,
    const BaseDistribution& base, Interval theta_range, int trials, RandomSource& rng) {
  if (trials < 1) throw std::invalid_argument("check_expenditure_constraint: trials >= 1");
  ExpenditureReport rep;
  for (int i = 0; i < trials; ++i) {
    auto [x, y] = base.sample_one(rng);
    (void)y;
    double theta = rng.uniform(theta_range.lo, theta_range.hi);
    double spent = cost(x, response_fn(x, theta));
    if (spent > rep.max_expenditure) {
      rep.max_expenditure = spent;
      rep.witness_x = x;
      rep.witness_theta = theta;
    }
  }
  rep.ok = rep.max_expenditure <= cost.gamma() + 1e-12;
  return rep;
}

MonotonicityReport check_expenditure_monotonicity(const ResponseModel& model,
                                                  const BaseDistribution& base,
                                                  std::span<const double> theta_grid,
                                                  int trials, RandomSource& rng) {
  if (trials < 1) throw std::invalid_argument("check_expenditure_monotonicity: trials >= 1");
  for (std::size_t i = 1; i < theta_grid.size(); ++i) {
    if (!(theta_grid[i] > theta_grid[i - 1])) {
      throw std::invalid_argument("check_expenditure_monotonicity: grid must ascend");
    }
  }
  Interval clamp = model.extended_support(base.support());
  MonotonicityReport rep;
  for (int i = 0; i < trials; ++i) {
    auto [x, y] = base.sample_one(rng);
    (void)y;
    AgentTraits t = draw_traits(model, rng);
    bool seen_reject = false;
    double first_reject = 0.0;
    for (double theta : theta_grid) {
      bool accepted = respond(model, x, t, theta, clamp) >= theta;
      if (!accepted) {
        seen_reject = true;
        first_reject = theta;
      } else if (seen_reject) {
        rep.ok = false;
        rep.witness_x = x;
        rep.witness_eta = t.eta;
        rep.theta_accept = theta;
        rep.theta_reject = first_reject;
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace perfsim
