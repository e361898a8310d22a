#include "dairstega/constraints.hpp"

#include <cmath>

#include <json.hpp>

#include "dairstega/error.hpp"

namespace dairstega {

double allocation_shape(const AllocationSpec& spec, double x) {
  switch (spec.kind) {
    case AllocationKind::kLinear: return spec.beta * x;
    case AllocationKind::kSqrt: return std::sqrt(x);
    case AllocationKind::kExp: return 1.0 - std::exp(-2.0 * x);
    case AllocationKind::kLog: return (std::log2(x) + spec.b) / spec.b;
    case AllocationKind::kCondensed: return std::pow(x, spec.beta);
  }
  return 0.0;
}

void ConstraintCheck::record(bool ok, double x) {
  if (ok) return;
  if (pass) first_violation_x = x;
  pass = false;
  ++violations;
}

ConstraintReport validate_constraints(const AllocationSpec& spec,
                                      const ConstraintOptions& options) {
  spec.validate();
  const double lo = options.lower;
  const double hi = 1.0 - options.upper_margin;
  if (!(lo > 0.0 && lo < hi && hi < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "need 0 < epsilon < 1 - delta < 1");
  }
  if (options.grid_points < 10) {
    throw Error(ErrorCode::kInvalidArgument, "need at least 10 grid points");
  }
  if (!(options.c > 0.0)) throw Error(ErrorCode::kInvalidArgument, "c must be positive");

  ConstraintReport report{spec, options, {}, {}, {}, {}, {}, {}};
  const double h = (hi - lo) / static_cast<double>(options.grid_points - 1);
  const double tol = options.tolerance;
  auto f = [&](double x) { return allocation_shape(spec, x); };

  for (std::size_t i = 0; i < options.grid_points; ++i) {
    const double x = lo + h * static_cast<double>(i);
    const double fx = f(x);
    double d1 = 0.0;
    double d2 = 0.0;
    if (x - h > 0.0) {
      d1 = (f(x + h) - f(x - h)) / (2.0 * h);
      d2 = (f(x + h) - 2.0 * fx + f(x - h)) / (h * h);
    } else {
      // One-sided second-order stencils when the left neighbour leaves (0, 1].
      d1 = (-3.0 * fx + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h);
      d2 = (fx - 2.0 * f(x + h) + f(x + 2.0 * h)) / (h * h);
    }
    ConstraintPoint p{x,
                      fx,
                      d1,
                      d2,
                      d1 >= options.c / (1.0 - x) - tol,
                      d2 <= tol,
                      fx >= x - tol,
                      d1 - 1.0 <= tol};
    report.growth.record(p.growth, x);
    report.concavity.record(p.concave, x);
    report.above_identity.record(p.above_identity, x);
    report.slope_at_most_one.record(p.slope_at_most_one, x);
    report.lower_bound.record(p.above_identity && p.slope_at_most_one, x);
    report.points.push_back(p);
  }
  return report;
}

std::string ConstraintReport::to_json() const {
  using nlohmann::json;
  auto check = [](const ConstraintCheck& c) {
    json j = {{"pass", c.pass}, {"violations", c.violations}};
    j["first_violation_x"] = c.first_violation_x ? json(*c.first_violation_x) : json(nullptr);
    return j;
  };
  json constraint3 = check(lower_bound);
  constraint3["value_clause"] = check(above_identity);
  constraint3["derivative_clause"] = check(slope_at_most_one);
  json j = {
      {"kind", std::string(to_string(spec.kind))},
      {"alpha", spec.alpha},
      {"beta", spec.beta},
      {"domain", {options.lower, 1.0 - options.upper_margin}},
      {"c", options.c},
      {"grid_points", options.grid_points},
      {"constraint1", check(growth)},
      {"constraint2", check(concavity)},
      {"constraint3", constraint3},
      {"notes",
       {"constraint1's bound c/(1-x) diverges as x -> 1; it is only checked up to 1 - delta",
        "advisory report; allocation is never rejected on these results"}},
  };
  if (spec.kind == AllocationKind::kLog) j["b"] = spec.b;
  return j.dump(2);
}

}  // namespace dairstega
