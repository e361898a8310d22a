#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dairstega/allocation.hpp"

namespace dairstega {

// Continuous allocation shape f(x) on (0, 1], i.e. the weight before
// scaling by the code space. The log kind is evaluated without its clamp.
double allocation_shape(const AllocationSpec& spec, double x);

struct ConstraintOptions {
  double lower = 0.1;         // epsilon+
  double upper_margin = 0.1;  // delta; the grid ends at 1 - delta
  double c = 0.05;            // growth constant of constraint 1
  std::size_t grid_points = 81;
  double tolerance = 1e-6;    // slack on every inequality
};

struct ConstraintPoint {
  double x;
  double value;
  double first_derivative;
  double second_derivative;
  bool growth;               // f'(x) >= c / (1 - x)
  bool concave;              // f''(x) <= 0
  bool above_identity;       // f(x) >= x
  bool slope_at_most_one;    // f'(x) <= 1
};

struct ConstraintCheck {
  bool pass = true;
  std::optional<double> first_violation_x;
  std::size_t violations = 0;

  void record(bool ok, double x);
};

// Advisory only: the codec never consults it.
struct ConstraintReport {
  AllocationSpec spec;
  ConstraintOptions options;
  ConstraintCheck growth;        // constraint 1
  ConstraintCheck concavity;     // constraint 2
  ConstraintCheck lower_bound;   // constraint 3 (both clauses)
  ConstraintCheck above_identity;
  ConstraintCheck slope_at_most_one;
  std::vector<ConstraintPoint> points;

  std::string to_json() const;
};

// Central finite differences with step equal to the grid spacing over
// [lower, 1 - upper_margin]. Throws InvalidArgument on a bad domain or
// fewer than 10 grid points.
ConstraintReport validate_constraints(const AllocationSpec& spec,
                                      const ConstraintOptions& options = {});

}  // namespace dairstega
