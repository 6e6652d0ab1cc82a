#pragma once

#include <string>
#include <vector>

#include "logsob/submanifold.hpp"

namespace logsob::functional {

// Evaluator for the log-Sobolev deficit
//   deficit = (int f) log(int f)
//           - int f (log f + n + (n/2) log 4pi + log theta)
//           + int |grad f|^2 / f
//           + int f |H|^2,
// which is nonnegative for shapes in flat ambient space with theta = 1, up to
// discretization error, and strictly positive when the shape is disconnected.

struct ComponentReport {
    double mass = 0.0;
    double entropy_term = 0.0;
    double dirichlet_term = 0.0;
    double curvature_term = 0.0;
    double rhs = 0.0;      // mass * log(mass)
    double deficit = 0.0;  // rhs - entropy + dirichlet + curvature
};

struct DeficitReport {
    int n = 1;  // intrinsic dimension
    double theta_used = 1.0;
    ComponentReport whole;
    std::vector<ComponentReport> components;
    std::uint64_t shape_checksum = 0;
};

DeficitReport deficit(const submanifold::Shape& shape, double theta);

// Closed-form scaling lambda with
//   int lf log(lf) - int |grad lf|^2/(lf) - int lf |H|^2 = 0  for lf = lambda f;
// lambda = exp(-(int f log f - int |grad f|^2/f - int f |H|^2) / int f).
double normalization_lambda(const submanifold::Shape& shape);

struct MassBoundReport {
    double lambda = 0.0;
    double normalized_mass = 0.0;  // int lambda f
    double bound = 0.0;            // e^n (4 pi)^(n/2) theta
    double tolerance = 0.0;
    bool pass = false;
    DeficitReport normalized_report;
};

// After normalization the mass must satisfy int lf >= e^n (4pi)^(n/2) theta,
// up to the stated relative tolerance.
MassBoundReport mass_lower_bound_check(const submanifold::Shape& shape, double theta,
                                       double rel_tol = 1e-3);

struct DisconnectedReport {
    double whole_deficit = 0.0;
    double component_deficit_sum = 0.0;
    double bracket = 0.0;       // (sum m_i) log(sum m_i) - sum m_i log m_i
    double bookkeeping_gap = 0.0;  // whole - (sum + bracket); ~machine epsilon
    bool bracket_positive = false;
    std::vector<double> masses;
};

// Checks the exact decomposition deficit(whole) = sum_i deficit(component_i)
// + bracket and the strict positivity of the bracket for >= 2 components.
DisconnectedReport disconnected_strictness_check(const submanifold::Shape& shape, double theta);

}  // namespace logsob::functional
