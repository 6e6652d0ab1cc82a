#pragma once

#include <optional>
#include <string>
#include <vector>

#include "logsob/ambient.hpp"
#include "logsob/parallel.hpp"

namespace logsob::theta {

// Estimator for rho(r) = (4 pi)^(-k/2) r^(-k) \int_M exp(-d(x, p)^2 / 4 r^2) dvol
// and its r -> infinity limit, plus the base-point / Borel-map invariance audit.

struct RhoOptions {
    double rel_tol = 1e-8;
    // The truncated tail (bounded through ball volumes) must stay below this
    // fraction of the running integral.
    double tail_fraction = 1e-10;
    par::Exec exec = par::Exec::OpenMP;
};

struct RhoValue {
    double value = 0.0;
    double tail_bound = 0.0;  // bound on the truncated mass, same units as value
    long evaluations = 0;
};

RhoValue rho_detail(const ambient::Model& m, const ambient::Point& base, double r,
                    const RhoOptions& opt = {});
double rho(const ambient::Model& m, const ambient::Point& base, double r,
           const RhoOptions& opt = {});

// Piecewise-constant Borel map x -> nearest site (ties to the lowest index);
// the image is the finite set of sites.
struct NearestSiteMap {
    std::vector<ambient::Point> sites;
};

// rho with d(x, p(x)) in the exponent. Euclidean(2) only.
RhoValue rho_borel(const ambient::Model& m, const NearestSiteMap& map, double r,
                   const RhoOptions& opt = {});

struct ThetaEstimate {
    std::vector<double> r_grid;
    std::vector<double> rho_values;
    double extrapolated_theta = 0.0;
    bool monotone_flag = false;       // rho nonincreasing along the grid (tol 1e-6)
    double tail_bound_used = 0.0;     // worst truncation bound over the grid
    bool condition_p_satisfied = false;
    double fit_alpha = 0.0;           // rho(r) ~ theta + c r^(-alpha) over the last half
    double fit_c = 0.0;
    double fit_stderr = 0.0;
    std::string notes;
};

// r_grid must have >= 4 points spanning at least two decades. The power-law
// fit is advisory; extrapolated_theta is clamped to [0, min rho].
ThetaEstimate estimate_theta(const ambient::Model& m, const ambient::Point& base,
                             const std::vector<double>& r_grid, const RhoOptions& opt = {});

struct InvarianceAudit {
    std::vector<double> r_grid;
    // max over base pairs of |rho_p1(r) - rho_p2(r)|, one entry per r
    std::vector<double> max_base_difference;
    // per-base rho values, bases-major
    std::vector<std::vector<double>> rho_per_base;
    std::vector<double> borel_rho;  // empty unless a map was supplied
    bool differences_converge = false;
    double convergence_floor = 0.0;
};

// Differences are declared convergent when, over the last half of the grid,
// each step either strictly decreases or is already below the quadrature
// floor (exactly symmetric models produce identically zero differences).
InvarianceAudit invariance_audit(const ambient::Model& m,
                                 const std::vector<ambient::Point>& bases,
                                 const std::optional<NearestSiteMap>& borel_map,
                                 const std::vector<double>& r_grid,
                                 const RhoOptions& opt = {});

}  // namespace logsob::theta
