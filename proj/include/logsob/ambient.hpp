#pragma once

#include <string>
#include <vector>

#include "logsob/common.hpp"

namespace logsob::ambient {

// Model catalog of complete noncompact nonnegatively-curved spaces with
// closed-form (or cheaply computable) distance and ball-volume data.
//
// Coordinates per variant:
//   Euclidean(k)   : Cartesian tuple of length k
//   Paraboloid(a)  : (u >= 0, v in [0, 2pi)), apex at u = 0; the surface
//                    (u cos v, u sin v, a u^2 / 2)
//   Cylinder(R)    : (angle in [0, 2pi), height), intrinsic metric of
//                    S^1(R) x R
//   Cone(beta)     : (u >= 0, v in [0, 2pi)), total cone angle 2 pi beta,
//                    apex at u = 0
enum class Kind { Euclidean, Paraboloid, Cylinder, Cone };

struct Model {
    Kind kind = Kind::Euclidean;
    int dim = 2;          // Euclidean only
    double a = 1.0;       // Paraboloid only
    double radius = 1.0;  // Cylinder only
    double beta = 1.0;    // Cone only

    static Model euclidean(int k);
    static Model paraboloid(double a);
    static Model cylinder(double radius);
    static Model cone(double beta);

    // Intrinsic dimension (k for Euclidean, 2 for the revolution surfaces).
    int intrinsic_dim() const;
    bool has_general_distance() const;  // Paraboloid only supports base-point distance
    std::string describe() const;
};

struct Point {
    std::vector<double> x;
};

Point base_point(const Model& m);  // apex / origin / (0,0)
Point make_point(const Model& m, std::vector<double> coords);

// Meridian arc length from the apex of Paraboloid(a) to parameter u,
// A(u) = (u/2) sqrt(1 + a^2 u^2) + asinh(a u) / (2a), and its inverse by
// bisection (A is strictly increasing; absolute tolerance 1e-12 on u).
double paraboloid_profile(double a, double u);
double paraboloid_profile_inverse(double a, double s);

double distance(const Model& m, const Point& p, const Point& q);

// Volume of the metric ball of radius s about the designated base point
// (any point for the homogeneous Euclidean/Cylinder models).
double ball_volume(const Model& m, double s);

struct AvrEstimate {
    std::vector<double> s_grid;
    std::vector<double> ratios;  // vol(B_s) / (omega_k s^k)
    double value = 0.0;          // ratio at the largest s
};

// Ball-volume ratios along s_grid; Bishop-Gromov monotonicity is enforced as
// an internal consistency check (tolerance 1e-9).
AvrEstimate avr_estimate(const Model& m, const std::vector<double>& s_grid);

// "kind = cone\nbeta = 0.5" style key-value text.
Model parse_model_config(const std::string& text);
// Compact CLI form: "euclidean:2", "paraboloid:a=1", "cylinder:radius=1",
// "cone:beta=0.5".
Model parse_model_spec(const std::string& spec);

}  // namespace logsob::ambient
