#pragma once

#include <cstdint>
#include <vector>

#include "logsob/common.hpp"
#include "logsob/parallel.hpp"
#include "logsob/submanifold.hpp"

namespace logsob::abp {

// Transport audit for closed curves in the plane (n = 1, m = 1, flat
// ambient, so exp_x is affine and distances are norms).
//
// Sign conventions, used everywhere:
//   - the curve is oriented by its vertex order; T_i is the unit bisector
//     tangent at vertex i,
//   - nu_i = rot90(T_i) is the LEFTWARD unit normal (inward on a
//     counterclockwise convex loop),
//   - kappa_i = <H_i, nu_i> with H the Frenet second difference, so the
//     pairing with a normal offset y (coefficient of nu) is kappa * y and the
//     contact Hessian scalar is 1 + r u'' - r kappa y,
//   - Phi(i, y) = x_i + r u'_i T_i + r y nu_i.

struct PlanarCurve {
    std::vector<Vec2> pos;
    std::vector<double> f;      // normalized (post-lambda) field
    std::vector<double> edge_len;
    std::vector<Vec2> edge_tan;
    std::vector<Vec2> T;
    std::vector<Vec2> nu;
    std::vector<double> dual;
    std::vector<Vec2> H;
    std::vector<double> kappa;
    double total_length = 0.0;
    double max_edge = 0.0;   // h
    double max_abs_h = 0.0;  // max |H|
    double diameter = 0.0;
    Vec2 centroid{};
    std::uint64_t checksum = 0;

    std::size_t size() const { return pos.size(); }
};

struct TransportSetup {
    PlanarCurve curve;
    double r = 1.0;
    double lambda = 1.0;  // normalization applied to the input field
    std::vector<double> rhs;  // projected divergence data at vertices
    std::vector<double> u, u_s, u_ss;  // potential and arc-length derivatives
    double solver_residual = 0.0;      // max-norm of the discrete identity
    double residual_scale = 1.0;
    double compatibility = 0.0;        // integral of the RHS before projection
    double projection_magnitude = 0.0;
    double u_scale = 1.0;              // max(1, |u|_inf)

    // Strict membership tolerance for the contact inequality.
    double tol_contact() const { return 1e-9 * r * r * u_scale; }
};

// Normalizes f by the closed-form lambda, solves the cyclic flux equation
// (f u')' = f log f - |grad f|^2/f - f |H|^2 at the vertices (geometric-mean
// f on edges, Thomas elimination with one pinned vertex), gauges
// sum u_i dual_i = 0 and forms arc-length derivatives.
TransportSetup solve_potential(const submanifold::ClosedCurve& curve, double r);

struct YGrid {
    double dy = 1.0 / 64.0;
    double ymax = 0.0;  // 0 = auto: max |2H| + 8
};

struct ContactRecord {
    int vertex = 0;
    double y = 0.0;
    double slack = 0.0;
    Vec2 phi{};
    double lemma31_gap = 0.0;  // relative to max(1, r^2(u'^2 + y^2))
    double psd_value = 0.0;    // 1 + r u'' - r kappa y
    double jac_closed = 0.0;   // r * psd_value
    double jac_fd = 0.0;
    double jac_mismatch = 0.0;  // |closed - fd| / (r (1 + r|u''| + r|kappa y|))
    double l37_lhs = 0.0;
    double l37_rhs = 0.0;
    double l37_margin_rel = 0.0;  // (rhs - lhs) / rhs
};

struct ContactAudit {
    std::vector<ContactRecord> records;
    double ymax = 0.0;
    double dy = 0.0;
    double min_slack = 0.0;
    double max_lemma31_gap = 0.0;
    double min_psd = 0.0;
    double max_jac_mismatch = 0.0;
    double min_l37_margin_rel = 0.0;
    bool lemma31_pass = false;  // gap < 1e-12
    bool psd_pass = false;      // psd >= -1e-6
    bool jac_pass = false;      // mismatch < 1e-3 and |fd| <= r psd + 1e-6
    bool l37_pass = false;      // margin >= -1e-6 rhs
};

// Evaluates the contact inequality on the (vertex, y) grid, keeps members,
// and runs the Lemma 3.1 identity plus the 3.4 / 3.6 / 3.7 record audits.
ContactAudit contact_audit(const TransportSetup& setup, const YGrid& grid = {},
                           par::Exec exec = par::Exec::OpenMP);

struct CoverageCase {
    Vec2 target{};
    int vertex = 0;
    double y = 0.0;
    double tangential = 0.0;      // first-variation residual
    double slack = 0.0;           // membership slack of the constructed record
    double reconstruction = 0.0;  // |Phi(vertex, y) - target|
    double hessian_scale = 1.0;   // 1 + r|u''| + r|kappa y| at the record
    bool pass = false;
};

struct CoverageAudit {
    std::size_t targets = 0;
    std::size_t passed = 0;
    bool pass = false;
    double disk_radius = 0.0;
    std::vector<CoverageCase> failures;
};

// Lemma 3.2 discretely: every target's argmin construction must be an
// admissible contact record that reproduces the target. The three bounds are
// the spec'd h-bounds scaled by the contact Hessian magnitude, which is how
// the discrete argmin error propagates.
CoverageAudit coverage_audit(const TransportSetup& setup, const std::vector<Vec2>& targets,
                             par::Exec exec = par::Exec::OpenMP);

double recommended_target_radius(const TransportSetup& setup, double ymax);
std::vector<Vec2> make_targets(Vec2 center, double radius, std::size_t count,
                               std::uint64_t seed);

struct ChainAudit {
    double lhs = 0.0;  // int over the truncated disk of exp(-d(x(p),p)^2 / 4r^2)
    double rhs = 0.0;  // r^{n+m} e^{n/r-n} (4 pi)^{m/2} int f
    double ratio = 0.0;
    double rho_lhs = 0.0;  // lhs / (4 pi r^2)
    double tail_bound = 0.0;
    double truncation_radius = 0.0;
    std::size_t cells = 0;
    bool pass = false;  // lhs <= 1.01 rhs and tail <= 1e-3 lhs
};

// truncation_radius = 0 selects the automatic radius (curve reach + 10 r).
ChainAudit integral_chain_audit(const TransportSetup& setup, double truncation_radius = 0.0,
                                par::Exec exec = par::Exec::OpenMP);

// Serial reference twins of the parallel kernels (bitwise-identical results).
ContactAudit contact_audit_serial(const TransportSetup& setup, const YGrid& grid = {});
ChainAudit integral_chain_audit_serial(const TransportSetup& setup,
                                       double truncation_radius = 0.0);

}  // namespace logsob::abp
