#include "logsob/abp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "logsob/functional.hpp"

namespace logsob::abp {

namespace {

PlanarCurve cook_curve(const submanifold::ClosedCurve& curve) {
    if (curve.ambient_dim != 2)
        throw std::domain_error("transport audit: the curve must be planar");
    if (curve.loop_count() != 1)
        throw std::domain_error(
            "transport audit: one connected component at a time (the disconnected "
            "case is a bookkeeping identity on top of the per-component audits)");
    submanifold::Shape shape = curve;
    const auto meas = submanifold::measures(shape);

    PlanarCurve c;
    const std::size_t n = curve.vertex_count();
    c.pos.resize(n);
    for (std::size_t i = 0; i < n; ++i) c.pos[i] = {curve.vertex(i)[0], curve.vertex(i)[1]};
    c.f = curve.f;
    c.edge_len = meas.element_measure;
    c.dual = meas.dual;
    c.total_length = meas.total_measure;
    c.edge_tan.resize(n);
    c.T.resize(n);
    c.nu.resize(n);
    c.H.resize(n);
    c.kappa.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        c.edge_tan[i] = (c.pos[j] - c.pos[i]) * (1.0 / c.edge_len[i]);
        c.max_edge = std::max(c.max_edge, c.edge_len[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t prev = (i + n - 1) % n;
        Vec2 bisector = c.edge_tan[prev] + c.edge_tan[i];
        const double bn = norm(bisector);
        if (!(bn > 1e-14))
            throw std::domain_error("transport audit: tangent reversal at vertex " +
                                    std::to_string(i));
        c.T[i] = bisector * (1.0 / bn);
        c.nu[i] = rot90(c.T[i]);
        c.H[i] = {meas.H[i * 2], meas.H[i * 2 + 1]};
        c.kappa[i] = dot(c.H[i], c.nu[i]);
        c.max_abs_h = std::max(c.max_abs_h, meas.H_norm[i]);
    }
    Vec2 lo = c.pos[0], hi = c.pos[0];
    Vec2 sum{};
    for (auto p : c.pos) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
        sum = sum + p;
    }
    c.diameter = norm(hi - lo);
    c.centroid = sum * (1.0 / static_cast<double>(n));
    c.checksum = submanifold::checksum(shape);
    return c;
}

// Thomas elimination for the pinned system (u_0 = 0), then measure-weighted
// gauge. The full cyclic operator row at vertex 0 serves as the residual
// cross-check.
std::vector<double> solve_pinned_tridiagonal(const std::vector<double>& w,
                                             const std::vector<double>& d) {
    const std::size_t n = d.size();
    std::vector<double> a(n, 0.0), b(n, 0.0), cc(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t prev = i - 1;
        a[i] = w[prev];
        b[i] = -(w[prev] + w[i]);
        cc[i] = w[i];
    }
    // unknowns u_1 .. u_{n-1}; couplings to u_0 = 0 drop out
    std::vector<double> cp(n, 0.0), dp(n, 0.0), u(n, 0.0);
    double beta = b[1];
    if (beta == 0.0) throw std::domain_error("potential solve: singular pivot");
    cp[1] = cc[1] / beta;
    dp[1] = d[1] / beta;
    for (std::size_t i = 2; i < n; ++i) {
        beta = b[i] - a[i] * cp[i - 1];
        if (beta == 0.0) throw std::domain_error("potential solve: singular pivot");
        cp[i] = cc[i] / beta;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / beta;
    }
    u[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i >= 2; --i) u[i - 1] = dp[i - 1] - cp[i - 1] * u[i];
    u[0] = 0.0;
    return u;
}

}  // namespace

TransportSetup solve_potential(const submanifold::ClosedCurve& curve, double r) {
    if (!(r > 0.0)) throw std::domain_error("solve_potential: r must be > 0");

    TransportSetup s;
    s.r = r;

    submanifold::Shape shape = curve;
    s.lambda = functional::normalization_lambda(shape);
    auto f = curve.f;
    for (double& v : f) v *= s.lambda;
    submanifold::ClosedCurve normalized = curve;
    normalized.f = f;
    s.curve = cook_curve(normalized);

    const std::size_t n = s.curve.size();
    const auto& c = s.curve;

    // Vertex divergence data: f log f at the vertex, the edge Dirichlet
    // density split half-half onto the endpoints, and the curvature term.
    submanifold::Shape nshape = normalized;
    const auto density = submanifold::dirichlet_element_density(nshape);
    s.rhs.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        s.rhs[i] = c.f[i] * std::log(c.f[i]) - c.f[i] * norm2(c.H[i]);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        s.rhs[i] -= 0.5 * density[i] * c.edge_len[i] / c.dual[i];
        s.rhs[j] -= 0.5 * density[i] * c.edge_len[i] / c.dual[j];
    }

    double compat = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        compat += s.rhs[i] * c.dual[i];
        mass += c.f[i] * c.dual[i];
    }
    s.compatibility = compat;
    if (!(std::abs(compat) < 1e-10 * std::max(1.0, mass)))
        throw numerical_error("solve_potential: compatibility integral " + fmt12(compat) +
                              " survived the normalization");
    // Mean-zero projection absorbs the rounding drift before the solve.
    s.projection_magnitude = compat / c.total_length;
    for (std::size_t i = 0; i < n; ++i) s.rhs[i] -= s.projection_magnitude;

    std::vector<double> w(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        w[i] = std::sqrt(c.f[i] * c.f[j]) / c.edge_len[i];
        d[i] = s.rhs[i] * c.dual[i];
    }
    s.u = solve_pinned_tridiagonal(w, d);

    double gauge = 0.0;
    for (std::size_t i = 0; i < n; ++i) gauge += s.u[i] * c.dual[i];
    gauge /= c.total_length;
    for (std::size_t i = 0; i < n; ++i) s.u[i] -= gauge;

    // Residual of the full cyclic operator, in divergence form.
    double res = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const std::size_t prev = (i + n - 1) % n;
        const double flux_out = w[i] * (s.u[j] - s.u[i]);
        const double flux_in = w[prev] * (s.u[i] - s.u[prev]);
        res = std::max(res, std::abs((flux_out - flux_in) / c.dual[i] - s.rhs[i]));
        scale = std::max(scale, std::abs(s.rhs[i]));
    }
    s.solver_residual = res;
    s.residual_scale = scale;
    if (!(res < 1e-8 * scale))
        throw numerical_error("solve_potential: residual " + fmt12(res) +
                              " exceeds 1e-8 * " + fmt12(scale));

    s.u_s.assign(n, 0.0);
    s.u_ss.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const std::size_t prev = (i + n - 1) % n;
        const double hb = c.edge_len[prev], hf = c.edge_len[i];
        const double ub = s.u[prev], u0 = s.u[i], uf = s.u[j];
        s.u_s[i] = (hb * hb * uf - hf * hf * ub + (hf * hf - hb * hb) * u0) /
                   (hb * hf * (hb + hf));
        s.u_ss[i] = 2.0 * (hb * uf + hf * ub - (hb + hf) * u0) / (hb * hf * (hb + hf));
        s.u_scale = std::max(s.u_scale, std::abs(s.u[i]));
    }
    return s;
}

namespace {

// rho(i, y) -> Phi in the flat ambient: x + r u' T + r y nu.
inline Vec2 transport_point(const TransportSetup& s, std::size_t i, double y) {
    return s.curve.pos[i] + s.curve.T[i] * (s.r * s.u_s[i]) + s.curve.nu[i] * (s.r * y);
}

// min over vertices of r u(x) + |x - q|^2 / 2, plus the argmin (lowest index
// wins ties through strict comparison).
inline std::pair<double, std::size_t> transport_min(const TransportSetup& s, Vec2 q) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    const std::size_t n = s.curve.size();
    for (std::size_t j = 0; j < n; ++j) {
        const Vec2 d = s.curve.pos[j] - q;
        const double v = s.r * s.u[j] + 0.5 * norm2(d);
        if (v < best) {
            best = v;
            arg = j;
        }
    }
    return {best, arg};
}

void audit_record(const TransportSetup& s, ContactRecord& rec) {
    const auto& c = s.curve;
    const std::size_t i = static_cast<std::size_t>(rec.vertex);
    const double r = s.r;
    const double y = rec.y;

    const double expected = r * r * (s.u_s[i] * s.u_s[i] + y * y);
    const double actual = norm2(rec.phi - c.pos[i]);
    rec.lemma31_gap = std::abs(actual - expected) / std::max(1.0, expected);

    rec.psd_value = 1.0 + r * s.u_ss[i] - r * c.kappa[i] * y;
    rec.jac_closed = r * rec.psd_value;

    // Central differences of Phi in (arc length, y); the y-derivative is
    // exact since Phi is affine in y.
    const std::size_t prev = (i + c.size() - 1) % c.size();
    const std::size_t next = (i + 1) % c.size();
    const Vec2 dphi_s = (transport_point(s, next, y) - transport_point(s, prev, y)) *
                        (1.0 / (c.edge_len[prev] + c.edge_len[i]));
    const double dy = 1.0 / 128.0;
    const Vec2 dphi_y = (transport_point(s, i, y + dy) - transport_point(s, i, y - dy)) *
                        (1.0 / (2.0 * dy));
    rec.jac_fd = cross(dphi_s, dphi_y);
    const double jac_scale = r * (1.0 + r * std::abs(s.u_ss[i]) + r * std::abs(c.kappa[i] * y));
    rec.jac_mismatch = std::abs(rec.jac_closed - rec.jac_fd) / jac_scale;

    rec.l37_lhs = std::exp(-actual / (4.0 * r * r)) * std::abs(rec.jac_closed);
    const Vec2 shifted = c.H[i] * 2.0 + c.nu[i] * y;
    rec.l37_rhs = r * r * c.f[i] * std::exp(1.0 / r - 1.0) * std::exp(-norm2(shifted) / 4.0);
    rec.l37_margin_rel = (rec.l37_rhs - rec.l37_lhs) / rec.l37_rhs;
}

ContactAudit contact_audit_impl(const TransportSetup& s, const YGrid& grid, par::Exec exec) {
    const auto& c = s.curve;
    const std::size_t n = c.size();
    ContactAudit audit;
    audit.dy = grid.dy;
    audit.ymax = grid.ymax > 0.0 ? grid.ymax : 2.0 * c.max_abs_h + 8.0;
    if (!(audit.dy > 0.0)) throw std::invalid_argument("contact grid: dy must be > 0");

    const long half = static_cast<long>(std::floor(audit.ymax / audit.dy));
    const std::size_t ny = static_cast<std::size_t>(2 * half + 1);
    const double tol = s.tol_contact();

    std::vector<double> slack(n * ny);
    par::map_fill(exec, n * ny, slack.data(), [&](std::size_t idx) {
        const std::size_t i = idx / ny;
        const double y = (static_cast<long>(idx % ny) - half) * audit.dy;
        const Vec2 phi = transport_point(s, i, y);
        const double base = s.r * s.u[i] +
                            0.5 * s.r * s.r * (s.u_s[i] * s.u_s[i] + y * y);
        return transport_min(s, phi).first - base;
    });

    for (std::size_t idx = 0; idx < n * ny; ++idx) {
        if (slack[idx] < -tol) continue;
        ContactRecord rec;
        rec.vertex = static_cast<int>(idx / ny);
        rec.y = (static_cast<long>(idx % ny) - half) * audit.dy;
        rec.slack = slack[idx];
        rec.phi = transport_point(s, rec.vertex, rec.y);
        audit.records.push_back(rec);
    }
    if (audit.records.empty())
        throw numerical_error("contact set came out empty over the whole grid; "
                              "the transport construction guarantees nonemptiness");

    par::for_each_index(exec, audit.records.size(),
                        [&](std::size_t k) { audit_record(s, audit.records[k]); });

    audit.min_slack = std::numeric_limits<double>::infinity();
    audit.min_psd = std::numeric_limits<double>::infinity();
    audit.min_l37_margin_rel = std::numeric_limits<double>::infinity();
    bool jac_bound_ok = true;
    for (const auto& rec : audit.records) {
        audit.min_slack = std::min(audit.min_slack, rec.slack);
        audit.max_lemma31_gap = std::max(audit.max_lemma31_gap, rec.lemma31_gap);
        audit.min_psd = std::min(audit.min_psd, rec.psd_value);
        audit.max_jac_mismatch = std::max(audit.max_jac_mismatch, rec.jac_mismatch);
        audit.min_l37_margin_rel = std::min(audit.min_l37_margin_rel, rec.l37_margin_rel);
        if (!(std::abs(rec.jac_fd) <= s.r * rec.psd_value + 1e-6)) jac_bound_ok = false;
    }
    audit.lemma31_pass = audit.max_lemma31_gap < 1e-12;
    audit.psd_pass = audit.min_psd >= -1e-6;
    audit.jac_pass = audit.max_jac_mismatch < 1e-3 && jac_bound_ok;
    audit.l37_pass = audit.min_l37_margin_rel >= -1e-6;
    return audit;
}

}  // namespace

ContactAudit contact_audit(const TransportSetup& setup, const YGrid& grid, par::Exec exec) {
    return contact_audit_impl(setup, grid, exec);
}

ContactAudit contact_audit_serial(const TransportSetup& setup, const YGrid& grid) {
    return contact_audit_impl(setup, grid, par::Exec::Serial);
}

double recommended_target_radius(const TransportSetup& setup, double ymax) {
    double max_us = 0.0;
    for (double v : setup.u_s) max_us = std::max(max_us, std::abs(v));
    const double y = ymax > 0.0 ? ymax : 2.0 * setup.curve.max_abs_h + 8.0;
    return setup.curve.diameter + 5.0 * setup.r * (max_us + y);
}

std::vector<Vec2> make_targets(Vec2 center, double radius, std::size_t count,
                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<Vec2> out;
    out.reserve(count);
    while (out.size() < count) {
        const double x = unif(rng), y = unif(rng);
        if (x * x + y * y <= 1.0)
            out.push_back({center.x + radius * x, center.y + radius * y});
    }
    return out;
}

CoverageAudit coverage_audit(const TransportSetup& s, const std::vector<Vec2>& targets,
                             par::Exec exec) {
    CoverageAudit audit;
    audit.targets = targets.size();
    const auto& c = s.curve;
    const double h = c.max_edge;
    const double tol = s.tol_contact();

    std::vector<CoverageCase> cases(targets.size());
    par::for_each_index(exec, targets.size(), [&](std::size_t t) {
        CoverageCase cs;
        cs.target = targets[t];
        const std::size_t j = transport_min(s, cs.target).second;
        cs.vertex = static_cast<int>(j);
        const Vec2 w = (cs.target - c.pos[j]) * (1.0 / s.r) - c.T[j] * s.u_s[j];
        cs.y = dot(w, c.nu[j]);
        cs.tangential = dot(w, c.T[j]);
        const Vec2 phi = transport_point(s, j, cs.y);
        cs.reconstruction = norm(phi - cs.target);
        const double base = s.r * s.u[j] +
                            0.5 * s.r * s.r * (s.u_s[j] * s.u_s[j] + cs.y * cs.y);
        cs.slack = transport_min(s, phi).first - base;
        cs.hessian_scale = 1.0 + s.r * std::abs(s.u_ss[j]) + s.r * std::abs(c.kappa[j] * cs.y);

        const double scale = std::max(1.0, cs.hessian_scale);
        const bool tangential_ok = std::abs(cs.tangential) < 2.0 * h / s.r * scale;
        const bool member_ok = cs.slack >= -(tol + 16.0 * h * h * scale);
        const bool rebuilt_ok = cs.reconstruction < 2.0 * h * scale;
        cs.pass = tangential_ok && member_ok && rebuilt_ok;
        cases[t] = cs;
    });

    for (const auto& cs : cases) {
        if (cs.pass)
            ++audit.passed;
        else
            audit.failures.push_back(cs);
    }
    audit.pass = audit.passed == audit.targets;
    return audit;
}

namespace {

ChainAudit chain_impl(const TransportSetup& s, double truncation_radius, par::Exec exec) {
    const auto& c = s.curve;
    ChainAudit audit;

    double reach = 0.0;  // max |pos| from the centroid
    for (auto p : c.pos) reach = std::max(reach, norm(p - c.centroid));

    // Distance to the chosen vertex dominates |p - centroid| - reach, which
    // gives a closed-form Gaussian tail for the truncated disk.
    auto tail_beyond = [&](double D) {
        const double t = std::max(0.0, D - reach);
        return 2.0 * kPi *
               (2.0 * s.r * s.r * std::exp(-t * t / (4.0 * s.r * s.r)) +
                reach * std::sqrt(kPi) * s.r * std::erfc(t / (2.0 * s.r)));
    };

    double D = truncation_radius > 0.0 ? truncation_radius : reach + 10.0 * s.r;
    double lhs = 0.0;
    for (int attempt = 0;; ++attempt) {
        const double feature = std::min(s.r, std::max(1.0, reach));
        double cell = feature / 8.0;
        std::size_t per_axis = static_cast<std::size_t>(std::ceil(2.0 * D / cell));
        if (per_axis > 2400) {
            per_axis = 2400;
            cell = 2.0 * D / static_cast<double>(per_axis);
        }
        audit.cells = per_axis * per_axis;
        audit.truncation_radius = D;

        const double x0 = c.centroid.x - D, y0 = c.centroid.y - D;
        const double cell_area = cell * cell;
        const double D2 = D * D;
        // Rows in parallel, cells within a row in index order, rows reduced
        // in fixed order: bitwise reproducible at any thread count.
        lhs = par::map_sum(exec, per_axis, [&](std::size_t row) {
            double acc = 0.0;
            const double py = y0 + (row + 0.5) * cell;
            for (std::size_t col = 0; col < per_axis; ++col) {
                const Vec2 p{x0 + (col + 0.5) * cell, py};
                const Vec2 rel = p - c.centroid;
                if (norm2(rel) > D2) continue;
                const std::size_t j = transport_min(s, p).second;
                const double d2 = norm2(c.pos[j] - p);
                acc += std::exp(-d2 / (4.0 * s.r * s.r)) * cell_area;
            }
            return acc;
        });
        audit.tail_bound = tail_beyond(D);
        if (audit.tail_bound <= 1e-3 * lhs) break;
        if (truncation_radius > 0.0 || attempt >= 6)
            throw numerical_error("integral chain: tail bound " + fmt12(audit.tail_bound) +
                                  " did not fall below 1e-3 of the truncated integral");
        D *= 1.5;
    }

    double mass = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) mass += c.f[i] * c.dual[i];

    audit.lhs = lhs;
    audit.rhs = s.r * s.r * std::exp(1.0 / s.r - 1.0) * std::sqrt(4.0 * kPi) * mass;
    audit.ratio = audit.lhs / audit.rhs;
    audit.rho_lhs = audit.lhs / (4.0 * kPi * s.r * s.r);
    audit.pass = audit.lhs <= audit.rhs * 1.01 && audit.tail_bound <= 1e-3 * audit.lhs;
    return audit;
}

}  // namespace

ChainAudit integral_chain_audit(const TransportSetup& setup, double truncation_radius,
                                par::Exec exec) {
    return chain_impl(setup, truncation_radius, exec);
}

ChainAudit integral_chain_audit_serial(const TransportSetup& setup, double truncation_radius) {
    return chain_impl(setup, truncation_radius, par::Exec::Serial);
}

}  // namespace logsob::abp
