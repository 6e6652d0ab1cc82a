#include "logsob/theta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "logsob/quadrature.hpp"

namespace logsob::theta {

using ambient::Kind;
using ambient::Model;
using ambient::Point;

namespace {

double gaussian(double d, double r) { return std::exp(-d * d / (4.0 * r * r)); }

// Upper bound on \int_{d(x, base) > D} exp(-d^2/4r^2) dvol by shell sums.
// Shell volumes about the base are bounded through balls about the model's
// designated base point, shifted by base_offset = d(base, designated base).
double shell_tail_bound(const Model& m, double base_offset, double r, double D) {
    const double w = std::max(1.0, 0.25 * r);
    double total = 0.0;
    for (int j = 0; j < 4000; ++j) {
        const double s = D + j * w;
        const double outer = ambient::ball_volume(m, s + w + base_offset);
        const double inner = ambient::ball_volume(m, std::max(0.0, s - base_offset));
        const double term = gaussian(s, r) * std::max(0.0, outer - inner);
        total += term;
        if (term <= 1e-17 * total) break;
    }
    return total;
}

// Smallest truncation distance whose tail bound is below frac * integral_scale.
double truncation_distance(const Model& m, double base_offset, double r, double frac,
                           double integral_scale) {
    double D = 6.0 * r + base_offset + 1.0;
    for (int i = 0; i < 60; ++i) {
        if (shell_tail_bound(m, base_offset, r, D) < frac * integral_scale) return D;
        D *= 1.4;
    }
    throw numerical_error("truncation_distance: no radius met the tail target");
}

double rho_prefactor(int k, double r) {
    return std::pow(4.0 * kPi, -0.5 * k) * std::pow(r, -k);
}

// Panel boundaries at center +- scale * {0, 1, 2, 4, ...} so a Gaussian factor
// much narrower than the domain is never missed by the first subdivisions.
std::vector<double> gaussian_panels(double a, double b, double center, double scale) {
    std::vector<double> pts{a, b};
    if (scale > 0.0) {
        for (double k = 0.0;; k = k == 0.0 ? 1.0 : 2.0 * k) {
            const double lo = center - k * scale, hi = center + k * scale;
            if (lo > a && lo < b) pts.push_back(lo);
            if (hi > a && hi < b) pts.push_back(hi);
            if ((lo <= a && hi >= b) || k > 1e18) break;
        }
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for (double p : pts)
        if (out.empty() || p - out.back() > 1e-14 * std::max(1.0, std::abs(p))) out.push_back(p);
    return out;
}

quad::Result integrate_panels(const std::function<double(double)>& f,
                              const std::vector<double>& cuts, const quad::Options& opt) {
    quad::Result total;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto part = quad::integrate(f, cuts[i], cuts[i + 1], opt);
        total.value += part.value;
        total.error_estimate += part.error_estimate;
        total.evaluations += part.evaluations;
    }
    return total;
}

// ---- per-model manifold integrals I = \int exp(-d^2/4r^2) dvol ----

RhoValue integral_euclidean(const Model& m, double r, const RhoOptions& opt) {
    const int k = m.dim;
    // Polar reduction about the base point: the integrand is radial.
    const double sphere_area = 2.0 * std::pow(kPi, 0.5 * k) / std::tgamma(0.5 * k);
    const double scale0 = std::pow(2.0 * r, k);  // magnitude of the radial integral
    const double D = truncation_distance(m, 0.0, r, opt.tail_fraction, scale0);
    quad::Options qopt;
    qopt.rel_tol = opt.rel_tol;
    auto res = integrate_panels(
        [&](double t) { return gaussian(t, r) * std::pow(t, k - 1); },
        gaussian_panels(0.0, D, 0.0, 2.0 * r), qopt);
    RhoValue out;
    out.value = sphere_area * res.value;
    out.tail_bound = shell_tail_bound(m, 0.0, r, D);
    out.evaluations = res.evaluations;
    return out;
}

RhoValue integral_cylinder(const Model& m, double r, const RhoOptions& opt) {
    // d((phi, h), base)^2 = (R dphi)^2 + dh^2 depends only on coordinate
    // differences, so the integral factorizes and the base cancels exactly.
    const double R = m.radius;
    quad::Options qopt;
    qopt.rel_tol = opt.rel_tol;
    auto angular = integrate_panels([&](double phi) { return gaussian(R * phi, r); },
                                    gaussian_panels(0.0, kPi, 0.0, 2.0 * r / R), qopt);

    double Dh = 6.0 * r;
    double height_running = 2.0 * r;  // order of the Gaussian mass
    double tail = 0.0;
    for (int i = 0; i < 60; ++i) {
        // Gaussian tail: \int_Dh^inf exp(-h^2/4r^2) dh <= (2 r^2 / Dh) exp(-Dh^2/4r^2).
        tail = 2.0 * (2.0 * r * r / Dh) * gaussian(Dh, r);
        if (tail < opt.tail_fraction * height_running) break;
        Dh *= 1.4;
    }
    auto height = integrate_panels([&](double h) { return gaussian(h, r); },
                                   gaussian_panels(0.0, Dh, 0.0, 2.0 * r), qopt);

    RhoValue out;
    out.value = R * (2.0 * angular.value) * (2.0 * height.value);
    out.tail_bound = R * (2.0 * angular.value) * tail;
    out.evaluations = angular.evaluations + height.evaluations;
    return out;
}

RhoValue integral_cone_apex(const Model& m, double r, const RhoOptions& opt) {
    const double D = truncation_distance(m, 0.0, r, opt.tail_fraction, 4.0 * r * r);
    quad::Options qopt;
    qopt.rel_tol = opt.rel_tol;
    auto res = integrate_panels([&](double u) { return gaussian(u, r) * u; },
                                gaussian_panels(0.0, D, 0.0, 2.0 * r), qopt);
    RhoValue out;
    out.value = 2.0 * kPi * m.beta * res.value;
    out.tail_bound = shell_tail_bound(m, 0.0, r, D);
    out.evaluations = res.evaluations;
    return out;
}

RhoValue integral_cone_general(const Model& m, const Point& base, double r,
                               const RhoOptions& opt) {
    const double u0 = base.x[0];
    const double D = truncation_distance(m, u0, r, opt.tail_fraction, 4.0 * r * r);
    quad::Options inner_opt;
    inner_opt.rel_tol = opt.rel_tol;
    quad::Options outer_opt;
    outer_opt.rel_tol = opt.rel_tol;

    long evals = 0;
    // Rotate the base to v = 0; the integrand is then symmetric in +-v and
    // one half-turn of the outer angle suffices.
    Point rotated_base{{u0, 0.0}};
    const auto u_cuts = gaussian_panels(0.0, D, u0, 2.0 * r);
    const double v_scale = 2.0 * r / (m.beta * std::max(u0, 0.5 * r));
    const auto v_cuts = gaussian_panels(0.0, kPi, 0.0, v_scale);
    auto outer = integrate_panels(
        [&](double v) {
            auto res = integrate_panels(
                [&](double u) {
                    Point q{{u, v}};
                    return gaussian(ambient::distance(m, rotated_base, q), r) * u;
                },
                u_cuts, inner_opt);
            evals += res.evaluations;
            return res.value;
        },
        v_cuts, outer_opt);

    RhoValue out;
    out.value = m.beta * 2.0 * outer.value;
    out.tail_bound = shell_tail_bound(m, u0, r, D);
    out.evaluations = evals + outer.evaluations;
    return out;
}

RhoValue integral_paraboloid_apex(const Model& m, double r, const RhoOptions& opt) {
    const double a = m.a;
    const double s_max = truncation_distance(m, 0.0, r, opt.tail_fraction, 4.0 * r * r);
    const double u_max = ambient::paraboloid_profile_inverse(a, s_max);
    quad::Options qopt;
    qopt.rel_tol = opt.rel_tol;
    std::vector<double> u_cuts{0.0, u_max};
    for (double k = 1.0; 2.0 * r * k < s_max; k *= 2.0) {
        const double cut = ambient::paraboloid_profile_inverse(a, 2.0 * r * k);
        if (cut > 0.0 && cut < u_max) u_cuts.push_back(cut);
    }
    std::sort(u_cuts.begin(), u_cuts.end());
    auto res = integrate_panels(
        [&](double u) {
            const double A = ambient::paraboloid_profile(a, u);
            return gaussian(A, r) * u * std::sqrt(1.0 + a * a * u * u);
        },
        u_cuts, qopt);
    RhoValue out;
    out.value = 2.0 * kPi * res.value;
    out.tail_bound = shell_tail_bound(m, 0.0, r, s_max);
    out.evaluations = res.evaluations;
    return out;
}

bool is_base_point(const Point& p) { return p.x[0] == 0.0; }

}  // namespace

RhoValue rho_detail(const Model& m, const Point& base, double r, const RhoOptions& opt) {
    if (!(r > 0.0)) throw std::domain_error("rho: r must be > 0");
    RhoValue integral;
    switch (m.kind) {
        case Kind::Euclidean:
            integral = integral_euclidean(m, r, opt);
            break;
        case Kind::Cylinder:
            integral = integral_cylinder(m, r, opt);
            break;
        case Kind::Cone:
            integral = is_base_point(base) ? integral_cone_apex(m, r, opt)
                                           : integral_cone_general(m, base, r, opt);
            break;
        case Kind::Paraboloid:
            if (!is_base_point(base))
                throw unsupported_error("rho on the paraboloid requires base = apex");
            integral = integral_paraboloid_apex(m, r, opt);
            break;
    }
    const double pref = rho_prefactor(m.intrinsic_dim(), r);
    integral.value *= pref;
    integral.tail_bound *= pref;
    return integral;
}

double rho(const Model& m, const Point& base, double r, const RhoOptions& opt) {
    return rho_detail(m, base, r, opt).value;
}

RhoValue rho_borel(const Model& m, const NearestSiteMap& map, double r,
                   const RhoOptions& opt) {
    if (m.kind != Kind::Euclidean || m.dim != 2)
        throw unsupported_error("rho_borel is implemented for Euclidean(2)");
    if (map.sites.empty()) throw std::invalid_argument("rho_borel: no sites");
    for (const auto& s : map.sites)
        if (s.x.size() != 2) throw std::domain_error("rho_borel: sites must be planar");

    double site_reach = 0.0;
    for (const auto& s : map.sites) site_reach = std::max(site_reach, std::hypot(s.x[0], s.x[1]));
    // d(x, p(x)) >= |x| - site_reach, so the shell tail bound applies with
    // that offset.
    const double D = truncation_distance(m, site_reach, r, opt.tail_fraction, 4.0 * kPi * r * r);

    auto dist2_to_site = [&](double x, double y) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& s : map.sites) {
            const double dx = x - s.x[0], dy = y - s.x[1];
            best = std::min(best, dx * dx + dy * dy);
        }
        return best;
    };

    quad::Options inner_opt;
    inner_opt.rel_tol = opt.rel_tol * 0.1;
    quad::Options outer_opt;
    outer_opt.rel_tol = opt.rel_tol;

    // Panel boundaries at site abscissae and pairwise midpoints keep the
    // outer integrand's kinks (Voronoi crossings) at panel ends.
    std::vector<double> cuts{-D, D};
    for (std::size_t i = 0; i < map.sites.size(); ++i) {
        cuts.push_back(map.sites[i].x[0]);
        for (std::size_t j = i + 1; j < map.sites.size(); ++j)
            cuts.push_back(0.5 * (map.sites[i].x[0] + map.sites[j].x[0]));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    for (double g : gaussian_panels(-D, D, 0.0, 2.0 * r)) cuts.push_back(g);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const auto y_cuts = gaussian_panels(-D, D, 0.0, 2.0 * r);

    long evals = 0;
    double value = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= -D || cuts[i] >= D) continue;
        const double a = std::max(cuts[i], -D);
        const double b = std::min(cuts[i + 1], D);
        auto panel = quad::integrate(
            [&](double x) {
                auto col = integrate_panels(
                    [&](double y) {
                        return std::exp(-dist2_to_site(x, y) / (4.0 * r * r));
                    },
                    y_cuts, inner_opt);
                evals += col.evaluations;
                return col.value;
            },
            a, b, outer_opt);
        value += panel.value;
        evals += panel.evaluations;
    }

    RhoValue out;
    const double pref = rho_prefactor(2, r);
    out.value = pref * value;
    out.tail_bound = pref * shell_tail_bound(m, site_reach, r, D);
    out.evaluations = evals;
    return out;
}

namespace {

struct PowerLawFit {
    bool ok = false;
    double theta = 0.0, c = 0.0, alpha = 0.0, stderr_theta = 0.0;
};

// Least squares for rho ~ theta + c r^(-alpha) with alpha scanned over a
// fixed grid; linear in (theta, c) for each alpha.
PowerLawFit fit_power_law(const std::vector<double>& r, const std::vector<double>& rho) {
    const std::size_t n = r.size();
    if (n < 3) return {};
    PowerLawFit best;
    double best_rss = std::numeric_limits<double>::infinity();
    for (int ia = 0; ia <= 80; ++ia) {
        const double alpha = 0.05 * std::pow(4.0 / 0.05, ia / 80.0);
        double s11 = static_cast<double>(n), s1x = 0.0, sxx = 0.0, s1y = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = std::pow(r[i], -alpha);
            s1x += x;
            sxx += x * x;
            s1y += rho[i];
            sxy += x * rho[i];
        }
        const double det = s11 * sxx - s1x * s1x;
        if (!(std::abs(det) > 1e-300)) continue;
        const double theta = (sxx * s1y - s1x * sxy) / det;
        const double c = (s11 * sxy - s1x * s1y) / det;
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = rho[i] - theta - c * std::pow(r[i], -alpha);
            rss += e * e;
        }
        if (rss < best_rss && std::isfinite(theta) && std::isfinite(c)) {
            best_rss = rss;
            const double sigma2 = rss / std::max<std::size_t>(1, n - 2);
            best = {true, theta, c, alpha, std::sqrt(std::max(0.0, sigma2 * sxx / det))};
        }
    }
    return best;
}

}  // namespace

ThetaEstimate estimate_theta(const Model& m, const Point& base,
                             const std::vector<double>& r_grid, const RhoOptions& opt) {
    if (r_grid.size() < 4)
        throw std::invalid_argument("estimate_theta: need at least 4 grid points");
    for (std::size_t i = 1; i < r_grid.size(); ++i)
        if (!(r_grid[i] > r_grid[i - 1]))
            throw std::invalid_argument("estimate_theta: r grid must be increasing");
    if (!(r_grid.back() >= 100.0 * r_grid.front() * (1.0 - 1e-12)))
        throw std::invalid_argument("estimate_theta: r grid must span at least two decades");

    ThetaEstimate est;
    est.r_grid = r_grid;
    est.rho_values.resize(r_grid.size());
    std::vector<double> tails(r_grid.size());
    par::for_each_index(opt.exec, r_grid.size(), [&](std::size_t i) {
        RhoOptions one = opt;
        one.exec = par::Exec::Serial;
        auto rv = rho_detail(m, base, r_grid[i], one);
        est.rho_values[i] = rv.value;
        tails[i] = rv.tail_bound;
    });
    est.tail_bound_used = *std::max_element(tails.begin(), tails.end());

    est.monotone_flag = true;
    for (std::size_t i = 1; i < est.rho_values.size(); ++i)
        if (est.rho_values[i] > est.rho_values[i - 1] + 1e-6) est.monotone_flag = false;

    const std::size_t half = r_grid.size() / 2;
    std::vector<double> rs(r_grid.begin() + half, r_grid.end());
    std::vector<double> ys(est.rho_values.begin() + half, est.rho_values.end());
    const double rho_min = *std::min_element(est.rho_values.begin(), est.rho_values.end());

    auto fit = fit_power_law(rs, ys);
    if (fit.ok) {
        est.fit_alpha = fit.alpha;
        est.fit_c = fit.c;
        est.fit_stderr = fit.stderr_theta;
        est.extrapolated_theta = std::clamp(fit.theta, 0.0, rho_min);
        if (est.extrapolated_theta != fit.theta)
            est.notes += "fit value " + fmt12(fit.theta) + " clamped to [0, min rho]; ";
    } else {
        est.extrapolated_theta = est.rho_values.back();
        est.notes += "power-law fit failed; using the last sample; ";
    }
    est.condition_p_satisfied = est.extrapolated_theta > 10.0 * est.fit_stderr;
    if (!est.monotone_flag) est.notes += "rho was not nonincreasing along the grid; ";
    return est;
}

InvarianceAudit invariance_audit(const Model& m, const std::vector<Point>& bases,
                                 const std::optional<NearestSiteMap>& borel_map,
                                 const std::vector<double>& r_grid, const RhoOptions& opt) {
    if (!m.has_general_distance())
        throw unsupported_error("invariance_audit needs general-pair distances (" +
                                m.describe() + " does not provide them)");
    if (bases.size() < 2 && !borel_map)
        throw std::invalid_argument("invariance_audit: need >= 2 bases or a Borel map");

    InvarianceAudit audit;
    audit.r_grid = r_grid;
    audit.rho_per_base.assign(bases.size(), std::vector<double>(r_grid.size(), 0.0));
    audit.max_base_difference.assign(r_grid.size(), 0.0);
    // Floor below which differences count as converged; 10x the quadrature
    // relative tolerance on a quantity of order max rho.
    audit.convergence_floor = 10.0 * opt.rel_tol;

    par::for_each_index(opt.exec, bases.size() * r_grid.size(), [&](std::size_t idx) {
        const std::size_t b = idx / r_grid.size();
        const std::size_t i = idx % r_grid.size();
        RhoOptions one = opt;
        one.exec = par::Exec::Serial;
        audit.rho_per_base[b][i] = rho(m, bases[b], r_grid[i], one);
    });

    double rho_scale = 0.0;
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t b = 0; b < bases.size(); ++b) {
            lo = std::min(lo, audit.rho_per_base[b][i]);
            hi = std::max(hi, audit.rho_per_base[b][i]);
        }
        audit.max_base_difference[i] = bases.size() >= 2 ? hi - lo : 0.0;
        rho_scale = std::max(rho_scale, hi);
    }
    audit.convergence_floor *= std::max(1.0, rho_scale);

    if (borel_map) {
        audit.borel_rho.resize(r_grid.size());
        par::for_each_index(opt.exec, r_grid.size(), [&](std::size_t i) {
            RhoOptions one = opt;
            one.exec = par::Exec::Serial;
            audit.borel_rho[i] = rho_borel(m, *borel_map, r_grid[i], one).value;
        });
    }

    audit.differences_converge = bases.size() >= 2;
    const std::size_t half = r_grid.size() / 2;
    for (std::size_t i = std::max<std::size_t>(half, 1); i < r_grid.size(); ++i) {
        const double prev = audit.max_base_difference[i - 1];
        const double cur = audit.max_base_difference[i];
        if (!(cur < prev || cur <= audit.convergence_floor)) audit.differences_converge = false;
    }
    return audit;
}

}  // namespace logsob::theta
