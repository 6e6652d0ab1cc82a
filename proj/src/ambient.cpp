#include "logsob/ambient.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

namespace logsob::ambient {

namespace {

void check_angle(double v) {
    if (!(v >= 0.0 && v < 2.0 * kPi + 1e-12))
        throw std::domain_error("angle coordinate out of [0, 2pi): " + fmt12(v));
}

double angular_gap(double v1, double v2) {
    double d = std::abs(v1 - v2);
    d = std::fmod(d, 2.0 * kPi);
    return std::min(d, 2.0 * kPi - d);
}

}  // namespace

Model Model::euclidean(int k) {
    if (k < 1) throw std::domain_error("Euclidean dimension must be >= 1");
    Model m;
    m.kind = Kind::Euclidean;
    m.dim = k;
    return m;
}

Model Model::paraboloid(double a) {
    if (!(a > 0.0)) throw std::domain_error("paraboloid parameter a must be > 0");
    Model m;
    m.kind = Kind::Paraboloid;
    m.a = a;
    return m;
}

Model Model::cylinder(double radius) {
    if (!(radius > 0.0)) throw std::domain_error("cylinder radius must be > 0");
    Model m;
    m.kind = Kind::Cylinder;
    m.radius = radius;
    return m;
}

Model Model::cone(double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::domain_error("cone beta must lie in (0, 1]");
    Model m;
    m.kind = Kind::Cone;
    m.beta = beta;
    return m;
}

int Model::intrinsic_dim() const {
    return kind == Kind::Euclidean ? dim : 2;
}

bool Model::has_general_distance() const {
    return kind != Kind::Paraboloid;
}

std::string Model::describe() const {
    switch (kind) {
        case Kind::Euclidean: return "euclidean:" + std::to_string(dim);
        case Kind::Paraboloid: return "paraboloid:a=" + fmt12(a);
        case Kind::Cylinder: return "cylinder:radius=" + fmt12(radius);
        case Kind::Cone: return "cone:beta=" + fmt12(beta);
    }
    return "?";
}

Point base_point(const Model& m) {
    if (m.kind == Kind::Euclidean) return {std::vector<double>(m.dim, 0.0)};
    return {{0.0, 0.0}};
}

Point make_point(const Model& m, std::vector<double> coords) {
    switch (m.kind) {
        case Kind::Euclidean:
            if (static_cast<int>(coords.size()) != m.dim)
                throw std::domain_error("Euclidean point needs " + std::to_string(m.dim) + " coordinates");
            break;
        case Kind::Paraboloid:
        case Kind::Cone:
            if (coords.size() != 2) throw std::domain_error("revolution point needs (u, v)");
            if (!(coords[0] >= 0.0) || !std::isfinite(coords[0]))
                throw std::domain_error("radial coordinate u must be finite and >= 0");
            check_angle(coords[1]);
            break;
        case Kind::Cylinder:
            if (coords.size() != 2) throw std::domain_error("cylinder point needs (angle, height)");
            check_angle(coords[0]);
            if (!std::isfinite(coords[1])) throw std::domain_error("cylinder height must be finite");
            break;
    }
    for (double c : coords)
        if (!std::isfinite(c)) throw std::domain_error("non-finite coordinate");
    return {std::move(coords)};
}

double paraboloid_profile(double a, double u) {
    if (!(u >= 0.0)) throw std::domain_error("paraboloid_profile: u must be >= 0");
    const double w = std::sqrt(1.0 + a * a * u * u);
    return 0.5 * u * w + 0.5 / a * std::asinh(a * u);
}

double paraboloid_profile_inverse(double a, double s) {
    if (!(s >= 0.0)) throw std::domain_error("paraboloid_profile_inverse: s must be >= 0");
    if (s == 0.0) return 0.0;
    // A(u) >= u, so u = s brackets from above; expand below is never needed.
    double lo = 0.0, hi = s;
    // Bisection: unconditionally convergent on a strictly increasing profile.
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (paraboloid_profile(a, mid) < s)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double distance(const Model& m, const Point& p, const Point& q) {
    switch (m.kind) {
        case Kind::Euclidean: {
            if (static_cast<int>(p.x.size()) != m.dim || static_cast<int>(q.x.size()) != m.dim)
                throw std::domain_error("Euclidean distance: dimension mismatch");
            double s = 0.0;
            for (int i = 0; i < m.dim; ++i) {
                const double d = p.x[i] - q.x[i];
                s += d * d;
            }
            return std::sqrt(s);
        }
        case Kind::Cylinder: {
            const double dphi = angular_gap(p.x[0], q.x[0]);
            const double dh = p.x[1] - q.x[1];
            return std::hypot(m.radius * dphi, dh);
        }
        case Kind::Cone: {
            const double up = p.x[0], uq = q.x[0];
            // Unrolled gaps the two ways around; a straight segment in the
            // unrolled sector is a geodesic whenever its gap is < pi, and the
            // through-apex path is the remaining candidate.
            const double dv = angular_gap(p.x[1], q.x[1]);
            const double gap1 = m.beta * dv;
            const double gap2 = m.beta * (2.0 * kPi - dv);
            double best = up + uq;  // through the apex
            for (double g : {gap1, gap2}) {
                if (g < kPi) {
                    const double d2 = up * up + uq * uq - 2.0 * up * uq * std::cos(g);
                    best = std::min(best, std::sqrt(std::max(0.0, d2)));
                }
            }
            return best;
        }
        case Kind::Paraboloid: {
            const bool p_base = p.x[0] == 0.0;
            const bool q_base = q.x[0] == 0.0;
            if (!p_base && !q_base)
                throw unsupported_error(
                    "paraboloid distance is only available from the apex (general pairs "
                    "are a boundary-value problem outside this catalog)");
            return paraboloid_profile(m.a, p_base ? q.x[0] : p.x[0]);
        }
    }
    throw std::logic_error("unreachable");
}

double ball_volume(const Model& m, double s) {
    if (s < 0.0) throw std::domain_error("ball_volume: radius must be >= 0");
    switch (m.kind) {
        case Kind::Euclidean:
            return unit_ball_volume(m.dim) * std::pow(s, m.dim);
        case Kind::Cone:
            return m.beta * kPi * s * s;
        case Kind::Cylinder: {
            const double wrap = kPi * m.radius;
            if (s <= wrap) return kPi * s * s;
            // Unrolled strip |x| <= pi R: area = 2 int sqrt(s^2 - x^2) dx.
            return 2.0 * (wrap * std::sqrt(s * s - wrap * wrap) +
                          s * s * std::asin(wrap / s));
        }
        case Kind::Paraboloid: {
            const double u = paraboloid_profile_inverse(m.a, s);
            const double w = 1.0 + m.a * m.a * u * u;
            return 2.0 * kPi * (std::pow(w, 1.5) - 1.0) / (3.0 * m.a * m.a);
        }
    }
    throw std::logic_error("unreachable");
}

AvrEstimate avr_estimate(const Model& m, const std::vector<double>& s_grid) {
    if (s_grid.empty()) throw std::invalid_argument("avr_estimate: empty s grid");
    for (std::size_t i = 1; i < s_grid.size(); ++i)
        if (!(s_grid[i] > s_grid[i - 1]))
            throw std::invalid_argument("avr_estimate: s grid must be increasing");
    if (!(s_grid.front() > 0.0)) throw std::domain_error("avr_estimate: s must be > 0");

    const int k = m.intrinsic_dim();
    const double omega = unit_ball_volume(k);
    AvrEstimate out;
    out.s_grid = s_grid;
    out.ratios.reserve(s_grid.size());
    for (double s : s_grid)
        out.ratios.push_back(ball_volume(m, s) / (omega * std::pow(s, k)));
    for (std::size_t i = 1; i < out.ratios.size(); ++i)
        if (out.ratios[i] > out.ratios[i - 1] + 1e-9)
            throw consistency_error("avr_estimate: ball-volume ratio increased with s (" +
                                    fmt12(out.ratios[i - 1]) + " -> " + fmt12(out.ratios[i]) +
                                    "), violating volume comparison");
    out.value = out.ratios.back();
    return out;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

Model from_kv(const std::string& kind, const std::map<std::string, std::string>& kv) {
    auto need = [&](const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end())
            throw std::invalid_argument("model config: missing key '" + key + "' for kind " + kind);
        return std::stod(it->second);
    };
    if (kind == "euclidean") {
        // "dim" preferred; a bare positive value is also accepted from the
        // compact form euclidean:2.
        auto it = kv.find("dim");
        if (it == kv.end()) it = kv.find("");
        if (it == kv.end()) throw std::invalid_argument("model config: euclidean needs dim");
        return Model::euclidean(std::stoi(it->second));
    }
    if (kind == "paraboloid") return Model::paraboloid(need("a"));
    if (kind == "cylinder") return Model::cylinder(need("radius"));
    if (kind == "cone") return Model::cone(need("beta"));
    throw std::invalid_argument("model config: unknown kind '" + kind + "'");
}

}  // namespace

Model parse_model_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("model config: expected key = value, got '" + line + "'");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto it = kv.find("kind");
    if (it == kv.end()) throw std::invalid_argument("model config: missing 'kind'");
    std::string kind = it->second;
    kv.erase(it);
    return from_kv(kind, kv);
}

Model parse_model_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = trim(colon == std::string::npos ? spec : spec.substr(0, colon));
    std::map<std::string, std::string> kv;
    if (colon != std::string::npos) {
        std::istringstream in(spec.substr(colon + 1));
        std::string part;
        while (std::getline(in, part, ',')) {
            part = trim(part);
            if (part.empty()) continue;
            const auto eq = part.find('=');
            if (eq == std::string::npos)
                kv[""] = part;  // positional, e.g. euclidean:2
            else
                kv[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
        }
    }
    return from_kv(kind, kv);
}

}  // namespace logsob::ambient
