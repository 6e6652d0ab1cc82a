#include "logsob/functional.hpp"

#include <cmath>
#include <numeric>

namespace logsob::functional {

using submanifold::Measures;
using submanifold::Shape;

namespace {

// Element-to-component map: edges/faces belong to the component of their
// vertices (components are vertexwise-connected, so any incident vertex works).
std::vector<int> element_component(const Shape& s, const Measures& m) {
    if (const auto* c = std::get_if<submanifold::ClosedCurve>(&s)) {
        (void)c;
        return m.component;  // edge i starts at vertex i
    }
    if (const auto* mesh = std::get_if<submanifold::TriMesh>(&s)) {
        std::vector<int> out(mesh->faces.size());
        for (std::size_t t = 0; t < mesh->faces.size(); ++t)
            out[t] = m.component[mesh->faces[t][0]];
        return out;
    }
    return m.component;
}

struct Terms {
    std::vector<double> mass, entropy, dirichlet, curvature;  // per component
};

Terms per_component_terms(const Shape& s, const Measures& m, double theta, int n) {
    const auto& f = submanifold::scalar_field(s);
    const std::size_t ncomp = m.component_measure.size();
    Terms t;
    t.mass.assign(ncomp, 0.0);
    t.entropy.assign(ncomp, 0.0);
    t.dirichlet.assign(ncomp, 0.0);
    t.curvature.assign(ncomp, 0.0);

    const double entropy_const = n + 0.5 * n * std::log(4.0 * kPi) + std::log(theta);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const int c = m.component[i];
        const double w = m.dual[i];
        t.mass[c] += f[i] * w;
        t.entropy[c] += f[i] * (std::log(f[i]) + entropy_const) * w;
        t.curvature[c] += f[i] * m.H_norm[i] * m.H_norm[i] * w;
    }
    const auto density = submanifold::dirichlet_element_density(s);
    const auto ecomp = element_component(s, m);
    for (std::size_t e = 0; e < density.size(); ++e)
        t.dirichlet[ecomp[e]] += density[e] * m.element_measure[e];
    return t;
}

ComponentReport assemble(double mass, double entropy, double dirichlet, double curvature) {
    ComponentReport r;
    r.mass = mass;
    r.entropy_term = entropy;
    r.dirichlet_term = dirichlet;
    r.curvature_term = curvature;
    r.rhs = mass * std::log(mass);
    r.deficit = r.rhs - entropy + dirichlet + curvature;
    return r;
}

}  // namespace

DeficitReport deficit(const Shape& shape, double theta) {
    if (!(theta > 0.0)) throw std::domain_error("deficit: theta must be > 0");
    const auto m = submanifold::measures(shape);
    const int n = submanifold::intrinsic_dim(shape);
    const auto t = per_component_terms(shape, m, theta, n);

    DeficitReport report;
    report.n = n;
    report.theta_used = theta;
    report.shape_checksum = submanifold::checksum(shape);
    double mass = 0.0, entropy = 0.0, dirichlet = 0.0, curvature = 0.0;
    for (std::size_t c = 0; c < t.mass.size(); ++c) {
        report.components.push_back(assemble(t.mass[c], t.entropy[c], t.dirichlet[c], t.curvature[c]));
        mass += t.mass[c];
        entropy += t.entropy[c];
        dirichlet += t.dirichlet[c];
        curvature += t.curvature[c];
    }
    report.whole = assemble(mass, entropy, dirichlet, curvature);
    return report;
}

double normalization_lambda(const Shape& shape) {
    const auto m = submanifold::measures(shape);
    const auto& f = submanifold::scalar_field(shape);
    double f_log_f = 0.0, curvature = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        f_log_f += f[i] * std::log(f[i]) * m.dual[i];
        curvature += f[i] * m.H_norm[i] * m.H_norm[i] * m.dual[i];
        mass += f[i] * m.dual[i];
    }
    double dirichlet = 0.0;
    const auto density = submanifold::dirichlet_element_density(shape);
    for (std::size_t e = 0; e < density.size(); ++e)
        dirichlet += density[e] * m.element_measure[e];
    const double combination = f_log_f - dirichlet - curvature;
    return std::exp(-combination / mass);
}

MassBoundReport mass_lower_bound_check(const Shape& shape, double theta, double rel_tol) {
    MassBoundReport out;
    out.lambda = normalization_lambda(shape);
    Shape scaled = shape;
    auto f = submanifold::scalar_field(shape);
    for (double& v : f) v *= out.lambda;
    submanifold::set_scalar_field(scaled, std::move(f));

    out.normalized_report = deficit(scaled, theta);
    out.normalized_mass = out.normalized_report.whole.mass;
    const int n = out.normalized_report.n;
    out.bound = std::exp(static_cast<double>(n)) * std::pow(4.0 * kPi, 0.5 * n) * theta;
    out.tolerance = rel_tol;
    out.pass = out.normalized_mass >= out.bound * (1.0 - rel_tol);
    return out;
}

DisconnectedReport disconnected_strictness_check(const Shape& shape, double theta) {
    const auto report = deficit(shape, theta);
    DisconnectedReport out;
    out.whole_deficit = report.whole.deficit;
    double mass_total = 0.0, mass_log_sum = 0.0;
    for (const auto& c : report.components) {
        out.component_deficit_sum += c.deficit;
        out.masses.push_back(c.mass);
        mass_total += c.mass;
        mass_log_sum += c.mass * std::log(c.mass);
    }
    out.bracket = mass_total * std::log(mass_total) - mass_log_sum;
    out.bookkeeping_gap = out.whole_deficit - (out.component_deficit_sum + out.bracket);
    out.bracket_positive = report.components.size() >= 2 ? out.bracket > 0.0 : out.bracket == 0.0;
    return out;
}

}  // namespace logsob::functional
