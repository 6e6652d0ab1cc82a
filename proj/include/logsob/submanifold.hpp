#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "logsob/ambient.hpp"
#include "logsob/common.hpp"

namespace logsob::submanifold {

// Discrete compact submanifolds without boundary, each carrying a positive
// per-vertex scalar field f.
//
// Mean curvature follows the TRACE convention throughout: H is the trace of
// the second fundamental form (sum of principal curvatures), so |H| = 2/R on
// a round sphere of radius R and 1/R on a circle. The factor-of-two
// alternative (averaged principal curvatures) is NOT used anywhere.

// Closed polyline in R^m (m >= 2), possibly several loops; loop l occupies
// vertex range [loop_offsets[l], loop_offsets[l+1]).
struct ClosedCurve {
    int ambient_dim = 2;
    std::vector<double> coords;  // ambient_dim-strided vertex coordinates
    std::vector<std::size_t> loop_offsets{0};
    std::vector<double> f;

    std::size_t vertex_count() const { return coords.size() / ambient_dim; }
    std::size_t loop_count() const { return loop_offsets.size() - 1; }
    const double* vertex(std::size_t i) const { return coords.data() + i * ambient_dim; }
};

// Closed oriented triangle mesh in R^3.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<double> f;
};

// Cyclic (u, v) samples of a closed curve on a revolution surface; only the
// paraboloid metric E = 1 + a^2 u^2, F = 0, G = u^2 is supported.
struct CurveOnSurface {
    ambient::Model surface;
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> f;

    std::size_t vertex_count() const { return u.size(); }
};

using Shape = std::variant<ClosedCurve, TriMesh, CurveOnSurface>;

// Throws std::domain_error on violated shape invariants (f <= 0, short loops,
// repeated consecutive vertices, open or inconsistently oriented meshes,
// samples touching the apex).
void validate(const Shape& s);

int intrinsic_dim(const Shape& s);       // 1 for curves, 2 for meshes
std::size_t vertex_count(const Shape& s);
const std::vector<double>& scalar_field(const Shape& s);
void set_scalar_field(Shape& s, std::vector<double> f);
std::uint64_t checksum(const Shape& s);

// Geometry attached to the vertices/elements of a shape. "Element" means
// edge for curves and face for meshes.
struct Measures {
    std::vector<double> dual;             // per-vertex measure (> 0)
    std::vector<double> element_measure;  // per-element length/area
    // Mean-curvature (curves in R^m: Frenet second difference; meshes:
    // cotangent Laplacian of position; curves on surfaces: covariant
    // acceleration components in the (du, dv) basis).
    std::vector<double> H;       // stride = ambient_dim (2 for CurveOnSurface)
    std::vector<double> H_norm;  // |H| per vertex in the ambient/surface metric
    int h_stride = 0;
    std::vector<int> component;  // per-vertex component id
    std::vector<double> component_measure;
    double total_measure = 0.0;  // fixed-order sum of component measures
};

Measures measures(const Shape& s);

// Tangential gradient of the shape's field: per-edge derivative df/ds for
// curves, per-face gradient vectors for meshes.
std::vector<double> curve_edge_derivative(const Shape& s);
std::vector<Vec3> mesh_face_gradient(const TriMesh& m);

// Per-element |grad f|^2 / f with f taken as the geometric mean of the
// incident vertex values; integrates (against element measures) to the
// Dirichlet term.
std::vector<double> dirichlet_element_density(const Shape& s);

enum class Stratum { Vertex, Element };

// Integral of a field against dual (Vertex) or element (Element) measures.
// Throws std::invalid_argument when the field length does not match the
// requested stratum.
double integrate(const Shape& s, const Measures& m, const std::vector<double>& field,
                 Stratum stratum);

// --- generators (f is identically 1 unless set afterwards) ---

ClosedCurve make_circle(double radius, int n);
ClosedCurve make_ellipse(double ax, double by, int n);
ClosedCurve make_two_circles(double radius, double separation, int n_each);
ClosedCurve make_random_fourier_curve(std::uint64_t seed, int harmonics, int n);
TriMesh make_icosphere(double radius, int subdivisions);
TriMesh make_torus(double major_radius, double minor_radius, int n_major, int n_minor);
CurveOnSurface make_parallel_on_paraboloid(double a, double u0, int n);

// "circle:radius=1,n=64" style generator strings (used by the CLI and tests).
Shape make_shape(const std::string& spec);

}  // namespace logsob::submanifold
