#pragma once

#include <optional>
#include <string>

#include "logsob/abp.hpp"
#include "logsob/functional.hpp"
#include "logsob/submanifold.hpp"
#include "logsob/theta.hpp"

#include <nlohmann/json_fwd.hpp>

namespace logsob::io {

// Curve JSON: {"points": [[x, y], ...], "closed": true,
//              "f": [...] (optional, default 1),
//              "components": [...] (optional per-vertex ids, contiguous runs)}
// Curve-on-surface JSON: {"surface": {"kind": "paraboloid", "a": 1.0},
//                         "uv": [[u, v], ...], "f": [...] (optional)}
// Mesh: Wavefront OBJ (v/f, triangles) plus an optional CSV sidecar
// "vertex_index,f_value" with zero-based indices.

submanifold::Shape load_shape_file(const std::string& path,
                                   const std::optional<std::string>& mesh_field_csv = {});

// Generator spec ("circle:radius=1,n=64") or a path, by the presence of ':'.
submanifold::Shape load_shape(const std::string& spec_or_path,
                              const std::optional<std::string>& mesh_field_csv = {});

void save_shape(const submanifold::Shape& shape, const std::string& path);

void atomic_write(const std::string& path, const std::string& content);

// All numbers in emitted JSON/CSV are rounded to 12 significant digits.
nlohmann::ordered_json theta_json(const theta::ThetaEstimate& est, const std::string& model_desc);
std::string rho_csv(const theta::ThetaEstimate& est);

nlohmann::ordered_json deficit_json(const functional::DeficitReport& report, double eps_disc);
std::string deficit_csv(const functional::DeficitReport& report);

nlohmann::ordered_json abp_json(const abp::TransportSetup& setup, const abp::ContactAudit& contact,
                        const abp::CoverageAudit& coverage, const abp::ChainAudit& chain);
std::string margins_csv(const abp::ContactAudit& contact);

void write_json(const std::string& path, const nlohmann::ordered_json& j);

}  // namespace logsob::io
