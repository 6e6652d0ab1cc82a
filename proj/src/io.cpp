#include "logsob/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace logsob::io {

using nlohmann::ordered_json;

namespace {

double round12(double v) {
    return std::strtod(fmt12(v).c_str(), nullptr);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

submanifold::Shape curve_from_json(const ordered_json& j) {
    if (j.contains("surface")) {
        submanifold::CurveOnSurface cs;
        const auto& surf = j.at("surface");
        if (surf.at("kind").get<std::string>() != "paraboloid")
            throw unsupported_error("curve-on-surface input supports the paraboloid only");
        cs.surface = ambient::Model::paraboloid(surf.at("a").get<double>());
        for (const auto& uv : j.at("uv")) {
            cs.u.push_back(uv.at(0).get<double>());
            cs.v.push_back(uv.at(1).get<double>());
        }
        cs.f = j.contains("f") ? j.at("f").get<std::vector<double>>()
                               : std::vector<double>(cs.u.size(), 1.0);
        submanifold::Shape s = cs;
        submanifold::validate(s);
        return s;
    }

    if (j.contains("closed") && !j.at("closed").get<bool>())
        throw std::invalid_argument("only closed curves are supported");
    submanifold::ClosedCurve c;
    const auto& pts = j.at("points");
    if (pts.empty()) throw std::invalid_argument("curve has no points");
    c.ambient_dim = static_cast<int>(pts.front().size());
    for (const auto& p : pts) {
        if (static_cast<int>(p.size()) != c.ambient_dim)
            throw std::invalid_argument("curve points have mixed dimensions");
        for (const auto& x : p) c.coords.push_back(x.get<double>());
    }
    const std::size_t n = pts.size();
    c.f = j.contains("f") ? j.at("f").get<std::vector<double>>() : std::vector<double>(n, 1.0);
    if (c.f.size() != n) throw std::invalid_argument("curve f length mismatch");

    c.loop_offsets = {0};
    if (j.contains("components")) {
        const auto ids = j.at("components").get<std::vector<int>>();
        if (ids.size() != n) throw std::invalid_argument("curve components length mismatch");
        for (std::size_t i = 1; i < n; ++i) {
            if (ids[i] == ids[i - 1]) continue;
            for (std::size_t k = 0; k < i; ++k)
                if (ids[k] == ids[i])
                    throw std::invalid_argument("curve component ids must be contiguous runs");
            c.loop_offsets.push_back(i);
        }
    }
    c.loop_offsets.push_back(n);
    submanifold::Shape s = c;
    submanifold::validate(s);
    return s;
}

submanifold::TriMesh mesh_from_obj(const std::string& obj_text) {
    submanifold::TriMesh m;
    std::istringstream in(obj_text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x >> p.y >> p.z)) throw std::invalid_argument("bad OBJ vertex: " + line);
            m.vertices.push_back(p);
        } else if (tag == "f") {
            std::array<int, 3> fc{};
            std::string tok;
            int got = 0;
            while (ls >> tok) {
                if (got >= 3)
                    throw std::invalid_argument("OBJ faces must be triangles: " + line);
                // accept v, v/vt, v/vt/vn, v//vn
                fc[got++] = std::stoi(tok.substr(0, tok.find('/'))) - 1;
            }
            if (got != 3) throw std::invalid_argument("bad OBJ face: " + line);
            m.faces.push_back(fc);
        }
    }
    m.f.assign(m.vertices.size(), 1.0);
    return m;
}

void apply_field_csv(submanifold::TriMesh& m, const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!std::isdigit(static_cast<unsigned char>(line[0])) && line[0] != ' ') continue;  // header
        std::istringstream ls(line);
        std::string idx_s, val_s;
        if (!std::getline(ls, idx_s, ',') || !std::getline(ls, val_s))
            throw std::invalid_argument("bad field CSV line: " + line);
        const std::size_t idx = std::stoul(idx_s);
        if (idx >= m.f.size())
            throw std::invalid_argument("field CSV vertex index out of range: " + idx_s);
        m.f[idx] = std::stod(val_s);
    }
}

}  // namespace

submanifold::Shape load_shape_file(const std::string& path,
                                   const std::optional<std::string>& mesh_field_csv) {
    if (ends_with(path, ".obj")) {
        auto m = mesh_from_obj(slurp(path));
        std::string csv = mesh_field_csv ? *mesh_field_csv : path.substr(0, path.size() - 4) + ".f.csv";
        if (std::ifstream probe(csv); probe) apply_field_csv(m, slurp(csv));
        submanifold::Shape s = m;
        submanifold::validate(s);
        return s;
    }
    ordered_json j;
    try {
        j = ordered_json::parse(slurp(path));
    } catch (const ordered_json::parse_error& e) {
        throw std::invalid_argument("malformed JSON in '" + path + "': " + e.what());
    }
    return curve_from_json(j);
}

submanifold::Shape load_shape(const std::string& spec_or_path,
                              const std::optional<std::string>& mesh_field_csv) {
    if (spec_or_path.find(':') != std::string::npos && spec_or_path.find(".json") == std::string::npos &&
        spec_or_path.find(".obj") == std::string::npos)
        return submanifold::make_shape(spec_or_path);
    return load_shape_file(spec_or_path, mesh_field_csv);
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "'");
}

void save_shape(const submanifold::Shape& shape, const std::string& path) {
    if (const auto* m = std::get_if<submanifold::TriMesh>(&shape)) {
        if (!ends_with(path, ".obj"))
            throw std::invalid_argument("meshes are saved as .obj (+ .f.csv sidecar)");
        std::ostringstream obj;
        for (const auto& v : m->vertices)
            obj << "v " << fmt12(v.x) << ' ' << fmt12(v.y) << ' ' << fmt12(v.z) << '\n';
        for (const auto& fc : m->faces)
            obj << "f " << fc[0] + 1 << ' ' << fc[1] + 1 << ' ' << fc[2] + 1 << '\n';
        atomic_write(path, obj.str());
        std::ostringstream csv;
        csv << "vertex_index,f_value\n";
        for (std::size_t i = 0; i < m->f.size(); ++i) csv << i << ',' << fmt12(m->f[i]) << '\n';
        atomic_write(path.substr(0, path.size() - 4) + ".f.csv", csv.str());
        return;
    }
    ordered_json j;
    if (const auto* c = std::get_if<submanifold::ClosedCurve>(&shape)) {
        j["points"] = ordered_json::array();
        for (std::size_t i = 0; i < c->vertex_count(); ++i) {
            ordered_json p = ordered_json::array();
            for (int k = 0; k < c->ambient_dim; ++k) p.push_back(round12(c->vertex(i)[k]));
            j["points"].push_back(p);
        }
        j["closed"] = true;
        j["f"] = ordered_json::array();
        for (double v : c->f) j["f"].push_back(round12(v));
        ordered_json comp = ordered_json::array();
        for (std::size_t l = 0; l + 1 < c->loop_offsets.size(); ++l)
            for (std::size_t i = c->loop_offsets[l]; i < c->loop_offsets[l + 1]; ++i)
                comp.push_back(static_cast<int>(l));
        j["components"] = comp;
    } else {
        const auto& cs = std::get<submanifold::CurveOnSurface>(shape);
        j["surface"] = {{"kind", "paraboloid"}, {"a", round12(cs.surface.a)}};
        j["uv"] = ordered_json::array();
        for (std::size_t i = 0; i < cs.u.size(); ++i)
            j["uv"].push_back({round12(cs.u[i]), round12(cs.v[i])});
        j["f"] = ordered_json::array();
        for (double v : cs.f) j["f"].push_back(round12(v));
    }
    atomic_write(path, j.dump(2) + "\n");
}

ordered_json theta_json(const theta::ThetaEstimate& est, const std::string& model_desc) {
    ordered_json j;
    j["model"] = model_desc;
    j["r_grid"] = ordered_json::array();
    for (double r : est.r_grid) j["r_grid"].push_back(round12(r));
    j["rho_values"] = ordered_json::array();
    for (double v : est.rho_values) j["rho_values"].push_back(round12(v));
    j["extrapolated_theta"] = round12(est.extrapolated_theta);
    j["monotone_flag"] = est.monotone_flag;
    j["tail_bound_used"] = round12(est.tail_bound_used);
    j["condition_P_satisfied"] = est.condition_p_satisfied;
    j["fit"] = {{"alpha", round12(est.fit_alpha)},
                {"c", round12(est.fit_c)},
                {"stderr", round12(est.fit_stderr)}};
    j["notes"] = est.notes;
    return j;
}

std::string rho_csv(const theta::ThetaEstimate& est) {
    std::ostringstream out;
    out << "r,rho,monotone_ok\n";
    for (std::size_t i = 0; i < est.r_grid.size(); ++i) {
        const bool ok = i == 0 || est.rho_values[i] <= est.rho_values[i - 1] + 1e-6;
        out << fmt12(est.r_grid[i]) << ',' << fmt12(est.rho_values[i]) << ',' << (ok ? 1 : 0)
            << '\n';
    }
    return out.str();
}

namespace {

ordered_json component_json(const functional::ComponentReport& c) {
    return ordered_json{{"mass", round12(c.mass)},
                        {"entropy_term", round12(c.entropy_term)},
                        {"dirichlet_term", round12(c.dirichlet_term)},
                        {"curvature_term", round12(c.curvature_term)},
                        {"rhs", round12(c.rhs)},
                        {"deficit", round12(c.deficit)}};
}

}  // namespace

ordered_json deficit_json(const functional::DeficitReport& report, double eps_disc) {
    ordered_json j;
    j["shape_checksum"] = hex64(report.shape_checksum);
    j["n"] = report.n;
    j["theta_used"] = round12(report.theta_used);
    j["whole"] = component_json(report.whole);
    j["components"] = ordered_json::array();
    for (const auto& c : report.components) j["components"].push_back(component_json(c));
    j["eps_disc"] = round12(eps_disc);
    j["pass_nonneg"] = report.whole.deficit >= -eps_disc * report.whole.mass;
    return j;
}

std::string deficit_csv(const functional::DeficitReport& report) {
    std::ostringstream out;
    out << "term,value\n";
    out << "mass," << fmt12(report.whole.mass) << '\n';
    out << "entropy_term," << fmt12(report.whole.entropy_term) << '\n';
    out << "dirichlet_term," << fmt12(report.whole.dirichlet_term) << '\n';
    out << "curvature_term," << fmt12(report.whole.curvature_term) << '\n';
    out << "rhs," << fmt12(report.whole.rhs) << '\n';
    out << "deficit," << fmt12(report.whole.deficit) << '\n';
    return out.str();
}

ordered_json abp_json(const abp::TransportSetup& setup, const abp::ContactAudit& contact,
              const abp::CoverageAudit& coverage, const abp::ChainAudit& chain) {
    ordered_json j;
    j["shape_checksum"] = hex64(setup.curve.checksum);
    j["r"] = round12(setup.r);
    j["lambda"] = round12(setup.lambda);
    j["solver"] = {{"residual", round12(setup.solver_residual)},
                   {"residual_scale", round12(setup.residual_scale)},
                   {"compatibility", round12(setup.compatibility)},
                   {"projection_magnitude", round12(setup.projection_magnitude)}};
    j["contact"] = {{"records", contact.records.size()},
                    {"ymax", round12(contact.ymax)},
                    {"dy", round12(contact.dy)},
                    {"min_slack", round12(contact.min_slack)},
                    {"max_lemma31_gap", round12(contact.max_lemma31_gap)},
                    {"min_psd", round12(contact.min_psd)},
                    {"max_jac_mismatch", round12(contact.max_jac_mismatch)},
                    {"min_l37_margin_rel", round12(contact.min_l37_margin_rel)},
                    {"lemma31_pass", contact.lemma31_pass},
                    {"psd_pass", contact.psd_pass},
                    {"jac_pass", contact.jac_pass},
                    {"l37_pass", contact.l37_pass}};
    j["coverage"] = {{"targets", coverage.targets},
                     {"passed", coverage.passed},
                     {"disk_radius", round12(coverage.disk_radius)},
                     {"pass", coverage.pass}};
    j["chain"] = {{"lhs", round12(chain.lhs)},
                  {"rhs", round12(chain.rhs)},
                  {"ratio", round12(chain.ratio)},
                  {"rho_lhs", round12(chain.rho_lhs)},
                  {"tail_bound", round12(chain.tail_bound)},
                  {"truncation_radius", round12(chain.truncation_radius)},
                  {"cells", chain.cells},
                  {"pass", chain.pass}};
    j["pass"] = contact.lemma31_pass && contact.psd_pass && contact.jac_pass &&
                contact.l37_pass && coverage.pass && chain.pass;
    return j;
}

std::string margins_csv(const abp::ContactAudit& contact) {
    std::ostringstream out;
    out << "vertex,y,slack,lemma31_gap,psd_value,jac_closed,jac_fd,jac_mismatch,"
           "l37_lhs,l37_rhs,l37_margin_rel\n";
    for (const auto& r : contact.records)
        out << r.vertex << ',' << fmt12(r.y) << ',' << fmt12(r.slack) << ','
            << fmt12(r.lemma31_gap) << ',' << fmt12(r.psd_value) << ',' << fmt12(r.jac_closed)
            << ',' << fmt12(r.jac_fd) << ',' << fmt12(r.jac_mismatch) << ',' << fmt12(r.l37_lhs)
            << ',' << fmt12(r.l37_rhs) << ',' << fmt12(r.l37_margin_rel) << '\n';
    return out.str();
}

void write_json(const std::string& path, const ordered_json& j) {
    atomic_write(path, j.dump(2) + "\n");
}

}  // namespace logsob::io
