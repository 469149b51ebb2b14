// mixlap: eigenpairs of the mixed Dirichlet-Neumann Laplacian on piecewise
// smooth planar domains, constrained vector-field eigenproblems, a mixed
// Helmholtz splitting and end-to-end verification reports.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixlap/analysis.hpp"
#include "mixlap/domain_io.hpp"
#include "mixlap/format.hpp"
#include "mixlap/helmholtz.hpp"
#include "mixlap/mesh_io.hpp"
#include "mixlap/report_json.hpp"

namespace {

using namespace mixlap;

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 2;
constexpr int kExitSolverFailure = 3;

struct Common {
    std::string domain_path;
    std::string mesh_path;  // optional import base
    double tol_kernel = 1e-8;
    double eig_tol = 1e-10;
    unsigned seed = 20240531u;
    bool verbose = false;
};

void log_verbose(const Common& c, const std::string& msg) {
    if (c.verbose) std::cerr << "mixlap: " << msg << "\n";
}

DomainFile load(const Common& c) {
    DomainFile df = load_domain(c.domain_path);
    if (df.rotation && *df.rotation != 0.0) {
        df.domain = df.domain.rotated(*df.rotation);
    }
    return df;
}

Mesh make_mesh(const Common& c, const DomainFile& df, double h) {
    if (!c.mesh_path.empty()) return import_mesh(c.mesh_path, df);
    return triangulate(df.domain, h);
}

EigenOptions eigen_options(const Common& c) {
    EigenOptions o;
    o.tol = c.eig_tol;
    o.seed = c.seed;
    return o;
}

std::vector<double> parse_levels(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.size() < 2) throw IoError("--levels requires at least two comma-separated sizes");
    return out;
}

void export_scalar_vtk(const Mesh& mesh, const ScalarEigenResult& res, const std::string& path) {
    std::vector<std::pair<std::string, std::vector<double>>> point_fields;
    for (int j = 0; j < static_cast<int>(res.eigenvalues.size()); ++j) {
        std::vector<double> f(static_cast<std::size_t>(mesh.node_count()));
        for (int i = 0; i < mesh.node_count(); ++i) f[static_cast<std::size_t>(i)] = res.eigenfunctions(i, j);
        point_fields.emplace_back("psi_" + std::to_string(j + 1), std::move(f));
    }
    const auto grad = gradient_field(mesh, res.eigenfunctions.col(0));
    export_vtk(mesh, point_fields, {{"grad_psi_1", grad}}, path);
}

std::vector<Vec2> builtin_field(const std::string& name, const Mesh& mesh,
                                const Common& c) {
    std::vector<Vec2> f(static_cast<std::size_t>(mesh.triangle_count()));
    if (name == "constant") {
        for (auto& v : f) v = {0.0, 1.0};
    } else if (name == "rotational") {
        for (int t = 0; t < mesh.triangle_count(); ++t) {
            const Vec2 p = mesh.centroid(t);
            f[static_cast<std::size_t>(t)] = {-p.y, p.x};
        }
    } else if (name == "radial") {
        for (int t = 0; t < mesh.triangle_count(); ++t)
            f[static_cast<std::size_t>(t)] = mesh.centroid(t);
    } else if (name == "gradient-of-first-eigenfunction") {
        const FormMatrices fm = assemble_scalar(mesh, DirichletPart::GammaC);
        const ScalarEigenResult res = solve_smallest_scalar(mesh, fm, 1, eigen_options(c));
        f = gradient_field(mesh, res.eigenfunctions.col(0));
    } else {
        // treat as a path to a legacy VTK file carrying CELL_DATA VECTORS
        std::ifstream in(name);
        if (!in) throw IoError("unknown built-in field and unreadable file: " + name);
        std::string line;
        bool in_vectors = false;
        std::vector<Vec2> vals;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string tok;
            ls >> tok;
            if (tok == "VECTORS") {
                in_vectors = true;
                continue;
            }
            if (in_vectors) {
                double x, y, z;
                std::istringstream vs(line);
                if (vs >> x >> y >> z)
                    vals.push_back({x, y});
                else
                    break;
            }
        }
        if (static_cast<int>(vals.size()) != mesh.triangle_count())
            throw IoError("field file does not carry one vector per triangle");
        f = std::move(vals);
    }
    return f;
}

void write_summary_csv(const std::vector<TheoremReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "domain,hyp_pass,rotation_found,rotation,lambda_gamma,lambda_gammac,eta1,"
           "inequality_margin,drift,kernel_dim,inequality,spectral_union,monotonicity,hotspot\n";
    for (const TheoremReport& r : reports) {
        const LevelData* fine = r.levels.empty() ? nullptr : &r.levels.back();
        out << r.domain_id << ',' << (r.hypotheses.all_pass() ? "1" : "0") << ','
            << (r.rotation_found ? "1" : "0") << ',' << format_double(r.rotation) << ','
            << (fine ? format_double(fine->lambda_gamma) : "") << ','
            << (fine ? format_double(fine->lambda_gammac) : "") << ','
            << (fine ? format_double(fine->eta1) : "") << ','
            << format_double(r.inequality_margin) << ',' << format_double(r.drift) << ','
            << (fine ? std::to_string(fine->kernel_dim) : "") << ',' << to_string(r.inequality)
            << ',' << to_string(r.spectral_union) << ',' << to_string(r.monotonicity) << ','
            << to_string(r.hotspot) << '\n';
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixed Dirichlet-Neumann Laplacian spectral toolkit"};
    app.require_subcommand(1);
    // --h is a domain-size flag below, so the help flag is long-form only
    app.set_help_flag("--help", "print help");

    Common common;
    app.add_option("--tol-kernel", common.tol_kernel, "relative kernel threshold")
        ->check(CLI::PositiveNumber);
    app.add_option("--eig-tol", common.eig_tol, "eigensolver residual tolerance")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", common.seed, "deterministic start-vector seed");
    app.add_flag("-v,--verbose", common.verbose, "progress output on stderr");

    // mesh
    auto* cmd_mesh = app.add_subcommand("mesh", "triangulate a domain and export .node/.ele");
    cmd_mesh->set_help_flag("--help", "print help");
    double mesh_h = 0.1;
    std::string mesh_out, mesh_vtk;
    cmd_mesh->add_option("--domain", common.domain_path, "domain file")->required();
    cmd_mesh->add_option("--h", mesh_h, "target edge length")->required()->check(CLI::PositiveNumber);
    cmd_mesh->add_option("--out", mesh_out, "output base path (.node/.ele)")->required();
    cmd_mesh->add_option("--vtk", mesh_vtk, "also write a VTK file");

    // solve-scalar
    auto* cmd_scalar = app.add_subcommand("solve-scalar", "mixed eigenpairs, P1 elements");
    cmd_scalar->set_help_flag("--help", "print help");
    std::string scalar_part = "gammac";
    double scalar_h = 0.1;
    int scalar_k = 1;
    std::string scalar_out, scalar_vtk;
    cmd_scalar->add_option("--domain", common.domain_path, "domain file")->required();
    cmd_scalar->add_option("--part", scalar_part, "Dirichlet part: gamma|gammac|all")
        ->check(CLI::IsMember({"gamma", "gammac", "all"}));
    cmd_scalar->add_option("--h", scalar_h, "target edge length")->required()->check(CLI::PositiveNumber);
    cmd_scalar->add_option("--k", scalar_k, "number of eigenpairs")->check(CLI::PositiveNumber);
    cmd_scalar->add_option("--out", scalar_out, "JSON report path")->required();
    cmd_scalar->add_option("--vtk", scalar_vtk, "VTK output with eigenfunctions");
    cmd_scalar->add_option("--mesh", common.mesh_path, "import a .node/.ele mesh instead of meshing");
    bool scalar_lumped = false;
    cmd_scalar->add_flag("--lumped-mass", scalar_lumped, "diagonal mass fallback");

    // solve-vector
    auto* cmd_vector = app.add_subcommand("solve-vector", "constrained vector-field eigenpairs");
    cmd_vector->set_help_flag("--help", "print help");
    double vector_h = 0.1;
    int vector_k = 4;
    std::string vector_form = "curvature", vector_out, vector_vtk;
    cmd_vector->add_option("--domain", common.domain_path, "domain file")->required();
    cmd_vector->add_option("--h", vector_h, "target edge length")->required()->check(CLI::PositiveNumber);
    cmd_vector->add_option("--k", vector_k, "number of eigenpairs")->check(CLI::PositiveNumber);
    cmd_vector->add_option("--form", vector_form, "curvature|divcurl|both")
        ->check(CLI::IsMember({"curvature", "divcurl", "both"}));
    cmd_vector->add_option("--out", vector_out, "JSON report path")->required();
    cmd_vector->add_option("--vtk", vector_vtk, "VTK output with the first positive eigenfield");
    cmd_vector->add_option("--mesh", common.mesh_path, "import a .node/.ele mesh instead of meshing");

    // helmholtz
    auto* cmd_hh = app.add_subcommand("helmholtz", "orthogonal splitting of a vector field");
    cmd_hh->set_help_flag("--help", "print help");
    double hh_h = 0.1;
    std::string hh_field = "constant", hh_out, hh_vtk;
    cmd_hh->add_option("--domain", common.domain_path, "domain file")->required();
    cmd_hh->add_option("--h", hh_h, "target edge length")->required()->check(CLI::PositiveNumber);
    cmd_hh->add_option("--field", hh_field,
                       "constant|rotational|radial|gradient-of-first-eigenfunction or a VTK path");
    cmd_hh->add_option("--out", hh_out, "JSON report path")->required();
    cmd_hh->add_option("--vtk", hh_vtk, "VTK output with the three parts");

    // check
    auto* cmd_check = app.add_subcommand("check", "geometric hypothesis report");
    cmd_check->set_help_flag("--help", "print help");
    std::string check_out;
    double check_rotation = 0.0;
    bool check_find = false;
    cmd_check->add_option("--domain", common.domain_path, "domain file")->required();
    cmd_check->add_option("--rotation", check_rotation, "rotation to apply (radians)");
    cmd_check->add_flag("--find-rotation", check_find, "search for a compliant rotation first");
    cmd_check->add_option("--out", check_out, "JSON report path")->required();

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "full theorem suite on one domain");
    cmd_verify->set_help_flag("--help", "print help");
    std::string verify_levels, verify_out;
    int verify_k = 4;
    cmd_verify->add_option("--domain", common.domain_path, "domain file")->required();
    cmd_verify->add_option("--levels", verify_levels, "comma-separated mesh sizes")->required();
    cmd_verify->add_option("--k", verify_k, "vector eigenpair count")->check(CLI::PositiveNumber);
    cmd_verify->add_option("--out", verify_out, "JSON report path")->required();

    // verify-all
    auto* cmd_all = app.add_subcommand("verify-all", "theorem suite over a corpus directory");
    cmd_all->set_help_flag("--help", "print help");
    std::string all_corpus, all_outdir, all_divisors = "8,16,32,64";
    cmd_all->add_option("--corpus", all_corpus, "directory of domain files")->required();
    cmd_all->add_option("--out-dir", all_outdir, "output directory")->required();
    cmd_all->add_option("--divisors", all_divisors,
                        "per-domain levels as diameter divisors (comma separated)");

    // export-vtk
    auto* cmd_vtk = app.add_subcommand("export-vtk", "triangulate and write a VTK mesh");
    cmd_vtk->set_help_flag("--help", "print help");
    double vtk_h = 0.1;
    std::string vtk_out;
    cmd_vtk->add_option("--domain", common.domain_path, "domain file")->required();
    cmd_vtk->add_option("--h", vtk_h, "target edge length")->required()->check(CLI::PositiveNumber);
    cmd_vtk->add_option("--out", vtk_out, "VTK output path")->required();
    cmd_vtk->add_option("--mesh", common.mesh_path, "import a .node/.ele mesh instead of meshing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitInvalidInput;
    }

    try {
        if (cmd_mesh->parsed()) {
            const DomainFile df = load(common);
            const Mesh mesh = make_mesh(common, df, mesh_h);
            log_verbose(common, "meshed " + std::to_string(mesh.node_count()) + " nodes, " +
                                    std::to_string(mesh.triangle_count()) + " triangles");
            export_triangle(mesh, df.domain, mesh_out);
            if (!mesh_vtk.empty()) export_vtk(mesh, {}, {}, mesh_vtk);
        } else if (cmd_scalar->parsed()) {
            const DomainFile df = load(common);
            const Mesh mesh = make_mesh(common, df, scalar_h);
            const DirichletPart part = scalar_part == "gamma"
                                           ? DirichletPart::Gamma
                                           : (scalar_part == "all" ? DirichletPart::All
                                                                   : DirichletPart::GammaC);
            const FormMatrices fm = assemble_scalar(mesh, part, scalar_lumped);
            const ScalarEigenResult res =
                solve_smallest_scalar(mesh, fm, scalar_k, eigen_options(common));
            log_verbose(common, "scalar solve converged in " + std::to_string(res.iterations) +
                                    " iterations");
            OrderedJson j;
            j["subcommand"] = "solve-scalar";
            j["domain"] = common.domain_path;
            j["part"] = scalar_part;
            j["h"] = scalar_h;
            j["k"] = scalar_k;
            j["result"] = to_json(res, mesh);
            const auto grad = gradient_field(mesh, res.eigenfunctions.col(0));
            j["monotonicity"] = to_json(monotonicity_report(grad));
            j["hotspot"] = to_json(hotspot_report(mesh, df.domain, res.eigenfunctions.col(0)));
            write_json(j, scalar_out);
            if (!scalar_vtk.empty()) export_scalar_vtk(mesh, res, scalar_vtk);
        } else if (cmd_vector->parsed()) {
            const DomainFile df = load(common);
            const Mesh mesh = make_mesh(common, df, vector_h);
            const ConstraintMap cm = build_constraints(mesh, df.domain);
            OrderedJson j;
            j["subcommand"] = "solve-vector";
            j["domain"] = common.domain_path;
            j["h"] = vector_h;
            j["k"] = vector_k;
            j["form"] = vector_form;
            j["form_hypotheses_pass"] = check_hypotheses(df.domain, 0.0).form_hypotheses_ok();
            std::optional<VectorEigenResult> curv_res, dc_res;
            if (vector_form != "divcurl") {
                const FormMatrices fm = assemble_curvature(mesh, cm, df.domain);
                curv_res = solve_vector_evp(fm, vector_k, common.tol_kernel,
                                            VectorForm::Curvature, eigen_options(common));
                j["curvature"] = to_json(*curv_res);
            }
            if (vector_form != "curvature") {
                const FormMatrices fm = assemble_divcurl(mesh, cm);
                dc_res = solve_vector_evp(fm, vector_k, common.tol_kernel, VectorForm::DivCurl,
                                          eigen_options(common));
                j["divcurl"] = to_json(*dc_res);
            }
            if (vector_form == "both") {
                const FormMatrices fmc = assemble_curvature(mesh, cm, df.domain);
                const FormMatrices fmd = assemble_divcurl(mesh, cm);
                const FormComparison c =
                    compare_forms(curv_res->reduced.col(curv_res->kernel_dim), fmd, fmc);
                j["form_comparison"] = {{"divcurl_value", c.divcurl_value},
                                        {"curvature_value", c.curvature_value},
                                        {"relative_gap", c.relative_gap}};
            }
            write_json(j, vector_out);
            if (!vector_vtk.empty()) {
                const VectorEigenResult& r = curv_res ? *curv_res : *dc_res;
                const auto nf = nodal_field(r.full.col(r.kernel_dim));
                std::vector<double> u1(static_cast<std::size_t>(mesh.node_count())),
                    u2(static_cast<std::size_t>(mesh.node_count()));
                std::vector<Vec2> cellavg(static_cast<std::size_t>(mesh.triangle_count()));
                for (int i = 0; i < mesh.node_count(); ++i) {
                    u1[static_cast<std::size_t>(i)] = nf[static_cast<std::size_t>(i)].x;
                    u2[static_cast<std::size_t>(i)] = nf[static_cast<std::size_t>(i)].y;
                }
                for (int t = 0; t < mesh.triangle_count(); ++t) {
                    Vec2 acc{0, 0};
                    for (int kk = 0; kk < 3; ++kk)
                        acc += nf[static_cast<std::size_t>(
                            mesh.triangles[static_cast<std::size_t>(t)][static_cast<std::size_t>(kk)])];
                    cellavg[static_cast<std::size_t>(t)] = acc / 3.0;
                }
                export_vtk(mesh, {{"u1", u1}, {"u2", u2}}, {{"u", cellavg}}, vector_vtk);
            }
        } else if (cmd_hh->parsed()) {
            const DomainFile df = load(common);
            const Mesh mesh = make_mesh(common, df, hh_h);
            const std::vector<Vec2> field = builtin_field(hh_field, mesh, common);
            const DecompositionResult res = decompose(field, mesh, df.domain);
            OrderedJson j;
            j["subcommand"] = "helmholtz";
            j["domain"] = common.domain_path;
            j["h"] = hh_h;
            j["field"] = hh_field;
            j["result"] = to_json(res);
            j["hc_dim_estimate"] = estimate_hc_dim(mesh, df.domain, common.tol_kernel);
            write_json(j, hh_out);
            if (!hh_vtk.empty()) {
                export_vtk(mesh, {},
                           {{"input", field},
                            {"grad_psi", res.grad_psi},
                            {"perp_grad_phi", res.perp_grad_phi},
                            {"residual", res.residual}},
                           hh_vtk);
            }
        } else if (cmd_check->parsed()) {
            const DomainFile df = load(common);
            OrderedJson j;
            j["subcommand"] = "check";
            j["domain"] = common.domain_path;
            if (check_find) {
                const auto rot = find_rotation(df.domain);
                j["rotation_found"] = rot.has_value();
                j["rotation"] = rot.value_or(0.0);
                j["report"] = to_json(check_hypotheses(df.domain, rot.value_or(check_rotation)));
            } else {
                j["rotation_found"] = true;
                j["rotation"] = check_rotation;
                j["report"] = to_json(check_hypotheses(df.domain, check_rotation));
            }
            write_json(j, check_out);
        } else if (cmd_verify->parsed()) {
            const DomainFile df = load(common);
            SuiteOptions so;
            so.k_vector = verify_k;
            so.tol_kernel = common.tol_kernel;
            so.seed = common.seed;
            TheoremReport rep = run_theorem_suite(df.domain, parse_levels(verify_levels), so);
            rep.domain_id = std::filesystem::path(common.domain_path).stem().string();
            OrderedJson j;
            j["subcommand"] = "verify";
            j["report"] = to_json(rep);
            write_json(j, verify_out);
            if (!rep.error.empty()) {
                std::cerr << "mixlap: sub-solve failure recorded: " << rep.error << "\n";
                return kExitSolverFailure;
            }
        } else if (cmd_all->parsed()) {
            std::vector<std::string> files;
            for (const auto& entry : std::filesystem::directory_iterator(all_corpus))
                if (entry.path().extension() == ".json") files.push_back(entry.path().string());
            std::sort(files.begin(), files.end());
            if (files.empty()) throw IoError("no domain files in corpus directory");
            std::filesystem::create_directories(all_outdir);
            std::vector<double> divisors;
            for (double v : parse_levels(all_divisors)) divisors.push_back(v);
            std::vector<TheoremReport> reports;
            for (const std::string& f : files) {
                DomainFile df = load_domain(f);
                if (df.rotation && *df.rotation != 0.0) df.domain = df.domain.rotated(*df.rotation);
                std::vector<double> levels;
                for (double dv : divisors) levels.push_back(df.domain.diameter() / dv);
                SuiteOptions so;
                so.tol_kernel = common.tol_kernel;
                so.seed = common.seed;
                TheoremReport rep = run_theorem_suite(df.domain, levels, so);
                rep.domain_id = std::filesystem::path(f).stem().string();
                log_verbose(common, "verified " + rep.domain_id);
                OrderedJson j;
                j["subcommand"] = "verify";
                j["report"] = to_json(rep);
                write_json(j, (std::filesystem::path(all_outdir) / (rep.domain_id + ".json")).string());
                reports.push_back(std::move(rep));
            }
            write_summary_csv(reports, (std::filesystem::path(all_outdir) / "summary.csv").string());
        } else if (cmd_vtk->parsed()) {
            const DomainFile df = load(common);
            const Mesh mesh = make_mesh(common, df, vtk_h);
            std::vector<double> on_gamma(static_cast<std::size_t>(mesh.node_count()), 0.0);
            for (const BoundaryEdge& e : mesh.boundary_edges) {
                if (e.label == BoundaryLabel::Gamma) {
                    on_gamma[static_cast<std::size_t>(e.a)] = 1.0;
                    on_gamma[static_cast<std::size_t>(e.b)] = 1.0;
                }
            }
            export_vtk(mesh, {{"on_gamma", on_gamma}}, {}, vtk_out);
        }
    } catch (const IoError& e) {
        std::cerr << "mixlap: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const GeometryError& e) {
        std::cerr << "mixlap: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const MeshError& e) {
        std::cerr << "mixlap: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const SolverError& e) {
        std::cerr << "mixlap: " << e.what() << "\n";
        return kExitSolverFailure;
    } catch (const std::exception& e) {
        std::cerr << "mixlap: " << e.what() << "\n";
        return kExitSolverFailure;
    }
    return kExitOk;
}
