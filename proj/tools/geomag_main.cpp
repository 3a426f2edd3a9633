// geomag: forward synthesis, reconstruction, polarization tensors and
// self-validation for the anomaly secular-variation model.
//
// Exit codes: 0 success, 2 validation failure, 3 numeric/optimizer failure,
// 4 I/O or parse failure.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "geomag/inverse.hpp"
#include "geomag/sample_io.hpp"

namespace {

using namespace geomag;
using nlohmann::json;

constexpr const char* kVersion = "1.0.0";

int thread_cap() {
    const char* env = std::getenv("GEOMAG_THREADS");
    if (!env) return 0;
    const int n = std::atoi(env);
    return n > 0 ? n : 0;
}

struct Manifest {
    std::string tool_version = kVersion;
    std::string config_hash;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    double timing_s = 0.0;
    std::vector<std::string> warnings;

    void write(const std::string& path) const {
        json j;
        j["tool_version"] = tool_version;
        j["config_hash"] = config_hash;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        j["timing_s"] = timing_s;
        j["warnings"] = warnings;
        std::ofstream out(path);
        if (!out) throw IoError("cannot write manifest: " + path);
        out << j.dump(2) << '\n';
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<PolarizationSet> scene_tensors(const Scene& scene) {
    std::vector<PolarizationSet> tensors;
    tensors.reserve(scene.anomalies.size());
    for (const Anomaly& a : scene.anomalies) {
        if (a.shape == AnomalyShape::Ball) {
            tensors.push_back(analytic_ball_tensors(scene.materials, a.material));
        } else {
            const NPOperator op = assemble_K_star(load_mesh(a.mesh_path));
            tensors.push_back(compute_tensors(op, scene.materials, a.material));
        }
    }
    return tensors;
}

int cmd_simulate(const std::string& config_path, const std::string& out_prefix) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string config_text = slurp(config_path);
    const ScenarioConfig cfg = parse_scenario_json(config_text);
    const std::string hash = scene_hash(config_text);

    const ValidationReport report = validate_scene(cfg.scene);
    Manifest manifest;
    manifest.config_hash = hash;
    manifest.inputs = {config_path};
    for (const ValidationItem& item : report.items) {
        manifest.warnings.push_back(item.code + ": " + item.message);
    }
    if (!report.ok()) {
        std::cerr << "scene validation failed:\n";
        for (const ValidationItem& item : report.items) {
            std::cerr << "  [" << (item.fatal ? "error" : "warn") << "] "
                      << item.code << ": " << item.message << '\n';
        }
        manifest.write(out_prefix + ".manifest.json");
        return 2;
    }

    const auto tensors = scene_tensors(cfg.scene);
    const auto weights = dipole_weights(cfg.scene, tensors);
    const QuadRule quad = sphere_quadrature(cfg.quad_level);

    const auto delta_samples = synthesize_measurement(
        cfg.scene, weights, quad, Epoch::Delta, cfg.noise_rel, cfg.seed);
    const std::string delta_csv = out_prefix + ".delta.csv";
    write_samples(delta_csv, delta_samples, cfg.quad_level, hash);
    manifest.outputs = {delta_csv, delta_csv + ".meta.json"};

    if (cfg.with_epoch0) {
        const auto epoch0_samples = synthesize_measurement(
            cfg.scene, weights, quad, Epoch::Epoch0, cfg.noise_rel, cfg.seed + 1);
        const std::string epoch0_csv = out_prefix + ".epoch0.csv";
        write_samples(epoch0_csv, epoch0_samples, cfg.quad_level, hash);
        manifest.outputs.push_back(epoch0_csv);
        manifest.outputs.push_back(epoch0_csv + ".meta.json");
    }

    manifest.timing_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest.write(out_prefix + ".manifest.json");
    std::cout << "wrote " << manifest.outputs.size() << " files under "
              << out_prefix << "\n";
    return 0;
}

int cmd_reconstruct(const std::string& delta_csv, const std::string& epoch0_csv,
                    int l0, double delta, int nmax, const std::string& out_json,
                    const std::string& config_path) {
    const auto t0 = std::chrono::steady_clock::now();
    Manifest manifest;
    manifest.inputs = {delta_csv};

    const LoadedSamples loaded = read_samples(delta_csv);
    LoadedSamples loaded0;
    const VectorFieldSamples* epoch0 = nullptr;
    if (!epoch0_csv.empty()) {
        loaded0 = read_samples(epoch0_csv);
        manifest.inputs.push_back(epoch0_csv);
        if (loaded0.samples.values.size() != loaded.samples.values.size() ||
            loaded0.meta.quad_level != loaded.meta.quad_level ||
            loaded0.meta.radius != loaded.meta.radius) {
            throw IoError("reconstruct: delta and epoch0 samples use different "
                          "quadratures");
        }
        epoch0 = &loaded0.samples;
    }

    ReconstructionOptions options;
    options.nmax = nmax;
    ScenarioConfig cfg;
    std::optional<NPOperator> mesh_op;
    if (!config_path.empty()) {
        cfg = parse_scenario_file(config_path);
        manifest.inputs.push_back(config_path);
        options.background = &cfg.scene.background;
        options.materials = &cfg.scene.materials;
        if (!cfg.scene.anomalies.empty() &&
            cfg.scene.anomalies.front().shape == AnomalyShape::Mesh) {
            mesh_op.emplace(
                assemble_K_star(load_mesh(cfg.scene.anomalies.front().mesh_path)));
            options.mesh_op = &*mesh_op;
        }
    }

    const ReconstructionResult result =
        reconstruct_multi(loaded.samples, epoch0, l0, delta, options);
    write_result_json(out_json, result);

    manifest.config_hash = loaded.meta.scene_hash;
    manifest.outputs = {out_json};
    manifest.warnings = result.warnings;
    manifest.timing_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest.write(out_json + ".manifest.json");
    std::cout << "residual " << result.residual << ", wrote " << out_json << "\n";
    return 0;
}

int cmd_tensors(const std::string& shape, double mu, double eps, double sigma,
                double eps_shell, double mu0, double eps0, double omega,
                int refinement, const std::string& out_json) {
    const auto t0 = std::chrono::steady_clock::now();
    Materials mat;
    mat.mu0 = mu0;
    mat.eps0 = eps0;
    mat.eps_s = eps_shell;
    mat.omega = omega;
    mat.anomalies.push_back({mu, eps, sigma});

    const LambdaParams lam = lambda_params(mat, 0);
    const NonsingularityDiagnostic diag = check_nonsingular(mat, 0);

    const TriMesh mesh =
        shape == "ball" ? make_unit_sphere_mesh(refinement) : load_mesh(shape);
    const NPOperator op = assemble_K_star(mesh);
    const PolarizationSet bem = compute_tensors(op, mat, 0);

    json j;
    auto put = [&j](const char* name, const CMat3& t) {
        json re = json::array(), im = json::array();
        for (int r = 0; r < 3; ++r) {
            json rre = json::array(), rim = json::array();
            for (int c = 0; c < 3; ++c) {
                rre.push_back(t(r, c).real());
                rim.push_back(t(r, c).imag());
            }
            re.push_back(rre);
            im.push_back(rim);
        }
        j[name] = {{"re", re}, {"im", im}};
    };
    put("P0", bem.P0);
    put("D", bem.D);
    put("M", bem.M);
    put("P", bem.P);
    j["lambda"] = {{"gamma_re", lam.lambda_gamma.real()},
                   {"gamma_im", lam.lambda_gamma.imag()},
                   {"mu", lam.lambda_mu},
                   {"eps", lam.lambda_eps}};
    j["nonsingular"] = diag.nonsingular;
    j["condition_value_re"] = diag.condition_value.real();
    j["condition_value_im"] = diag.condition_value.imag();

    if (shape == "ball") {
        const PolarizationSet exact = analytic_ball_tensors(mat, 0);
        const double rel = (bem.P - exact.P).norm() / exact.P.norm();
        j["ball_bem_vs_analytic_rel_error"] = rel;
        std::cout << "ball BEM vs analytic relative error: " << rel << "\n";
    }

    std::ofstream out(out_json);
    if (!out) throw IoError("cannot write: " + out_json);
    out << j.dump(2) << '\n';

    Manifest manifest;
    manifest.outputs = {out_json};
    manifest.timing_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest.write(out_json + ".manifest.json");
    return 0;
}

struct CheckTable {
    bool all_ok = true;
    void row(const std::string& module, const std::string& name, bool ok,
             double observed, double bound) {
        all_ok = all_ok && ok;
        std::printf("%-12s %-38s %s  (observed %.3e, bound %.3e)\n",
                    module.c_str(), name.c_str(), ok ? "PASS" : "FAIL", observed,
                    bound);
    }
};

int cmd_validate(const std::string& level) {
    CheckTable table;
    const QuadRule quad = sphere_quadrature(10);

    {
        double worst = 0.0;
        for (int n = 0; n <= 6; ++n) {
            for (int np = 0; np <= 6; ++np) {
                for (int m = -n; m <= n; ++m) {
                    for (int mp = -np; mp <= np; ++mp) {
                        Complex acc(0.0);
                        for (const QuadNode& node : quad.nodes) {
                            acc += node.weight * eval_ynm(n, m, node.dir) *
                                   std::conj(eval_ynm(np, mp, node.dir));
                        }
                        const double expect = (n == np && m == mp) ? 1.0 : 0.0;
                        worst = std::max(worst, std::abs(acc - expect));
                    }
                }
            }
        }
        table.row("sphharm", "Y orthonormality n<=6", worst <= 1e-10, worst, 1e-10);
    }
    {
        double worst = 0.0;
        for (int n = 1; n <= 4; ++n) {
            double acc = 0.0;
            for (const QuadNode& node : quad.nodes) {
                acc += node.weight * eval_grad_s_ynm(n, 1, node.dir).squaredNorm();
            }
            worst = std::max(worst, std::abs(acc - n * (n + 1.0)));
        }
        table.row("sphharm", "grad_s norm n(n+1)", worst <= 1e-9, worst, 1e-9);
    }
    {
        const Vec3 x(1.1, -0.4, 0.8), z(0.2, 0.1, -0.15);
        const CMat3 direct = hessian_gamma0(x - z).cast<Complex>();
        const double rel =
            (kernel_multipole_hess(x, z, 25) - direct).norm() / direct.norm();
        table.row("forward", "Hessian multipole N=25", rel <= 1e-8, rel, 1e-8);
    }
    {
        // the injected printed-lambda_eps typo breaks the ball oracle
        Materials mat;
        mat.eps_s = 2.0;
        mat.anomalies.push_back({2.0, 1.0, 0.0});
        const double bad_lambda_eps = 0.5; // printed (eps_s-eps0)/(2(eps_s-eps0))
        const double p0_bad = 4.0 * M_PI / 3.0 / (bad_lambda_eps - 1.0 / 6.0);
        const double p0_good =
            analytic_ball_tensors(mat, 0).P0(0, 0).real();
        const double diff = std::abs(p0_bad - p0_good) / std::abs(p0_good);
        table.row("polarization", "printed lambda_eps negative control",
                  diff > 0.1, diff, 0.1);
    }

    if (level == "full") {
        {
            const NPOperator op = assemble_K_star(make_unit_sphere_mesh(2));
            const Eigen::VectorXd& ev = op.eigenvalues();
            double worst = 1.0;
            for (int i = 0; i < ev.size(); ++i) {
                worst = std::min(worst, std::abs(ev(i) - 1.0 / 6.0));
            }
            table.row("layerpot", "NP eigenvalue near 1/6", worst <= 0.02, worst,
                      0.02);
        }
        {
            Materials mat;
            mat.eps_s = 2.0;
            mat.anomalies.push_back({3.0, 1.0, 1.0});
            const NPOperator op = assemble_K_star(make_unit_sphere_mesh(2));
            const PolarizationSet bem = compute_tensors(op, mat, 0);
            const PolarizationSet exact = analytic_ball_tensors(mat, 0);
            const double rel = (bem.P - exact.P).norm() / exact.P.norm();
            table.row("polarization", "ball BEM refinement 2", rel <= 0.08, rel,
                      0.08);
        }
        {
            Scene scene;
            scene.materials.eps_s = 2.0;
            scene.materials.anomalies.push_back({2.0, 1.0, 1.0});
            scene.anomalies.push_back({Vec3(0.5, -0.3, 0.8), AnomalyShape::Ball,
                                       "", 0.2, 0});
            scene.delta = 0.1;
            scene.radius = 5.0;
            const auto tensors = scene_tensors(scene);
            const auto weights = dipole_weights(scene, tensors);
            const QuadRule q = sphere_quadrature(10);
            const auto samples =
                synthesize_measurement(scene, weights, q, Epoch::Delta);
            const LocateResult loc =
                locate_single(extract_moments(samples, 3), scene.delta);
            const double err = (loc.z - scene.anomalies[0].z).norm();
            table.row("inverse", "single-anomaly location", err <= 1e-8, err, 1e-8);
        }
    }

    return table.all_ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    Eigen::setNbThreads(std::max(1, thread_cap()));

    CLI::App app{"geomagnetic anomaly forward/inverse toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_prefix;
    auto* simulate = app.add_subcommand("simulate", "synthesize measurements");
    simulate->add_option("--config", config_path, "scenario JSON")->required();
    simulate->add_option("--out", out_prefix, "output prefix")->required();

    std::string delta_csv, epoch0_csv, out_json, recon_config;
    int l0 = 1, nmax = 5;
    double delta_scale = 0.1;
    auto* reconstruct = app.add_subcommand("reconstruct", "recover anomalies");
    reconstruct->add_option("--delta", delta_csv, "delta-epoch CSV")->required();
    reconstruct->add_option("--epoch0", epoch0_csv, "epoch-0 CSV");
    reconstruct->add_option("--l0", l0, "anomaly count")->required();
    reconstruct->add_option("--delta-scale", delta_scale, "base scale delta")
        ->required();
    reconstruct->add_option("--nmax", nmax, "moment truncation");
    reconstruct->add_option("--out", out_json, "result JSON")->required();
    reconstruct->add_option("--config", recon_config,
                            "scenario JSON enabling mu recovery");

    std::string shape = "ball", tensors_out;
    double mu = 2.0, eps = 1.0, sigma = 0.0, eps_shell = 2.0;
    double mu0 = 1.0, eps0 = 1.0, omega = 1e-6;
    int refinement = 3;
    auto* tensors = app.add_subcommand("tensors", "polarization tensors");
    tensors->add_option("--shape", shape, "'ball' or mesh path");
    tensors->add_option("--mu", mu, "anomaly permeability");
    tensors->add_option("--eps", eps, "anomaly permittivity");
    tensors->add_option("--sigma", sigma, "anomaly conductivity");
    tensors->add_option("--eps-shell", eps_shell, "shell permittivity");
    tensors->add_option("--mu0", mu0, "background permeability");
    tensors->add_option("--eps0", eps0, "free-space permittivity");
    tensors->add_option("--omega", omega, "reference frequency");
    tensors->add_option("--refinement", refinement, "icosphere refinement");
    tensors->add_option("--out", tensors_out, "output JSON")->required();

    std::string level = "fast";
    auto* validate = app.add_subcommand("validate", "run invariant checks");
    validate->add_option("--level", level, "fast|full")
        ->check(CLI::IsMember({"fast", "full"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) return cmd_simulate(config_path, out_prefix);
        if (*reconstruct) {
            return cmd_reconstruct(delta_csv, epoch0_csv, l0, delta_scale, nmax,
                                   out_json, recon_config);
        }
        if (*tensors) {
            return cmd_tensors(shape, mu, eps, sigma, eps_shell, mu0, eps0, omega,
                               refinement, tensors_out);
        }
        if (*validate) return cmd_validate(level);
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 4;
    } catch (const OptimizationError& e) {
        std::cerr << "optimizer failure: " << e.what() << '\n';
        return 3;
    } catch (const ResonanceError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 3;
    } catch (const PrecisionError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "validation failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
