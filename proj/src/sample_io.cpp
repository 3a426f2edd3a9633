#include "geomag/sample_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace geomag {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_samples(const std::string& csv_path, const VectorFieldSamples& samples,
                   int quad_level, const std::string& hash) {
    if (samples.values.size() != samples.quad.nodes.size()) {
        throw IoError("write_samples: node/value count mismatch");
    }
    std::ofstream out(csv_path);
    if (!out) throw IoError("cannot open for writing: " + csv_path);
    out << "ux,uy,uz,weight,re_hx,im_hx,re_hy,im_hy,re_hz,im_hz\n";
    for (size_t q = 0; q < samples.values.size(); ++q) {
        const Vec3& u = samples.quad.nodes[q].dir.u;
        const CVec3& h = samples.values[q];
        out << fmt(u.x()) << ',' << fmt(u.y()) << ',' << fmt(u.z()) << ','
            << fmt(samples.quad.nodes[q].weight);
        for (int c = 0; c < 3; ++c) {
            out << ',' << fmt(h(c).real()) << ',' << fmt(h(c).imag());
        }
        out << '\n';
    }
    if (!out) throw IoError("write failure: " + csv_path);

    json meta;
    meta["radius"] = samples.radius;
    meta["epoch"] = samples.epoch;
    meta["noise_rel"] = samples.noise_rel;
    meta["seed"] = samples.seed;
    meta["quad_level"] = quad_level;
    meta["scene_hash"] = hash;
    std::ofstream mout(csv_path + ".meta.json");
    if (!mout) throw IoError("cannot open for writing: " + csv_path + ".meta.json");
    mout << meta.dump(2) << '\n';
}

LoadedSamples read_samples(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw IoError("cannot open: " + csv_path);

    LoadedSamples out;
    std::string line;
    if (!std::getline(in, line) ||
        line.rfind("ux,uy,uz,weight", 0) != 0) {
        throw IoError("sample CSV: bad header in " + csv_path);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        double f[10];
        char comma;
        for (int i = 0; i < 10; ++i) {
            if (!(ls >> f[i])) throw IoError("sample CSV: bad row in " + csv_path);
            if (i < 9 && !(ls >> comma)) {
                throw IoError("sample CSV: bad row in " + csv_path);
            }
        }
        QuadNode node;
        node.dir.u = Vec3(f[0], f[1], f[2]);
        node.weight = f[3];
        out.samples.quad.nodes.push_back(node);
        out.samples.values.emplace_back(Complex(f[4], f[5]), Complex(f[6], f[7]),
                                        Complex(f[8], f[9]));
    }

    std::ifstream min(csv_path + ".meta.json");
    if (!min) throw IoError("missing metadata sidecar for " + csv_path);
    json meta;
    try {
        min >> meta;
    } catch (const json::exception& e) {
        throw IoError("metadata parse error: " + std::string(e.what()));
    }
    out.meta.radius = meta.at("radius").get<double>();
    out.meta.epoch = meta.at("epoch").get<std::string>();
    out.meta.noise_rel = meta.at("noise_rel").get<double>();
    out.meta.seed = meta.at("seed").get<std::uint64_t>();
    out.meta.quad_level = meta.at("quad_level").get<int>();
    out.meta.scene_hash = meta.value("scene_hash", "");

    out.samples.radius = out.meta.radius;
    out.samples.epoch = out.meta.epoch;
    out.samples.noise_rel = out.meta.noise_rel;
    out.samples.seed = out.meta.seed;
    out.samples.quad.exactness = 2 * out.meta.quad_level - 1;
    return out;
}

namespace {

Vec3 vec3_from(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) {
        throw IoError(std::string("config: ") + what + " must be a 3-array");
    }
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

} // namespace

ScenarioConfig parse_scenario_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError("config parse error: " + std::string(e.what()));
    }

    ScenarioConfig cfg;
    try {
        const json& jm = j.at("materials");
        cfg.scene.materials.mu0 = jm.value("mu0", 1.0);
        cfg.scene.materials.eps0 = jm.value("eps0", 1.0);
        cfg.scene.materials.eps_s = jm.value("eps_s", 2.0);
        cfg.scene.materials.omega = jm.value("omega", 1e-6);
        for (const json& ja : jm.at("anomalies")) {
            Materials::Anomaly a;
            a.mu = ja.value("mu", 2.0);
            a.eps = ja.value("eps", 1.0);
            a.sigma = ja.value("sigma", 0.0);
            cfg.scene.materials.anomalies.push_back(a);
        }

        for (const json& ja : j.at("anomalies")) {
            Anomaly a;
            a.z = vec3_from(ja.at("center"), "anomaly center");
            const std::string shape = ja.value("shape", "ball");
            if (shape == "ball") {
                a.shape = AnomalyShape::Ball;
            } else {
                a.shape = AnomalyShape::Mesh;
                a.mesh_path = shape;
            }
            a.alpha = ja.value("alpha", 0.0);
            a.material = ja.value("material", 0);
            cfg.scene.anomalies.push_back(a);
        }

        const json& jb = j.at("background");
        const std::string type = jb.value("type", "uniform");
        if (type == "uniform") {
            cfg.scene.background = UniformField{vec3_from(jb.at("h"), "background h")};
        } else if (type == "dipole") {
            cfg.scene.background =
                DipoleField{vec3_from(jb.at("source"), "dipole source"),
                            vec3_from(jb.at("moment"), "dipole moment")};
        } else if (type == "harmonic") {
            HarmonicPolyField p;
            if (jb.contains("linear")) p.linear = vec3_from(jb["linear"], "linear");
            if (jb.contains("quadratic")) {
                const json& q = jb["quadratic"];
                for (int r = 0; r < 3; ++r) {
                    for (int c = 0; c < 3; ++c) {
                        p.quadratic(r, c) = q.at(r).at(c).get<double>();
                    }
                }
                const Mat3 sym = 0.5 * (p.quadratic + p.quadratic.transpose());
                if ((p.quadratic - sym).norm() > 1e-12 ||
                    std::abs(sym.trace()) > 1e-12) {
                    throw IoError(
                        "config: quadratic background must be symmetric trace-free");
                }
            }
            cfg.scene.background = p;
        } else {
            throw IoError("config: unknown background type '" + type + "'");
        }

        cfg.scene.delta = j.value("delta", 0.1);
        const json& jmeas = j.at("measurement");
        cfg.scene.radius = jmeas.at("radius").get<double>();
        cfg.quad_level = jmeas.value("quad_level", 8);
        cfg.noise_rel = jmeas.value("noise", 0.0);
        cfg.seed = jmeas.value("seed", std::uint64_t(0));
        cfg.with_epoch0 = j.value("epoch0", true);
    } catch (const json::exception& e) {
        throw IoError("config field error: " + std::string(e.what()));
    }
    return cfg;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_json(ss.str());
}

std::string scene_hash(const std::string& canonical_json) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical_json) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

void write_result_json(const std::string& path, const ReconstructionResult& result) {
    json j;
    j["residual"] = result.residual;
    j["iterations"] = result.iterations;
    j["warnings"] = result.warnings;
    j["anomalies"] = json::array();
    for (const RecoveredAnomaly& a : result.anomalies) {
        json ja;
        ja["z"] = {a.z.x(), a.z.y(), a.z.z()};
        ja["w_re"] = {a.w(0).real(), a.w(1).real(), a.w(2).real()};
        ja["w_im"] = {a.w(0).imag(), a.w(1).imag(), a.w(2).imag()};
        if (a.v) {
            ja["v_re"] = {(*a.v)(0).real(), (*a.v)(1).real(), (*a.v)(2).real()};
            ja["v_im"] = {(*a.v)(0).imag(), (*a.v)(1).imag(), (*a.v)(2).imag()};
        }
        ja["alpha"] = a.alpha ? json(*a.alpha) : json(nullptr);
        ja["mu"] = a.mu ? json(*a.mu) : json(nullptr);
        j["anomalies"].push_back(ja);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

} // namespace geomag
