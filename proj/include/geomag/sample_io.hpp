#ifndef GEOMAG_SAMPLE_IO_HPP
#define GEOMAG_SAMPLE_IO_HPP

// File formats: sample CSV + sidecar JSON metadata, scenario configuration,
// reconstruction result JSON.

#include <cstdint>
#include <string>

#include "geomag/forward.hpp"
#include "geomag/inverse.hpp"

namespace geomag {

struct SampleMeta {
    double radius = 0.0;
    std::string epoch;
    double noise_rel = 0.0;
    std::uint64_t seed = 0;
    int quad_level = 0;
    std::string scene_hash;
};

// CSV header: ux,uy,uz,weight,re_hx,im_hx,re_hy,im_hy,re_hz,im_hz
// Metadata goes to "<csv_path>.meta.json".
void write_samples(const std::string& csv_path, const VectorFieldSamples& samples,
                   int quad_level, const std::string& scene_hash);

struct LoadedSamples {
    VectorFieldSamples samples;
    SampleMeta meta;
};

LoadedSamples read_samples(const std::string& csv_path);

struct ScenarioConfig {
    Scene scene;
    int quad_level = 8;
    double noise_rel = 0.0;
    std::uint64_t seed = 0;
    bool with_epoch0 = true;
};

ScenarioConfig parse_scenario_file(const std::string& path);
ScenarioConfig parse_scenario_json(const std::string& text);

// FNV-1a hash of the canonical serialized configuration.
std::string scene_hash(const std::string& canonical_json);

void write_result_json(const std::string& path, const ReconstructionResult& result);

} // namespace geomag

#endif
