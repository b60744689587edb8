#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "trackfuse/dreamer.hpp"
#include "trackfuse/icp.hpp"
#include "trackfuse/recon.hpp"
#include "trackfuse/sor.hpp"

namespace trackfuse {

struct DreamerConfig {
    std::string mode = "oracle"; // "oracle" or "external"
    std::string adapter;         // directory containing prior.ply, or a command
    int prior_samples = 50000;
    CorruptionParams corruption;
};

struct PipelineConfig {
    int sphere_viewpoints = 36;
    int fps_cap = 30000;
    std::uint64_t rng_seed = 0;
    bool snapshot_every_keyframe = false;
    double append_threshold = std::numeric_limits<double>::infinity();
    std::string refiner_command; // optional external pose refiner
    SorParams sor;
    IcpParams icp;
    ReconParams recon;
    DreamerConfig dreamer;

    void validate() const;
};

PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config_json(const std::string& text);
std::string config_to_json(const PipelineConfig& config);

/// Default config plus provenance notes for the defaults that come from the
/// method rather than this implementation.
std::string annotated_default_config();

} // namespace trackfuse
