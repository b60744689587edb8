#include "trackfuse/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "trackfuse/errors.hpp"

namespace trackfuse {

using nlohmann::json;

void PipelineConfig::validate() const {
    if (sphere_viewpoints < 1) throw ConfigError("config: sphere_viewpoints must be >= 1");
    if (fps_cap < 1) throw ConfigError("config: fps_cap must be >= 1");
    if (sor.n_neighbors < 1 || sor.k_sigma <= 0) throw ConfigError("config: bad sor parameters");
    if (icp.max_iterations < 1 || icp.correspondence_cutoff <= 0 || icp.convergence_delta <= 0 ||
        icp.reference_samples < 6)
        throw ConfigError("config: bad icp parameters");
    if (recon.grid_resolution < 4 || recon.normal_k < 3 || recon.cg_tolerance <= 0 ||
        recon.cg_max_iters < 1 || recon.trim_distance <= 0)
        throw ConfigError("config: bad recon parameters");
    if (dreamer.mode != "oracle" && dreamer.mode != "external")
        throw ConfigError("config: dreamer.mode must be 'oracle' or 'external'");
    if (dreamer.mode == "external" && dreamer.adapter.empty())
        throw ConfigError("config: external dreamer mode needs an adapter");
    if (dreamer.prior_samples < 100) throw ConfigError("config: dreamer.prior_samples too small");
    if (!(append_threshold > 0)) throw ConfigError("config: append_threshold must be positive");
}

namespace {

void expect_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw ConfigError("config: unknown key '" + key + "' in " + where);
    }
}

SorMode sor_mode_from(const std::string& s) {
    if (s == "classic") return SorMode::classic;
    if (s == "paper_literal") return SorMode::paper_literal;
    throw ConfigError("config: sor.mode must be 'classic' or 'paper_literal'");
}

IcpVariant icp_variant_from(const std::string& s) {
    if (s == "point_to_point") return IcpVariant::point_to_point;
    if (s == "point_to_plane") return IcpVariant::point_to_plane;
    throw ConfigError("config: icp.variant must be 'point_to_point' or 'point_to_plane'");
}

} // namespace

PipelineConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }

    PipelineConfig c;
    expect_keys(j,
                {"sphere_viewpoints", "fps_cap", "rng_seed", "snapshot_every_keyframe",
                 "append_threshold", "refiner_command", "sor", "icp", "recon", "dreamer"},
                "config");
    try {
        if (j.contains("sphere_viewpoints")) c.sphere_viewpoints = j["sphere_viewpoints"].get<int>();
        if (j.contains("fps_cap")) c.fps_cap = j["fps_cap"].get<int>();
        if (j.contains("rng_seed")) c.rng_seed = j["rng_seed"].get<std::uint64_t>();
        if (j.contains("snapshot_every_keyframe"))
            c.snapshot_every_keyframe = j["snapshot_every_keyframe"].get<bool>();
        if (j.contains("append_threshold") && !j["append_threshold"].is_null())
            c.append_threshold = j["append_threshold"].get<double>();
        if (j.contains("refiner_command") && !j["refiner_command"].is_null())
            c.refiner_command = j["refiner_command"].get<std::string>();

        if (j.contains("sor")) {
            const json& s = j["sor"];
            expect_keys(s, {"n_neighbors", "k_sigma", "mode"}, "sor");
            if (s.contains("n_neighbors")) c.sor.n_neighbors = s["n_neighbors"].get<int>();
            if (s.contains("k_sigma")) c.sor.k_sigma = s["k_sigma"].get<double>();
            if (s.contains("mode")) c.sor.mode = sor_mode_from(s["mode"].get<std::string>());
        }
        if (j.contains("icp")) {
            const json& s = j["icp"];
            expect_keys(s,
                        {"max_iterations", "correspondence_cutoff", "convergence_delta", "variant",
                         "reference_samples", "measured_samples"},
                        "icp");
            if (s.contains("max_iterations")) c.icp.max_iterations = s["max_iterations"].get<int>();
            if (s.contains("correspondence_cutoff"))
                c.icp.correspondence_cutoff = s["correspondence_cutoff"].get<double>();
            if (s.contains("convergence_delta"))
                c.icp.convergence_delta = s["convergence_delta"].get<double>();
            if (s.contains("variant")) c.icp.variant = icp_variant_from(s["variant"].get<std::string>());
            if (s.contains("reference_samples"))
                c.icp.reference_samples = s["reference_samples"].get<int>();
            if (s.contains("measured_samples"))
                c.icp.measured_samples = s["measured_samples"].get<int>();
        }
        if (j.contains("recon")) {
            const json& s = j["recon"];
            expect_keys(s, {"grid_resolution", "normal_k", "cg_tolerance", "cg_max_iters", "trim_distance"},
                        "recon");
            if (s.contains("grid_resolution")) c.recon.grid_resolution = s["grid_resolution"].get<int>();
            if (s.contains("normal_k")) c.recon.normal_k = s["normal_k"].get<int>();
            if (s.contains("cg_tolerance")) c.recon.cg_tolerance = s["cg_tolerance"].get<double>();
            if (s.contains("cg_max_iters")) c.recon.cg_max_iters = s["cg_max_iters"].get<int>();
            if (s.contains("trim_distance")) c.recon.trim_distance = s["trim_distance"].get<double>();
        }
        if (j.contains("dreamer")) {
            const json& s = j["dreamer"];
            expect_keys(s, {"mode", "adapter", "prior_samples", "corruption"}, "dreamer");
            if (s.contains("mode")) c.dreamer.mode = s["mode"].get<std::string>();
            if (s.contains("adapter")) c.dreamer.adapter = s["adapter"].get<std::string>();
            if (s.contains("prior_samples")) c.dreamer.prior_samples = s["prior_samples"].get<int>();
            if (s.contains("corruption")) {
                const json& cc = s["corruption"];
                expect_keys(cc, {"hidden_geom_noise", "hidden_color_shift", "normalize_scale", "rng_seed"},
                            "dreamer.corruption");
                if (cc.contains("hidden_geom_noise") && !cc["hidden_geom_noise"].is_null())
                    c.dreamer.corruption.hidden_geom_noise = cc["hidden_geom_noise"].get<double>();
                if (cc.contains("hidden_color_shift"))
                    c.dreamer.corruption.hidden_color_shift = cc["hidden_color_shift"].get<double>();
                if (cc.contains("normalize_scale"))
                    c.dreamer.corruption.normalize_scale = cc["normalize_scale"].get<bool>();
                if (cc.contains("rng_seed"))
                    c.dreamer.corruption.rng_seed = cc["rng_seed"].get<std::uint64_t>();
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad field: ") + e.what());
    }
    c.validate();
    return c;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: missing " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_json(ss.str());
}

std::string config_to_json(const PipelineConfig& c) {
    json j;
    j["sphere_viewpoints"] = c.sphere_viewpoints;
    j["fps_cap"] = c.fps_cap;
    j["rng_seed"] = c.rng_seed;
    j["snapshot_every_keyframe"] = c.snapshot_every_keyframe;
    j["append_threshold"] =
        std::isfinite(c.append_threshold) ? json(c.append_threshold) : json(nullptr);
    j["refiner_command"] = c.refiner_command;
    j["sor"] = {{"n_neighbors", c.sor.n_neighbors},
                {"k_sigma", c.sor.k_sigma},
                {"mode", c.sor.mode == SorMode::classic ? "classic" : "paper_literal"}};
    j["icp"] = {{"max_iterations", c.icp.max_iterations},
                {"correspondence_cutoff", c.icp.correspondence_cutoff},
                {"convergence_delta", c.icp.convergence_delta},
                {"variant",
                 c.icp.variant == IcpVariant::point_to_plane ? "point_to_plane" : "point_to_point"},
                {"reference_samples", c.icp.reference_samples},
                {"measured_samples", c.icp.measured_samples}};
    j["recon"] = {{"grid_resolution", c.recon.grid_resolution},
                  {"normal_k", c.recon.normal_k},
                  {"cg_tolerance", c.recon.cg_tolerance},
                  {"cg_max_iters", c.recon.cg_max_iters},
                  {"trim_distance", c.recon.trim_distance}};
    json corruption;
    corruption["hidden_geom_noise"] = c.dreamer.corruption.hidden_geom_noise
                                          ? json(*c.dreamer.corruption.hidden_geom_noise)
                                          : json(nullptr);
    corruption["hidden_color_shift"] = c.dreamer.corruption.hidden_color_shift;
    corruption["normalize_scale"] = c.dreamer.corruption.normalize_scale;
    corruption["rng_seed"] = c.dreamer.corruption.rng_seed;
    j["dreamer"] = {{"mode", c.dreamer.mode},
                    {"adapter", c.dreamer.adapter},
                    {"prior_samples", c.dreamer.prior_samples},
                    {"corruption", corruption}};
    return j.dump(2);
}

std::string annotated_default_config() {
    std::ostringstream out;
    out << config_to_json(PipelineConfig{}) << "\n\n";
    out << "# Method-derived defaults:\n";
    out << "#   sphere_viewpoints = 36      viewpoint count balancing accuracy and update cost\n";
    out << "#   fps_cap = 30000             accumulated measured-cloud cap before FPS downsampling\n";
    out << "# Implementation-chosen defaults (the method leaves these open):\n";
    out << "#   sor.n_neighbors = 16, sor.k_sigma = 2.0, sor.mode = classic\n";
    out << "#   (mode 'paper_literal' with k_sigma = 300 reproduces the literal filter reading)\n";
    out << "#   icp.* reference/measured sample counts, recon.* grid and solver settings\n";
    out << "#   dreamer.corruption.hidden_geom_noise = null -> 5% of the object's max OBB side\n";
    return out.str();
}

} // namespace trackfuse
