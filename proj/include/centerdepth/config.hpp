#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "centerdepth/bev.hpp"
#include "centerdepth/crf.hpp"
#include "centerdepth/dataset.hpp"
#include "centerdepth/errors.hpp"
#include "centerdepth/evaluation.hpp"
#include "centerdepth/scene.hpp"

namespace centerdepth::config {

using nlohmann::json;

enum class DetectionMode {
    GroundTruth,  ///< annotation centers, sizes from the annotated box
    Decoded,      ///< heatmap peaks matched to annotations for size and class
};

enum class UnaryMode {
    GroundTruth,  ///< the clean depth raster
    Noisy,        ///< depth raster with per-pixel N(0, (unary_noise * d)^2)
    External,     ///< <unary_dir>/<frame_id>.depth.f32
};

struct RefineConfig {
    DetectionMode detections{DetectionMode::GroundTruth};
    UnaryMode unary{UnaryMode::Noisy};
    double unary_noise{0.02};
    std::string unary_dir;
    double peak_threshold{0.5};
    int peak_window{3};
    double max_range{200.0};
    double min_visibility{0.7};
};

struct EvalConfig {
    double delta_threshold{1.10};
    eval::DeltaMode delta_mode{eval::DeltaMode::Symmetric};
    std::vector<double> bin_edges{eval::kDistanceBinEdges.begin(), eval::kDistanceBinEdges.end()};
};

struct PlanConfig {
    bev::GridSpec grid{0.5, -40.0, 40.0, 0.0, 200.0, 0.5};
    std::string frame;                      ///< empty: first frame in the obstacle list
    std::optional<std::array<double, 2>> goal;  ///< (x, z) meters; empty picks one behind an obstacle
};

struct RunConfig {
    std::uint64_t seed{7};
    int threads{0};  ///< 0: hardware concurrency
    std::string out{"runs"};
    std::string input;
    std::string log_level{"info"};
    int frames{8};
    scene::SceneConfig scene;
    crf::CrfConfig crf;
    RefineConfig refine;
    EvalConfig eval;
    PlanConfig plan;
};

namespace detail {

inline std::string enum_name(DetectionMode m) {
    return m == DetectionMode::GroundTruth ? "gt" : "decoded";
}
inline std::string enum_name(UnaryMode m) {
    switch (m) {
        case UnaryMode::GroundTruth: return "gt";
        case UnaryMode::Noisy: return "noisy";
        case UnaryMode::External: return "external";
    }
    return "noisy";
}
inline std::string enum_name(crf::Solver s) {
    return s == crf::Solver::ClosedForm ? "closed_form" : "coordinate_descent";
}
inline std::string enum_name(eval::DeltaMode m) {
    return m == eval::DeltaMode::Symmetric ? "symmetric" : "one_sided";
}
inline std::string enum_name(DepthConvention c) {
    return c == DepthConvention::Euclidean ? "euclidean" : "optical_axis";
}

template <typename E>
E parse_enum(const std::string& field, const std::string& value, std::initializer_list<E> options) {
    std::string allowed;
    for (E e : options) {
        if (enum_name(e) == value) return e;
        allowed += (allowed.empty() ? "" : ", ") + enum_name(e);
    }
    throw Error(Errc::ValidationFailure, field + " must be one of {" + allowed + "}");
}

/// Reads j[section][key] into `dst` when present, naming the field on type errors.
template <typename T>
void read(const json& j, const std::string& path, T& dst) {
    const json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string part = path.substr(start, dot - start);
        if (!node->is_object() || !node->contains(part)) return;
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    try {
        dst = node->get<T>();
    } catch (const json::exception&) {
        throw Error(Errc::MalformedConfig, "field '" + path + "' has the wrong type: " + node->dump());
    }
}

inline void collect_leaves(const json& j, const std::string& prefix, std::vector<std::string>& out) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object()) collect_leaves(*it, key, out);
        else out.push_back(key);
    }
}

/// Every key in `user` must exist in `schema`; objects recurse.
inline void check_known(const json& user, const json& schema, const std::string& prefix) {
    if (!user.is_object())
        throw Error(Errc::MalformedConfig, (prefix.empty() ? "config" : prefix) + " must be an object");
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!schema.contains(it.key())) throw Error(Errc::UnknownField, key);
        const json& s = schema[it.key()];
        if (s.is_object()) check_known(*it, s, key);
    }
}

inline void merge_into(json& base, const json& over) {
    for (auto it = over.begin(); it != over.end(); ++it) {
        if (it->is_object() && base.contains(it.key()) && base[it.key()].is_object())
            merge_into(base[it.key()], *it);
        else
            base[it.key()] = *it;
    }
}

}  // namespace detail

inline json to_json(const RunConfig& c) {
    using detail::enum_name;
    const auto& s = c.scene;
    json bins = json::array();
    for (const auto& [lo, hi] : s.bins) bins.push_back({lo, hi});
    json goal = c.plan.goal ? json{(*c.plan.goal)[0], (*c.plan.goal)[1]} : json("auto");
    return {
        {"seed", c.seed},
        {"threads", c.threads},
        {"out", c.out},
        {"input", c.input},
        {"log_level", c.log_level},
        {"frames", c.frames},
        {"camera",
         {{"fx", s.camera.fx},
          {"fy", s.camera.fy},
          {"cx", s.camera.cx},
          {"cy", s.camera.cy},
          {"width", s.camera.width},
          {"height", s.camera.height},
          {"height_above_ground", s.camera_height}}},
        {"scene",
         {{"feature_size", s.feature_size},
          {"channels", s.channels},
          {"targets_per_bin", s.targets_per_bin},
          {"bins", bins},
          {"class_weights",
           {{"car", s.class_weights[0]},
            {"van", s.class_weights[1]},
            {"truck", s.class_weights[2]},
            {"bicycle", s.class_weights[3]},
            {"pedestrian", s.class_weights[4]}}},
          {"noise_sigma", s.noise_sigma},
          {"background_depth", s.background_depth},
          {"min_range", s.min_range},
          {"placement_min_visibility", s.min_visibility},
          {"max_iou", s.max_iou},
          {"max_retries", s.max_retries},
          {"depth_convention", enum_name(s.convention)}}},
        {"crf",
         {{"sigma_f", c.crf.sigma_f},
          {"lambda_u", c.crf.lambda_u},
          {"solver", enum_name(c.crf.solver)},
          {"max_iters", c.crf.max_iters},
          {"tol", c.crf.tol},
          {"spatial_term", c.crf.spatial_term},
          {"sigma_s", c.crf.sigma_s}}},
        {"refine",
         {{"detections", enum_name(c.refine.detections)},
          {"unary", enum_name(c.refine.unary)},
          {"unary_noise", c.refine.unary_noise},
          {"unary_dir", c.refine.unary_dir},
          {"peak_threshold", c.refine.peak_threshold},
          {"peak_window", c.refine.peak_window},
          {"max_range", c.refine.max_range},
          {"min_visibility", c.refine.min_visibility}}},
        {"eval",
         {{"delta_threshold", c.eval.delta_threshold},
          {"delta_mode", enum_name(c.eval.delta_mode)},
          {"bin_edges", c.eval.bin_edges}}},
        {"plan",
         {{"resolution", c.plan.grid.resolution},
          {"x_min", c.plan.grid.x_min},
          {"x_max", c.plan.grid.x_max},
          {"z_min", c.plan.grid.z_min},
          {"z_max", c.plan.grid.z_max},
          {"inflation", c.plan.grid.inflation},
          {"frame", c.plan.frame},
          {"goal", goal}}},
    };
}

/// Builds a config from a fully merged document (defaults already applied).
inline RunConfig from_json(const json& j) {
    using detail::read;
    RunConfig c;
    read(j, "seed", c.seed);
    read(j, "threads", c.threads);
    read(j, "out", c.out);
    read(j, "input", c.input);
    read(j, "log_level", c.log_level);
    read(j, "frames", c.frames);

    auto& s = c.scene;
    read(j, "camera.fx", s.camera.fx);
    read(j, "camera.fy", s.camera.fy);
    read(j, "camera.cx", s.camera.cx);
    read(j, "camera.cy", s.camera.cy);
    read(j, "camera.width", s.camera.width);
    read(j, "camera.height", s.camera.height);
    read(j, "camera.height_above_ground", s.camera_height);
    read(j, "scene.feature_size", s.feature_size);
    read(j, "scene.channels", s.channels);
    read(j, "scene.targets_per_bin", s.targets_per_bin);
    std::vector<std::array<double, 2>> bins;
    for (const auto& [lo, hi] : s.bins) bins.push_back({lo, hi});
    read(j, "scene.bins", bins);
    s.bins.clear();
    for (const auto& b : bins) s.bins.emplace_back(b[0], b[1]);
    read(j, "scene.class_weights.car", s.class_weights[0]);
    read(j, "scene.class_weights.van", s.class_weights[1]);
    read(j, "scene.class_weights.truck", s.class_weights[2]);
    read(j, "scene.class_weights.bicycle", s.class_weights[3]);
    read(j, "scene.class_weights.pedestrian", s.class_weights[4]);
    read(j, "scene.noise_sigma", s.noise_sigma);
    read(j, "scene.background_depth", s.background_depth);
    read(j, "scene.min_range", s.min_range);
    read(j, "scene.placement_min_visibility", s.min_visibility);
    read(j, "scene.max_iou", s.max_iou);
    read(j, "scene.max_retries", s.max_retries);
    std::string name = detail::enum_name(s.convention);
    read(j, "scene.depth_convention", name);
    s.convention = detail::parse_enum("scene.depth_convention", name,
                                      {DepthConvention::Euclidean, DepthConvention::OpticalAxis});
    s.seed = c.seed;

    read(j, "crf.sigma_f", c.crf.sigma_f);
    read(j, "crf.lambda_u", c.crf.lambda_u);
    name = detail::enum_name(c.crf.solver);
    read(j, "crf.solver", name);
    c.crf.solver = detail::parse_enum("crf.solver", name,
                                      {crf::Solver::ClosedForm, crf::Solver::CoordinateDescent});
    read(j, "crf.max_iters", c.crf.max_iters);
    read(j, "crf.tol", c.crf.tol);
    read(j, "crf.spatial_term", c.crf.spatial_term);
    read(j, "crf.sigma_s", c.crf.sigma_s);

    name = detail::enum_name(c.refine.detections);
    read(j, "refine.detections", name);
    c.refine.detections = detail::parse_enum("refine.detections", name,
                                             {DetectionMode::GroundTruth, DetectionMode::Decoded});
    name = detail::enum_name(c.refine.unary);
    read(j, "refine.unary", name);
    c.refine.unary = detail::parse_enum(
        "refine.unary", name, {UnaryMode::GroundTruth, UnaryMode::Noisy, UnaryMode::External});
    read(j, "refine.unary_noise", c.refine.unary_noise);
    read(j, "refine.unary_dir", c.refine.unary_dir);
    read(j, "refine.peak_threshold", c.refine.peak_threshold);
    read(j, "refine.peak_window", c.refine.peak_window);
    read(j, "refine.max_range", c.refine.max_range);
    read(j, "refine.min_visibility", c.refine.min_visibility);

    read(j, "eval.delta_threshold", c.eval.delta_threshold);
    name = detail::enum_name(c.eval.delta_mode);
    read(j, "eval.delta_mode", name);
    c.eval.delta_mode = detail::parse_enum("eval.delta_mode", name,
                                           {eval::DeltaMode::Symmetric, eval::DeltaMode::OneSided});
    read(j, "eval.bin_edges", c.eval.bin_edges);

    read(j, "plan.resolution", c.plan.grid.resolution);
    read(j, "plan.x_min", c.plan.grid.x_min);
    read(j, "plan.x_max", c.plan.grid.x_max);
    read(j, "plan.z_min", c.plan.grid.z_min);
    read(j, "plan.z_max", c.plan.grid.z_max);
    read(j, "plan.inflation", c.plan.grid.inflation);
    read(j, "plan.frame", c.plan.frame);
    if (j.contains("plan") && j["plan"].contains("goal")) {
        const json& g = j["plan"]["goal"];
        if (g.is_string() && g.get<std::string>() == "auto") {
            c.plan.goal.reset();
        } else if (g.is_array() && g.size() == 2 && g[0].is_number() && g[1].is_number()) {
            c.plan.goal = std::array<double, 2>{g[0].get<double>(), g[1].get<double>()};
        } else {
            throw Error(Errc::MalformedConfig, "field 'plan.goal' must be \"auto\" or [x, z]");
        }
    }
    return c;
}

/// Checks every numeric field against its module's invariants; throws
/// ValidationFailure naming the violated condition.
inline void validate(const RunConfig& c) {
    auto fail = [](const std::string& what) { throw Error(Errc::ValidationFailure, what); };
    if (c.threads < 0) fail("threads >= 0");
    if (c.frames < 1) fail("frames >= 1");
    if (c.log_level != "quiet" && c.log_level != "info" && c.log_level != "debug")
        fail("log_level in {quiet, info, debug}");
    c.scene.validate();
    c.crf.validate();
    if (!(c.refine.unary_noise >= 0)) fail("unary_noise >= 0");
    if (!(c.refine.peak_threshold >= 0 && c.refine.peak_threshold <= 1))
        fail("0 <= peak_threshold <= 1");
    if (c.refine.peak_window < 3 || c.refine.peak_window % 2 == 0) fail("peak_window odd and >= 3");
    if (!(c.refine.max_range > 0)) fail("max_range > 0");
    if (!(c.refine.min_visibility >= 0 && c.refine.min_visibility <= 1))
        fail("0 <= min_visibility <= 1");
    if (c.refine.unary == UnaryMode::External && c.refine.unary_dir.empty())
        fail("unary_dir set when unary = external");
    if (!(c.eval.delta_threshold > 1)) fail("delta_threshold > 1");
    if (c.eval.bin_edges.size() < 2) fail("at least two bin_edges");
    for (std::size_t i = 1; i < c.eval.bin_edges.size(); ++i)
        if (!(c.eval.bin_edges[i] > c.eval.bin_edges[i - 1])) fail("bin_edges strictly increasing");
    c.plan.grid.validate();
}

inline std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    return 1 + static_cast<std::size_t>(
                   std::count(text.begin(), text.begin() + std::min(byte, text.size()), '\n'));
}

/// Parses the text of a config file; whitespace-only text means "all defaults".
inline json parse_config_text(const std::string& text, const std::string& source) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::MalformedConfig,
                    source + ":" + std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
    }
}

/// Resolves `path` in the defaults schema. Dotted paths are taken literally; a
/// bare name matches a unique leaf anywhere in the schema.
inline std::string resolve_key(const json& schema, const std::string& key) {
    std::vector<std::string> leaves;
    detail::collect_leaves(schema, "", leaves);
    if (std::find(leaves.begin(), leaves.end(), key) != leaves.end()) return key;
    if (key.find('.') == std::string::npos) {
        std::vector<std::string> hits;
        for (const auto& l : leaves) {
            const auto dot = l.rfind('.');
            if ((dot == std::string::npos ? l : l.substr(dot + 1)) == key) hits.push_back(l);
        }
        if (hits.size() == 1) return hits.front();
        if (hits.size() > 1) throw Error(Errc::UnknownField, key + " is ambiguous; use a dotted path");
    }
    throw Error(Errc::UnknownField, key);
}

/// Applies "key=value" overrides; values parse as JSON, falling back to a string.
inline void apply_overrides(json& doc, const json& schema, const std::vector<std::string>& overrides) {
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error(Errc::MalformedConfig, "override '" + ov + "' is not key=value");
        const std::string path = resolve_key(schema, ov.substr(0, eq));
        const std::string text = ov.substr(eq + 1);
        json value;
        try {
            value = json::parse(text);
        } catch (const json::parse_error&) {
            value = text;
        }
        json* node = &doc;
        std::size_t start = 0;
        while (true) {
            const auto dot = path.find('.', start);
            const std::string part = path.substr(start, dot - start);
            if (dot == std::string::npos) {
                (*node)[part] = value;
                break;
            }
            node = &(*node)[part];
            start = dot + 1;
        }
    }
}

/// Precedence: overrides > file > defaults.
inline RunConfig resolve(const json& file_doc, const std::vector<std::string>& overrides) {
    const json schema = to_json(RunConfig{});
    detail::check_known(file_doc, schema, "");
    json doc = schema;
    detail::merge_into(doc, file_doc);
    apply_overrides(doc, schema, overrides);
    RunConfig c = from_json(doc);
    validate(c);
    return c;
}

inline RunConfig load(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::string text;
    if (!path.empty()) {
        if (!std::filesystem::exists(path))
            throw Error(Errc::MalformedConfig, "config file " + path.string() + " does not exist");
        text = io::read_file(path);
    }
    return resolve(parse_config_text(text, path.string()), overrides);
}

}  // namespace centerdepth::config
