#include "spikelab/scene.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spikelab/mnist.hpp"

namespace spikelab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw SchemaError(path + ": " + msg);
}

const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "must be an object");
    return j;
}

// Strict schema: anything not in `allowed` is rejected so typos never pass
// silently, and everything in `required` must be present.
void check_keys(const json& obj, const std::string& path, std::set<std::string> required,
                std::set<std::string> optional) {
    for (const auto& [key, value] : obj.items()) {
        if (required.count(key) == 0 && optional.count(key) == 0) {
            fail(path + "." + key, "unknown field");
        }
    }
    for (const auto& key : required) {
        if (!obj.contains(key)) fail(path, "missing required field \"" + key + "\"");
    }
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "must be a number");
    return j.get<double>();
}

std::int64_t get_integer(const json& j, const std::string& path) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) fail(path, "must be an integer");
    return j.get<std::int64_t>();
}

std::vector<double> get_vector(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "must be a nonempty array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

// Region factories validate semantics; re-throw their complaints with the
// JSON path attached so a scene author can find the offending field.
template <typename Fn>
auto locate(const std::string& path, Fn&& fn) {
    try {
        return fn();
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        fail(path, e.what());
    }
}

RegionPtr parse_region(const json& j, const std::string& path) {
    require_object(j, path);
    if (j.size() != 1) {
        fail(path,
             "must have exactly one key among ball, box, rotsquare, halfspace, union, "
             "intersect, diff");
    }
    const auto& [key, body] = *j.items().begin();
    std::string sub = path + "." + key;

    if (key == "ball") {
        check_keys(require_object(body, sub), sub, {"center", "radius"}, {});
        auto center = get_vector(body["center"], sub + ".center");
        double radius = get_number(body["radius"], sub + ".radius");
        if (!(radius > 0.0)) fail(sub + ".radius", "must be positive");
        return locate(sub, [&] { return make_ball(std::move(center), radius); });
    }
    if (key == "box") {
        check_keys(require_object(body, sub), sub, {"lower", "upper"}, {});
        auto lower = get_vector(body["lower"], sub + ".lower");
        auto upper = get_vector(body["upper"], sub + ".upper");
        return locate(sub, [&] { return make_box(std::move(lower), std::move(upper)); });
    }
    if (key == "rotsquare") {
        check_keys(require_object(body, sub), sub, {"center", "edge"}, {"angle", "angle_deg"});
        auto center = get_vector(body["center"], sub + ".center");
        if (center.size() != 2) fail(sub + ".center", "must have exactly 2 coordinates");
        double edge = get_number(body["edge"], sub + ".edge");
        if (!(edge > 0.0)) fail(sub + ".edge", "must be positive");
        bool has_rad = body.contains("angle");
        bool has_deg = body.contains("angle_deg");
        if (has_rad == has_deg) {
            fail(sub, "needs exactly one of \"angle\" (radians) or \"angle_deg\"");
        }
        double angle = has_rad ? get_number(body["angle"], sub + ".angle")
                               : get_number(body["angle_deg"], sub + ".angle_deg") *
                                     (3.14159265358979323846 / 180.0);
        return locate(sub, [&] { return make_rotated_square(center[0], center[1], edge, angle); });
    }
    if (key == "halfspace") {
        check_keys(require_object(body, sub), sub, {"normal", "offset"}, {});
        auto normal = get_vector(body["normal"], sub + ".normal");
        double offset = get_number(body["offset"], sub + ".offset");
        return locate(sub, [&] { return make_half_space(std::move(normal), offset); });
    }
    if (key == "union" || key == "intersect") {
        if (!body.is_array() || body.size() < 2) {
            fail(sub, "must be an array of at least two regions");
        }
        std::vector<RegionPtr> parts;
        for (std::size_t i = 0; i < body.size(); ++i) {
            parts.push_back(parse_region(body[i], sub + "[" + std::to_string(i) + "]"));
        }
        return locate(sub, [&] {
            return key == "union" ? region_union(std::move(parts))
                                  : region_intersection(std::move(parts));
        });
    }
    if (key == "diff") {
        check_keys(require_object(body, sub), sub, {"base", "remove"}, {});
        RegionPtr base = parse_region(body["base"], sub + ".base");
        RegionPtr removed = parse_region(body["remove"], sub + ".remove");
        return locate(sub,
                      [&] { return region_difference(std::move(base), std::move(removed)); });
    }
    fail(path + "." + key, "unknown region kind");
}

SpikingFunction parse_function(const json& j, const std::string& path,
                               const std::string& base_dir) {
    require_object(j, path);
    if (j.contains("indicator")) {
        check_keys(j, path, {"indicator"}, {"size", "value"});
        RegionPtr region = parse_region(j["indicator"], path + ".indicator");
        double value = 1.0;
        if (j.contains("value")) {
            value = get_number(j["value"], path + ".value");
        }
        std::optional<std::int64_t> size;
        if (j.contains("size")) {
            std::int64_t s = get_integer(j["size"], path + ".size");
            if (s < 1) fail(path + ".size", "must be at least 1");
            size = s;
        }
        return locate(path,
                      [&] { return SpikingFunction::indicator(std::move(region), value, 0.0, size); });
    }
    if (j.contains("maxcorr")) {
        check_keys(j, path, {"maxcorr"}, {});
        const std::string sub = path + ".maxcorr";
        check_keys(require_object(j["maxcorr"], sub), sub, {"refs", "threshold"}, {});
        if (!j["maxcorr"]["refs"].is_string()) fail(sub + ".refs", "must be a file path string");
        std::string refs_path = j["maxcorr"]["refs"].get<std::string>();
        double threshold = get_number(j["maxcorr"]["threshold"], sub + ".threshold");

        std::filesystem::path resolved(refs_path);
        if (resolved.is_relative()) resolved = std::filesystem::path(base_dir) / resolved;
        IdxDataset ds = locate(sub + ".refs", [&] { return load_idx_images(resolved.string()); });
        auto refs = std::make_shared<ReferenceSet>(
            ReferenceSet::from_rows(ds.count, ds.dim(), [&](std::size_t i, std::size_t a) {
                return static_cast<double>(ds.image(i)[a]);
            }));
        // The tag keeps the path as written so serialization round-trips.
        return SpikingFunction::max_correlation(std::move(refs), threshold, refs_path);
    }
    fail(path, "must have \"indicator\" or \"maxcorr\"");
}

DataSpace parse_space(const json& j, const std::string& path) {
    check_keys(require_object(j, path), path, {"lower", "upper"}, {});
    auto lower = get_vector(j["lower"], path + ".lower");
    auto upper = get_vector(j["upper"], path + ".upper");
    return locate(path, [&] { return DataSpace(std::move(lower), std::move(upper)); });
}

SceneEval parse_eval(const json& j, const std::string& path) {
    SceneEval eval;
    check_keys(require_object(j, path), path, {},
               {"mode", "n", "seed", "alpha", "contour", "tau1", "tau2"});
    if (j.contains("mode")) {
        if (!j["mode"].is_string()) fail(path + ".mode", "must be \"expected\" or \"montecarlo\"");
        std::string mode = j["mode"].get<std::string>();
        if (mode == "expected") {
            eval.mode = EvalMode::Expected;
        } else if (mode == "montecarlo" || mode == "mc") {
            eval.mode = EvalMode::MonteCarlo;
        } else {
            fail(path + ".mode", "must be \"expected\" or \"montecarlo\", got \"" + mode + "\"");
        }
    }
    if (j.contains("n")) {
        eval.N = get_integer(j["n"], path + ".n");
        if (eval.N < 1) fail(path + ".n", "must be at least 1");
    }
    if (eval.mode == EvalMode::MonteCarlo && eval.N < 1000) {
        fail(path + ".n", "must be at least 1000 in montecarlo mode");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
            fail(path + ".seed", "must be a non-negative integer");
        }
        if (j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() < 0) {
            fail(path + ".seed", "must be a non-negative integer");
        }
        eval.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("alpha")) {
        eval.alpha = get_number(j["alpha"], path + ".alpha");
        if (!(eval.alpha > 0.0)) fail(path + ".alpha", "must be positive");
    }
    if (j.contains("contour")) {
        const std::string sub = path + ".contour";
        check_keys(require_object(j["contour"], sub), sub, {"kappa", "top_level"}, {});
        ContourConfig contour;
        contour.kappa = get_number(j["contour"]["kappa"], sub + ".kappa");
        std::int64_t top = get_integer(j["contour"]["top_level"], sub + ".top_level");
        if (top < 0 || top > 1'000'000) fail(sub + ".top_level", "must be in [0, 1000000]");
        contour.top_level = static_cast<int>(top);
        locate(sub, [&] { contour.validate(); return 0; });
        eval.contour = contour;
    }
    if (j.contains("tau1")) eval.tau1 = get_number(j["tau1"], path + ".tau1");
    if (j.contains("tau2")) eval.tau2 = get_number(j["tau2"], path + ".tau2");
    return eval;
}

json space_to_json(const DataSpace& space) {
    return json{{"lower", space.lower}, {"upper", space.upper}};
}

json region_to_json(const Region& region) {
    switch (region.kind()) {
        case Region::Kind::Ball:
            return json{{"ball",
                         {{"center", region.ball().center}, {"radius", region.ball().radius}}}};
        case Region::Kind::Box:
            return json{
                {"box", {{"lower", region.box().lower}, {"upper", region.box().upper}}}};
        case Region::Kind::RotSquare: {
            const RotatedSquare& rs = region.rot_square();
            return json{{"rotsquare",
                         {{"center", std::vector<double>{rs.cx, rs.cy}},
                          {"edge", rs.edge},
                          {"angle", rs.angle}}}};
        }
        case Region::Kind::HalfSpace:
            return json{{"halfspace",
                         {{"normal", region.half_space().normal},
                          {"offset", region.half_space().offset}}}};
        case Region::Kind::Union:
        case Region::Kind::Intersect: {
            json parts = json::array();
            for (const auto& child : region.children()) parts.push_back(region_to_json(*child));
            return json{{region.kind() == Region::Kind::Union ? "union" : "intersect",
                         std::move(parts)}};
        }
        case Region::Kind::Diff:
            return json{{"diff",
                         {{"base", region_to_json(*region.children()[0])},
                          {"remove", region_to_json(*region.children()[1])}}}};
    }
    throw Error("unreachable region kind");
}

json function_to_json(const SpikingFunction& f) {
    if (f.kind() == SpikingFunction::Kind::Indicator) {
        json out{{"indicator", region_to_json(*f.region())}};
        if (f.inside_value() != 1.0) out["value"] = f.inside_value();
        if (f.size() != default_param_count(*f.region())) out["size"] = f.size();
        return out;
    }
    if (f.kind() == SpikingFunction::Kind::MaxCorrelation) {
        return json{{"maxcorr", {{"refs", f.tag()}, {"threshold", f.threshold()}}}};
    }
    throw ConfigError("only indicator and maxcorr functions can be written to a scene file");
}

} // namespace

Scene parse_scene(const std::string& text, const std::string& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        fail("$", std::string("invalid JSON: ") + e.what());
    }
    check_keys(require_object(root, "$"), "$", {"space", "distribution", "candidates"}, {"eval"});

    Scene scene;
    scene.space = parse_space(root["space"], "$.space");

    const json& dist = require_object(root["distribution"], "$.distribution");
    check_keys(dist, "$.distribution", {"components"}, {"space", "overlaps"});
    if (dist.contains("space")) {
        DataSpace inner = parse_space(dist["space"], "$.distribution.space");
        if (inner.lower != scene.space.lower || inner.upper != scene.space.upper) {
            fail("$.distribution.space", "must match $.space");
        }
    }
    bool overlaps = false;
    if (dist.contains("overlaps")) {
        if (!dist["overlaps"].is_boolean()) fail("$.distribution.overlaps", "must be a boolean");
        overlaps = dist["overlaps"].get<bool>();
    }
    if (!dist["components"].is_array() || dist["components"].empty()) {
        fail("$.distribution.components", "must be a nonempty array");
    }
    std::vector<std::pair<RegionPtr, double>> components;
    for (std::size_t i = 0; i < dist["components"].size(); ++i) {
        std::string cpath = "$.distribution.components[" + std::to_string(i) + "]";
        const json& comp = require_object(dist["components"][i], cpath);
        check_keys(comp, cpath, {"region", "weight"}, {});
        double weight = get_number(comp["weight"], cpath + ".weight");
        if (!(weight > 0.0)) fail(cpath + ".weight", "must be positive");
        components.emplace_back(parse_region(comp["region"], cpath + ".region"), weight);
    }
    scene.distribution = locate("$.distribution", [&] {
        return std::make_shared<const DataDistribution>(scene.space, std::move(components),
                                                        overlaps);
    });

    if (!root["candidates"].is_array() || root["candidates"].empty()) {
        fail("$.candidates", "must be a nonempty array");
    }
    std::set<std::string> seen_names;
    for (std::size_t i = 0; i < root["candidates"].size(); ++i) {
        std::string cpath = "$.candidates[" + std::to_string(i) + "]";
        const json& cand = require_object(root["candidates"][i], cpath);
        check_keys(cand, cpath, {"name", "functions"}, {});
        if (!cand["name"].is_string() || cand["name"].get<std::string>().empty()) {
            fail(cpath + ".name", "must be a nonempty string");
        }
        std::string name = cand["name"].get<std::string>();
        if (!seen_names.insert(name).second) {
            fail(cpath + ".name", "duplicate name \"" + name + "\"");
        }
        if (!cand["functions"].is_array() || cand["functions"].empty()) {
            fail(cpath + ".functions", "must be a nonempty array");
        }
        std::vector<SpikingFunction> fns;
        for (std::size_t k = 0; k < cand["functions"].size(); ++k) {
            fns.push_back(parse_function(cand["functions"][k],
                                         cpath + ".functions[" + std::to_string(k) + "]",
                                         base_dir));
        }
        for (const auto& f : fns) {
            if (f.kind() == SpikingFunction::Kind::Indicator &&
                region_dim(*f.region()) != scene.space.dim()) {
                fail(cpath + ".functions", "indicator region dimension does not match $.space");
            }
        }
        scene.candidates.push_back({std::move(name), FunctionSequence(std::move(fns))});
    }

    if (root.contains("eval")) scene.eval = parse_eval(root["eval"], "$.eval");
    if (scene.eval.mode == EvalMode::MonteCarlo && scene.eval.N < 1000) {
        fail("$.eval.n", "must be at least 1000 in montecarlo mode");
    }
    return scene;
}

Scene load_scene_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scene file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string base = std::filesystem::path(path).parent_path().string();
    if (base.empty()) base = ".";
    return parse_scene(buffer.str(), base);
}

std::string serialize_scene(const Scene& scene) {
    json root;
    root["space"] = space_to_json(scene.space);

    json comps = json::array();
    for (const auto& c : scene.distribution->components()) {
        comps.push_back(json{{"region", region_to_json(*c.region)}, {"weight", c.weight}});
    }
    root["distribution"] = json{{"components", std::move(comps)}};
    if (scene.distribution->overlaps_declared()) root["distribution"]["overlaps"] = true;

    json cands = json::array();
    for (const auto& cand : scene.candidates) {
        json fns = json::array();
        for (const auto& f : cand.sequence.functions) fns.push_back(function_to_json(f));
        cands.push_back(json{{"name", cand.name}, {"functions", std::move(fns)}});
    }
    root["candidates"] = std::move(cands);

    json eval;
    eval["mode"] = scene.eval.mode == EvalMode::Expected ? "expected" : "montecarlo";
    eval["n"] = scene.eval.N;
    eval["seed"] = scene.eval.seed;
    eval["alpha"] = scene.eval.alpha;
    if (scene.eval.contour.has_value()) {
        eval["contour"] =
            json{{"kappa", scene.eval.contour->kappa}, {"top_level", scene.eval.contour->top_level}};
    }
    if (scene.eval.tau1.has_value()) eval["tau1"] = *scene.eval.tau1;
    if (scene.eval.tau2.has_value()) eval["tau2"] = *scene.eval.tau2;
    root["eval"] = std::move(eval);

    return root.dump(2) + "\n";
}

} // namespace spikelab
