#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spikelab/cli.hpp"
#include "spikelab/scene.hpp"

using namespace spikelab;
using nlohmann::json;

namespace {

std::string scene_path(const char* name) {
    return std::string(SPIKELAB_SCENES_DIR) + "/" + name;
}

// A minimal well-formed scene, tweakable through string replacement.
const char* kMinimalScene = R"({
  "space": {"lower": [0, 0], "upper": [7, 4]},
  "distribution": {
    "components": [
      {"region": {"ball": {"center": [2, 2], "radius": 1}}, "weight": 1},
      {"region": {"ball": {"center": [5, 2], "radius": 1}}, "weight": 1}
    ]
  },
  "candidates": [
    {"name": "solo", "functions": [
      {"indicator": {"union": [
        {"ball": {"center": [2, 2], "radius": 1}},
        {"ball": {"center": [5, 2], "radius": 1}}
      ]}}
    ]}
  ],
  "eval": {"mode": "expected", "n": 10000}
})";

std::string replaced(std::string text, const std::string& from, const std::string& to) {
    auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

// Run the CLI and capture both streams.
struct CliRun {
    int exit_code;
    std::string out;
    std::string err;
};
CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_command(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const char* name, const std::string& content) {
    std::string path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream f(path, std::ios::trunc);
    f << content;
    return path;
}

} // namespace

TEST_CASE("a minimal scene parses with the documented defaults") {
    Scene scene = parse_scene(kMinimalScene);
    CHECK(scene.space.dim() == 2);
    CHECK(scene.space.measure() == doctest::Approx(28.0));
    CHECK(scene.distribution->components().size() == 2);
    REQUIRE(scene.candidates.size() == 1);
    CHECK(scene.candidates[0].name == "solo");
    CHECK(scene.candidates[0].sequence.size() == 1);
    CHECK(scene.candidates[0].sequence.total_param_count() == 6);
    CHECK(scene.eval.mode == EvalMode::Expected);
    CHECK(scene.eval.N == 10'000);
    CHECK(scene.eval.alpha == doctest::Approx(1e-10));
    CHECK_FALSE(scene.eval.contour.has_value());
}

TEST_CASE("all bundled scenes load and carry the documented shapes") {
    Scene circles = load_scene_file(scene_path("two_circles.json"));
    CHECK(circles.candidates.size() == 6);
    CHECK(circles.eval.N == 10'000);
    CHECK(circles.space.measure() == doctest::Approx(28.0));

    Scene diamonds = load_scene_file(scene_path("two_diamonds.json"));
    CHECK(diamonds.candidates.size() == 3);
    CHECK(diamonds.eval.N == 4200);
    CHECK(diamonds.distribution->components().size() == 1);

    Scene squares = load_scene_file(scene_path("fifteen_squares.json"));
    CHECK(squares.candidates.size() == 2);
    CHECK(squares.eval.N == 11'200);
    CHECK(squares.distribution->components().size() == 15);

    Scene concentric = load_scene_file(scene_path("concentric_circles.json"));
    CHECK(concentric.candidates.size() == 2);
    CHECK(concentric.eval.N == 10'000);
    CHECK(concentric.distribution->components().size() == 2);
}

TEST_CASE("schema violations point at the offending JSON path") {
    CHECK_THROWS_WITH_AS(parse_scene("{nope"), doctest::Contains("$: invalid JSON"), SchemaError);

    CHECK_THROWS_WITH_AS(parse_scene(R"({"space": {}})"),
                         doctest::Contains("missing required field"), SchemaError);

    std::string bad_radius = replaced(kMinimalScene, "\"radius\": 1}}, \"weight\": 1},",
                                      "\"radius\": -1}}, \"weight\": 1},");
    CHECK_THROWS_WITH_AS(parse_scene(bad_radius),
                         doctest::Contains(
                             "$.distribution.components[0].region.ball.radius: must be positive"),
                         SchemaError);

    std::string unknown = replaced(kMinimalScene, "\"eval\"", "\"extra\": 1, \"eval\"");
    CHECK_THROWS_WITH_AS(parse_scene(unknown), doctest::Contains("$.extra: unknown field"),
                         SchemaError);

    std::string bad_kind = replaced(kMinimalScene, "\"ball\": {\"center\": [5, 2]",
                                    "\"blob\": {\"center\": [5, 2]");
    CHECK_THROWS_WITH_AS(parse_scene(bad_kind), doctest::Contains("unknown region kind"),
                         SchemaError);

    std::string small_n = replaced(kMinimalScene, "\"mode\": \"expected\", \"n\": 10000",
                                   "\"mode\": \"montecarlo\", \"n\": 500");
    CHECK_THROWS_WITH_AS(parse_scene(small_n),
                         doctest::Contains("$.eval.n: must be at least 1000"), SchemaError);

    // Append a second candidate reusing the first one's name.
    std::string dup = replaced(kMinimalScene,
                               "]}\n  ],",
                               "]},\n    {\"name\": \"solo\", \"functions\": ["
                               "{\"indicator\": {\"ball\": {\"center\": [2, 2], \"radius\": 1}}}"
                               "]}\n  ],");
    CHECK_THROWS_WITH_AS(parse_scene(dup), doctest::Contains("duplicate name"), SchemaError);

    // distribution.space, when present, must equal the top-level space.
    std::string mismatched = replaced(kMinimalScene, "\"components\":",
                                      "\"space\": {\"lower\": [0, 0], \"upper\": [8, 4]}, "
                                      "\"components\":");
    CHECK_THROWS_WITH_AS(parse_scene(mismatched),
                         doctest::Contains("$.distribution.space: must match $.space"),
                         SchemaError);

    // Functions must be indicator or maxcorr.
    std::string no_fn = replaced(kMinimalScene, "\"indicator\"", "\"mystery\"");
    CHECK_THROWS_WITH_AS(parse_scene(no_fn),
                         doctest::Contains("must have \"indicator\" or \"maxcorr\""), SchemaError);

    // A rotated square must not declare both angle encodings.
    const char* both_angles = R"({
      "space": {"lower": [0, 0], "upper": [10, 6]},
      "distribution": {"components": [
        {"region": {"rotsquare": {"center": [4, 3], "edge": 2, "angle": 0.5, "angle_deg": 30}},
         "weight": 1}]},
      "candidates": [{"name": "x", "functions": [
        {"indicator": {"rotsquare": {"center": [4, 3], "edge": 2, "angle": 0.5}}}]}]
    })";
    CHECK_THROWS_WITH_AS(parse_scene(both_angles),
                         doctest::Contains("exactly one of \"angle\" (radians) or \"angle_deg\""),
                         SchemaError);
}

TEST_CASE("serialization is canonical and round-trips every bundled scene") {
    for (const char* name : {"two_circles.json", "two_diamonds.json", "fifteen_squares.json",
                             "concentric_circles.json"}) {
        CAPTURE(name);
        Scene first = load_scene_file(scene_path(name));
        std::string s1 = serialize_scene(first);
        Scene second = parse_scene(s1);
        std::string s2 = serialize_scene(second);
        CHECK(s1 == s2);

        // The reparsed scene behaves identically, not just prints identically.
        CHECK(second.candidates.size() == first.candidates.size());
        CHECK(second.space.measure() == first.space.measure());
        CHECK(second.distribution->omega() == first.distribution->omega());
    }
}

TEST_CASE("zscore subcommand prints two decimals") {
    CliRun r = cli({"zscore", "100", "5", "1000"});
    CHECK(r.exit_code == kExitOk);
    CHECK(r.out == "9.52\n");
    CHECK(r.err.empty());

    CHECK(cli({"zscore", "1000", "50", "10000"}).out == "30.12\n");
    CHECK(cli({"zscore", "10000", "197", "10000"}).out == "138.66\n");

    // Degenerate counts are a usage error, reported on stderr.
    CliRun bad = cli({"zscore", "0", "0", "1000"});
    CHECK(bad.exit_code == kExitUsage);
    CHECK(bad.out.empty());
    CHECK(bad.err.find("error") != std::string::npos);
}

TEST_CASE("bad invocations exit with the usage code") {
    CHECK(cli({}).exit_code == kExitUsage);
    CHECK(cli({"no-such-command"}).exit_code == kExitUsage);
    CHECK(cli({"eval"}).exit_code == kExitUsage); // --scene is required
    CHECK(cli({"eval", "--scene", "/nonexistent.json"}).exit_code == kExitUsage);
    CHECK(cli({"eval", "--scene", scene_path("two_circles.json"), "--format", "yaml"}).exit_code ==
          kExitUsage);
    // Several candidates and no --candidate flag.
    CHECK(cli({"eval", "--scene", scene_path("two_circles.json")}).exit_code == kExitUsage);
    CHECK(cli({"--help"}).exit_code == kExitOk);
}

TEST_CASE("eval emits the expected-mode report as JSON and CSV") {
    CliRun r = cli({"eval", "--scene", scene_path("two_circles.json"), "--candidate", "a"});
    REQUIRE(r.exit_code == kExitOk);
    json rep = json::parse(r.out);
    CHECK(rep["mode"] == "expected");
    CHECK(rep["N"] == 10'000);
    CHECK(rep["totals"]["M"] == 10'000);
    CHECK(rep["totals"]["Mp"] == 2244);
    CHECK(rep["totals"]["se"].get<double>() == doctest::Approx(1.494325).epsilon(1e-6));
    REQUIRE(rep["per_function"].size() == 1);
    CHECK(rep["per_function"][0]["size"] == 6);

    CliRun c = cli({"eval", "--scene", scene_path("two_circles.json"), "--candidate", "b",
                    "--format", "csv"});
    REQUIRE(c.exit_code == kExitOk);
    CHECK(c.out.rfind("function,M,Mp,se,size,conciseness,ability", 0) == 0);
    CHECK(c.out.find("\ntotal,") != std::string::npos);

    // --out writes the same bytes to a file.
    std::string out_path =
        (std::filesystem::temp_directory_path() / "spikelab_eval_out.json").string();
    CliRun f = cli({"eval", "--scene", scene_path("two_circles.json"), "--candidate", "a",
                    "--out", out_path});
    REQUIRE(f.exit_code == kExitOk);
    std::ifstream in(out_path);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == r.out);

    // Flag overrides: doubling N doubles the expected counts.
    CliRun big = cli({"eval", "--scene", scene_path("two_circles.json"), "--candidate", "a",
                      "--n", "20000"});
    json rep2 = json::parse(big.out);
    CHECK(rep2["N"] == 20'000);
    CHECK(rep2["totals"]["M"] == 20'000);
}

TEST_CASE("rank lists the most able encoder first") {
    CliRun r = cli({"rank", "--scene", scene_path("two_circles.json")});
    REQUIRE(r.exit_code == kExitOk);
    json ranked = json::parse(r.out);
    REQUIRE(ranked.is_array());
    REQUIRE(ranked.size() == 6);
    CHECK(ranked[0]["name"] == "b");
    CHECK(ranked[0]["bucket"] == 0);
    CHECK(ranked[0]["total_size"] == 6);

    CliRun c = cli({"rank", "--scene", scene_path("concentric_circles.json"), "--format", "csv"});
    REQUIRE(c.exit_code == kExitOk);
    CHECK(c.out.rfind("rank,name,bucket,se,ability,total_size", 0) == 0);
    CHECK(c.out.find("1,outer_only,") != std::string::npos);
}

TEST_CASE("objective reports the single-function hand value") {
    CliRun r = cli({"objective", "--scene", scene_path("two_circles.json"), "--candidate", "a"});
    REQUIRE(r.exit_code == kExitOk);
    json obj = json::parse(r.out);
    CHECK(obj["mode"] == "expected");
    CHECK(obj["value"].get<double>() == doctest::Approx(1.743379).epsilon(1e-6));
    CHECK(obj["sequence_term"].get<double>() == doctest::Approx(1.494325).epsilon(1e-6));
    REQUIRE(obj["per_function"].size() == 1);
    CHECK(obj["per_function"][0]["M1"] == 10'000);
    CHECK(obj["per_function"][0]["estimated_size"].get<double>() == doctest::Approx(6.0));
}

TEST_CASE("verify-golden passes on the bundled tables and fails on tampering") {
    CliRun ok = cli({"verify-golden", "--scenes-dir", SPIKELAB_SCENES_DIR});
    CHECK(ok.exit_code == kExitOk);
    CHECK(ok.out.find("FAIL") == std::string::npos);
    CHECK(ok.out.find("rows within tolerance") != std::string::npos);

    std::string tampered = temp_file("spikelab_bad_golden.csv",
                                     "scene,candidate,metric,value,tol\n"
                                     "two_circles,a,ability,0.999,0.001\n");
    CliRun bad = cli({"verify-golden", "--scenes-dir", SPIKELAB_SCENES_DIR, "--golden", tampered});
    CHECK(bad.exit_code == kExitMismatch);
    CHECK(bad.out.find("FAIL") != std::string::npos);
}
