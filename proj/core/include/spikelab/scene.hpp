#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spikelab/ranking.hpp"
#include "spikelab/sequence.hpp"

namespace spikelab {

// Evaluation defaults carried by a scene file; CLI flags can override them.
struct SceneEval {
    EvalMode mode = EvalMode::Expected;
    std::int64_t N = 10'000;
    std::uint64_t seed = 0;
    double alpha = 1e-10;
    std::optional<ContourConfig> contour;
    std::optional<double> tau1;
    std::optional<double> tau2;
};

// A declarative experiment: space, data distribution, named candidate
// sequences, evaluation defaults. The reference distribution is always the
// uniform one on the space (derived, never stored).
struct Scene {
    DataSpace space;
    std::shared_ptr<const DataDistribution> distribution;
    std::vector<Candidate> candidates;
    SceneEval eval;

    UniformNull null_distribution() const { return UniformNull(space); }
};

// Parse and validate scene JSON. Schema errors carry a JSON-path locator,
// e.g. "$.distribution.components[0].region.ball.radius: must be positive".
// base_dir resolves relative reference-set paths in maxcorr functions.
Scene parse_scene(const std::string& text, const std::string& base_dir = ".");

Scene load_scene_file(const std::string& path);

// Canonical serialization (sorted keys, stable formatting); parsing the
// output yields an equal scene.
std::string serialize_scene(const Scene& scene);

} // namespace spikelab
