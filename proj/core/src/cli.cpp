#include "spikelab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spikelab/bioutput.hpp"
#include "spikelab/mnist.hpp"
#include "spikelab/report_io.hpp"
#include "spikelab/scene.hpp"

namespace spikelab {

namespace {

using nlohmann::json;

void write_output(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw IoError("cannot write " + out_path);
    f << text;
}

EvalMode parse_mode(const std::string& mode) {
    if (mode == "expected") return EvalMode::Expected;
    if (mode == "mc" || mode == "montecarlo") return EvalMode::MonteCarlo;
    throw ConfigError("mode must be expected or mc, got \"" + mode + "\"");
}

// Scene eval settings, overridden by whichever flags were actually given.
EvalConfig merge_eval_config(const Scene& scene, const CLI::App* cmd, const std::string& mode,
                             std::int64_t n, std::uint64_t seed, double alpha, int threads) {
    EvalConfig cfg;
    cfg.mode = scene.eval.mode;
    cfg.N = scene.eval.N;
    cfg.seed = scene.eval.seed;
    cfg.alpha = scene.eval.alpha;
    cfg.contour = scene.eval.contour;
    cfg.threads = threads;
    if (cmd->count("--mode") > 0) cfg.mode = parse_mode(mode);
    if (cmd->count("--n") > 0) cfg.N = n;
    if (cmd->count("--seed") > 0) cfg.seed = seed;
    if (cmd->count("--alpha") > 0) cfg.alpha = alpha;
    if (cfg.mode == EvalMode::MonteCarlo && cfg.N < 1000) {
        throw ConfigError("Monte Carlo evaluation needs N >= 1000");
    }
    return cfg;
}

const Candidate& pick_candidate(const Scene& scene, const std::string& name) {
    if (name.empty()) {
        if (scene.candidates.size() == 1) return scene.candidates.front();
        std::string names;
        for (const auto& c : scene.candidates) names += (names.empty() ? "" : ", ") + c.name;
        throw ConfigError("scene has several candidates (" + names + "); pick one with --candidate");
    }
    for (const auto& c : scene.candidates) {
        if (c.name == name) return c;
    }
    throw ConfigError("no candidate named \"" + name + "\" in the scene");
}

struct GoldenRow {
    std::string scene;
    std::string candidate;
    std::string metric;
    double value = 0.0;
    double tol = 0.0;
};

std::vector<GoldenRow> load_golden(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open golden table " + path);
    std::vector<GoldenRow> rows;
    std::string line;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (first) {
            first = false; // header row
            continue;
        }
        std::stringstream ss(line);
        GoldenRow row;
        std::string value_str, tol_str;
        if (!std::getline(ss, row.scene, ',') || !std::getline(ss, row.candidate, ',') ||
            !std::getline(ss, row.metric, ',') || !std::getline(ss, value_str, ',') ||
            !std::getline(ss, tol_str)) {
            throw IoError(path + ":" + std::to_string(line_no) +
                          ": expected scene,candidate,metric,value,tol");
        }
        try {
            row.value = std::stod(value_str);
            row.tol = std::stod(tol_str);
        } catch (const std::exception&) {
            throw IoError(path + ":" + std::to_string(line_no) + ": bad number");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError(path + ": no golden rows");
    return rows;
}

int run_verify_golden(const std::string& scenes_dir, const std::string& golden_path,
                      std::ostream& out) {
    std::vector<GoldenRow> rows = load_golden(golden_path);

    std::map<std::string, Scene> scenes;
    std::map<std::string, EfficiencyReport> reports;
    auto report_for = [&](const std::string& scene_name, const std::string& candidate) {
        std::string key = scene_name + "/" + candidate;
        auto hit = reports.find(key);
        if (hit != reports.end()) return hit->second;
        auto scene_it = scenes.find(scene_name);
        if (scene_it == scenes.end()) {
            Scene scene = load_scene_file(scenes_dir + "/" + scene_name + ".json");
            scene_it = scenes.emplace(scene_name, std::move(scene)).first;
        }
        const Scene& scene = scene_it->second;
        EvalConfig cfg;
        cfg.mode = EvalMode::Expected; // golden values are exact-arithmetic
        cfg.N = scene.eval.N;
        cfg.alpha = scene.eval.alpha;
        EfficiencyReport rep =
            evaluate_sequence(pick_candidate(scene, candidate).sequence, *scene.distribution, cfg);
        return reports.emplace(key, std::move(rep)).first->second;
    };

    int failures = 0;
    for (const auto& row : rows) {
        EfficiencyReport rep = report_for(row.scene, row.candidate);
        double got = 0.0;
        if (row.metric == "ability") {
            got = rep.totals.ability;
        } else if (row.metric == "total_se") {
            got = rep.totals.se;
        } else {
            throw IoError("unknown golden metric \"" + row.metric +
                          "\" (expected ability or total_se)");
        }
        bool ok = std::abs(got - row.value) <= row.tol;
        if (!ok) ++failures;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s %s/%s %s got %.6f want %.3f tol %.3g\n",
                      ok ? "  ok " : "FAIL ", row.scene.c_str(), row.candidate.c_str(),
                      row.metric.c_str(), got, row.value, row.tol);
        out << buf;
    }
    if (failures == 0) {
        out << "golden check: " << rows.size() << "/" << rows.size() << " rows within tolerance\n";
        return kExitOk;
    }
    out << "golden check: " << failures << " of " << rows.size() << " rows out of tolerance\n";
    return kExitMismatch;
}

json objective_to_json(const BiOutputCounts& counts, const ObjectiveBreakdown& breakdown,
                       const ObjectiveConfig& cfg, const std::vector<std::int64_t>& sizes,
                       const std::string& mode) {
    json per = json::array();
    for (std::size_t k = 0; k < counts.per_function.size(); ++k) {
        const auto& pf = counts.per_function[k];
        per.push_back(json{{"M1", pf.M1},
                           {"Mp1", pf.Mp1},
                           {"M2", pf.M2},
                           {"Mp2", pf.Mp2},
                           {"Lfix", pf.Lfix},
                           {"size", sizes[k]},
                           {"estimated_size", breakdown.estimated_sizes[k]},
                           {"term", breakdown.per_function_terms[k]}});
    }
    return json{{"value", breakdown.value},
                {"sequence_term", breakdown.sequence_term},
                {"per_function", std::move(per)},
                {"N", counts.N},
                {"L", counts.L},
                {"mode", mode},
                {"lambda1", cfg.lambda1},
                {"lambda2", cfg.lambda2},
                {"lambda", cfg.lambda},
                {"alpha", cfg.alpha},
                {"m", cfg.m}};
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"spiking-function laboratory"};
    app.name("spikelab");
    app.require_subcommand(1);

    // Shared option storage; each subcommand registers the flags it supports.
    std::string scene_path, candidate, mode_str, out_path, format = "json";
    std::int64_t n = 10'000;
    std::uint64_t seed = 0;
    double alpha = 1e-10;
    double tol = 0.0;
    int threads = 0;

    auto add_eval_flags = [&](CLI::App* cmd, bool with_candidate) {
        cmd->add_option("--scene", scene_path, "scene JSON file")->required();
        if (with_candidate) {
            cmd->add_option("--candidate", candidate,
                            "candidate name (optional when the scene has exactly one)");
        }
        cmd->add_option("--mode", mode_str, "expected | mc (default: scene setting)");
        cmd->add_option("--n", n, "sample count (default: scene setting)");
        cmd->add_option("--seed", seed, "RNG seed (default: scene setting)");
        cmd->add_option("--alpha", alpha, "SE smoothing (default: scene setting)");
        cmd->add_option("--threads", threads, "worker threads, 0 = all cores");
        cmd->add_option("--out", out_path, "output file (default: stdout)");
        cmd->add_option("--format", format, "json | csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate one candidate, write its report");
    add_eval_flags(eval_cmd, true);

    CLI::App* rank_cmd = app.add_subcommand("rank", "evaluate and rank all candidates");
    add_eval_flags(rank_cmd, false);
    rank_cmd->add_option("--tol", tol,
                         "efficiency-bucket tolerance (default 1e-3 expected, 3 sigma mc)");

    CLI::App* z_cmd = app.add_subcommand("zscore", "print the two-proportion Z for M Mp N");
    std::int64_t z_m = 0, z_mp = 0, z_n = 0;
    z_cmd->add_option("M", z_m, "data spike count")->required();
    z_cmd->add_option("Mp", z_mp, "reference spike count")->required();
    z_cmd->add_option("N", z_n, "sample count per stream")->required();

    CLI::App* obj_cmd = app.add_subcommand(
        "objective", "bi-output learning objective for one candidate");
    add_eval_flags(obj_cmd, true);
    std::int64_t obj_l = 1000;
    double lambda1 = 1.0, lambda2 = 1.0, lambda = 50.0;
    obj_cmd->add_option("--l", obj_l, "fixed random set size (mc mode)");
    obj_cmd->add_option("--lambda1", lambda1, "weight of the sequence term");
    obj_cmd->add_option("--lambda2", lambda2, "weight of the per-function terms");
    obj_cmd->add_option("--lambda", lambda, "second-head forgiveness weight");

    CLI::App* golden_cmd = app.add_subcommand(
        "verify-golden", "run the bundled scenes and diff against the golden table");
    std::string scenes_dir = "scenes";
    std::string golden_path;
    golden_cmd->add_option("--scenes-dir", scenes_dir, "directory with the bundled scene files");
    golden_cmd->add_option("--golden", golden_path,
                           "golden CSV (default: <scenes-dir>/golden_abilities.csv)");

    CLI::App* mnist_cmd =
        app.add_subcommand("mnist-demo", "max-correlation recognizer vs uniform noise");
    std::string train_path, test_path;
    double threshold = 0.15, tau2 = 1e-6;
    std::uint64_t noise_seed = 0;
    std::int64_t subsample = 0;
    mnist_cmd->add_option("--train", train_path, "IDX image file with reference images")
        ->required();
    mnist_cmd->add_option("--test", test_path, "IDX image file with probe images")->required();
    mnist_cmd->add_option("--threshold", threshold, "correlation threshold in (0,1)");
    mnist_cmd->add_option("--noise-seed", noise_seed, "seed for the noise probes");
    mnist_cmd->add_option("--subsample", subsample, "use only the first k reference images");
    mnist_cmd->add_option("--tau2", tau2, "conciseness threshold for the verdict");
    mnist_cmd->add_option("--threads", threads, "worker threads, 0 = all cores");
    mnist_cmd->add_option("--out", out_path, "output file (default: stdout)");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("spikelab");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (app.got_subcommand(eval_cmd)) {
            Scene scene = load_scene_file(scene_path);
            EvalConfig cfg = merge_eval_config(scene, eval_cmd, mode_str, n, seed, alpha, threads);
            const Candidate& cand = pick_candidate(scene, candidate);
            EfficiencyReport rep =
                cfg.contour.has_value()
                    ? evaluate_sequence_contour(cand.sequence, *scene.distribution, cfg)
                    : evaluate_sequence(cand.sequence, *scene.distribution, cfg);
            write_output(format == "json" ? report_to_json(rep) : report_to_csv(rep), out_path,
                         out);
            return kExitOk;
        }

        if (app.got_subcommand(rank_cmd)) {
            Scene scene = load_scene_file(scene_path);
            EvalConfig cfg = merge_eval_config(scene, rank_cmd, mode_str, n, seed, alpha, threads);
            CandidateSet set{scene.distribution.get(), scene.candidates};
            std::vector<RankedEntry> ranked = rank_candidates(set, cfg, tol);
            write_output(format == "json" ? ranked_to_json(ranked) : ranked_to_csv(ranked),
                         out_path, out);
            return kExitOk;
        }

        if (app.got_subcommand(z_cmd)) {
            double z = z_score({z_m, z_mp, z_n});
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.2f\n", z);
            out << buf;
            return kExitOk;
        }

        if (app.got_subcommand(obj_cmd)) {
            Scene scene = load_scene_file(scene_path);
            EvalConfig cfg = merge_eval_config(scene, obj_cmd, mode_str, n, seed, alpha, threads);
            const Candidate& cand = pick_candidate(scene, candidate);
            const FunctionSequence& seq = cand.sequence;

            ObjectiveConfig ocfg;
            ocfg.lambda1 = lambda1;
            ocfg.lambda2 = lambda2;
            ocfg.lambda = lambda;
            ocfg.alpha = cfg.alpha;
            ocfg.m = static_cast<int>(scene.space.dim());

            std::vector<std::int64_t> sizes;
            for (const auto& f : seq.functions) sizes.push_back(f.size());

            BiOutputCounts counts;
            std::string mode_name;
            if (cfg.mode == EvalMode::Expected) {
                // Scene candidates have no self-audit head; expected mode
                // reports the masked counts with a silent second head.
                mode_name = "expected";
                ExpectedCounts ec = expected_counts(seq, *scene.distribution, cfg.N,
                                                    cfg.mc_measure);
                counts.N = cfg.N;
                counts.L = 0;
                for (const auto& c : ec.per_function) {
                    counts.per_function.push_back({c.M, c.Mp, 0, 0, 0});
                }
            } else {
                mode_name = "montecarlo";
                std::vector<BiOutputFunction> fns;
                for (const auto& f : seq.functions) {
                    BiOutputFunction bf;
                    bf.total_size = f.size();
                    bf.dim = static_cast<int>(scene.space.dim());
                    bf.body = [f](std::span<const double> p) {
                        // First head mirrors the spiking function, squashed
                        // into (-1,1); the second head stays silent.
                        return std::array<double, 2>{std::tanh(f.evaluate(p)), std::tanh(-0.5)};
                    };
                    fns.push_back(std::move(bf));
                }
                UniformNull null_dist(scene.space);
                SampleMatrix data = scene.distribution->sample(
                    static_cast<std::size_t>(cfg.N), cfg.seed, cfg.threads);
                SampleMatrix ref = null_dist.sample(static_cast<std::size_t>(cfg.N), cfg.seed,
                                                    cfg.threads);
                FixedRandomSet fixed = FixedRandomSet::draw(
                    null_dist, static_cast<std::size_t>(obj_l), cfg.seed, cfg.threads);
                counts = count_bioutput(fns, data, ref, fixed, cfg.threads);
            }

            ObjectiveBreakdown breakdown = objective(counts, sizes, ocfg);
            write_output(objective_to_json(counts, breakdown, ocfg, sizes, mode_name).dump(2) +
                             "\n",
                         out_path, out);
            return kExitOk;
        }

        if (app.got_subcommand(golden_cmd)) {
            if (golden_path.empty()) golden_path = scenes_dir + "/golden_abilities.csv";
            return run_verify_golden(scenes_dir, golden_path, out);
        }

        if (app.got_subcommand(mnist_cmd)) {
            if (!(threshold > 0.0 && threshold < 1.0)) {
                throw ConfigError("threshold must lie in (0,1)");
            }
            IdxDataset train = load_idx_images(train_path);
            IdxDataset test = load_idx_images(test_path);
            std::optional<std::size_t> sub;
            if (mnist_cmd->count("--subsample") > 0) {
                if (subsample < 1) throw ConfigError("subsample must be at least 1");
                sub = static_cast<std::size_t>(subsample);
            }
            DemoResult res = run_demo(train, test, threshold, noise_seed, sub, threads);
            bool learns = learns_regularities(res.z, res.size, 2.0, tau2);
            json j{{"M", res.M},
                   {"Mp", res.Mp},
                   {"z", res.z},
                   {"size", res.size},
                   {"references", res.references},
                   {"probes", res.probes},
                   {"threshold", threshold},
                   {"tau2", tau2},
                   {"learns_regularities", learns}};
            write_output(j.dump(2) + "\n", out_path, out);
            return kExitOk;
        }
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    err << "no subcommand given\n";
    return kExitUsage;
}

} // namespace spikelab
