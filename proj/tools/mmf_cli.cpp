// Command-line front end for the fusion runtime. Talks to the shared
// library strictly through the C interface in mmf/mmf.h.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mmf/mmf.h"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CLI::ValidationError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CLI::ValidationError("cannot write file: " + path);
    out << text;
}

[[noreturn]] void die(const char* what) {
    std::fprintf(stderr, "error: %s: %s\n", what, mmf_last_error());
    std::exit(1);
}

// RAII for the C handles so error paths stay simple.
template <typename T, void (*Free)(T*)>
struct Handle {
    T* ptr = nullptr;
    ~Handle() { Free(ptr); }
    T** slot() { return &ptr; }
    T* get() const { return ptr; }
};
using ConfigHandle = Handle<mmf_config, mmf_config_free>;
using SceneHandle = Handle<mmf_scene, mmf_scene_free>;
using ProfilesHandle = Handle<mmf_profiles, mmf_profiles_free>;
using TraceHandle = Handle<mmf_trace, mmf_trace_free>;

struct OwnedString {
    char* ptr = nullptr;
    ~OwnedString() { mmf_string_free(ptr); }
    char** slot() { return &ptr; }
    std::string str() const { return ptr ? ptr : ""; }
};

void load_profiles_arg(const std::string& path, ProfilesHandle& out) {
    if (path.empty()) {
        if (mmf_profiles_default(out.slot()) != MMF_OK) die("profiles");
    } else if (mmf_profiles_load(path.c_str(), out.slot()) != MMF_OK) {
        die("profiles");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multimodal instruction fusion simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", mmf_version());

    // run: replay one trace through the pipeline
    auto* run = app.add_subcommand("run", "replay a trace and print per-interaction outcomes");
    std::string run_config, run_trace, run_scene = "A", run_profiles, run_out;
    uint64_t run_seed = 1;
    run->add_option("--config", run_config, "config JSON file (defaults: all tiers H)");
    run->add_option("--trace", run_trace, "trace file")->required();
    run->add_option("--scene", run_scene, "scene: A, B, or a scene JSON path");
    run->add_option("--profiles", run_profiles, "engine profile JSON (default: built-in)");
    run->add_option("--seed", run_seed, "random seed");
    run->add_option("--out", run_out, "also write the result JSON here");

    // gen-trace
    auto* gen = app.add_subcommand("gen-trace", "synthesize an interaction trace");
    std::string gen_op = "describe", gen_scene = "A", gen_out, gen_options;
    int gen_n = 30;
    uint64_t gen_seed = 1;
    gen->add_option("--op", gen_op,
                    "locate | describe | describe_ambiguous | zoom | capture");
    gen->add_option("--context", gen_scene, "scene: A, B, or a scene JSON path");
    gen->add_option("--n", gen_n, "number of interactions");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--options", gen_options, "generator options JSON (see README)");
    gen->add_option("--out", gen_out, "write the trace here instead of stdout");

    // sweep
    auto* sw = app.add_subcommand("sweep", "evaluate every tier combination");
    std::string sw_contexts = "A,B", sw_ops = "locate,describe", sw_profiles, sw_dir = "results";
    int sw_n = 30, sw_jobs = 1;
    uint64_t sw_seed = 1;
    sw->add_option("--contexts", sw_contexts, "comma list of scenes");
    sw->add_option("--ops", sw_ops, "comma list of operations");
    sw->add_option("--n", sw_n, "interactions per cell");
    sw->add_option("--seed", sw_seed, "root seed");
    sw->add_option("--jobs", sw_jobs, "worker threads");
    sw->add_option("--profiles", sw_profiles, "engine profile JSON (default: built-in)");
    sw->add_option("--out", sw_dir, "output directory for cells.csv + sweep.json");

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "fit profile parameters to a measurement table");
    std::string cal_targets = "data/table5.csv", cal_out = "profiles/fitted.params",
                cal_start;
    int cal_budget = 20000;
    cal->add_option("--targets", cal_targets, "measurement table CSV");
    cal->add_option("--start", cal_start, "starting profile JSON (default: built-in)");
    cal->add_option("--budget", cal_budget, "max objective evaluations");
    cal->add_option("--out", cal_out, "fitted profile output path");

    // report
    auto* rep = app.add_subcommand("report", "trend checks + recommendations for a sweep");
    std::string rep_dir = "results";
    rep->add_option("--in", rep_dir, "sweep output directory (reads cells.csv)");

    CLI11_PARSE(app, argc, argv);

    if (*run) {
        ConfigHandle cfg;
        if (run_config.empty()) {
            if (mmf_config_default(cfg.slot()) != MMF_OK) die("config");
        } else if (mmf_config_parse(read_file(run_config).c_str(), cfg.slot()) != MMF_OK) {
            die("config");
        }
        SceneHandle scene;
        if (mmf_scene_load(run_scene.c_str(), scene.slot()) != MMF_OK) die("scene");
        ProfilesHandle profiles;
        load_profiles_arg(run_profiles, profiles);
        TraceHandle trace;
        if (mmf_trace_parse(read_file(run_trace).c_str(), trace.slot()) != MMF_OK) die("trace");
        OwnedString out;
        if (mmf_run_trial(cfg.get(), profiles.get(), scene.get(), trace.get(), run_seed,
                          out.slot()) != MMF_OK)
            die("run");
        std::cout << out.str();
        if (!run_out.empty()) write_file(run_out, out.str());
        return 0;
    }

    if (*gen) {
        SceneHandle scene;
        if (mmf_scene_load(gen_scene.c_str(), scene.slot()) != MMF_OK) die("scene");
        TraceHandle trace;
        if (mmf_trace_generate(gen_op.c_str(), scene.get(), gen_n, gen_seed,
                               gen_options.empty() ? nullptr : gen_options.c_str(),
                               trace.slot()) != MMF_OK)
            die("gen-trace");
        OwnedString text;
        if (mmf_trace_serialize(trace.get(), text.slot()) != MMF_OK) die("gen-trace");
        if (gen_out.empty())
            std::cout << text.str();
        else
            write_file(gen_out, text.str());
        return 0;
    }

    if (*sw) {
        ProfilesHandle profiles;
        load_profiles_arg(sw_profiles, profiles);
        OwnedString csv;
        if (mmf_sweep(sw_contexts.c_str(), sw_ops.c_str(), sw_n, sw_seed, sw_jobs,
                      profiles.get(), sw_dir.c_str(), csv.slot()) != MMF_OK)
            die("sweep");
        std::cout << csv.str();
        std::fprintf(stderr, "wrote %s/cells.csv\n", sw_dir.c_str());
        return 0;
    }

    if (*cal) {
        ProfilesHandle start;
        ProfilesHandle* startp = nullptr;
        if (!cal_start.empty()) {
            load_profiles_arg(cal_start, start);
            startp = &start;
        }
        OwnedString summary;
        if (mmf_calibrate(cal_targets.c_str(), startp ? startp->get() : nullptr, cal_budget,
                          cal_out.c_str(), summary.slot()) != MMF_OK)
            die("calibrate");
        std::cout << summary.str();
        std::fprintf(stderr, "wrote %s\n", cal_out.c_str());
        return 0;
    }

    if (*rep) {
        std::string csv = read_file(rep_dir + "/cells.csv");
        OwnedString text;
        if (mmf_report(csv.c_str(), text.slot()) != MMF_OK) die("report");
        std::cout << text.str();
        return 0;
    }

    return 0;
}
