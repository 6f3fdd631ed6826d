#include "mmf/mmf.h"

#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mmf/bench.hpp"
#include "mmf/config.hpp"
#include "mmf/profiles.hpp"
#include "mmf/scene.hpp"
#include "mmf/trace.hpp"

using ordered_json = nlohmann::ordered_json;

// Opaque handle types are thin wrappers over the C++ values.
struct mmf_config {
    mmf::FusionConfig value;
};
struct mmf_scene {
    mmf::SceneContext value;
};
struct mmf_profiles {
    mmf::ProfileSet value;
};
struct mmf_trace {
    mmf::Trace value;
};

namespace {

thread_local std::string g_last_error;

mmf_status status_of(mmf::Errc code) {
    switch (code) {
    case mmf::Errc::invalid_arg: return MMF_ERR_INVALID_ARG;
    case mmf::Errc::parse: return MMF_ERR_PARSE;
    case mmf::Errc::validation: return MMF_ERR_VALIDATION;
    case mmf::Errc::io: return MMF_ERR_IO;
    case mmf::Errc::state: return MMF_ERR_STATE;
    case mmf::Errc::internal: return MMF_ERR_INTERNAL;
    }
    return MMF_ERR_INTERNAL;
}

// Runs the body, translating exceptions into status codes + last_error.
template <typename Fn>
mmf_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const mmf::Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MMF_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return MMF_ERR_INTERNAL;
    }
}

mmf_status require(bool ok, const char* what) {
    if (ok) return MMF_OK;
    g_last_error = what;
    return MMF_ERR_INVALID_ARG;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

ordered_json breakdown_json(const mmf::InteractionOutcome& out) {
    ordered_json b = ordered_json::object();
    for (const auto& s : out.breakdown) b[s.stage] = s.ms;
    return b;
}

ordered_json outcome_json(const mmf::InteractionOutcome& out) {
    ordered_json j;
    j["interaction"] = out.interaction;
    j["operation"] = mmf::outcome_op_name(out.operation);
    if (out.operation == mmf::OutcomeOp::rejected)
        j["reject_reason"] = mmf::reject_reason_name(out.reject);
    if (out.gesture_effect) j["gesture"] = mmf::gesture_label_name(*out.gesture_effect);
    j["escalated"] = out.escalated;
    j["total_latency_ms"] = out.total_latency_ms;
    j["breakdown"] = breakdown_json(out);
    ordered_json targets = ordered_json::array();
    for (const auto& d : out.targets) {
        ordered_json t;
        t["object"] = d.source_object;
        t["class"] = d.class_id;
        t["x"] = d.position.x;
        t["y"] = d.position.y;
        t["confidence"] = d.confidence;
        targets.push_back(t);
    }
    j["targets"] = targets;
    if (out.correct) j["correct"] = *out.correct;
    return j;
}

} // namespace

extern "C" {

const char* mmf_last_error(void) { return g_last_error.c_str(); }

const char* mmf_version(void) { return "1.0.0"; }

void mmf_string_free(char* s) { delete[] s; }

// ---- config ------------------------------------------------------------------

mmf_status mmf_config_default(mmf_config** out) {
    if (auto rc = require(out != nullptr, "config_default: out is NULL")) return rc;
    return guarded([&] {
        *out = new mmf_config{mmf::FusionConfig{}};
        return MMF_OK;
    });
}

mmf_status mmf_config_parse(const char* json_text, mmf_config** out) {
    if (auto rc = require(json_text && out, "config_parse: NULL argument")) return rc;
    return guarded([&] {
        *out = new mmf_config{mmf::parse_config(json_text)};
        return MMF_OK;
    });
}

mmf_status mmf_config_serialize(const mmf_config* cfg, char** out_text) {
    if (auto rc = require(cfg && out_text, "config_serialize: NULL argument")) return rc;
    return guarded([&] {
        *out_text = dup_string(mmf::serialize_config(cfg->value));
        return MMF_OK;
    });
}

void mmf_config_free(mmf_config* cfg) { delete cfg; }

// ---- scene -------------------------------------------------------------------

mmf_status mmf_scene_load(const char* name_or_path, mmf_scene** out) {
    if (auto rc = require(name_or_path && out, "scene_load: NULL argument")) return rc;
    return guarded([&] {
        *out = new mmf_scene{mmf::load_context(name_or_path)};
        return MMF_OK;
    });
}

mmf_status mmf_scene_serialize(const mmf_scene* scene, char** out_text) {
    if (auto rc = require(scene && out_text, "scene_serialize: NULL argument")) return rc;
    return guarded([&] {
        *out_text = dup_string(mmf::serialize_scene(scene->value));
        return MMF_OK;
    });
}

void mmf_scene_free(mmf_scene* scene) { delete scene; }

// ---- profiles ----------------------------------------------------------------

mmf_status mmf_profiles_default(mmf_profiles** out) {
    if (auto rc = require(out != nullptr, "profiles_default: out is NULL")) return rc;
    return guarded([&] {
        *out = new mmf_profiles{mmf::ProfileSet::calibrated_defaults()};
        return MMF_OK;
    });
}

mmf_status mmf_profiles_load(const char* path, mmf_profiles** out) {
    if (auto rc = require(path && out, "profiles_load: NULL argument")) return rc;
    return guarded([&] {
        *out = new mmf_profiles{mmf::load_profiles(path)};
        return MMF_OK;
    });
}

mmf_status mmf_profiles_parse(const char* json_text, mmf_profiles** out) {
    if (auto rc = require(json_text && out, "profiles_parse: NULL argument")) return rc;
    return guarded([&] {
        *out = new mmf_profiles{mmf::parse_profiles(json_text)};
        return MMF_OK;
    });
}

mmf_status mmf_profiles_serialize(const mmf_profiles* p, char** out_text) {
    if (auto rc = require(p && out_text, "profiles_serialize: NULL argument")) return rc;
    return guarded([&] {
        *out_text = dup_string(mmf::serialize_profiles(p->value));
        return MMF_OK;
    });
}

void mmf_profiles_free(mmf_profiles* p) { delete p; }

// ---- trace -------------------------------------------------------------------

mmf_status mmf_trace_parse(const char* text, mmf_trace** out) {
    if (auto rc = require(text && out, "trace_parse: NULL argument")) return rc;
    return guarded([&] {
        *out = new mmf_trace{mmf::parse_trace(text)};
        return MMF_OK;
    });
}

mmf_status mmf_trace_generate(const char* op, const mmf_scene* scene, int n, uint64_t seed,
                              const char* options_json, mmf_trace** out) {
    if (auto rc = require(op && scene && out, "trace_generate: NULL argument")) return rc;
    return guarded([&]() -> mmf_status {
        auto sop = mmf::scenario_op_from(op);
        if (!sop) throw mmf::Error(mmf::Errc::invalid_arg,
                                   std::string("trace_generate: unknown op \"") + op + "\"");
        mmf::ScenarioOptions opt;
        if (options_json && *options_json) {
            ordered_json j;
            try {
                j = ordered_json::parse(options_json);
            } catch (const std::exception& e) {
                throw mmf::Error(mmf::Errc::parse,
                                 std::string("trace_generate: bad options JSON: ") + e.what());
            }
            opt.deictic_fraction = j.value("deictic_fraction", opt.deictic_fraction);
            opt.with_pointing = j.value("with_pointing", opt.with_pointing);
            opt.plural_fraction = j.value("plural_fraction", opt.plural_fraction);
            opt.gesture_offset_min = j.value("gesture_offset_min", opt.gesture_offset_min);
            opt.gesture_offset_max = j.value("gesture_offset_max", opt.gesture_offset_max);
            opt.interaction_gap_ms = j.value("interaction_gap_ms", opt.interaction_gap_ms);
            opt.hand_noise = j.value("hand_noise", opt.hand_noise);
        }
        *out = new mmf_trace{mmf::generate_scenario(*sop, scene->value, n, seed, opt)};
        return MMF_OK;
    });
}

mmf_status mmf_trace_serialize(const mmf_trace* trace, char** out_text) {
    if (auto rc = require(trace && out_text, "trace_serialize: NULL argument")) return rc;
    return guarded([&] {
        *out_text = dup_string(mmf::serialize_trace(trace->value));
        return MMF_OK;
    });
}

void mmf_trace_free(mmf_trace* trace) { delete trace; }

// ---- pipeline ----------------------------------------------------------------

mmf_status mmf_run_trial(const mmf_config* cfg, const mmf_profiles* profiles,
                         const mmf_scene* scene, const mmf_trace* trace, uint64_t seed,
                         char** out_json) {
    if (auto rc = require(cfg && profiles && scene && trace && out_json,
                          "run_trial: NULL argument"))
        return rc;
    return guarded([&] {
        mmf::TrialResult res =
            mmf::run_trial(cfg->value, profiles->value, scene->value, trace->value, seed);
        ordered_json j;
        j["seed"] = seed;
        j["combo"] = cfg->value.combo();
        j["interactions"] = res.records.size();
        j["mean_latency_ms"] = res.mean_latency_ms();
        j["accuracy_pct"] = res.accuracy_pct();
        ordered_json records = ordered_json::array();
        for (const auto& r : res.records) records.push_back(outcome_json(r.outcome));
        j["records"] = records;
        j["viewport"] = {{"zoom_level", res.viewport.zoom_level},
                         {"captured_frames", res.viewport.captured_frames}};
        *out_json = dup_string(j.dump(2) + "\n");
        return MMF_OK;
    });
}

mmf_status mmf_sweep(const char* contexts_csv, const char* ops_csv, int n, uint64_t seed,
                     int jobs, const mmf_profiles* profiles, const char* out_dir,
                     char** out_cells_csv) {
    if (auto rc = require(contexts_csv && ops_csv && profiles, "sweep: NULL argument"))
        return rc;
    return guarded([&]() -> mmf_status {
        mmf::SweepOptions opt;
        opt.contexts = split_list(contexts_csv);
        opt.ops.clear();
        for (const auto& name : split_list(ops_csv)) {
            auto op = mmf::scenario_op_from(name);
            if (!op) throw mmf::Error(mmf::Errc::invalid_arg,
                                      "sweep: unknown op \"" + name + "\"");
            opt.ops.push_back(*op);
        }
        if (opt.contexts.empty() || opt.ops.empty())
            throw mmf::Error(mmf::Errc::invalid_arg, "sweep: contexts and ops must be nonempty");
        opt.n = n;
        opt.seed = seed;
        opt.jobs = jobs;
        opt.profiles = profiles->value;
        auto cells = mmf::sweep(opt);
        if (out_dir && *out_dir) mmf::write_sweep_outputs(out_dir, cells, opt);
        if (out_cells_csv) *out_cells_csv = dup_string(mmf::cells_to_csv(cells));
        return MMF_OK;
    });
}

mmf_status mmf_calibrate(const char* targets_csv_path, const mmf_profiles* start,
                         int max_evaluations, const char* out_profile_path,
                         char** out_summary_json) {
    if (auto rc = require(targets_csv_path != nullptr, "calibrate: targets path is NULL"))
        return rc;
    return guarded([&] {
        auto targets = mmf::load_targets_csv(targets_csv_path);
        mmf::ProfileSet start_set =
            start ? start->value : mmf::ProfileSet::calibrated_defaults();
        mmf::CalibrationResult res = mmf::calibrate(targets, start_set, max_evaluations);
        if (out_profile_path && *out_profile_path) {
            std::ofstream out(out_profile_path, std::ios::binary);
            if (!out)
                throw mmf::Error(mmf::Errc::io, std::string("calibrate: cannot write \"") +
                                                    out_profile_path + "\"");
            out << mmf::serialize_profiles(res.fitted);
        }
        if (out_summary_json) {
            ordered_json j;
            j["loss"] = res.loss;
            j["evaluations"] = res.evaluations;
            j["converged"] = res.converged;
            j["warnings"] = res.warnings;
            j["fitted"] = {{"asr_h_success", res.fitted.asr.h.success_prob},
                           {"asr_l_success", res.fitted.asr.l.success_prob},
                           {"size_factor_small", res.fitted.scene.size_factor_small},
                           {"distance_lambda", res.fitted.scene.distance_lambda},
                           {"fusion_overhead_ms", res.fitted.fusion_overhead_ms},
                           {"cloud_rtt_ms", res.fitted.cloud_rtt_ms}};
            *out_summary_json = dup_string(j.dump(2) + "\n");
        }
        return MMF_OK;
    });
}

mmf_status mmf_report(const char* cells_csv_text, char** out_text) {
    if (auto rc = require(cells_csv_text && out_text, "report: NULL argument")) return rc;
    return guarded([&] {
        auto cells = mmf::cells_from_csv(cells_csv_text);
        mmf::ReportResult rep = mmf::emit_report(cells);
        *out_text = dup_string(rep.text());
        return MMF_OK;
    });
}

} // extern "C"
