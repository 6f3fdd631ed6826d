#include "mmf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "mmf/lexicon.hpp"
#include "mmf/syncq.hpp"

namespace mmf {

using ordered_json = nlohmann::ordered_json;

// ---- single trial ------------------------------------------------------------

double TrialResult::accuracy_pct() const {
    int scored = 0, right = 0;
    for (const auto& r : records) {
        if (!r.outcome.correct) continue;
        ++scored;
        if (*r.outcome.correct) ++right;
    }
    return scored == 0 ? 0.0 : 100.0 * right / scored;
}

double TrialResult::mean_latency_ms() const {
    if (records.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& r : records) sum += r.outcome.total_latency_ms;
    return sum / static_cast<double>(records.size());
}

TrialResult run_trial(const FusionConfig& cfg, const ProfileSet& profiles,
                      const SceneContext& scene, const Trace& trace, Seed seed) {
    cfg.validate();

    // One RNG stream per (engine, interaction): a tier change in one engine
    // can never shift the draws any other engine sees, and replaying the
    // same trace under a different combo keeps the comparison paired.
    std::unordered_map<int, Rng> asr_rng, tc_rng, gr_rng, od_rng;
    auto stream = [&](std::unordered_map<int, Rng>& cache, const char* tag, int inter) -> Rng& {
        auto it = cache.find(inter);
        if (it == cache.end()) {
            uint64_t s = derive_stream(derive_stream(seed, tag), static_cast<uint64_t>(inter));
            it = cache.emplace(inter, Rng(s)).first;
        }
        return it->second;
    };

    // engines produce their tokens against the virtual clock
    std::vector<TokenEnvelope> envelopes;
    for (const auto& ev : trace.events) {
        TokenEnvelope env;
        env.capture_t = ev.t;
        if (ev.kind == TraceKind::utterance) {
            AsrResult asr = simulate_asr(ev.keywords, cfg.asr, profiles,
                                         stream(asr_rng, "asr", ev.interaction));
            AuralToken tok =
                classify_text(asr, cfg.tc, profiles, stream(tc_rng, "tc", ev.interaction));
            tok.t = ev.t;
            tok.interaction = ev.interaction;
            env.enqueue_t = ev.t + tok.asr_ms + tok.tc_ms;
            env.producer = 0;
            env.payload = tok;
        } else {
            GestureToken tok = recognize_gesture(ev.true_label, ev.hand, cfg.gr, profiles,
                                                 stream(gr_rng, "gr", ev.interaction));
            tok.t = ev.t;
            tok.interaction = ev.interaction;
            env.enqueue_t = ev.t + tok.gr_ms;
            env.producer = 1;
            env.payload = tok;
        }
        envelopes.push_back(std::move(env));
    }

    // capture order; aural before gesture on the (never generated) exact tie
    std::stable_sort(envelopes.begin(), envelopes.end(),
                     [](const TokenEnvelope& a, const TokenEnvelope& b) {
                         if (a.capture_t != b.capture_t) return a.capture_t < b.capture_t;
                         return a.is_aural() && !b.is_aural();
                     });

    SoftMatcher matcher(cfg.match_window_ms);
    std::vector<MatchedBundle> bundles;
    for (auto& env : envelopes) {
        matcher.push(std::move(env));
        for (auto& b : matcher.take_ready()) bundles.push_back(std::move(b));
    }
    matcher.finish();
    for (auto& b : matcher.take_ready()) bundles.push_back(std::move(b));

    // fusion consumes bundles in decision order; the detector draws from the
    // stream of whichever interaction's bundle is being resolved
    int current_inter = 0;
    VisionFn vision = [&](std::span<const SceneObject> candidates, const std::set<int>& wanted,
                          Tier tier, int frames) {
        return detect_objects(candidates, wanted, tier, frames, profiles,
                              stream(od_rng, "od", current_inter));
    };
    FusionEngine engine(cfg, scene, profiles, vision);

    int n_inter = trace.interactions();
    std::vector<std::optional<GroundTruth>> truths(static_cast<size_t>(n_inter));
    std::vector<std::optional<TrialRecord>> slots(static_cast<size_t>(n_inter));
    for (const auto& ev : trace.events)
        if (ev.interaction >= 0 && !truths[static_cast<size_t>(ev.interaction)])
            truths[static_cast<size_t>(ev.interaction)] = interaction_truth(trace, ev.interaction);

    for (const auto& bundle : bundles) {
        int inter = bundle.aural ? bundle.aural->interaction : bundle.gesture->interaction;
        current_inter = inter;
        const GroundTruth* truth =
            (inter >= 0 && inter < n_inter && truths[static_cast<size_t>(inter)])
                ? &*truths[static_cast<size_t>(inter)]
                : nullptr;
        InteractionOutcome out = engine.fuse(bundle, truth);
        if (inter < 0 || inter >= n_inter) continue;
        auto& slot = slots[static_cast<size_t>(inter)];
        // the bundle carrying the utterance defines an utterance-led
        // interaction; a stray gesture bundle only stands in when nothing
        // better arrives (gesture-led interactions)
        if (bundle.aural || !slot) slot = TrialRecord{inter, std::move(out)};
    }

    TrialResult result;
    for (auto& slot : slots)
        if (slot) result.records.push_back(std::move(*slot));
    result.viewport = engine.viewport();
    return result;
}

// ---- closed-form predictors ----------------------------------------------------

Millis predict_latency(const FusionConfig& cfg, const ProfileSet& p, Millis gesture_offset_ms) {
    double aural = p.asr.tier(cfg.asr).base_latency_ms +
                   (cfg.asr == Tier::L ? p.cloud_rtt_ms : 0.0) + p.tc.tier(cfg.tc).base_latency_ms;
    double pre = aural;
    if (gesture_offset_ms >= 0.0) {
        double gesture = gesture_offset_ms + p.gr_window_fill_ms + p.gr.tier(cfg.gr).base_latency_ms;
        pre = std::max(aural, gesture);
    }
    double vision = cfg.frames_per_detect * p.od.tier(cfg.od).base_latency_ms;
    return pre + vision + p.fusion_overhead_ms;
}

double predict_accuracy(const FusionConfig& cfg, const ProfileSet& p, const SceneContext& scene) {
    double kw = p.asr.tier(cfg.asr).success_prob;
    double f1 = p.tc.tier(cfg.tc).success_prob;
    double noop_w = p.tc_noop_weight;
    // acts on the right class iff the classifier lands on either command
    double tc_path = kw * (f1 + (1.0 - f1) * (1.0 - noop_w)) + (1.0 - kw) * (2.0 / 3.0);
    double map = p.od.tier(cfg.od).success_prob;

    if (scene.objects.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& obj : scene.objects) {
        // single-target command on this object's class: every instance of
        // the class must come back from the detector
        double det = 1.0;
        for (int idx : scene.indices_of(obj.class_id)) {
            const auto& inst = scene.objects[static_cast<size_t>(idx)];
            det *= detection_probability(inst, map, p.scene.size_factor_small,
                                         p.scene.distance_lambda);
        }
        acc += kw * tc_path * det;
    }
    return 100.0 * acc / static_cast<double>(scene.objects.size());
}

// ---- sweep ----------------------------------------------------------------------

std::string SweepCell::combo_label() const {
    std::string s;
    s += tier_char(od);
    s += tier_char(asr);
    s += tier_char(tc);
    s += gr ? tier_char(*gr) : '-';
    return s;
}

namespace {

bool op_uses_gesture(ScenarioOp op) {
    return op == ScenarioOp::describe || op == ScenarioOp::describe_ambiguous;
}

ResourceVec combo_resources(const ProfileSet& p, Tier od, Tier asr, Tier tc,
                            std::optional<Tier> gr) {
    ResourceVec v = p.resource_base;
    if (od == Tier::H) v += p.od.h.resource_delta;
    if (asr == Tier::H) v += p.asr.h.resource_delta;
    if (tc == Tier::H) v += p.tc.h.resource_delta;
    if (gr && *gr == Tier::H) v += p.gr.h.resource_delta;
    return v;
}

std::string csv_num(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

} // namespace

std::vector<SweepCell> sweep(const SweepOptions& opt) {
    if (opt.n < 1) throw Error(Errc::invalid_arg, "sweep: n must be positive");
    if (opt.jobs < 1) throw Error(Errc::invalid_arg, "sweep: jobs must be positive");
    for (auto op : opt.ops)
        if (op == ScenarioOp::zoom || op == ScenarioOp::capture)
            throw Error(Errc::invalid_arg,
                        "sweep: zoom/capture are single-engine operations; sweep covers "
                        "locate/describe commands");

    struct CellPlan {
        SweepCell cell;
        const SceneContext* scene;
        const Trace* trace;
        Seed trial_seed;
    };

    // one scene per context, one trace per (context, op); all combos of a
    // cell replay the identical trace and trial seed (paired comparisons)
    std::vector<SceneContext> scenes;
    scenes.reserve(opt.contexts.size());
    for (const auto& ctx : opt.contexts) scenes.push_back(load_context(ctx));

    std::vector<std::unique_ptr<Trace>> traces;
    std::vector<CellPlan> plans;
    for (size_t ci = 0; ci < opt.contexts.size(); ++ci) {
        for (auto op : opt.ops) {
            std::string cell_tag = opt.contexts[ci] + "/" + scenario_op_name(op);
            Seed trace_seed = derive_stream(opt.seed, cell_tag + "/trace");
            Seed trial_seed = derive_stream(opt.seed, cell_tag + "/trial");
            ScenarioOptions gen;
            traces.push_back(std::make_unique<Trace>(
                generate_scenario(op, scenes[ci], opt.n, trace_seed, gen)));
            const Trace* trace = traces.back().get();

            bool gesture = op_uses_gesture(op);
            for (Tier od : {Tier::H, Tier::L})
                for (Tier asr : {Tier::H, Tier::L})
                    for (Tier tc : {Tier::H, Tier::L}) {
                        if (gesture) {
                            for (Tier gr : {Tier::H, Tier::L}) {
                                CellPlan p;
                                p.cell.od = od;
                                p.cell.asr = asr;
                                p.cell.tc = tc;
                                p.cell.gr = gr;
                                p.cell.context = opt.contexts[ci];
                                p.cell.op = op;
                                p.cell.n = opt.n;
                                p.scene = &scenes[ci];
                                p.trace = trace;
                                p.trial_seed = trial_seed;
                                plans.push_back(std::move(p));
                            }
                        } else {
                            CellPlan p;
                            p.cell.od = od;
                            p.cell.asr = asr;
                            p.cell.tc = tc;
                            p.cell.gr = std::nullopt;
                            p.cell.context = opt.contexts[ci];
                            p.cell.op = op;
                            p.cell.n = opt.n;
                            p.scene = &scenes[ci];
                            p.trace = trace;
                            p.trial_seed = trial_seed;
                            plans.push_back(std::move(p));
                        }
                    }
        }
    }

    auto eval_cell = [&](CellPlan& plan) {
        FusionConfig cfg;
        cfg.od = plan.cell.od;
        cfg.asr = plan.cell.asr;
        cfg.tc = plan.cell.tc;
        cfg.gr = plan.cell.gr.value_or(Tier::H); // idle engine, tier is moot
        cfg.escalation_enabled = false;          // a cell measures a fixed deployment
        TrialResult res = run_trial(cfg, opt.profiles, *plan.scene, *plan.trace, plan.trial_seed);
        plan.cell.mean_latency_ms = res.mean_latency_ms();
        plan.cell.accuracy_pct = res.accuracy_pct();
        double p_hat = plan.cell.accuracy_pct / 100.0;
        plan.cell.accuracy_se_pp =
            100.0 * std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat) / plan.cell.n));
        // footprint of the leanest deployment able to run the cell: idle
        // engines count at their L tier
        plan.cell.resources =
            combo_resources(opt.profiles, plan.cell.od, plan.cell.asr, plan.cell.tc, plan.cell.gr);
    };

    if (opt.jobs == 1 || plans.size() <= 1) {
        for (auto& plan : plans) eval_cell(plan);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= plans.size()) return;
                eval_cell(plans[i]);
            }
        };
        std::vector<std::thread> pool;
        int jobs = std::min<int>(opt.jobs, static_cast<int>(plans.size()));
        pool.reserve(static_cast<size_t>(jobs));
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<SweepCell> cells;
    cells.reserve(plans.size());
    for (auto& plan : plans) cells.push_back(std::move(plan.cell));
    return cells;
}

std::string cells_to_csv(const std::vector<SweepCell>& cells) {
    std::ostringstream out;
    out << "od,asr,tc,gr,context,op,n,mean_latency_ms,accuracy_pct,accuracy_se_pp,"
           "ram_mb,cpu_pct,gpu_pct,vram_mb\n";
    for (const auto& c : cells) {
        out << tier_char(c.od) << ',' << tier_char(c.asr) << ',' << tier_char(c.tc) << ','
            << (c.gr ? std::string(1, tier_char(*c.gr)) : std::string("-")) << ',' << c.context
            << ',' << scenario_op_name(c.op) << ',' << c.n << ',' << csv_num(c.mean_latency_ms, 1)
            << ',' << csv_num(c.accuracy_pct, 1) << ',' << csv_num(c.accuracy_se_pp, 2) << ','
            << csv_num(c.resources.ram_mb, 1) << ',' << csv_num(c.resources.cpu_pct, 1) << ','
            << csv_num(c.resources.gpu_pct, 1) << ',' << csv_num(c.resources.vram_mb, 1) << '\n';
    }
    return out.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

double csv_double(const std::string& s, const char* what) {
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(Errc::parse, std::string("csv: bad number for ") + what + ": \"" + s + "\"");
    }
}

Tier csv_tier(const std::string& s, const char* what) {
    auto t = tier_from(s);
    if (!t) throw Error(Errc::parse, std::string("csv: bad tier for ") + what + ": \"" + s + "\"");
    return *t;
}

} // namespace

std::vector<SweepCell> cells_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::parse, "cells csv: empty input");
    std::vector<SweepCell> cells;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 14)
            throw Error(Errc::parse, "cells csv: expected 14 columns, got " +
                                         std::to_string(f.size()));
        SweepCell c;
        c.od = csv_tier(f[0], "od");
        c.asr = csv_tier(f[1], "asr");
        c.tc = csv_tier(f[2], "tc");
        c.gr = f[3] == "-" ? std::optional<Tier>{} : csv_tier(f[3], "gr");
        c.context = f[4];
        auto op = scenario_op_from(f[5]);
        if (!op) throw Error(Errc::parse, "cells csv: unknown op \"" + f[5] + "\"");
        c.op = *op;
        c.n = static_cast<int>(csv_double(f[6], "n"));
        c.mean_latency_ms = csv_double(f[7], "mean_latency_ms");
        c.accuracy_pct = csv_double(f[8], "accuracy_pct");
        c.accuracy_se_pp = csv_double(f[9], "accuracy_se_pp");
        c.resources.ram_mb = csv_double(f[10], "ram_mb");
        c.resources.cpu_pct = csv_double(f[11], "cpu_pct");
        c.resources.gpu_pct = csv_double(f[12], "gpu_pct");
        c.resources.vram_mb = csv_double(f[13], "vram_mb");
        cells.push_back(std::move(c));
    }
    return cells;
}

void write_sweep_outputs(const std::string& dir, const std::vector<SweepCell>& cells,
                         const SweepOptions& opt) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(Errc::io, "sweep: cannot create output dir \"" + dir + "\"");

    std::ofstream csv(dir + "/cells.csv", std::ios::binary);
    if (!csv) throw Error(Errc::io, "sweep: cannot write cells.csv");
    csv << cells_to_csv(cells);

    ordered_json meta;
    meta["seed"] = opt.seed;
    meta["n"] = opt.n;
    meta["contexts"] = opt.contexts;
    meta["ops"] = ordered_json::array();
    for (auto op : opt.ops) meta["ops"].push_back(scenario_op_name(op));
    meta["cells"] = cells.size();
    std::ofstream mj(dir + "/sweep.json", std::ios::binary);
    if (!mj) throw Error(Errc::io, "sweep: cannot write sweep.json");
    mj << meta.dump(2) << "\n";
}

// ---- published measurement table -------------------------------------------------

std::vector<TargetRow> load_targets_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io, "targets: cannot open \"" + path + "\"");
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::parse, "targets: empty file");
    std::vector<TargetRow> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto f = split_csv_line(line);
        if (f.size() != 16)
            throw Error(Errc::parse,
                        "targets: expected 16 columns, got " + std::to_string(f.size()));
        TargetRow r;
        r.od = csv_tier(f[0], "od");
        r.asr = csv_tier(f[1], "asr");
        r.tc = csv_tier(f[2], "tc");
        r.gr = csv_tier(f[3], "gr");
        r.lat_o1_a = csv_double(f[4], "lat_o1_a");
        r.lat_o2_a = csv_double(f[5], "lat_o2_a");
        r.acc_o1_a = csv_double(f[6], "acc_o1_a");
        r.acc_o2_a = csv_double(f[7], "acc_o2_a");
        r.lat_o1_b = csv_double(f[8], "lat_o1_b");
        r.lat_o2_b = csv_double(f[9], "lat_o2_b");
        r.acc_o1_b = csv_double(f[10], "acc_o1_b");
        r.acc_o2_b = csv_double(f[11], "acc_o2_b");
        r.resources.ram_mb = csv_double(f[12], "ram_mb");
        r.resources.cpu_pct = csv_double(f[13], "cpu_pct");
        r.resources.gpu_pct = csv_double(f[14], "gpu_pct");
        r.resources.vram_mb = csv_double(f[15], "vram_mb");
        rows.push_back(r);
    }
    if (rows.size() != 16)
        throw Error(Errc::validation,
                    "targets: expected 16 combo rows, got " + std::to_string(rows.size()));
    return rows;
}

// ---- resource model ----------------------------------------------------------------

namespace {

// Solves A x = b (n x n) by Gaussian elimination with partial pivoting.
std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
    size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-12)
            throw Error(Errc::internal, "resource fit: singular design matrix");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (size_t r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (size_t i = n; i-- > 0;) {
        double s = b[i];
        for (size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

double dim_value(const ResourceVec& v, int dim) {
    switch (dim) {
    case 0: return v.ram_mb;
    case 1: return v.cpu_pct;
    case 2: return v.gpu_pct;
    default: return v.vram_mb;
    }
}

void set_dim(ResourceVec& v, int dim, double val) {
    switch (dim) {
    case 0: v.ram_mb = val; break;
    case 1: v.cpu_pct = val; break;
    case 2: v.gpu_pct = val; break;
    default: v.vram_mb = val; break;
    }
}

} // namespace

ResourceVec ResourceModel::predict(Tier od, Tier asr, Tier tc, Tier gr) const {
    ResourceVec v = base;
    if (od == Tier::H) v += deltas[0];
    if (asr == Tier::H) v += deltas[1];
    if (tc == Tier::H) v += deltas[2];
    if (gr == Tier::H) v += deltas[3];
    return v;
}

ResourceModel fit_resource_model(const std::vector<TargetRow>& rows) {
    if (rows.size() < 5)
        throw Error(Errc::invalid_arg, "resource fit: needs at least 5 measurements");
    ResourceModel model;
    size_t m = rows.size();
    // design: [1, od, asr, tc, gr]
    std::vector<std::array<double, 5>> X(m);
    for (size_t i = 0; i < m; ++i)
        X[i] = {1.0, rows[i].od == Tier::H ? 1.0 : 0.0, rows[i].asr == Tier::H ? 1.0 : 0.0,
                rows[i].tc == Tier::H ? 1.0 : 0.0, rows[i].gr == Tier::H ? 1.0 : 0.0};

    for (int dim = 0; dim < 4; ++dim) {
        std::vector<std::vector<double>> xtx(5, std::vector<double>(5, 0.0));
        std::vector<double> xty(5, 0.0);
        for (size_t i = 0; i < m; ++i) {
            double y = dim_value(rows[i].resources, dim);
            for (int a = 0; a < 5; ++a) {
                xty[static_cast<size_t>(a)] += X[i][static_cast<size_t>(a)] * y;
                for (int b = 0; b < 5; ++b)
                    xtx[static_cast<size_t>(a)][static_cast<size_t>(b)] +=
                        X[i][static_cast<size_t>(a)] * X[i][static_cast<size_t>(b)];
            }
        }
        auto beta = solve_linear(std::move(xtx), std::move(xty));
        set_dim(model.base, dim, beta[0]);
        for (int e = 0; e < 4; ++e) set_dim(model.deltas[static_cast<size_t>(e)], dim, beta[static_cast<size_t>(e) + 1]);

        double mean = 0.0;
        for (size_t i = 0; i < m; ++i) mean += dim_value(rows[i].resources, dim);
        mean /= static_cast<double>(m);
        double ss_tot = 0.0, ss_res = 0.0;
        for (size_t i = 0; i < m; ++i) {
            double y = dim_value(rows[i].resources, dim);
            double pred = beta[0];
            for (int e = 0; e < 4; ++e) pred += X[i][static_cast<size_t>(e) + 1] * beta[static_cast<size_t>(e) + 1];
            ss_tot += (y - mean) * (y - mean);
            ss_res += (y - pred) * (y - pred);
        }
        model.r2[static_cast<size_t>(dim)] = ss_tot <= 1e-12 ? 1.0 : 1.0 - ss_res / ss_tot;
    }
    return model;
}

// ---- calibration ---------------------------------------------------------------------

namespace {

struct FreeParam {
    const char* name;
    double lo, hi;
    double* (*slot)(ProfileSet&);
};

double* slot_kw_h(ProfileSet& p) { return &p.asr.h.success_prob; }
double* slot_kw_l(ProfileSet& p) { return &p.asr.l.success_prob; }
double* slot_size(ProfileSet& p) { return &p.scene.size_factor_small; }
double* slot_lambda(ProfileSet& p) { return &p.scene.distance_lambda; }
double* slot_overhead(ProfileSet& p) { return &p.fusion_overhead_ms; }
double* slot_rtt(ProfileSet& p) { return &p.cloud_rtt_ms; }

const FreeParam free_params[] = {
    {"asr.h.success_prob", 0.30, 1.00, slot_kw_h},
    {"asr.l.success_prob", 0.30, 1.00, slot_kw_l},
    {"scene.size_factor_small", 0.30, 1.00, slot_size},
    {"scene.distance_lambda", 0.00, 1.50, slot_lambda},
    {"fusion_overhead_ms", 0.00, 500.00, slot_overhead},
    {"cloud_rtt_ms", 0.00, 1500.00, slot_rtt},
};

// Single-target command cells in both contexts carry all the signal the free
// parameters can see; squared error over scaled latency plus accuracy.
double calibration_loss(const ProfileSet& p, const std::vector<TargetRow>& targets,
                        const SceneContext& a, const SceneContext& b) {
    double loss = 0.0;
    for (const auto& row : targets) {
        FusionConfig cfg;
        cfg.od = row.od;
        cfg.asr = row.asr;
        cfg.tc = row.tc;
        cfg.gr = row.gr;
        double lat = predict_latency(cfg, p, -1.0);
        double la = (lat - row.lat_o1_a) / 1000.0;
        double lb = (lat - row.lat_o1_b) / 1000.0;
        loss += la * la + lb * lb;
        double aa = (predict_accuracy(cfg, p, a) - row.acc_o1_a) / 100.0;
        double ab = (predict_accuracy(cfg, p, b) - row.acc_o1_b) / 100.0;
        loss += 4.0 * (aa * aa + ab * ab);
    }
    return loss;
}

} // namespace

CalibrationResult calibrate(const std::vector<TargetRow>& targets, const ProfileSet& start,
                            int max_evaluations) {
    if (max_evaluations < 100)
        throw Error(Errc::invalid_arg, "calibrate: evaluation budget too small");
    SceneContext ctx_a = load_context("A");
    SceneContext ctx_b = load_context("B");

    CalibrationResult res;
    res.fitted = start;
    int evals = 0;
    auto loss_of = [&](const ProfileSet& p) {
        ++evals;
        return calibration_loss(p, targets, ctx_a, ctx_b);
    };

    double cur = loss_of(res.fitted);
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    bool stalled = false;
    while (!stalled && evals < max_evaluations) {
        double before_pass = cur;
        for (const auto& fp : free_params) {
            if (evals >= max_evaluations) break;
            // golden-section line search on this coordinate
            double lo = fp.lo, hi = fp.hi;
            double x1 = hi - golden * (hi - lo);
            double x2 = lo + golden * (hi - lo);
            auto eval_at = [&](double v) {
                ProfileSet trial = res.fitted;
                *fp.slot(trial) = v;
                return loss_of(trial);
            };
            double f1 = eval_at(x1), f2 = eval_at(x2);
            for (int it = 0; it < 40 && (hi - lo) > 1e-7 * (fp.hi - fp.lo) &&
                             evals < max_evaluations;
                 ++it) {
                if (f1 <= f2) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - golden * (hi - lo);
                    f1 = eval_at(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + golden * (hi - lo);
                    f2 = eval_at(x2);
                }
            }
            double best_x = f1 <= f2 ? x1 : x2;
            double best_f = std::min(f1, f2);
            if (best_f < cur) {
                *fp.slot(res.fitted) = best_x;
                cur = best_f;
            }
        }
        stalled = before_pass - cur < 1e-12;
    }

    res.loss = cur;
    res.evaluations = evals;
    res.converged = stalled;
    if (res.fitted.asr.h.success_prob < res.fitted.asr.l.success_prob)
        res.warnings.push_back("tier monotonicity violated: fitted H-tier keyword survival "
                               "fell below the L tier");
    if (!res.converged)
        res.warnings.push_back("calibration stopped on evaluation budget before stalling");

    // footprint model comes straight from the measurement table
    ResourceModel rm = fit_resource_model(targets);
    res.fitted.resource_base = rm.base;
    res.fitted.od.h.resource_delta = rm.deltas[0];
    res.fitted.asr.h.resource_delta = rm.deltas[1];
    res.fitted.tc.h.resource_delta = rm.deltas[2];
    res.fitted.gr.h.resource_delta = rm.deltas[3];
    return res;
}

// ---- reporting -------------------------------------------------------------------------

namespace {

struct CellKey {
    std::string context;
    ScenarioOp op;
    bool operator<(const CellKey& o) const {
        if (context != o.context) return context < o.context;
        return static_cast<int>(op) < static_cast<int>(o.op);
    }
};

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

std::string ReportResult::text() const {
    std::ostringstream out;
    out << table << "\n";
    out << "trend checks:\n";
    for (const auto& line : trend_checks) out << "  " << line << "\n";
    if (!recommendations.empty()) {
        out << "\nrecommended combinations:\n";
        for (const auto& line : recommendations) out << "  " << line << "\n";
    }
    return out.str();
}

ReportResult emit_report(const std::vector<SweepCell>& cells) {
    ReportResult rep;
    if (cells.empty()) throw Error(Errc::invalid_arg, "report: no cells");

    // aligned table
    std::ostringstream t;
    t << "combo  context  op                  n    latency_ms  accuracy_pct  ram_mb\n";
    for (const auto& c : cells) {
        char line[160];
        std::snprintf(line, sizeof line, "%-6s %-8s %-18s %5d  %10.1f  %12.1f  %6.0f",
                      c.combo_label().c_str(), c.context.c_str(), scenario_op_name(c.op), c.n,
                      c.mean_latency_ms, c.accuracy_pct, c.resources.ram_mb);
        t << line << "\n";
    }
    rep.table = t.str();

    std::map<CellKey, std::vector<const SweepCell*>> groups;
    for (const auto& c : cells) groups[{c.context, c.op}].push_back(&c);

    bool all_ok = true;
    auto check = [&](bool ok, const std::string& what) {
        rep.trend_checks.push_back((ok ? "ok: " : "FAIL: ") + what);
        all_ok = all_ok && ok;
    };

    // 1. speech tier separates the latency bands in every cell group
    bool asr_ok = true;
    for (const auto& [key, group] : groups) {
        double max_h = -1e300, min_l = 1e300;
        for (const auto* c : group) {
            if (c->asr == Tier::H)
                max_h = std::max(max_h, c->mean_latency_ms);
            else
                min_l = std::min(min_l, c->mean_latency_ms);
        }
        if (max_h >= min_l) asr_ok = false;
    }
    check(asr_ok, "speech tier dominates end-to-end latency (every H combo beats every L combo)");

    // 2. detector tier orders accuracy: (od,asr) buckets HH > LH > HL > LL
    bool det_ok = true;
    for (const auto& [key, group] : groups) {
        std::map<std::pair<int, int>, std::vector<double>> buckets;
        for (const auto* c : group)
            buckets[{c->od == Tier::H ? 0 : 1, c->asr == Tier::H ? 0 : 1}].push_back(
                c->accuracy_pct);
        if (buckets.size() != 4) continue;
        double hh = mean_of(buckets[{0, 0}]), lh = mean_of(buckets[{1, 0}]);
        double hl = mean_of(buckets[{0, 1}]), ll = mean_of(buckets[{1, 1}]);
        if (!(hh > lh && lh > hl && hl > ll)) det_ok = false;
    }
    check(det_ok, "accuracy orders by detector then speech tier (HH > LH > HL > LL)");

    // 3. the far context is uniformly harder
    std::map<ScenarioOp, std::map<std::string, std::vector<double>>> by_op;
    for (const auto& c : cells) by_op[c.op][c.context].push_back(c.accuracy_pct);
    bool ctx_ok = true;
    bool ctx_seen = false;
    for (auto& [op, per_ctx] : by_op) {
        if (per_ctx.count("A") && per_ctx.count("B")) {
            ctx_seen = true;
            if (mean_of(per_ctx["A"]) <= mean_of(per_ctx["B"])) ctx_ok = false;
        }
    }
    if (ctx_seen) check(ctx_ok, "the far context is harder (B accuracy below A)");

    // 4. classifier tier buys latency without accuracy
    bool tc_ok = true;
    double tc_delta_seen = 0.0;
    int tc_pairs = 0;
    for (const auto& [key, group] : groups) {
        for (const auto* c : group) {
            if (c->tc != Tier::H) continue;
            for (const auto* d : group) {
                if (d->tc != Tier::L || d->od != c->od || d->asr != c->asr || d->gr != c->gr)
                    continue;
                double dl = c->mean_latency_ms - d->mean_latency_ms;
                double da = std::abs(c->accuracy_pct - d->accuracy_pct);
                tc_delta_seen += dl;
                ++tc_pairs;
                if (da > 1.5) tc_ok = false;
            }
        }
    }
    if (tc_pairs > 0) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "classifier tier trades ~%.0f ms of latency for <1.5 pp of accuracy",
                      tc_delta_seen / tc_pairs);
        check(tc_ok && tc_delta_seen > 0.0, msg);
    }

    rep.trends_ok = all_ok;
    if (!all_ok) return rep;

    // recommendations come from the richest group available: a gesture-
    // bearing op in the near context when present
    const std::vector<const SweepCell*>* rec_group = nullptr;
    for (const auto& [key, group] : groups) {
        bool has_gr = group.size() == 16;
        if (key.context == "A" && has_gr) {
            rec_group = &group;
            break;
        }
        if (!rec_group && has_gr) rec_group = &group;
    }
    if (!rec_group) {
        for (const auto& [key, group] : groups) {
            rec_group = &group;
            break;
        }
    }

    auto band = [](double ms) { return std::llround(ms / 10.0); }; // 10 ms latency bands
    auto prefer = [&](const SweepCell* x, const SweepCell* y) {
        // lower latency band, then higher gesture tier, then higher accuracy
        if (band(x->mean_latency_ms) != band(y->mean_latency_ms))
            return band(x->mean_latency_ms) < band(y->mean_latency_ms);
        int xg = x->gr && *x->gr == Tier::H ? 1 : 0;
        int yg = y->gr && *y->gr == Tier::H ? 1 : 0;
        if (xg != yg) return xg > yg;
        return x->accuracy_pct > y->accuracy_pct;
    };

    const auto& g = *rec_group;
    double best_acc = -1.0;
    for (const auto* c : g) best_acc = std::max(best_acc, c->accuracy_pct);

    const SweepCell* acc_pick = nullptr;
    for (const auto* c : g)
        if (c->accuracy_pct >= best_acc - 1.5 && (!acc_pick || prefer(c, acc_pick))) acc_pick = c;

    const SweepCell* lat_pick = nullptr;
    for (const auto* c : g)
        if (c->accuracy_pct >= 65.0 && (!lat_pick || prefer(c, lat_pick))) lat_pick = c;

    double min_ram = 1e300;
    for (const auto* c : g) min_ram = std::min(min_ram, c->resources.ram_mb);
    const SweepCell* res_pick = nullptr;
    for (const auto* c : g)
        if (c->resources.ram_mb <= min_ram * 1.05 && (!res_pick || prefer(c, res_pick)))
            res_pick = c;

    char line[200];
    if (acc_pick) {
        std::snprintf(line, sizeof line,
                      "accuracy-first: %s (%.1f%% at %.0f ms) — top accuracy, cheapest latency "
                      "within 1.5 pp of the best",
                      acc_pick->combo_label().c_str(), acc_pick->accuracy_pct,
                      acc_pick->mean_latency_ms);
        rep.recommendations.push_back(line);
    }
    if (lat_pick) {
        std::snprintf(line, sizeof line,
                      "latency-first: %s (%.0f ms at %.1f%%) — fastest combination still "
                      "above 65%% accuracy",
                      lat_pick->combo_label().c_str(), lat_pick->mean_latency_ms,
                      lat_pick->accuracy_pct);
        rep.recommendations.push_back(line);
    }
    if (res_pick) {
        std::snprintf(line, sizeof line,
                      "resource-saver: %s (%.0f MB RAM at %.1f%%) — smallest footprint, "
                      "keeping the stronger gesture model",
                      res_pick->combo_label().c_str(), res_pick->resources.ram_mb,
                      res_pick->accuracy_pct);
        rep.recommendations.push_back(line);
    }
    return rep;
}

} // namespace mmf
