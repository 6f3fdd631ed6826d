#ifndef MMF_BENCH_HPP
#define MMF_BENCH_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mmf/config.hpp"
#include "mmf/fusion.hpp"
#include "mmf/profiles.hpp"
#include "mmf/trace.hpp"
#include "mmf/types.hpp"

namespace mmf {

// ---- single trial ----------------------------------------------------------

struct TrialRecord {
    int interaction = -1;
    InteractionOutcome outcome;
};

struct TrialResult {
    std::vector<TrialRecord> records; // one per interaction, trace order
    ViewportState viewport;

    double accuracy_pct() const; // share of correct interactions (needs truth)
    double mean_latency_ms() const;
};

// Runs a trace through the full simulated pipeline (engines -> queue ->
// matcher -> fusion) on the virtual clock. Deterministic in (inputs, seed):
// every engine draws from its own (seed, engine, interaction) substream, so
// retiering one engine never shifts another engine's randomness.
TrialResult run_trial(const FusionConfig& cfg, const ProfileSet& profiles,
                      const SceneContext& scene, const Trace& trace, Seed seed);

// ---- closed-form predictors --------------------------------------------------

// Expected end-to-end latency of one interaction under zero jitter:
//   max(asr + tc, gesture_offset + gr) + vision + overhead.
// gesture_offset < 0 means "no gesture in the interaction".
Millis predict_latency(const FusionConfig& cfg, const ProfileSet& p,
                       Millis gesture_offset_ms);

// Expected single-target command accuracy for a scene (probability the
// pipeline acts on exactly the right object, averaged over the scene's
// objects as equally likely targets).
double predict_accuracy(const FusionConfig& cfg, const ProfileSet& p,
                        const SceneContext& scene);

// ---- sweep -------------------------------------------------------------------

struct SweepCell {
    Tier od = Tier::H, asr = Tier::H, tc = Tier::H;
    std::optional<Tier> gr;   // nullopt: gesture engine idle for this op ("-")
    std::string context;      // scene name
    ScenarioOp op = ScenarioOp::locate;
    int n = 0;
    double mean_latency_ms = 0.0;
    double accuracy_pct = 0.0;
    double accuracy_se_pp = 0.0; // binomial standard error, percentage points
    ResourceVec resources;       // additive model estimate for the combo

    std::string combo_label() const; // "HL-H" style with '-' for idle gesture
};

struct SweepOptions {
    std::vector<std::string> contexts{"A", "B"};
    std::vector<ScenarioOp> ops{ScenarioOp::locate, ScenarioOp::describe};
    int n = 30;
    Seed seed = 1;
    int jobs = 1;
    ProfileSet profiles = ProfileSet::calibrated_defaults();
};

// Evaluates every tier combination for every (context, operation) cell.
// Commands that never consult the gesture engine collapse its tier axis
// (8 cells instead of 16). All combos of a cell replay the same generated
// trace with the same substreams, so combo-vs-combo deltas are paired.
// Escalation is forced off: each cell measures a fixed model deployment.
std::vector<SweepCell> sweep(const SweepOptions& opt);

std::string cells_to_csv(const std::vector<SweepCell>& cells);
std::vector<SweepCell> cells_from_csv(const std::string& text);

// Writes cells.csv + sweep.json (parameters echo) into dir.
void write_sweep_outputs(const std::string& dir, const std::vector<SweepCell>& cells,
                         const SweepOptions& opt);

// ---- published measurement table ---------------------------------------------

// One row of the reference deployment study: a tier combo with measured
// latency (ms) and accuracy (%) per operation and context, plus footprint.
struct TargetRow {
    Tier od, asr, tc, gr;
    double lat_o1_a, lat_o2_a, lat_o1_b, lat_o2_b;
    double acc_o1_a, acc_o2_a, acc_o1_b, acc_o2_b;
    ResourceVec resources;
};

std::vector<TargetRow> load_targets_csv(const std::string& path);

// ---- resource model ------------------------------------------------------------

// Additive per-engine footprint: resource = base + sum(tier==H ? delta : 0).
// Least-squares fit per resource dimension over the 16 measured combos.
struct ResourceModel {
    ResourceVec base;
    std::array<ResourceVec, 4> deltas; // od, asr, tc, gr
    std::array<double, 4> r2{};        // fit quality per dimension

    ResourceVec predict(Tier od, Tier asr, Tier tc, Tier gr) const;
};

ResourceModel fit_resource_model(const std::vector<TargetRow>& rows);

// ---- calibration ----------------------------------------------------------------

struct CalibrationResult {
    ProfileSet fitted;
    double loss = 0.0;
    int evaluations = 0;
    bool converged = false;
    std::vector<std::string> warnings; // e.g. tier monotonicity violations
};

// Fits the free profile parameters (keyword survival per ASR tier, small-
// object factor, distance falloff, fusion overhead, cloud RTT) plus the
// resource model against the measurement table, by coordinate descent over
// closed-form cell predictions. Deterministic; stops on budget or stall.
CalibrationResult calibrate(const std::vector<TargetRow>& targets,
                            const ProfileSet& start, int max_evaluations = 20000);

// ---- reporting -----------------------------------------------------------------

struct ReportResult {
    std::string table;                      // aligned human-readable cells
    std::vector<std::string> trend_checks;  // "ok: ..." / "FAIL: ..." lines
    std::vector<std::string> recommendations;
    bool trends_ok = false;
    std::string text() const;
};

// Renders sweep cells and re-derives the headline tradeoff trends (ASR
// dominates latency; detector tier dominates accuracy; context B is harder;
// TC tier trades latency for nothing). Recommendation block appears only
// when the trends hold.
ReportResult emit_report(const std::vector<SweepCell>& cells);

} // namespace mmf

#endif
