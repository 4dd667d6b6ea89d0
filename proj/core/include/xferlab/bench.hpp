#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xferlab/attack.hpp"
#include "xferlab/data.hpp"
#include "xferlab/enhance.hpp"
#include "xferlab/model.hpp"

namespace xferlab::bench {

struct ReportRow {
  std::string method;      // none | ila | ilapp
  std::string baseline;    // fgsm | ifgsm | pgd | mifgsm | ifgsm+pgd
  std::string source;
  std::string victim;
  std::string constraint;  // linf | l2
  double epsilon = 0.0;
  size_t p = 0;
  std::string lambda;      // "inf" or a number
  std::string tap;
  size_t n = 0;
  double success_rate = 0.0;
  double mean_ce_loss = 0.0;
  double mean_disturbance = 0.0;
  uint64_t seed = 0;
};

struct TransferReport {
  std::vector<ReportRow> rows;
};

/// Shortest decimal representation that round-trips the double.
std::string format_double(double v);

void write_report_csv(const TransferReport& rep, const std::string& path);
void write_report_json(const TransferReport& rep, const std::string& path);
TransferReport read_report_csv(const std::string& path);

/// Fraction of adversarial examples the victim misclassifies (argmax ties
/// go to the lowest class index). With quantize set, examples are snapped
/// to the 8-bit grid first, mirroring on-disk bitmap delivery.
double eval_transfer(const nn::Model& victim, const std::vector<Tensor>& advs,
                     const std::vector<uint16_t>& ys, bool quantize,
                     size_t threads = 1);

/// Mean source-model cross-entropy of the adversarial examples and mean
/// intermediate-level disturbance ||g(adv) - g(clean)||_2 at the tap.
std::pair<double, double> disturbance_stats(const nn::Model& m, const std::string& tap,
                                            const std::vector<Tensor>& advs,
                                            const std::vector<Tensor>& cleans,
                                            const std::vector<uint16_t>& ys,
                                            size_t threads = 1);

struct VictimRef {
  std::string id;
  const nn::Model* model = nullptr;
};

struct ExperimentSetup {
  std::string source_id;
  const nn::Model* source = nullptr;
  std::vector<VictimRef> victims;
  const data::Dataset* test = nullptr;
};

/// Seeded sample of test indices classified correctly by the source and
/// every victim (ascending order).
std::vector<size_t> filter_population(const ExperimentSetup& setup, size_t n,
                                      uint64_t seed, size_t threads = 1);

enum class Mode { None, ILA, ILAPP };
std::string mode_name(Mode m);
Mode mode_from_string(const std::string& s);

struct PipelineConfig {
  attack::Method method = attack::Method::IFGSM;
  attack::Norm norm = attack::Norm::Linf;
  double epsilon = 0.03;
  size_t p = 10;
  double alpha = 1.0 / 255.0;
  double momentum = 1.0;
  double restart_radius = -1.0;  // negative: use epsilon (PGD only)
  Mode mode = Mode::ILAPP;
  double lambda = enhance::kLambdaInf;
  bool normalized = true;
  size_t steps = 100;
  std::string tap = "pool1";
  size_t population = 500;
  bool quantize = true;
  uint64_t seed = 1;
  size_t threads = 0;
  bool ensemble_pgd = false;  // pool an extra PGD trajectory per example
};

attack::AttackConfig attack_config_for(const PipelineConfig& cfg, size_t example_index);

/// Baseline phase output: one trajectory bundle per population example
/// (two when ensemble_pgd pools I-FGSM and PGD).
struct BaselineSet {
  std::vector<size_t> indices;
  std::vector<uint16_t> ys;
  std::vector<Tensor> cleans;
  std::vector<std::vector<attack::Trajectory>> trajs;
  std::vector<Tensor> advs;
  size_t constraint_violations = 0;
};

BaselineSet run_baseline_set(const ExperimentSetup& setup, const PipelineConfig& cfg);

struct EnhancedSet {
  std::vector<Tensor> advs;
  size_t degenerate_guides = 0;  // fell back to the baseline result
  size_t constraint_violations = 0;
};

/// Enhancement phase: fit a guide per example from its trajectories and
/// maximize the feature-space projection. cfg.mode selects ILA or ILA++.
EnhancedSet run_enhance_set(const nn::Model& source, const BaselineSet& base,
                            const PipelineConfig& cfg);

/// One report row per victim for the given adversarial set.
void append_rows(TransferReport& rep, const ExperimentSetup& setup,
                 const PipelineConfig& cfg, const std::string& method,
                 const std::string& baseline_name, const std::vector<Tensor>& advs,
                 const std::vector<Tensor>& cleans, const std::vector<uint16_t>& ys);

struct PipelineResult {
  BaselineSet base;
  EnhancedSet enhanced;  // empty advs when mode == None
  TransferReport report;
};

/// Full pipeline for one configuration: baseline, optional enhancement,
/// evaluation on every victim.
PipelineResult run_pipeline(const ExperimentSetup& setup, const PipelineConfig& cfg);

TransferReport sweep_p(const ExperimentSetup& setup, PipelineConfig base,
                       const std::vector<size_t>& p_values);
TransferReport sweep_lambda(const ExperimentSetup& setup, PipelineConfig base,
                            const std::vector<double>& lambda_values);
TransferReport sweep_layer(const ExperimentSetup& setup, PipelineConfig base,
                           const std::vector<std::string>& taps);

std::string lambda_label(double lambda);

}  // namespace xferlab::bench
