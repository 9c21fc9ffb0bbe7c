#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ssmvep/cli.hpp"
#include "ssmvep/errors.hpp"

using namespace ssmvep;

int main(int argc, char** argv) {
  CLI::App app{"Dual-frequency motion-evoked potential pipeline: "
               "plan, schedule, synth, classify, evaluate, sweep, psd"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration file");

  CLI::App* plan = app.add_subcommand("plan", "Derive and validate the frequency-pair plan");
  std::string plan_out = "plan.json";
  plan->add_option("--out", plan_out, "Output plan file");

  CLI::App* schedule =
      app.add_subcommand("schedule", "Export the frame-accurate dual-motion schedule of a target");
  std::string sched_plan, sched_out = "schedule.csv";
  int sched_target = 0;
  double sched_duration = 0.0;
  schedule->add_option("--plan", sched_plan, "Plan file")->required();
  schedule->add_option("--target", sched_target, "Target index, 0-based");
  schedule->add_option("--duration", sched_duration,
                       "Seconds; 0 picks the configured trial duration");
  schedule->add_option("--out", sched_out, "Output schedule file");

  CLI::App* synth = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
  std::string synth_plan, synth_out = "dataset";
  std::uint64_t seed = 0;
  synth->add_option("--plan", synth_plan, "Plan file")->required();
  CLI::Option* seed_opt = synth->add_option("--seed", seed, "Master seed override");
  synth->add_option("--out", synth_out, "Output dataset directory");

  CLI::App* classify = app.add_subcommand("classify", "Classify every trial of a stored dataset");
  std::string cls_dataset, cls_out = "predictions.csv", cls_classifier;
  double cls_window = 0.0;
  bool cls_no_filter = false;
  classify->add_option("--dataset", cls_dataset, "Dataset directory")->required();
  CLI::Option* cls_cls_opt = classify->add_option("--classifier", cls_classifier, "cca | bcca");
  classify->add_option("--window", cls_window, "Window seconds; 0 keeps full trials");
  classify->add_flag("--no-filter", cls_no_filter, "Skip the band-pass stage");
  classify->add_option("--out", cls_out, "Output predictions file");

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Summarize stored predictions against their datasets");
  std::vector<std::string> eval_preds, eval_datasets;
  std::string eval_out = "report", eval_t_rule;
  evaluate->add_option("--predictions", eval_preds, "Predictions file (repeatable)")->required();
  evaluate->add_option("--dataset", eval_datasets, "Matching dataset directory (repeatable)")
      ->required();
  CLI::Option* eval_t_opt =
      evaluate->add_option("--t-rule", eval_t_rule, "with-rest | window-only");
  evaluate->add_option("--out", eval_out, "Report file prefix");

  CLI::App* sweep = app.add_subcommand("sweep", "Accuracy and ITR over a window-length grid");
  std::vector<std::string> sweep_datasets;
  std::vector<double> sweep_windows;
  std::string sweep_out = "sweep.csv", sweep_classifier, sweep_t_rule;
  bool sweep_no_filter = false;
  sweep->add_option("--dataset", sweep_datasets, "Dataset directory (repeatable)")->required();
  sweep->add_option("--window", sweep_windows, "Window seconds (repeatable); default grid if omitted");
  CLI::Option* sweep_cls_opt = sweep->add_option("--classifier", sweep_classifier, "cca | bcca");
  CLI::Option* sweep_t_opt = sweep->add_option("--t-rule", sweep_t_rule, "with-rest | window-only");
  sweep->add_flag("--no-filter", sweep_no_filter, "Skip the band-pass stage");
  sweep->add_option("--out", sweep_out, "Output table file");

  CLI::App* psd = app.add_subcommand("psd", "Class-averaged Welch spectra of a stored dataset");
  std::string psd_dataset, psd_out = "psd";
  bool psd_no_filter = false;
  psd->add_option("--dataset", psd_dataset, "Dataset directory")->required();
  psd->add_flag("--no-filter", psd_no_filter, "Skip the band-pass stage");
  psd->add_option("--out", psd_out, "Output file prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_run_config(config_path);
    if (seed_opt->count() > 0) cfg.master_seed = seed;
    if (cls_cls_opt->count() > 0) cfg.classifier.classifier = classifier_from_name(cls_classifier);
    if (sweep_cls_opt->count() > 0)
      cfg.classifier.classifier = classifier_from_name(sweep_classifier);
    if (cls_no_filter || sweep_no_filter || psd_no_filter) cfg.classifier.bandpass = false;
    if (eval_t_opt->count() > 0) cfg.t_rule = t_rule_from_name(eval_t_rule);
    if (sweep_t_opt->count() > 0) cfg.t_rule = t_rule_from_name(sweep_t_rule);

    int exit_code = 0;
    std::string summary;
    if (plan->parsed()) {
      summary = cmd_plan(cfg, plan_out);
    } else if (schedule->parsed()) {
      summary = cmd_schedule(cfg, sched_plan, sched_target, sched_duration, sched_out);
    } else if (synth->parsed()) {
      summary = cmd_synth(cfg, synth_plan, synth_out);
    } else if (classify->parsed()) {
      const ClassifyOutcome outcome = cmd_classify(cfg, cls_dataset, cls_window, cls_out);
      summary = outcome.summary;
      if (outcome.n_failed > 0) exit_code = 3;
    } else if (evaluate->parsed()) {
      summary = cmd_evaluate(cfg, eval_preds, eval_datasets, eval_out);
    } else if (sweep->parsed()) {
      summary = cmd_sweep(cfg, sweep_datasets, sweep_windows, sweep_out);
    } else if (psd->parsed()) {
      summary = cmd_psd(cfg, psd_dataset, psd_out);
    }
    std::cout << summary;
    return exit_code;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
