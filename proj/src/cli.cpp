#include "ssmvep/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ssmvep/errors.hpp"
#include "ssmvep/stimulus.hpp"

namespace ssmvep {

namespace {

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + p.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out.good()) throw IoError("cannot write " + path);
}

// "--out report" and "--out report.csv" both yield report.scores.csv style
// siblings; keep derived names readable by dropping a trailing .csv first.
std::string strip_csv_suffix(const std::string& path) {
  if (path.size() > 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
    return path.substr(0, path.size() - 4);
  return path;
}

std::string echo_line(const RunConfig& cfg) {
  return "# config " + run_config_to_json(cfg).dump() + "\n";
}

FrequencyPlan load_plan_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return plan_from_json(text);
  } catch (const ValidationError& e) {
    throw IoError("plan file " + path + ": " + e.what());
  }
}

void check_keys(const nlohmann::json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError("config: " + where + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) throw ValidationError("config: unknown key \"" + item.key() + "\" in " + where);
  }
}

template <typename T>
void fetch(const nlohmann::json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("config: key \"" + std::string(key) + "\" in " + where +
                          " has the wrong type");
  }
}

struct CsvTable {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Splits on the first `fixed` commas only, so a free-text final column may
// itself contain commas.
std::vector<std::string> split_row(const std::string& line, std::size_t fixed) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (out.size() + 1 < fixed) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) break;
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  out.push_back(line.substr(start));
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || text.empty())
    throw IoError(what + ": \"" + text + "\" is not a number");
  return v;
}

long parse_long(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const long v = std::strtol(text.c_str(), &end, 10);
  if (end != text.c_str() + text.size() || text.empty())
    throw IoError(what + ": \"" + text + "\" is not an integer");
  return v;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

const char* classifier_name(Classifier c) { return c == Classifier::cca ? "cca" : "bcca"; }

Classifier classifier_from_name(const std::string& name) {
  if (name == "cca") return Classifier::cca;
  if (name == "bcca") return Classifier::bcca;
  throw ValidationError("unknown classifier \"" + name + "\" (expected cca or bcca)");
}

const char* t_rule_name(TRule r) { return r == TRule::with_rest ? "with-rest" : "window-only"; }

TRule t_rule_from_name(const std::string& name) {
  if (name == "with-rest") return TRule::with_rest;
  if (name == "window-only") return TRule::window_only;
  throw ValidationError("unknown t-rule \"" + name + "\" (expected with-rest or window-only)");
}

RunConfig resolve(RunConfig cfg) {
  if (cfg.channels.empty()) throw ValidationError("config: channels must not be empty");
  std::set<std::string> seen;
  for (const std::string& ch : cfg.channels)
    if (!seen.insert(ch).second)
      throw ValidationError("config: duplicate channel name \"" + ch + "\"");
  if (!(cfg.sampling_rate > 0) || !std::isfinite(cfg.sampling_rate))
    throw ValidationError("config: sampling_rate must be positive, got " + g9(cfg.sampling_rate));
  if (!(cfg.refresh_rate > 0) || !std::isfinite(cfg.refresh_rate))
    throw ValidationError("config: refresh_rate must be positive, got " + g9(cfg.refresh_rate));
  if (!(cfg.trial_duration > 0) || !std::isfinite(cfg.trial_duration))
    throw ValidationError("config: trial_duration must be positive, got " + g9(cfg.trial_duration));
  if (cfg.rest_duration < 0 || !std::isfinite(cfg.rest_duration))
    throw ValidationError("config: rest_duration must be non-negative, got " + g9(cfg.rest_duration));
  if (cfg.trials_per_class < 0)
    throw ValidationError("config: trials_per_class must be non-negative");
  if (cfg.n_harmonics < 1) throw ValidationError("config: n_harmonics must be at least 1");
  cfg.synth.duration = cfg.trial_duration;
  cfg.synth.n_harmonics = cfg.n_harmonics;
  cfg.classifier.n_harmonics = cfg.n_harmonics;
  if (cfg.synth.channel_gains.size() != cfg.channels.size()) {
    const bool all_ones = std::all_of(cfg.synth.channel_gains.begin(),
                                      cfg.synth.channel_gains.end(),
                                      [](double gainsv) { return gainsv == 1.0; });
    if (!all_ones)
      throw ValidationError("config: channel_gains has " +
                            std::to_string(cfg.synth.channel_gains.size()) +
                            " entries for " + std::to_string(cfg.channels.size()) + " channels");
    cfg.synth.channel_gains.assign(cfg.channels.size(), 1.0);
  }
  return cfg;
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["base_frequencies"] = cfg.base_frequencies;
  j["refresh_rate"] = cfg.refresh_rate;
  j["sampling_rate"] = cfg.sampling_rate;
  j["channels"] = cfg.channels;
  j["trial_duration"] = cfg.trial_duration;
  j["rest_duration"] = cfg.rest_duration;
  j["trials_per_class"] = cfg.trials_per_class;
  j["n_harmonics"] = cfg.n_harmonics;
  j["classifier"] = classifier_name(cfg.classifier.classifier);
  j["t_rule"] = t_rule_name(cfg.t_rule);
  j["master_seed"] = cfg.master_seed;
  j["ridge"] = cfg.classifier.ridge;
  j["filter"] = {{"enabled", cfg.classifier.bandpass},
                 {"low_hz", cfg.classifier.band_low_hz},
                 {"high_hz", cfg.classifier.band_high_hz},
                 {"order", cfg.classifier.filter_order},
                 {"ripple_db", cfg.classifier.ripple_db}};
  j["synth"] = {{"snr_db", cfg.synth.snr_db},
                {"noise_only", cfg.synth.noise_only},
                {"dominance_low", cfg.synth.dominance_low},
                {"harmonic_decay", cfg.synth.harmonic_decay},
                {"pink_fraction", cfg.synth.pink_fraction},
                {"channel_gains", cfg.synth.channel_gains}};
  j["welch"] = {{"segment_seconds", cfg.welch.segment_seconds},
                {"overlap", cfg.welch.overlap}};
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  check_keys(j, "the top level",
             {"base_frequencies", "refresh_rate", "sampling_rate", "channels", "trial_duration",
              "rest_duration", "trials_per_class", "n_harmonics", "classifier", "t_rule",
              "master_seed", "ridge", "filter", "synth", "welch"});
  RunConfig cfg;
  fetch(j, "base_frequencies", cfg.base_frequencies, "the top level");
  fetch(j, "refresh_rate", cfg.refresh_rate, "the top level");
  fetch(j, "sampling_rate", cfg.sampling_rate, "the top level");
  fetch(j, "channels", cfg.channels, "the top level");
  fetch(j, "trial_duration", cfg.trial_duration, "the top level");
  fetch(j, "rest_duration", cfg.rest_duration, "the top level");
  fetch(j, "trials_per_class", cfg.trials_per_class, "the top level");
  fetch(j, "n_harmonics", cfg.n_harmonics, "the top level");
  fetch(j, "master_seed", cfg.master_seed, "the top level");
  fetch(j, "ridge", cfg.classifier.ridge, "the top level");
  if (j.contains("classifier")) {
    std::string name;
    fetch(j, "classifier", name, "the top level");
    cfg.classifier.classifier = classifier_from_name(name);
  }
  if (j.contains("t_rule")) {
    std::string name;
    fetch(j, "t_rule", name, "the top level");
    cfg.t_rule = t_rule_from_name(name);
  }
  if (j.contains("filter")) {
    const nlohmann::json& f = j.at("filter");
    check_keys(f, "filter", {"enabled", "low_hz", "high_hz", "order", "ripple_db"});
    fetch(f, "enabled", cfg.classifier.bandpass, "filter");
    fetch(f, "low_hz", cfg.classifier.band_low_hz, "filter");
    fetch(f, "high_hz", cfg.classifier.band_high_hz, "filter");
    fetch(f, "order", cfg.classifier.filter_order, "filter");
    fetch(f, "ripple_db", cfg.classifier.ripple_db, "filter");
  }
  if (j.contains("synth")) {
    const nlohmann::json& s = j.at("synth");
    check_keys(s, "synth", {"snr_db", "noise_only", "dominance_low", "harmonic_decay",
                            "pink_fraction", "channel_gains"});
    fetch(s, "snr_db", cfg.synth.snr_db, "synth");
    fetch(s, "noise_only", cfg.synth.noise_only, "synth");
    fetch(s, "dominance_low", cfg.synth.dominance_low, "synth");
    fetch(s, "harmonic_decay", cfg.synth.harmonic_decay, "synth");
    fetch(s, "pink_fraction", cfg.synth.pink_fraction, "synth");
    fetch(s, "channel_gains", cfg.synth.channel_gains, "synth");
  }
  if (j.contains("welch")) {
    const nlohmann::json& w = j.at("welch");
    check_keys(w, "welch", {"segment_seconds", "overlap"});
    fetch(w, "segment_seconds", cfg.welch.segment_seconds, "welch");
    fetch(w, "overlap", cfg.welch.overlap, "welch");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  const std::string text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("config file " + path + ": " + e.what());
  }
  return run_config_from_json(j);
}

std::string cmd_plan(const RunConfig& raw, const std::string& out_path) {
  const RunConfig cfg = resolve(raw);
  const FrequencyPlan plan = assign_target_pairs(cfg.base_frequencies);
  const std::vector<PlanViolation> violations = validate_plan(plan);
  if (!violations.empty()) {
    std::string msg = "plan validation failed:";
    for (const PlanViolation& v : violations) msg += "\n  [" + v.kind + "] " + v.message;
    throw ValidationError(msg);
  }
  write_text_file(out_path, plan_to_json(plan));
  std::ostringstream out;
  out << "plan: " << plan.pairs.size() << " targets, 0 violations -> " << out_path << "\n";
  for (std::size_t i = 0; i < plan.pairs.size(); ++i)
    out << "  target " << i + 1 << ": " << g9(plan.pairs[i].a) << " Hz zoom + "
        << g9(plan.pairs[i].b) << " Hz rotation\n";
  return out.str();
}

std::string cmd_schedule(const RunConfig& raw, const std::string& plan_path, int target_index,
                         double duration_seconds, const std::string& out_path) {
  const RunConfig cfg = resolve(raw);
  const FrequencyPlan plan = load_plan_file(plan_path);
  if (target_index < 0 || static_cast<std::size_t>(target_index) >= plan.pairs.size())
    throw ValidationError("schedule: target index " + std::to_string(target_index) +
                          " outside 0.." + std::to_string(plan.pairs.size() - 1));
  const double duration = duration_seconds > 0 ? duration_seconds : cfg.trial_duration;
  if (std::llround(cfg.refresh_rate * duration) < 1)
    throw ValidationError("schedule: duration " + g9(duration) + " s yields no frames at " +
                          g9(cfg.refresh_rate) + " Hz refresh");
  const FrameSchedule sched =
      dual_motion_schedule(plan.pairs[static_cast<std::size_t>(target_index)], cfg.refresh_rate,
                           duration);
  write_text_file(out_path, echo_line(cfg) + schedule_to_csv(sched));
  std::ostringstream out;
  out << "schedule: target " << target_index + 1 << ", " << g9(sched.zoom_frequency)
      << " Hz zoom + " << g9(sched.rot_frequency) << " Hz rotation, " << sched.frames.size()
      << " frames -> " << out_path << "\n";
  return out.str();
}

std::string cmd_synth(const RunConfig& raw, const std::string& plan_path,
                      const std::string& out_dir) {
  const RunConfig cfg = resolve(raw);
  const FrequencyPlan plan = load_plan_file(plan_path);
  Dataset ds = synth_dataset(plan, cfg.synth, cfg.trials_per_class, cfg.sampling_rate,
                             cfg.master_seed);
  ds.channel_names = cfg.channels;
  for (TrialRecord& t : ds.trials) t.channel_names = cfg.channels;
  save_dataset(ds, out_dir);
  std::ostringstream out;
  out << "dataset: " << ds.trials.size() << " trials (" << plan.pairs.size() << " classes x "
      << cfg.trials_per_class << "), " << g9(cfg.trial_duration) << " s at "
      << g9(cfg.sampling_rate) << " Hz, seed " << cfg.master_seed << " -> " << out_dir << "\n";
  return out.str();
}

ClassifyOutcome cmd_classify(const RunConfig& raw, const std::string& dataset_dir,
                             double window_seconds, const std::string& out_path) {
  const RunConfig cfg = resolve(raw);
  const DatasetManifest man = load_manifest(dataset_dir);
  if (man.plan.pairs.empty())
    throw ValidationError("classify: dataset " + dataset_dir + " carries no target plan");
  const double fs = man.sampling_rate;
  int window_samples = 0;
  if (window_seconds > 0) {
    window_samples = static_cast<int>(std::llround(window_seconds * fs));
    if (window_samples < 1)
      throw ValidationError("classify: window " + g9(window_seconds) + " s is shorter than one sample at " +
                            g9(fs) + " Hz");
  }

  FilterSpec filter;
  if (cfg.classifier.bandpass)
    filter = design_cheby1_bandpass(cfg.classifier.band_low_hz, cfg.classifier.band_high_hz,
                                    cfg.classifier.filter_order, cfg.classifier.ripple_db, fs);

  std::map<int, ReferenceBank> banks;
  const auto bank_for = [&](int m) -> const ReferenceBank& {
    auto it = banks.find(m);
    if (it == banks.end())
      it = banks.emplace(m, build_reference_bank(man.plan, cfg.classifier.n_harmonics, fs, m)).first;
    return it->second;
  };

  std::vector<TrialPrediction> rows;
  rows.reserve(man.trials.size());
  int failed = 0;
  int seen_samples = 0;
  for (std::size_t i = 0; i < man.trials.size(); ++i) {
    TrialPrediction row;
    row.trial_index = static_cast<int>(i);
    row.true_label = man.trials[i].class_index;
    try {
      const TrialRecord trial = load_trial(dataset_dir, man, i);
      const int m_full = static_cast<int>(trial.samples.cols());
      if (window_samples > m_full)
        throw ValidationError("window of " + std::to_string(window_samples) +
                              " samples exceeds the trial length " + std::to_string(m_full));
      const int m = window_samples > 0 ? window_samples : m_full;
      seen_samples = m;
      // Clean the full recording first, then cut the analysis window.
      const Eigen::MatrixXd x =
          cfg.classifier.bandpass ? preprocess(trial.samples, filter) : trial.samples;
      const Decision d = classify_trial(x.leftCols(m), bank_for(m), cfg.classifier.classifier,
                                        cfg.classifier.ridge);
      row.predicted = d.predicted;
      row.scores = d.scores;
    } catch (const std::exception& e) {
      row.predicted = -1;
      row.error = e.what();
      ++failed;
    }
    rows.push_back(std::move(row));
  }

  const double effective_window =
      window_samples > 0 ? window_samples / fs
                         : (seen_samples > 0 ? seen_samples / fs : 0.0);
  const int effective_samples = window_samples > 0 ? window_samples : seen_samples;

  std::ostringstream pred;
  pred << "# ssmvep predictions\n" << echo_line(cfg);
  pred << "# dataset " << dataset_dir << "\n";
  pred << "# classifier " << classifier_name(cfg.classifier.classifier) << "\n";
  pred << "# sampling_rate " << g9(fs) << "\n";
  pred << "# window_seconds " << g9(effective_window) << "\n";
  pred << "# window_samples " << effective_samples << "\n";
  pred << "# trials " << rows.size() << "\n";
  pred << "# failed_trials " << failed << "\n";
  pred << "trial,file,true_label,predicted,error\n";
  for (const TrialPrediction& row : rows) {
    std::string err = row.error;
    std::replace(err.begin(), err.end(), '\n', ' ');
    pred << row.trial_index << ',' << man.trials[static_cast<std::size_t>(row.trial_index)].file
         << ',' << row.true_label << ',' << row.predicted << ',' << err << "\n";
  }
  write_text_file(out_path, pred.str());

  std::ostringstream scores;
  scores << "# ssmvep scores\n" << echo_line(cfg);
  scores << "# dataset " << dataset_dir << "\n";
  scores << "# classifier " << classifier_name(cfg.classifier.classifier) << "\n";
  scores << "trial,target,rho1,rho2,rho_c,rho_a,predicted\n";
  for (const TrialPrediction& row : rows)
    for (std::size_t t = 0; t < row.scores.size(); ++t)
      scores << row.trial_index << ',' << t << ',' << g9(row.scores[t].rho1) << ','
             << g9(row.scores[t].rho2) << ',' << g9(row.scores[t].rho_c) << ','
             << g9(row.scores[t].rho_a) << ',' << row.predicted << "\n";
  const std::string scores_path = strip_csv_suffix(out_path) + ".scores.csv";
  write_text_file(scores_path, scores.str());

  ClassifyOutcome outcome;
  outcome.n_trials = static_cast<int>(rows.size());
  outcome.n_failed = failed;
  int hits = 0, labeled = 0;
  for (const TrialPrediction& row : rows)
    if (row.error.empty()) {
      ++labeled;
      hits += row.predicted == row.true_label;
    }
  std::ostringstream out;
  out << "classify: " << rows.size() << " trials, " << classifier_name(cfg.classifier.classifier)
      << ", window " << g9(effective_window) << " s -> " << out_path << "\n";
  if (labeled > 0)
    out << "  accuracy " << g9(static_cast<double>(hits) / labeled) << " over " << labeled
        << " trials\n";
  if (failed > 0) {
    out << "  " << failed << " trial(s) failed to process:\n";
    for (const TrialPrediction& row : rows)
      if (!row.error.empty()) out << "    trial " << row.trial_index << ": " << row.error << "\n";
  }
  outcome.summary = out.str();
  return outcome;
}

PredictionsFile load_predictions(const std::string& path) {
  std::istringstream in(read_text_file(path));
  PredictionsFile pf;
  std::string line;
  if (!std::getline(in, line) || line != "# ssmvep predictions")
    throw IoError(path + " is not a predictions file");
  bool header_seen = false;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const std::string body = line.substr(2);
      const std::size_t sp = body.find(' ');
      const std::string key = body.substr(0, sp);
      const std::string value = sp == std::string::npos ? "" : body.substr(sp + 1);
      const std::string ctx = path + " line " + std::to_string(line_no);
      if (key == "config") {
        try {
          pf.config_echo = nlohmann::json::parse(value);
        } catch (const nlohmann::json::exception& e) {
          throw IoError(ctx + ": bad config echo: " + e.what());
        }
      } else if (key == "dataset") {
        pf.dataset_dir = value;
      } else if (key == "classifier") {
        pf.classifier = value;
      } else if (key == "sampling_rate") {
        pf.sampling_rate = parse_double(value, ctx);
      } else if (key == "window_seconds") {
        pf.window_seconds = parse_double(value, ctx);
      } else if (key == "window_samples") {
        pf.window_samples = static_cast<int>(parse_long(value, ctx));
      }
      continue;
    }
    if (!header_seen) {
      if (line != "trial,file,true_label,predicted,error")
        throw IoError(path + " line " + std::to_string(line_no) + ": unexpected column header \"" +
                      line + "\"");
      header_seen = true;
      continue;
    }
    const std::vector<std::string> cells = split_row(line, 5);
    if (cells.size() != 5)
      throw IoError(path + " line " + std::to_string(line_no) + ": expected 5 columns");
    const std::string ctx = path + " line " + std::to_string(line_no);
    TrialPrediction row;
    row.trial_index = static_cast<int>(parse_long(cells[0], ctx));
    row.true_label = static_cast<int>(parse_long(cells[2], ctx));
    row.predicted = static_cast<int>(parse_long(cells[3], ctx));
    row.error = cells[4];
    pf.rows.push_back(std::move(row));
  }
  if (!header_seen) throw IoError(path + ": missing column header row");
  return pf;
}

std::string cmd_evaluate(const RunConfig& raw, const std::vector<std::string>& prediction_paths,
                         const std::vector<std::string>& dataset_dirs,
                         const std::string& out_prefix) {
  const RunConfig cfg = resolve(raw);
  if (prediction_paths.empty())
    throw ValidationError("evaluate: at least one predictions file is required");
  if (prediction_paths.size() != dataset_dirs.size())
    throw ValidationError("evaluate: got " + std::to_string(prediction_paths.size()) +
                          " predictions files and " + std::to_string(dataset_dirs.size()) +
                          " dataset directories");

  struct Run {
    std::string classifier;
    int n_classes = 0;
    double window_seconds = 0.0;
    int failed = 0;
    EvalReport report;
  };
  std::vector<Run> runs;
  for (std::size_t r = 0; r < prediction_paths.size(); ++r) {
    const PredictionsFile pf = load_predictions(prediction_paths[r]);
    const DatasetManifest man = load_manifest(dataset_dirs[r]);
    if (pf.rows.size() != man.trials.size())
      throw ValidationError("evaluate: " + prediction_paths[r] + " has " +
                            std::to_string(pf.rows.size()) + " rows but dataset " +
                            dataset_dirs[r] + " lists " + std::to_string(man.trials.size()) +
                            " trials (mismatched trial counts)");
    const int n_classes = static_cast<int>(man.plan.pairs.size());
    if (n_classes < 2)
      throw ValidationError("evaluate: dataset " + dataset_dirs[r] +
                            " needs at least 2 target classes");
    std::vector<int> truth, guess;
    int failed = 0;
    for (std::size_t i = 0; i < pf.rows.size(); ++i) {
      if (pf.rows[i].true_label != man.trials[i].class_index)
        throw ValidationError("evaluate: " + prediction_paths[r] + " trial " + std::to_string(i) +
                              " carries label " + std::to_string(pf.rows[i].true_label) +
                              " but dataset " + dataset_dirs[r] + " lists " +
                              std::to_string(man.trials[i].class_index));
      if (!pf.rows[i].error.empty()) {
        ++failed;
        continue;
      }
      truth.push_back(pf.rows[i].true_label);
      guess.push_back(pf.rows[i].predicted);
    }
    if (truth.empty())
      throw ValidationError("evaluate: " + prediction_paths[r] +
                            " contains no successfully classified trials");
    Run run;
    run.classifier = pf.classifier;
    run.n_classes = n_classes;
    run.window_seconds = pf.window_seconds;
    run.failed = failed;
    run.report = confusion_and_indices(truth, guess, n_classes);
    run.report.window_seconds = pf.window_seconds;
    run.report.trial_period_seconds =
        cfg.t_rule == TRule::with_rest ? pf.window_seconds + cfg.rest_duration : pf.window_seconds;
    run.report.itr_bits_per_min =
        itr(run.report.overall_accuracy, n_classes, run.report.trial_period_seconds);
    runs.push_back(std::move(run));
  }

  std::vector<std::string> methods;
  for (const Run& run : runs)
    if (std::find(methods.begin(), methods.end(), run.classifier) == methods.end())
      methods.push_back(run.classifier);

  std::ostringstream summary, per_class, confusion, human;
  summary << "# ssmvep evaluation summary\n" << echo_line(cfg);
  summary << "# t_rule " << t_rule_name(cfg.t_rule) << "\n";
  summary << "# runs " << runs.size() << "\n";
  summary << "method,n_runs,n_classes,window_seconds,t_seconds,accuracy_mean,accuracy_std,"
             "itr_bits_per_min_mean,itr_bits_per_min_std,failed_trials\n";
  per_class << "# ssmvep per-class indices\n" << echo_line(cfg);
  per_class << "method,class,specificity_mean,specificity_std,sensitivity_mean,sensitivity_std,"
               "precision_mean,precision_std,accuracy_mean,accuracy_std\n";
  confusion << "# ssmvep pooled confusion matrices (rows true labels, columns predictions)\n"
            << echo_line(cfg);

  for (const std::string& method : methods) {
    std::vector<const Run*> group;
    for (const Run& run : runs)
      if (run.classifier == method) group.push_back(&run);
    const int n_classes = group.front()->n_classes;
    const double window = group.front()->window_seconds;
    for (const Run* run : group) {
      if (run->n_classes != n_classes)
        throw ValidationError("evaluate: runs of method " + method +
                              " disagree on the class count");
      if (run->window_seconds != window)
        throw ValidationError("evaluate: runs of method " + method +
                              " disagree on window_seconds");
    }
    std::vector<double> accs, itrs;
    int failed = 0;
    for (const Run* run : group) {
      accs.push_back(run->report.overall_accuracy);
      itrs.push_back(run->report.itr_bits_per_min);
      failed += run->failed;
    }
    const double t_seconds = group.front()->report.trial_period_seconds;
    summary << method << ',' << group.size() << ',' << n_classes << ',' << g9(window) << ','
            << g9(t_seconds) << ',' << g9(mean_of(accs)) << ',' << g9(std_of(accs)) << ','
            << g9(mean_of(itrs)) << ',' << g9(std_of(itrs)) << ',' << failed << "\n";
    human << "  " << method << ": n=" << group.size() << ", accuracy " << g9(mean_of(accs))
          << " +/- " << g9(std_of(accs)) << ", ITR " << g9(mean_of(itrs)) << " +/- "
          << g9(std_of(itrs)) << " bits/min at T=" << g9(t_seconds) << " s\n";

    for (int k = 0; k < n_classes; ++k) {
      std::vector<double> spec, sens, prec, acc;
      for (const Run* run : group) {
        spec.push_back(run->report.per_class[static_cast<std::size_t>(k)].specificity);
        sens.push_back(run->report.per_class[static_cast<std::size_t>(k)].sensitivity);
        prec.push_back(run->report.per_class[static_cast<std::size_t>(k)].precision);
        acc.push_back(run->report.per_class[static_cast<std::size_t>(k)].accuracy);
      }
      per_class << method << ',' << k << ',' << g9(mean_of(spec)) << ',' << g9(std_of(spec)) << ','
                << g9(mean_of(sens)) << ',' << g9(std_of(sens)) << ',' << g9(mean_of(prec)) << ','
                << g9(std_of(prec)) << ',' << g9(mean_of(acc)) << ',' << g9(std_of(acc)) << "\n";
    }

    Eigen::MatrixXi pooled = Eigen::MatrixXi::Zero(n_classes, n_classes);
    for (const Run* run : group) pooled += run->report.confusion;
    confusion << "method,true_class";
    for (int k = 0; k < n_classes; ++k) confusion << ",pred_" << k;
    confusion << "\n";
    for (int i = 0; i < n_classes; ++i) {
      confusion << method << ',' << i;
      for (int k = 0; k < n_classes; ++k) confusion << ',' << pooled(i, k);
      confusion << "\n";
    }
  }

  const std::string prefix = strip_csv_suffix(out_prefix);
  write_text_file(prefix + "_summary.csv", summary.str());
  write_text_file(prefix + "_per_class.csv", per_class.str());
  write_text_file(prefix + "_confusion.csv", confusion.str());
  std::ostringstream out;
  out << "evaluate: " << runs.size() << " run(s), " << methods.size() << " method(s) -> " << prefix
      << "_{summary,per_class,confusion}.csv\n";
  out << human.str();
  return out.str();
}

std::string cmd_sweep(const RunConfig& raw, const std::vector<std::string>& dataset_dirs,
                      std::vector<double> windows, const std::string& out_path) {
  const RunConfig cfg = resolve(raw);
  if (dataset_dirs.empty())
    throw ValidationError("sweep: at least one dataset directory is required");
  std::vector<Dataset> datasets;
  datasets.reserve(dataset_dirs.size());
  for (const std::string& dir : dataset_dirs) datasets.push_back(load_dataset(dir));
  for (const Dataset& ds : datasets) {
    if (ds.trials.empty()) throw ValidationError("sweep: dataset has no trials");
    if (ds.sampling_rate != datasets.front().sampling_rate ||
        ds.trials.front().samples.cols() != datasets.front().trials.front().samples.cols() ||
        ds.plan.pairs.size() != datasets.front().plan.pairs.size())
      throw ValidationError("sweep: datasets disagree on sampling rate, trial length, or classes");
  }
  const double fs = datasets.front().sampling_rate;
  const int m = static_cast<int>(datasets.front().trials.front().samples.cols());
  if (windows.empty()) {
    for (const double w : default_sweep_windows())
      if (std::llround(w * fs) <= m) windows.push_back(w);
    if (windows.empty())
      throw ValidationError("sweep: no default window fits trials of " + g9(m / fs) + " s");
  }

  std::vector<std::vector<double>> accs(windows.size()), itrs(windows.size());
  for (const Dataset& ds : datasets) {
    const std::vector<SweepPoint> points =
        time_window_sweep(ds, cfg.classifier, windows, cfg.t_rule, cfg.rest_duration);
    for (std::size_t w = 0; w < points.size(); ++w) {
      accs[w].push_back(points[w].accuracy);
      itrs[w].push_back(points[w].itr_bits_per_min);
    }
  }

  std::ostringstream table, human;
  table << "# ssmvep window sweep\n" << echo_line(cfg);
  table << "# t_rule " << t_rule_name(cfg.t_rule) << "\n";
  table << "# datasets " << datasets.size() << "\n";
  table << "# classifier " << classifier_name(cfg.classifier.classifier) << "\n";
  table << "window_seconds,accuracy_mean,accuracy_std,itr_bits_per_min_mean,itr_bits_per_min_std\n";
  for (std::size_t w = 0; w < windows.size(); ++w) {
    table << g9(windows[w]) << ',' << g9(mean_of(accs[w])) << ',' << g9(std_of(accs[w])) << ','
          << g9(mean_of(itrs[w])) << ',' << g9(std_of(itrs[w])) << "\n";
    human << "  " << g9(windows[w]) << " s: accuracy " << g9(mean_of(accs[w])) << " +/- "
          << g9(std_of(accs[w])) << ", ITR " << g9(mean_of(itrs[w])) << " bits/min\n";
  }
  write_text_file(out_path, table.str());
  std::ostringstream out;
  out << "sweep: " << windows.size() << " windows x " << datasets.size() << " dataset(s), "
      << classifier_name(cfg.classifier.classifier) << " -> " << out_path << "\n";
  out << human.str();
  return out.str();
}

std::string cmd_psd(const RunConfig& raw, const std::string& dataset_dir,
                    const std::string& out_prefix) {
  const RunConfig cfg = resolve(raw);
  const Dataset ds = load_dataset(dataset_dir);
  if (ds.trials.empty()) throw ValidationError("psd: dataset " + dataset_dir + " has no trials");
  const double fs = ds.sampling_rate;
  const int segment = static_cast<int>(std::llround(cfg.welch.segment_seconds * fs));
  const int m = static_cast<int>(ds.trials.front().samples.cols());
  if (segment < 2 || segment > m)
    throw ValidationError("psd: segment of " + g9(cfg.welch.segment_seconds) + " s (" +
                          std::to_string(segment) + " samples) does not fit trials of " +
                          std::to_string(m) + " samples");

  FilterSpec filter;
  if (cfg.classifier.bandpass)
    filter = design_cheby1_bandpass(cfg.classifier.band_low_hz, cfg.classifier.band_high_hz,
                                    cfg.classifier.filter_order, cfg.classifier.ripple_db, fs);

  const int n_classes = static_cast<int>(ds.plan.pairs.size());
  const std::string prefix = strip_csv_suffix(out_prefix);
  std::ostringstream out;
  out << "psd: " << n_classes << " classes, segment " << segment << " samples -> " << prefix
      << "_class<k>.csv\n";
  for (int k = 0; k < n_classes; ++k) {
    std::vector<double> power;
    std::vector<double> frequency;
    int n_trials = 0;
    for (const TrialRecord& trial : ds.trials) {
      if (trial.class_index != k) continue;
      Eigen::MatrixXd x = trial.samples;
      if (cfg.classifier.bandpass) x = preprocess(x, filter);
      for (int ch = 0; ch < x.rows(); ++ch) {
        const std::vector<double> sig(x.row(ch).begin(), x.row(ch).end());
        const PsdEstimate psd = welch_psd(sig, fs, segment, cfg.welch.overlap, "hann");
        if (power.empty()) {
          power.assign(psd.power.size(), 0.0);
          frequency = psd.frequency;
        }
        for (std::size_t b = 0; b < power.size(); ++b) power[b] += psd.power[b];
      }
      ++n_trials;
    }
    if (n_trials == 0) continue;
    const double scale = 1.0 / (n_trials * static_cast<double>(ds.channel_names.size()));
    for (double& p : power) p *= scale;

    std::ostringstream file;
    file << "# ssmvep class-averaged power spectral density\n" << echo_line(cfg);
    file << "# dataset " << dataset_dir << "\n";
    file << "# class " << k << "\n";
    file << "# pair_hz " << g9(ds.plan.pairs[static_cast<std::size_t>(k)].a) << " "
         << g9(ds.plan.pairs[static_cast<std::size_t>(k)].b) << "\n";
    file << "# trials " << n_trials << " channels " << ds.channel_names.size() << " segment_samples "
         << segment << " overlap " << g9(cfg.welch.overlap) << " window hann\n";
    file << "frequency_hz,power\n";
    for (std::size_t b = 0; b < power.size(); ++b)
      file << g9(frequency[b]) << ',' << g9(power[b]) << "\n";
    const std::string path = prefix + "_class" + std::to_string(k) + ".csv";
    write_text_file(path, file.str());

    std::size_t peak = 1 < power.size() ? 1 : 0;
    for (std::size_t b = 1; b < power.size(); ++b)
      if (power[b] > power[peak]) peak = b;
    out << "  class " << k << " (" << g9(ds.plan.pairs[static_cast<std::size_t>(k)].a) << " + "
        << g9(ds.plan.pairs[static_cast<std::size_t>(k)].b) << " Hz): " << n_trials
        << " trials, peak at " << g9(frequency[peak]) << " Hz\n";
  }
  return out.str();
}

}  // namespace ssmvep
