#include "ssmvep/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "ssmvep/errors.hpp"
#include "ssmvep/text.hpp"

namespace fs = std::filesystem;

namespace ssmvep {

namespace {

std::string trial_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "trial_%04zu.csv", index);
  return std::string("trials/") + buf;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<std::string> default_channel_names(std::size_t n) {
  if (n == 6) return {"Pz", "PO7", "PO3", "PO4", "PO8", "Oz"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("ch" + std::to_string(i + 1));
  return out;
}

void save_dataset(const Dataset& dataset, const std::string& directory) {
  std::error_code ec;
  fs::create_directories(fs::path(directory) / "trials", ec);
  if (ec) throw IoError("save_dataset: cannot create " + directory + ": " + ec.message());

  nlohmann::json manifest;
  manifest["kind"] = "ssmvep_dataset";
  manifest["sampling_rate"] = dataset.sampling_rate;
  manifest["channels"] = dataset.channel_names;
  manifest["plan"] = nlohmann::json::parse(plan_to_json(dataset.plan));
  manifest["generator"] = dataset.generator;

  nlohmann::json listing = nlohmann::json::array();
  for (std::size_t i = 0; i < dataset.trials.size(); ++i) {
    const TrialRecord& t = dataset.trials[i];
    const std::string rel = trial_file_name(i);
    nlohmann::json entry;
    entry["file"] = rel;
    entry["class_index"] = t.class_index;
    if (t.seed) entry["seed"] = *t.seed;
    listing.push_back(entry);

    std::ostringstream body;
    body << join(t.channel_names, ',') << "\n";
    const Eigen::Index m = t.samples.cols();
    const Eigen::Index k = t.samples.rows();
    for (Eigen::Index s = 0; s < m; ++s) {
      for (Eigen::Index c = 0; c < k; ++c) {
        if (c > 0) body << ',';
        body << g9(t.samples(c, s));
      }
      body << "\n";
    }
    write_text_file((fs::path(directory) / rel).string(), body.str());
  }
  manifest["trials"] = listing;
  write_text_file((fs::path(directory) / "manifest.json").string(), manifest.dump(2) + "\n");
}

DatasetManifest load_manifest(const std::string& directory) {
  const std::string path = (fs::path(directory) / "manifest.json").string();
  const std::string text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": malformed manifest: " + e.what());
  }
  try {
    DatasetManifest m;
    m.sampling_rate = j.at("sampling_rate").get<double>();
    m.channel_names = j.at("channels").get<std::vector<std::string>>();
    m.plan = plan_from_json(j.at("plan").dump());
    m.generator = j.value("generator", nlohmann::json::object());
    for (const auto& entry : j.at("trials")) {
      TrialEntry t;
      t.file = entry.at("file").get<std::string>();
      t.class_index = entry.at("class_index").get<int>();
      if (entry.contains("seed")) t.seed = entry.at("seed").get<std::uint64_t>();
      m.trials.push_back(t);
    }
    if (!(m.sampling_rate > 0.0)) throw IoError(path + ": sampling_rate must be positive");
    if (m.channel_names.empty()) throw IoError(path + ": channel list is empty");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": missing or mistyped manifest field: " + e.what());
  } catch (const ValidationError& e) {
    throw IoError(path + ": " + e.what());
  }
}

TrialRecord load_trial(const std::string& directory, const DatasetManifest& manifest,
                       std::size_t trial_index) {
  if (trial_index >= manifest.trials.size()) {
    throw ValidationError("load_trial: trial index " + std::to_string(trial_index) +
                          " out of range (dataset has " + std::to_string(manifest.trials.size()) +
                          " trials)");
  }
  const TrialEntry& entry = manifest.trials[trial_index];
  const std::string path = (fs::path(directory) / entry.file).string();
  const std::string text = read_text_file(path);

  std::istringstream lines(text);
  std::string line;
  if (!std::getline(lines, line)) throw IoError(path + ": empty trial file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split(line, ',') != manifest.channel_names) {
    throw IoError(path + ": header does not match the manifest channel list");
  }

  const std::size_t k = manifest.channel_names.size();
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() != k) {
      throw IoError(path + ": line " + std::to_string(line_no) + " has " +
                    std::to_string(cells.size()) + " columns, expected " + std::to_string(k));
    }
    for (const std::string& cell : cells) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end != cell.c_str() + cell.size() || cell.empty() || !std::isfinite(v)) {
        throw IoError(path + ": line " + std::to_string(line_no) + ": \"" + cell +
                      "\" is not a finite number");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw IoError(path + ": no sample rows");

  TrialRecord t;
  t.class_index = entry.class_index;
  t.sampling_rate = manifest.sampling_rate;
  t.channel_names = manifest.channel_names;
  t.seed = entry.seed;
  t.samples.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(rows));
  for (std::size_t s = 0; s < rows; ++s) {
    for (std::size_t c = 0; c < k; ++c) {
      t.samples(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(s)) = values[s * k + c];
    }
  }
  return t;
}

Dataset load_dataset(const std::string& directory) {
  const DatasetManifest m = load_manifest(directory);
  Dataset ds;
  ds.sampling_rate = m.sampling_rate;
  ds.channel_names = m.channel_names;
  ds.plan = m.plan;
  ds.generator = m.generator;
  for (std::size_t i = 0; i < m.trials.size(); ++i) {
    ds.trials.push_back(load_trial(directory, m, i));
  }
  return ds;
}

}  // namespace ssmvep
