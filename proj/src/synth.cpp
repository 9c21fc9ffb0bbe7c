#include "ssmvep/synth.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "ssmvep/dsp.hpp"
#include "ssmvep/errors.hpp"
#include "ssmvep/rng.hpp"

namespace ssmvep {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double mean_square(const std::vector<double>& x) {
  double acc = 0.0;
  for (const double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

// Scales to unit mean-square power so noise mixing weights act on power.
void normalize_power(std::vector<double>& x) {
  const double p = mean_square(x);
  if (p > 0.0) {
    const double s = 1.0 / std::sqrt(p);
    for (double& v : x) v *= s;
  }
}

std::vector<double> pink_noise_core(std::size_t n, Rng& rng) {
  std::vector<double> x(n);
  for (double& v : x) v = rng.normal();
  std::vector<std::complex<double>> spec = rfft(x);
  spec[0] = 0.0;  // exact zero mean
  for (std::size_t k = 1; k < spec.size(); ++k) {
    spec[k] /= std::sqrt(static_cast<double>(k));
  }
  std::vector<double> out = irfft(spec, static_cast<int>(n));
  normalize_power(out);
  return out;
}

void check_config(const TargetPair& pair, const SynthConfig& c, double fs) {
  if (!(fs > 0.0)) throw ValidationError("synth: sampling rate must be positive");
  if (!(c.duration > 0.0)) throw ValidationError("synth: duration must be positive");
  if (c.n_harmonics < 1) throw ValidationError("synth: n_harmonics must be at least 1");
  if (!(c.dominance_low > 0.0) || c.dominance_low > 1.0) {
    throw ValidationError("synth: dominance_low must lie in (0, 1]");
  }
  if (!(c.pink_fraction >= 0.0) || c.pink_fraction > 1.0) {
    throw ValidationError("synth: pink_fraction must lie in [0, 1]");
  }
  if (!std::isfinite(c.harmonic_decay) || c.harmonic_decay < 0.0) {
    throw ValidationError("synth: harmonic_decay must be finite and non-negative");
  }
  if (!c.noise_only && !std::isfinite(c.snr_db)) {
    throw ValidationError("synth: snr_db must be finite (use noise_only for pure noise)");
  }
  if (c.channel_gains.empty()) throw ValidationError("synth: channel_gains must not be empty");
  double gain_power = 0.0;
  for (const double g : c.channel_gains) {
    if (!std::isfinite(g)) throw ValidationError("synth: channel gains must be finite");
    gain_power += g * g;
  }
  if (!c.noise_only && gain_power == 0.0) {
    throw ValidationError("synth: all channel gains are zero, evoked power cannot meet the SNR");
  }
  for (const double f : {pair.a, pair.b}) {
    if (!(f > 0.0)) throw ValidationError("synth: pair frequencies must be positive");
    const double top = f * static_cast<double>(c.n_harmonics);
    if (top >= fs / 2.0) {
      std::ostringstream os;
      os << "synth: harmonic " << c.n_harmonics << " of " << f << " Hz lies at " << top
         << " Hz, at or above the Nyquist frequency " << fs / 2.0 << " Hz";
      throw ValidationError(os.str());
    }
  }
}

}  // namespace

std::vector<double> pink_noise(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("pink_noise: n must be at least 1");
  Rng rng(seed);
  return pink_noise_core(n, rng);
}

TrialParts synth_trial_parts(const TargetPair& pair, const SynthConfig& config,
                             double sampling_rate, std::uint64_t seed) {
  check_config(pair, config, sampling_rate);
  const auto m = static_cast<std::size_t>(std::llround(sampling_rate * config.duration));
  if (m < 1) throw ValidationError("synth: duration rounds to zero samples");
  const std::size_t k = config.channel_gains.size();

  Rng rng(seed);

  // Dominance: one frequency keeps full weight, the other draws from
  // [dominance_low, 1]; a fair coin picks the dominant side.
  const bool a_dominant = rng.uniform01() < 0.5;
  const double u = rng.uniform(config.dominance_low, 1.0);
  TrialParts parts;
  parts.alpha_a = a_dominant ? 1.0 : u;
  parts.alpha_b = a_dominant ? u : 1.0;

  const int nh = config.n_harmonics;
  std::vector<double> phase(static_cast<std::size_t>(2 * nh));
  for (double& p : phase) p = rng.uniform(0.0, kTwoPi);

  // Shared evoked waveform, coherent across channels up to the gains.
  std::vector<double> wave(m, 0.0);
  const double freqs[2] = {pair.a, pair.b};
  const double alphas[2] = {parts.alpha_a, parts.alpha_b};
  for (int j = 0; j < 2; ++j) {
    double amp = alphas[j];
    for (int h = 1; h <= nh; ++h) {
      const double w = kTwoPi * freqs[j] * static_cast<double>(h);
      const double ph = phase[static_cast<std::size_t>(j * nh + h - 1)];
      for (std::size_t i = 0; i < m; ++i) {
        const double t = static_cast<double>(i + 1) / sampling_rate;
        wave[i] += amp * std::sin(w * t + ph);
      }
      amp *= config.harmonic_decay;
    }
  }

  parts.noise.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
  const double wp = std::sqrt(1.0 - config.pink_fraction);
  const double pp = std::sqrt(config.pink_fraction);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> pink = pink_noise_core(m, rng);
    std::vector<double> white(m);
    for (double& v : white) v = rng.normal();
    normalize_power(white);
    for (std::size_t i = 0; i < m; ++i) {
      parts.noise(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) =
          pp * pink[i] + wp * white[i];
    }
  }

  // Scale the evoked part so measured evoked power over measured noise power
  // hits snr_db exactly on this trial.
  double scale = 0.0;
  if (!config.noise_only) {
    double gain_power = 0.0;
    for (const double g : config.channel_gains) gain_power += g * g;
    const double evoked_power = mean_square(wave) * gain_power / static_cast<double>(k);
    const double noise_power =
        parts.noise.squaredNorm() / static_cast<double>(k * m);
    if (!(evoked_power > 0.0)) {
      throw NumericalError("synth: evoked waveform has zero power, cannot meet the SNR");
    }
    const double rho = std::pow(10.0, config.snr_db / 10.0);
    scale = std::sqrt(rho * noise_power / evoked_power);
  }

  parts.evoked.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
  for (std::size_t c = 0; c < k; ++c) {
    const double g = config.channel_gains[c] * scale;
    for (std::size_t i = 0; i < m; ++i) {
      parts.evoked(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) = g * wave[i];
    }
  }
  return parts;
}

TrialRecord synth_trial(const TargetPair& pair, int class_index, const SynthConfig& config,
                        double sampling_rate, std::uint64_t seed) {
  if (class_index < 0) throw ValidationError("synth_trial: class_index must be non-negative");
  const TrialParts parts = synth_trial_parts(pair, config, sampling_rate, seed);
  TrialRecord t;
  t.class_index = class_index;
  t.sampling_rate = sampling_rate;
  t.channel_names = default_channel_names(config.channel_gains.size());
  t.samples = parts.evoked + parts.noise;
  t.seed = seed;
  return t;
}

Dataset synth_dataset(const FrequencyPlan& plan, const SynthConfig& config, int trials_per_class,
                      double sampling_rate, std::uint64_t master_seed) {
  if (trials_per_class < 0) {
    throw ValidationError("synth_dataset: trials_per_class must be non-negative");
  }
  const std::vector<PlanViolation> violations = validate_plan(plan);
  if (!violations.empty()) {
    throw ValidationError("synth_dataset: plan is invalid: " + violations.front().kind + ": " +
                          violations.front().message);
  }

  Dataset ds;
  ds.sampling_rate = sampling_rate;
  ds.channel_names = default_channel_names(config.channel_gains.size());
  ds.plan = plan;
  ds.generator = synth_config_to_json(config);
  ds.generator["master_seed"] = master_seed;
  ds.generator["trials_per_class"] = trials_per_class;

  for (std::size_t c = 0; c < plan.pairs.size(); ++c) {
    for (int r = 0; r < trials_per_class; ++r) {
      const std::uint64_t seed =
          trial_seed(master_seed, static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(r));
      ds.trials.push_back(
          synth_trial(plan.pairs[c], static_cast<int>(c), config, sampling_rate, seed));
    }
  }
  return ds;
}

nlohmann::json synth_config_to_json(const SynthConfig& config) {
  nlohmann::json j;
  j["snr_db"] = config.snr_db;
  j["noise_only"] = config.noise_only;
  j["dominance_low"] = config.dominance_low;
  j["n_harmonics"] = config.n_harmonics;
  j["harmonic_decay"] = config.harmonic_decay;
  j["duration"] = config.duration;
  j["pink_fraction"] = config.pink_fraction;
  j["channel_gains"] = config.channel_gains;
  return j;
}

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  try {
    SynthConfig c;
    c.snr_db = j.value("snr_db", c.snr_db);
    c.noise_only = j.value("noise_only", c.noise_only);
    c.dominance_low = j.value("dominance_low", c.dominance_low);
    c.n_harmonics = j.value("n_harmonics", c.n_harmonics);
    c.harmonic_decay = j.value("harmonic_decay", c.harmonic_decay);
    c.duration = j.value("duration", c.duration);
    c.pink_fraction = j.value("pink_fraction", c.pink_fraction);
    if (j.contains("channel_gains")) {
      c.channel_gains = j.at("channel_gains").get<std::vector<double>>();
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("synth config: mistyped field: ") + e.what());
  }
}

}  // namespace ssmvep
