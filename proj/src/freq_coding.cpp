#include "ssmvep/freq_coding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "ssmvep/errors.hpp"

namespace ssmvep {

namespace {

constexpr double kFreqTol = 1e-9;

void check_base(const std::vector<double>& base, std::size_t min_size, const char* fn) {
  if (base.size() < min_size) {
    std::ostringstream os;
    os << fn << ": need at least " << min_size << " frequencies, got " << base.size();
    throw ValidationError(os.str());
  }
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (!(base[i] > 0.0) || !std::isfinite(base[i])) {
      std::ostringstream os;
      os << fn << ": frequency at index " << i << " must be positive and finite, got " << base[i];
      throw ValidationError(os.str());
    }
    if (i > 0 && !(base[i] > base[i - 1])) {
      std::ostringstream os;
      os << fn << ": frequencies must be strictly ascending, violated at index " << i;
      throw ValidationError(os.str());
    }
  }
}

bool eq(double x, double y) { return std::abs(x - y) <= kFreqTol; }

// True when `g` is a derived frequency adjacent to base frequency `f`.
// derived[i] sits between base[i] and base[i+1] (both adjacent); the last
// derived frequency lies above the top base frequency and is adjacent to it
// alone.
bool adjacent_fg(const FrequencyPlan& p, double g, double f) {
  const std::size_t n = p.base.size();
  for (std::size_t i = 0; i < p.derived.size(); ++i) {
    if (!eq(p.derived[i], g)) continue;
    if (eq(p.base[i], f)) return true;
    if (i + 1 < n && eq(p.base[i + 1], f)) return true;
  }
  return false;
}

bool adjacent(const FrequencyPlan& p, double u, double v) {
  return adjacent_fg(p, u, v) || adjacent_fg(p, v, u);
}

// Multiset comparison under tolerance; reports duplicates and mismatches.
void check_permutation(const std::vector<double>& got, const std::vector<double>& want,
                       const char* label, std::vector<PlanViolation>& out) {
  std::vector<double> g = got, w = want;
  std::sort(g.begin(), g.end());
  std::sort(w.begin(), w.end());
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    if (eq(g[i], g[i + 1])) {
      std::ostringstream os;
      os << "frequency " << g[i] << " appears more than once among " << label;
      out.push_back({"duplicate", os.str()});
    }
  }
  if (g.size() != w.size()) {
    std::ostringstream os;
    os << label << " has " << g.size() << " entries, expected " << w.size();
    out.push_back({"structure", os.str()});
    return;
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!eq(g[i], w[i])) {
      std::ostringstream os;
      os << label << " is not a permutation of its source list (mismatch near " << g[i] << ")";
      out.push_back({"structure", os.str()});
      return;
    }
  }
}

}  // namespace

double min_half_gap(const std::vector<double>& base) {
  check_base(base, 2, "min_half_gap");
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < base.size(); ++i) {
    m = std::min(m, (base[i + 1] - base[i]) / 2.0);
  }
  return m;
}

std::vector<double> derive_adjacent_frequencies(const std::vector<double>& base) {
  check_base(base, 2, "derive_adjacent_frequencies");
  const double m = min_half_gap(base);
  std::vector<double> derived(base.size());
  for (std::size_t i = 0; i + 1 < base.size(); ++i) {
    derived[i] = (base[i] + base[i + 1]) / 2.0;
  }
  derived.back() = base.back() + m;
  return derived;
}

FrequencyPlan assign_target_pairs(const std::vector<double>& base, double f_lo, double f_hi) {
  check_base(base, 5, "assign_target_pairs");
  if (!(f_lo > 0.0) || !(f_hi > f_lo)) {
    throw ValidationError("assign_target_pairs: frequency bounds must satisfy 0 < lo < hi");
  }
  FrequencyPlan plan;
  plan.base = base;
  plan.derived = derive_adjacent_frequencies(base);
  plan.min_half_gap = min_half_gap(base);
  plan.f_lo = f_lo;
  plan.f_hi = f_hi;

  const std::size_t n = base.size();
  plan.pairs.resize(n);
  // Cycle the zoom frequencies one step so no target pairs f_i with a
  // derived frequency it is adjacent to; the rotation list pulls the top
  // interior derived frequency to the front.
  plan.pairs[0] = {base[0], plan.derived[n - 2]};
  for (std::size_t i = 1; i + 1 < n; ++i) {
    plan.pairs[i] = {base[i + 1], plan.derived[i - 1]};
  }
  plan.pairs[n - 1] = {base[1], plan.derived[n - 1]};
  return plan;
}

std::vector<PlanViolation> validate_plan(const FrequencyPlan& plan) {
  std::vector<PlanViolation> out;
  const std::size_t n = plan.base.size();
  if (plan.derived.size() != n || plan.pairs.size() != n) {
    out.push_back({"structure", "base, derived and pairs must have equal length"});
    return out;
  }

  auto check_bounds = [&](double f, const char* label, std::size_t i) {
    if (f < plan.f_lo - kFreqTol || f > plan.f_hi + kFreqTol) {
      std::ostringstream os;
      os << label << "[" << i << "] = " << f << " outside admissible band [" << plan.f_lo << ", "
         << plan.f_hi << "]";
      out.push_back({"bounds", os.str()});
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    check_bounds(plan.base[i], "base", i);
    check_bounds(plan.derived[i], "derived", i);
  }

  std::vector<double> as, bs;
  for (const TargetPair& p : plan.pairs) {
    as.push_back(p.a);
    bs.push_back(p.b);
  }
  check_permutation(as, plan.base, "pair zoom frequencies", out);
  check_permutation(bs, plan.derived, "pair rotation frequencies", out);

  // Any two targets may share at most one adjacent frequency relation among
  // their four frequencies.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double f[4] = {plan.pairs[i].a, plan.pairs[i].b, plan.pairs[j].a, plan.pairs[j].b};
      int count = 0;
      for (int u = 0; u < 4; ++u) {
        for (int v = u + 1; v < 4; ++v) {
          if (adjacent(plan, f[u], f[v])) ++count;
        }
      }
      if (count > 1) {
        std::ostringstream os;
        os << "targets " << i << " and " << j << " share " << count << " adjacent frequencies";
        out.push_back({"adjacency", os.str()});
      }
    }
  }
  return out;
}

std::string plan_to_json(const FrequencyPlan& plan) {
  nlohmann::json j;
  j["kind"] = "frequency_plan";
  j["indexing"] = "pairs[i] drives target i (0-based); printed labels add 1";
  j["base"] = plan.base;
  j["derived"] = plan.derived;
  j["min_half_gap"] = plan.min_half_gap;
  j["f_bounds"] = {plan.f_lo, plan.f_hi};
  nlohmann::json jp = nlohmann::json::array();
  for (const TargetPair& p : plan.pairs) {
    jp.push_back({{"a", p.a}, {"b", p.b}});
  }
  j["pairs"] = jp;
  return j.dump(2) + "\n";
}

FrequencyPlan plan_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("plan_from_json: malformed JSON: ") + e.what());
  }
  try {
    FrequencyPlan plan;
    plan.base = j.at("base").get<std::vector<double>>();
    plan.derived = j.at("derived").get<std::vector<double>>();
    plan.min_half_gap = j.at("min_half_gap").get<double>();
    plan.f_lo = j.at("f_bounds").at(0).get<double>();
    plan.f_hi = j.at("f_bounds").at(1).get<double>();
    for (const auto& jp : j.at("pairs")) {
      plan.pairs.push_back({jp.at("a").get<double>(), jp.at("b").get<double>()});
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("plan_from_json: missing or mistyped field: ") + e.what());
  }
}

}  // namespace ssmvep
