#include "hemo/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "hemo/rng.hpp"

namespace hemo {

namespace {

// Marginals per class, loosely matching routine-lab scales. `severity_load`
// couples a feature to the per-patient latent so the columns correlate.
struct FeatureSpec {
  const char* name;
  double mean0, std0;  // non-COVID
  double mean1, std1;  // COVID
  double lo, hi;
  int decimals;
  double severity_load;
  double pair_load;     // anti-correlated WBC/Platelet latent
  double outlier_rate;  // heavy right tail (isolated clinical spikes)
};

// Lymphocyte, Monocyte and Neutrophil percentages are coupled through the
// differential-count identity below rather than drawn independently.
constexpr std::array<FeatureSpec, 12> kFeatures = {{
    {"Age", 54.0, 16.0, 58.0, 16.0, 18.0, 98.0, 0, 0.10, 0.0, 0.0},
    {"CRP", 18.0, 16.0, 74.0, 48.0, 0.1, 350.0, 1, 0.70, 0.0, 0.01},
    {"ALT", 28.0, 7.0, 33.0, 8.0, 4.0, 320.0, 0, 0.15, 0.0, 0.02},
    {"AST", 26.0, 8.5, 39.0, 13.0, 5.0, 380.0, 0, 0.45, 0.0, 0.0},
    {"LDH", 235.0, 56.0, 380.0, 86.0, 90.0, 1400.0, 0, 0.60, 0.0, 0.0},
    {"Urea", 36.0, 7.0, 40.0, 8.0, 8.0, 180.0, 0, 0.20, 0.0, 0.015},
    {"WBC", 8.3, 2.3, 6.1, 1.8, 1.2, 28.0, 2, 0.0, 0.78, 0.0},
    {"RBC", 4.72, 0.42, 4.54, 0.46, 2.4, 7.2, 2, -0.10, 0.0, 0.0},
    {"Platelet", 260.0, 56.0, 198.0, 52.0, 40.0, 700.0, 0, 0.0, -0.78, 0.0},
    {"Monocyte", 7.6, 1.6, 7.1, 1.7, 0.5, 22.0, 1, 0.0, 0.0, 0.0},
    {"Lymphocyte", 30.0, 7.0, 18.5, 5.5, 2.0, 62.0, 1, -0.55, 0.0, 0.0},
    {"Neutrophil", 0.0, 0.0, 0.0, 0.0, 25.0, 95.0, 1, 0.0, 0.0, 0.0},  // derived
}};

constexpr int kIdxMonocyte = 9;
constexpr int kIdxLymphocyte = 10;
constexpr int kIdxNeutrophil = 11;

using Row = std::array<double, kFeatures.size()>;

double clamp_spec(double v, const FeatureSpec& spec) {
  return std::min(spec.hi, std::max(spec.lo, v));
}

// One draw from the class-conditional base distribution. The severity
// latent shifts the loaded features jointly; the remaining variance is
// independent noise.
Row base_point(int label, Rng& rng, double max_abs_severity = 3.0) {
  double severity = rng.normal();
  severity = std::clamp(severity, -max_abs_severity, max_abs_severity);
  // Within-class latent of the WBC/Platelet pair. Opposite-sign loads tilt
  // the within-class ellipse perpendicular to the between-class shift, so
  // the pair separates along a 45-degree direction rather than per axis.
  const double pair_latent = rng.normal();

  Row row{};
  for (std::size_t j = 0; j < kFeatures.size(); ++j) {
    const auto& spec = kFeatures[j];
    if (static_cast<int>(j) == kIdxNeutrophil) continue;
    const double mean = label ? spec.mean1 : spec.mean0;
    const double stddev = label ? spec.std1 : spec.std0;
    const double load = spec.severity_load;
    const double pair = spec.pair_load;
    const double independent =
        std::sqrt(std::max(0.0, 1.0 - load * load - pair * pair));
    row[j] = mean + stddev * (load * severity + pair * pair_latent +
                              independent * rng.normal());
    if (spec.outlier_rate > 0.0 && rng.uniform() < spec.outlier_rate) {
      row[j] = mean + stddev * (4.0 + 6.0 * rng.uniform());
    }
    row[j] = clamp_spec(row[j], spec);
  }
  // Differential count: the granulocyte remainder closes the percentages,
  // which couples Neutrophil to Lymphocyte and Monocyte diagonally.
  const double other_granulocytes = std::max(0.5, 3.6 + 1.2 * rng.normal());
  row[kIdxNeutrophil] =
      clamp_spec(100.0 - row[kIdxLymphocyte] - row[kIdxMonocyte] -
                     other_granulocytes,
                 kFeatures[kIdxNeutrophil]);
  return row;
}

double round_decimals(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::floor(v * scale + 0.5) / scale;
}

std::string format_value(double v, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, v);
  return buffer;
}

}  // namespace

void write_synthetic_blood_csv(const SynthConfig& config,
                               const std::string& path) {
  if (config.n_covid < 1 || config.n_non_covid < 1) {
    throw std::runtime_error("synth: class counts must be positive");
  }

  Rng rng(derive_seed(config.seed, "synthetic-blood"));

  struct Sample {
    Row features;
    int label;
  };
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(config.n_covid + config.n_non_covid));

  const auto cluster_size = [&]() {
    return config.cluster_size_min +
           static_cast<int>(rng.bounded(static_cast<std::uint64_t>(
               config.cluster_size_max - config.cluster_size_min + 1)));
  };

  // Atypical presentations: tight clusters whose lab profile matches the
  // opposite class. Centers are drawn from the opposite class's bulk
  // (|severity latent| <= 1), members scatter tightly around the center.
  const auto emit_clusters = [&](int label, int n_clusters, int* remaining) {
    for (int c = 0; c < n_clusters && *remaining > 0; ++c) {
      const Row center = base_point(1 - label, rng, 1.0);
      const int size = std::min(cluster_size(), *remaining);
      for (int m = 0; m < size; ++m) {
        Row row = center;
        for (std::size_t j = 0; j < kFeatures.size(); ++j) {
          const auto& spec = kFeatures[j];
          const double stddev =
              0.04 * (label ? spec.std1 : spec.std0);
          const double base_std =
              static_cast<int>(j) == kIdxNeutrophil ? 0.4 : stddev;
          row[j] = clamp_spec(row[j] + base_std * rng.normal(), spec);
        }
        samples.push_back({row, label});
        --*remaining;
      }
    }
  };

  int covid_left = config.n_covid;
  int non_covid_left = config.n_non_covid;
  emit_clusters(1, config.covid_atypical_clusters, &covid_left);
  emit_clusters(0, config.non_covid_atypical_clusters, &non_covid_left);
  while (covid_left-- > 0) samples.push_back({base_point(1, rng), 1});
  while (non_covid_left-- > 0) samples.push_back({base_point(0, rng), 0});

  rng.shuffle(samples);

  // Missing cells, never in the label.
  std::vector<std::vector<bool>> missing(
      samples.size(), std::vector<bool>(kFeatures.size(), false));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = 0; j < kFeatures.size(); ++j) {
      if (rng.uniform() < config.missing_rate) missing[i][j] = true;
    }
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("synth: cannot write '" + path + "'");
  for (const auto& spec : kFeatures) out << spec.name << ',';
  out << "label\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = 0; j < kFeatures.size(); ++j) {
      if (!missing[i][j]) {
        const auto& spec = kFeatures[j];
        out << format_value(round_decimals(samples[i].features[j], spec.decimals),
                            spec.decimals);
      }
      out << ',';
    }
    out << samples[i].label << '\n';
  }
  if (!out) throw std::runtime_error("synth: write failure on '" + path + "'");
}

}  // namespace hemo
