#pragma once

#include <cstdint>
#include <string>

namespace hemo {

/// Parameters of the bundled surrogate blood-test table. The real San
/// Raphael export cannot be redistributed, so the workbench ships a
/// generator that reproduces its shape: 915 rows (505 COVID / 410 non-COVID),
/// the ten analytes plus a few extra columns, scattered missing cells.
///
/// The class-conditional structure mixes a global separable component with
/// small tight "atypical presentation" clusters placed inside the opposite
/// class's region, so local and smooth classifiers separate at different
/// levels, as they do on the hospital data.
struct SynthConfig {
  int n_covid = 505;
  int n_non_covid = 410;
  std::uint64_t seed = 4081318;
  double missing_rate = 0.03;
  int covid_atypical_clusters = 4;
  int non_covid_atypical_clusters = 5;
  int cluster_size_min = 11;
  int cluster_size_max = 15;
};

/// Writes the surrogate CSV (header + rows, label column "label").
/// Output is byte-identical for identical configs.
void write_synthetic_blood_csv(const SynthConfig& config,
                               const std::string& path);

}  // namespace hemo
