#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fjs/exact.hpp"
#include "fjs/gbr.hpp"
#include "fjs/instance.hpp"

namespace fjs {

// Instance descriptors for estimating how well a short exact solve will do.
// The option statistics are moments of the per-machine processable-operation
// counts, not of per-operation option counts.
struct InstanceFeatures {
  double n_operations = 0;
  double n_jobs = 0;
  double n_machines = 0;
  double mean_options = 0;
  double std_options = 0;
  double skewness_options = 0;
  double min_pt = 0;
  double max_pt = 0;
  double span_pt = 0;

  std::array<double, 9> as_array() const;
  std::vector<double> as_vector() const;
  static const std::array<const char*, 9>& names();

  bool operator==(const InstanceFeatures&) const = default;
};

InstanceFeatures extract_features(const FjsspInstance& instance);

// Ratio of the final incumbent to the last incumbent found within
// n_operations*om wall seconds: 1 when the early solution was never improved,
// 0 when the budget produced nothing.
double build_target(const IncumbentTrace& trace, int n_operations, double om);

struct CapabilitySample {
  InstanceFeatures features;
  double target = 0.0;
  std::uint64_t instance_hash = 0;
};

std::vector<CapabilitySample> build_dataset(const std::vector<FjsspInstance>& instances,
                                            double solver_time_limit, double om = 0.01);

void write_samples_csv(const std::string& path, const std::vector<CapabilitySample>& samples);
std::vector<CapabilitySample> read_samples_csv(const std::string& path);

GbrModel train_capability_model(const std::vector<CapabilitySample>& samples,
                                const GbrConfig& config = {});

// Ensemble output clamped to [0,1].
double predict_capability(const GbrModel& model, const InstanceFeatures& features);

}  // namespace fjs
