#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fjs {

using TimeUnit = std::int64_t;

struct MachineOption {
  int machine = 0;  // zero-based
  TimeUnit processing_time = 0;
  bool operator==(const MachineOption&) const = default;
};

struct Operation {
  std::vector<MachineOption> options;
  bool operator==(const Operation&) const = default;

  double mean_processing_time() const;
  TimeUnit min_processing_time() const;
  bool compatible_with(int machine) const;
  // nullptr when the machine is not an option.
  const MachineOption* option_for(int machine) const;
};

struct Job {
  std::vector<Operation> operations;
  bool operator==(const Job&) const = default;
};

struct FjsspInstance {
  std::vector<Job> jobs;
  int machine_count = 0;
  bool operator==(const FjsspInstance&) const = default;

  int total_operations() const;
  int total_options() const;
  const Operation& operation(int job, int op) const;
  // Throws std::invalid_argument when structurally unusable (no jobs, an
  // operation without options, a machine id out of range, pt < 1).
  void check_valid() const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Text format, one job per line, machine ids one-based on disk:
//   <n_jobs> <n_machines> [avg_options]
//   <n_ops> { <n_options> { <machine> <processing_time> }... }...
// The optional third header field is ignored when reading.
FjsspInstance parse_fjs(const std::string& text);

// Emits the header's third field as the mean number of options per
// operation, rounded to two decimals.
std::string serialize_fjs(const FjsspInstance& instance);

// FNV-1a of the serialized text; used to tag datasets and run manifests.
std::uint64_t instance_hash(const FjsspInstance& instance);

}  // namespace fjs
