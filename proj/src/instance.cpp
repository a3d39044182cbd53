#include "fjs/instance.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "fjs/hash.hpp"

namespace fjs {

double Operation::mean_processing_time() const {
  if (options.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& o : options) sum += static_cast<double>(o.processing_time);
  return sum / static_cast<double>(options.size());
}

TimeUnit Operation::min_processing_time() const {
  TimeUnit best = 0;
  bool first = true;
  for (const auto& o : options) {
    if (first || o.processing_time < best) best = o.processing_time;
    first = false;
  }
  return best;
}

bool Operation::compatible_with(int machine) const { return option_for(machine) != nullptr; }

const MachineOption* Operation::option_for(int machine) const {
  for (const auto& o : options)
    if (o.machine == machine) return &o;
  return nullptr;
}

int FjsspInstance::total_operations() const {
  int n = 0;
  for (const auto& j : jobs) n += static_cast<int>(j.operations.size());
  return n;
}

int FjsspInstance::total_options() const {
  int n = 0;
  for (const auto& j : jobs)
    for (const auto& o : j.operations) n += static_cast<int>(o.options.size());
  return n;
}

const Operation& FjsspInstance::operation(int job, int op) const {
  return jobs.at(job).operations.at(op);
}

void FjsspInstance::check_valid() const {
  if (jobs.empty()) throw std::invalid_argument("instance has no jobs");
  if (machine_count <= 0) throw std::invalid_argument("instance has no machines");
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (jobs[j].operations.empty())
      throw std::invalid_argument("job " + std::to_string(j) + " has no operations");
    for (std::size_t k = 0; k < jobs[j].operations.size(); ++k) {
      const Operation& op = jobs[j].operations[k];
      if (op.options.empty())
        throw std::invalid_argument("operation (" + std::to_string(j) + "," + std::to_string(k) +
                                    ") has no machine options");
      for (const auto& mo : op.options) {
        if (mo.machine < 0 || mo.machine >= machine_count)
          throw std::invalid_argument("machine id out of range in operation (" +
                                      std::to_string(j) + "," + std::to_string(k) + ")");
        if (mo.processing_time < 1)
          throw std::invalid_argument("non-positive processing time in operation (" +
                                      std::to_string(j) + "," + std::to_string(k) + ")");
      }
    }
  }
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

struct TokenReader {
  std::vector<long long> tokens;
  std::size_t pos = 0;
  int line;

  bool done() const { return pos >= tokens.size(); }
  long long take(const char* what) {
    if (done()) throw ParseError(line, std::string("missing ") + what);
    return tokens[pos++];
  }
};

TokenReader tokenize_ints(const std::string& line_text, int line_no) {
  TokenReader r;
  r.line = line_no;
  std::istringstream in(line_text);
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      long long v = std::stoll(tok, &used);
      if (used != tok.size()) throw std::invalid_argument("trailing");
      r.tokens.push_back(v);
    } catch (const std::exception&) {
      throw ParseError(line_no, "expected an integer, got '" + tok + "'");
    }
  }
  return r;
}

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

FjsspInstance parse_fjs(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  if (lines.empty() || is_blank(lines[0])) throw ParseError(1, "missing header");

  // Header may carry a real-valued third field; parse it leniently.
  std::istringstream head(lines[0]);
  long long n_jobs = 0, n_machines = 0;
  if (!(head >> n_jobs >> n_machines)) throw ParseError(1, "header needs <n_jobs> <n_machines>");
  double ignored_avg = 0.0;
  head >> ignored_avg;  // optional, unused
  (void)ignored_avg;
  std::string extra;
  if (head >> extra) throw ParseError(1, "unexpected token '" + extra + "' in header");
  if (n_jobs < 1) throw ParseError(1, "job count must be positive");
  if (n_machines < 1) throw ParseError(1, "machine count must be positive");

  FjsspInstance instance;
  instance.machine_count = static_cast<int>(n_machines);
  instance.jobs.resize(static_cast<std::size_t>(n_jobs));

  for (long long j = 0; j < n_jobs; ++j) {
    const int line_no = static_cast<int>(j) + 2;
    if (static_cast<std::size_t>(line_no - 1) >= lines.size() || is_blank(lines[line_no - 1]))
      throw ParseError(line_no, "missing job line");
    TokenReader r = tokenize_ints(lines[line_no - 1], line_no);

    const long long n_ops = r.take("operation count");
    if (n_ops < 1) throw ParseError(line_no, "operation count must be positive");
    Job& job = instance.jobs[static_cast<std::size_t>(j)];
    job.operations.resize(static_cast<std::size_t>(n_ops));
    for (long long k = 0; k < n_ops; ++k) {
      const long long n_opts = r.take("option count");
      if (n_opts < 1) throw ParseError(line_no, "option count must be positive");
      Operation& op = job.operations[static_cast<std::size_t>(k)];
      for (long long q = 0; q < n_opts; ++q) {
        const long long machine = r.take("machine id");
        const long long pt = r.take("processing time");
        if (machine < 1 || machine > n_machines)
          throw ParseError(line_no, "machine id " + std::to_string(machine) + " out of range");
        if (pt < 1) throw ParseError(line_no, "processing time must be positive");
        op.options.push_back({static_cast<int>(machine) - 1, static_cast<TimeUnit>(pt)});
      }
    }
    if (!r.done()) throw ParseError(line_no, "trailing tokens after last operation");
  }

  for (std::size_t i = static_cast<std::size_t>(n_jobs) + 1; i < lines.size(); ++i) {
    if (!is_blank(lines[i]))
      throw ParseError(static_cast<int>(i) + 1, "unexpected content after last job");
  }
  return instance;
}

std::string serialize_fjs(const FjsspInstance& instance) {
  std::string out;
  const int ops = instance.total_operations();
  const double avg =
      ops == 0 ? 0.0 : static_cast<double>(instance.total_options()) / static_cast<double>(ops);
  char head[96];
  std::snprintf(head, sizeof(head), "%zu %d %.2f\n", instance.jobs.size(),
                instance.machine_count, avg);
  out += head;
  for (const auto& job : instance.jobs) {
    out += std::to_string(job.operations.size());
    for (const auto& op : job.operations) {
      out += ' ';
      out += std::to_string(op.options.size());
      for (const auto& mo : op.options) {
        out += ' ';
        out += std::to_string(mo.machine + 1);
        out += ' ';
        out += std::to_string(mo.processing_time);
      }
    }
    out += '\n';
  }
  return out;
}

std::uint64_t instance_hash(const FjsspInstance& instance) {
  return fnv1a64(serialize_fjs(instance));
}

}  // namespace fjs
