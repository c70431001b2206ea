#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <sys/types.h>

#include "mapf/policy.hpp"

namespace mapf {

class PolicyError : public std::runtime_error {
 public:
  PolicyError(int step, const std::string& what)
      : std::runtime_error(step >= 0 ? "policy step " + std::to_string(step) + ": " + what : "policy: " + what),
        step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

// Host side of the line-delimited JSON policy protocol. Spawns `command`
// through /bin/sh, performs the init handshake, then exchanges one step/dist
// pair per call. The child is terminated on destruction.
class ExternalPolicy final : public PolicyProvider {
 public:
  ExternalPolicy(const std::string& command, const Instance& inst, std::uint64_t seed,
                 std::chrono::milliseconds step_timeout = std::chrono::seconds(10));
  ~ExternalPolicy() override;
  ExternalPolicy(const ExternalPolicy&) = delete;
  ExternalPolicy& operator=(const ExternalPolicy&) = delete;

  void distributions(int t, const Configuration& config, std::vector<ActionDistribution>& out) override;
  void finish(bool success) override;
  std::string label() const override { return "external"; }
  std::vector<std::pair<std::string, std::string>> stats() const override;

  long steps() const { return steps_; }
  double mean_latency_us() const { return steps_ ? total_latency_us_ / steps_ : 0.0; }

 private:
  void send(const std::string& line, int step);
  std::string receive(int step);
  void shutdown();

  int n_agents_;
  std::chrono::milliseconds timeout_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  bool finished_ = false;
  long steps_ = 0;
  double total_latency_us_ = 0;
};

// Checks and repairs a distribution received over the wire: negative entries
// or a sum more than 1e-3 from 1 are rejected, otherwise renormalized.
// Returns an error description, empty on success.
std::string normalize_wire_distribution(ActionDistribution& d);

}  // namespace mapf
