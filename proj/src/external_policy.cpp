#include "mapf/external_policy.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace mapf {
namespace {

using json = nlohmann::json;

json cells_json(const std::vector<Cell>& cells) {
  json arr = json::array();
  for (const Cell& c : cells) arr.push_back({c.x, c.y});
  return arr;
}

}  // namespace

std::string normalize_wire_distribution(ActionDistribution& d) {
  double sum = 0;
  for (double p : d.probs) {
    if (!(p >= 0.0)) return "negative or non-finite probability";
    sum += p;
  }
  if (!(std::abs(sum - 1.0) <= 1e-3)) return "probabilities sum to " + std::to_string(sum);
  for (double& p : d.probs) p /= sum;
  return {};
}

ExternalPolicy::ExternalPolicy(const std::string& command, const Instance& inst, std::uint64_t seed,
                               std::chrono::milliseconds step_timeout)
    : n_agents_(inst.num_agents()), timeout_(step_timeout) {
  // A dead client must surface as a write error, not kill the host.
  std::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) throw PolicyError(-1, "pipe() failed");
  pid_ = fork();
  if (pid_ < 0) throw PolicyError(-1, "fork() failed");
  if (pid_ == 0) {
    // Own process group, so shutdown also reaches whatever the shell started.
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  fcntl(from_child_, F_SETFD, FD_CLOEXEC);

  json init = {{"type", "init"},
               {"width", inst.map.width()},
               {"height", inst.map.height()},
               {"blocked", cells_json(inst.map.blocked_cells())},
               {"starts", cells_json(inst.starts)},
               {"goals", cells_json(inst.goals)},
               {"seed", seed}};
  try {
    send(init.dump(), -1);
    const std::string reply = receive(-1);
    json j = json::parse(reply, nullptr, false);
    if (j.is_discarded() || !j.is_object() || j.value("type", "") != "ready")
      throw PolicyError(-1, "expected ready message, got '" + reply + "'");
  } catch (...) {
    shutdown();
    throw;
  }
}

ExternalPolicy::~ExternalPolicy() { shutdown(); }

void ExternalPolicy::send(const std::string& line, int step) {
  std::string data = line + "\n";
  const char* p = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    const ssize_t w = ::write(to_child_, p, left);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw PolicyError(step, std::string("write to policy process failed: ") + std::strerror(errno));
    }
    p += w;
    left -= static_cast<std::size_t>(w);
  }
}

std::string ExternalPolicy::receive(int step) {
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  while (true) {
    const std::size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw PolicyError(step, "timed out waiting for reply");
    pollfd pfd{from_child_, POLLIN, 0};
    const int r = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (r < 0) {
      if (errno == EINTR) continue;
      throw PolicyError(step, "poll() failed");
    }
    if (r == 0) throw PolicyError(step, "timed out waiting for reply");
    char chunk[4096];
    const ssize_t got = ::read(from_child_, chunk, sizeof chunk);
    if (got < 0) {
      if (errno == EINTR) continue;
      throw PolicyError(step, "read from policy process failed");
    }
    if (got == 0) throw PolicyError(step, "policy process exited");
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

void ExternalPolicy::distributions(int t, const Configuration& config, std::vector<ActionDistribution>& out) {
  const auto t0 = std::chrono::steady_clock::now();
  json msg = {{"type", "step"}, {"t", t}, {"positions", cells_json(config)}};
  send(msg.dump(), t);
  const std::string reply = receive(t);
  total_latency_us_ += std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
  ++steps_;

  json j = json::parse(reply, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw PolicyError(t, "malformed reply '" + reply.substr(0, 200) + "'");
  if (j.value("type", "") != "dist") throw PolicyError(t, "expected dist message");
  if (!j.contains("t") || !j["t"].is_number_integer() || j["t"].get<long>() != t)
    throw PolicyError(t, "reply timestep does not match");
  const json& dists = j["dists"];
  if (!dists.is_array()) throw PolicyError(t, "dists is not an array");
  if (static_cast<int>(dists.size()) != n_agents_)
    throw PolicyError(t, "expected " + std::to_string(n_agents_) + " distributions, got " +
                             std::to_string(dists.size()));
  out.resize(n_agents_);
  for (int i = 0; i < n_agents_; ++i) {
    const json& row = dists[i];
    if (!row.is_array() || row.size() != kNumActions)
      throw PolicyError(t, "agent " + std::to_string(i) + ": expected 5 probabilities");
    for (int a = 0; a < kNumActions; ++a) {
      if (!row[a].is_number()) throw PolicyError(t, "agent " + std::to_string(i) + ": non-numeric probability");
      out[i].probs[a] = row[a].get<double>();
    }
    if (auto err = normalize_wire_distribution(out[i]); !err.empty())
      throw PolicyError(t, "agent " + std::to_string(i) + ": " + err);
  }
}

void ExternalPolicy::finish(bool success) {
  if (finished_ || pid_ <= 0) return;
  finished_ = true;
  try {
    json msg = {{"type", "end"}, {"status", success ? "success" : "failure"}};
    send(msg.dump(), -1);
  } catch (const PolicyError&) {
  }
}

std::vector<std::pair<std::string, std::string>> ExternalPolicy::stats() const {
  std::ostringstream os;
  os.precision(1);
  os << std::fixed << mean_latency_us();
  return {{"policy_steps", std::to_string(steps_)}, {"policy_latency_us", os.str()}};
}

void ExternalPolicy::shutdown() {
  if (pid_ <= 0) return;
  if (to_child_ >= 0) close(to_child_);
  to_child_ = -1;
  // Give a well-behaved client a moment to exit on EOF before killing it.
  int status = 0;
  for (int i = 0; i < 50; ++i) {
    if (waitpid(pid_, &status, WNOHANG) == pid_) {
      kill(-pid_, SIGKILL);  // stray grandchildren
      pid_ = -1;
      break;
    }
    usleep(2000);
  }
  if (pid_ > 0) {
    kill(-pid_, SIGKILL);
    waitpid(pid_, &status, 0);
    pid_ = -1;
  }
  if (from_child_ >= 0) close(from_child_);
  from_child_ = -1;
}

}  // namespace mapf
