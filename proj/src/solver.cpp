// SPDX-License-Identifier: Apache-2.0
#include "unsatcache/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "unsatcache/errors.hpp"
#include "unsatcache/smtlib.hpp"

namespace unsatcache {

namespace {

using Clock = std::chrono::steady_clock;

void ignoreSigpipeOnce() {
  static const bool done = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)done;
}

struct TempFile {
  std::filesystem::path path;
  ~TempFile() {
    if (!path.empty()) {
      std::error_code ec;
      std::filesystem::remove(path, ec);
    }
  }
};

std::filesystem::path makeTempPath() {
  static std::atomic<unsigned> counter{0};
  return std::filesystem::temp_directory_path() /
         ("unsat-cache-" + std::to_string(::getpid()) + "-" +
          std::to_string(counter++) + ".smt2");
}

void setNonBlocking(int fd) { ::fcntl(fd, F_SETFL, O_NONBLOCK); }

struct ChildRun {
  std::string output;
  bool timedOut = false;
  int waitStatus = 0;
};

// Runs `command` under /bin/sh, feeding `input` to stdin and collecting
// stdout+stderr until EOF or the deadline.
ChildRun runChild(const std::string& command, const std::string& input,
                  Clock::time_point deadline) {
  ignoreSigpipeOnce();

  int inPipe[2];
  int outPipe[2];
  if (::pipe(inPipe) != 0 || ::pipe(outPipe) != 0)
    throw SolverCrashError("pipe() failed: " + std::string(std::strerror(errno)));

  pid_t pid = ::fork();
  if (pid < 0) throw SolverCrashError("fork() failed: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    ::dup2(inPipe[0], STDIN_FILENO);
    ::dup2(outPipe[1], STDOUT_FILENO);
    ::dup2(outPipe[1], STDERR_FILENO);
    ::close(inPipe[0]);
    ::close(inPipe[1]);
    ::close(outPipe[0]);
    ::close(outPipe[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }

  ::close(inPipe[0]);
  ::close(outPipe[1]);
  int inFd = inPipe[1];
  int outFd = outPipe[0];
  setNonBlocking(inFd);
  setNonBlocking(outFd);

  ChildRun run;
  std::size_t written = 0;
  bool inOpen = true;
  bool outOpen = true;
  char buffer[4096];

  while (outOpen) {
    auto now = Clock::now();
    if (now > deadline) {
      run.timedOut = true;
      break;
    }
    auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    struct pollfd fds[2];
    fds[0] = {outFd, POLLIN, 0};
    fds[1] = {inFd, POLLOUT, 0};
    nfds_t nfds = inOpen ? 2 : 1;
    int rc = ::poll(fds, nfds, static_cast<int>(std::min<long long>(remaining + 1, 1000)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }

    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      ssize_t n = ::read(outFd, buffer, sizeof buffer);
      if (n > 0) {
        run.output.append(buffer, static_cast<std::size_t>(n));
      } else if (n == 0) {
        outOpen = false;
      } else if (errno != EAGAIN && errno != EWOULDBLOCK) {
        outOpen = false;
      }
    }
    if (inOpen && nfds == 2 && (fds[1].revents & (POLLOUT | POLLHUP | POLLERR))) {
      if (written >= input.size() || (fds[1].revents & (POLLHUP | POLLERR))) {
        ::close(inFd);
        inOpen = false;
      } else {
        ssize_t n = ::write(inFd, input.data() + written, input.size() - written);
        if (n > 0) {
          written += static_cast<std::size_t>(n);
          if (written >= input.size()) {
            ::close(inFd);
            inOpen = false;
          }
        } else if (errno != EAGAIN && errno != EWOULDBLOCK) {
          ::close(inFd);
          inOpen = false;
        }
      }
    }
    if (input.empty() && inOpen) {
      ::close(inFd);
      inOpen = false;
    }
  }
  if (inOpen) ::close(inFd);
  ::close(outFd);

  if (run.timedOut) {
    ::kill(pid, SIGKILL);
    ::waitpid(pid, &run.waitStatus, 0);
    return run;
  }

  // Child closed stdout; wait for exit, but do not hang past the deadline.
  while (true) {
    pid_t done = ::waitpid(pid, &run.waitStatus, WNOHANG);
    if (done == pid) break;
    if (done < 0) break;
    if (Clock::now() > deadline) {
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &run.waitStatus, 0);
      run.timedOut = true;
      break;
    }
    ::usleep(1000);
  }
  return run;
}

// Extracts the verdict and optional core names from solver output.
SolveResult parseSolverOutput(const std::string& output, std::size_t clauseCount,
                              int waitStatus) {
  std::istringstream in(output);
  std::string word;
  std::optional<SolveResult::Status> status;
  std::streampos afterVerdict{0};
  while (in >> word) {
    if (word == "sat") status = SolveResult::Status::Sat;
    else if (word == "unsat") status = SolveResult::Status::Unsat;
    else if (word == "unknown") status = SolveResult::Status::Unknown;
    if (status) {
      afterVerdict = in.tellg();
      break;
    }
    if (word.rfind("(error", 0) == 0)
      throw SolverCrashError("solver reported an error: " + output);
  }

  if (!status) {
    if (WIFSIGNALED(waitStatus))
      throw SolverCrashError("solver killed by signal " +
                             std::to_string(WTERMSIG(waitStatus)));
    if (WIFEXITED(waitStatus) && WEXITSTATUS(waitStatus) != 0)
      throw SolverCrashError("solver exited with code " +
                             std::to_string(WEXITSTATUS(waitStatus)) +
                             " and no verdict");
    throw ParseError(1, 1, "no verdict in solver output: " + output.substr(0, 200));
  }

  SolveResult result;
  result.status = *status;
  if (result.status != SolveResult::Status::Unsat) return result;

  // Optional core: a parenthesized list of assertion names.
  std::string rest = afterVerdict >= 0 ? output.substr(static_cast<std::size_t>(afterVerdict))
                                       : std::string();
  auto open = rest.find('(');
  if (open == std::string::npos) {
    for (std::size_t i = 0; i < clauseCount; ++i) result.coreClauseIndices.push_back(i);
    return result;
  }
  auto close = rest.find(')', open);
  if (close == std::string::npos) throw ParseError(1, 1, "unterminated core list");
  std::istringstream names(rest.substr(open + 1, close - open - 1));
  std::string name;
  while (names >> name) {
    if (name.size() < 2 || name[0] != 'k' ||
        !std::all_of(name.begin() + 1, name.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw ParseError(1, 1, "unexpected core member " + name);
    std::size_t index = std::stoull(name.substr(1));
    if (index >= clauseCount) throw ParseError(1, 1, "core index out of range: " + name);
    result.coreClauseIndices.push_back(index);
  }
  if (result.coreClauseIndices.empty())
    for (std::size_t i = 0; i < clauseCount; ++i) result.coreClauseIndices.push_back(i);
  return result;
}

}  // namespace

ProcessSolver::ProcessSolver(std::string command) : command_(std::move(command)) {
  if (command_.empty()) throw Error("solver command must not be empty");
}

SolveResult ProcessSolver::solve(const Formula& f, std::chrono::nanoseconds timeout) {
  const std::string query = printQuery(f, true);
  const auto start = Clock::now();
  const auto deadline = start + timeout;

  std::string command = command_;
  std::string input = query;
  TempFile temp;
  auto placeholder = command.find("{file}");
  if (placeholder != std::string::npos) {
    temp.path = makeTempPath();
    std::ofstream out(temp.path, std::ios::binary);
    if (!out) throw IoError("cannot write " + temp.path.string());
    out << query;
    out.close();
    command.replace(placeholder, 6, temp.path.string());
    input.clear();
  }

  ChildRun run = runChild(command, input, deadline);
  auto elapsed = Clock::now() - start;
  if (run.timedOut) {
    SolveResult result;
    result.status = SolveResult::Status::Unknown;
    result.solveTime = elapsed;
    return result;
  }
  SolveResult result = parseSolverOutput(run.output, f.clauses.size(), run.waitStatus);
  result.solveTime = elapsed;
  return result;
}

ScriptedOracle::ScriptedOracle(const std::filesystem::path& manifestPath) {
  std::ifstream in(manifestPath);
  if (!in) throw IoError("cannot read manifest " + manifestPath.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad manifest " + manifestPath.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw IoError("manifest must be a JSON object");

  for (const auto& [path, value] : doc.items()) {
    SolveResult result;
    const std::string status = value.value("status", "");
    if (status == "sat") result.status = SolveResult::Status::Sat;
    else if (status == "unsat") result.status = SolveResult::Status::Unsat;
    else if (status == "unknown") result.status = SolveResult::Status::Unknown;
    else throw IoError("bad status for " + path + ": '" + status + "'");
    if (value.contains("core"))
      for (const auto& idx : value["core"])
        result.coreClauseIndices.push_back(idx.get<std::size_t>());
    result.solveTime = std::chrono::nanoseconds(value.value("nanos", std::int64_t{0}));
    entries_.emplace(path, std::move(result));
  }
}

SolveResult ScriptedOracle::solve(const Formula& f, std::chrono::nanoseconds) {
  auto it = entries_.find(f.origin);
  if (it == entries_.end())
    throw ManifestMissError("no manifest entry for " + f.origin);
  return it->second;
}

bool validateCore(SolverBackend& solver, const Formula& f,
                  const std::vector<std::size_t>& indices,
                  std::chrono::nanoseconds timeout) {
  if (indices.empty()) throw Error("validateCore needs a non-empty index set");
  Formula sub;
  sub.origin = f.origin + "#core";
  for (std::size_t i : indices) {
    if (i >= f.clauses.size())
      throw Error("core index out of range: " + std::to_string(i));
    sub.clauses.push_back(f.clauses[i]);
  }
  return solver.solve(sub, timeout).status == SolveResult::Status::Unsat;
}

}  // namespace unsatcache
