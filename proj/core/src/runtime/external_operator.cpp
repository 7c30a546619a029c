// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/runtime/external_operator.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "prober/error.hpp"

namespace prober::runtime {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "prober-op-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) {
      throw Error(ErrorCode::kOperatorFailure, std::string("cannot create temp dir: ") + std::strerror(errno));
    }
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

[[noreturn]] void fail(const ExternalSpec& spec, const std::string& what) {
  throw Error(ErrorCode::kOperatorFailure, "external operator '" + spec.command + "': " + what);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

RecordSet external_operator_invoke(const ExternalSpec& spec, std::span<const RecordSet> inputs) {
  TempDir dir;
  std::vector<std::string> argv_s{spec.command};
  argv_s.insert(argv_s.end(), spec.args.begin(), spec.args.end());
  for (std::size_t p = 0; p < inputs.size(); ++p) {
    fs::path file = dir.path() / ("port" + std::to_string(p) + ".jsonl");
    std::ofstream out(file, std::ios::binary);
    write_jsonl_records(out, inputs[p]);
    if (!out) fail(spec, "cannot write input file");
    argv_s.push_back("--input");
    argv_s.push_back(file.string());
  }
  fs::path err_file = dir.path() / "stderr";

  // Built before fork: the child must not allocate.
  std::vector<char*> argv;
  for (auto& a : argv_s) argv.push_back(a.data());
  argv.push_back(nullptr);
  const std::string err_path = err_file.string();

  int out_pipe[2];
  if (pipe(out_pipe) != 0) fail(spec, std::string("pipe: ") + std::strerror(errno));
  pid_t pid = fork();
  if (pid < 0) {
    close(out_pipe[0]);
    close(out_pipe[1]);
    fail(spec, std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    dup2(out_pipe[1], STDOUT_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    int err = open(err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
    if (err >= 0) dup2(err, STDERR_FILENO);
    int devnull = open("/dev/null", O_RDONLY);
    if (devnull >= 0) dup2(devnull, STDIN_FILENO);
    execvp(argv[0], argv.data());
    _exit(127);
  }
  close(out_pipe[1]);

  std::string output;
  bool timed_out = false;
  auto deadline = std::chrono::steady_clock::now() + spec.timeout;
  char buf[8192];
  while (true) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{out_pipe[0], POLLIN, 0};
    int rc = poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (rc == 0) continue;
    ssize_t n = read(out_pipe[0], buf, sizeof(buf));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    output.append(buf, static_cast<std::size_t>(n));
  }
  close(out_pipe[0]);
  if (timed_out) kill(pid, SIGKILL);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out) fail(spec, "timeout after " + std::to_string(spec.timeout.count()) + " ms");
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    std::string err = read_file(err_file);
    if (err.size() > 512) err = err.substr(err.size() - 512);
    std::string why = WIFEXITED(status) ? "exit code " + std::to_string(WEXITSTATUS(status))
                                        : "killed by signal " + std::to_string(WTERMSIG(status));
    fail(spec, why + (err.empty() ? "" : ": " + err));
  }

  std::vector<Record> records;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < output.size()) {
    std::size_t end = output.find('\n', start);
    std::string line = output.substr(start, end == std::string::npos ? std::string::npos : end - start);
    start = end == std::string::npos ? output.size() : end + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      fail(spec, "malformed output line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  try {
    return RecordSet(std::move(records));
  } catch (const Error& e) {
    fail(spec, e.what());
  }
}

namespace {

class External final : public OperatorImpl {
 public:
  explicit External(ExternalSpec spec) : spec_(std::move(spec)) {}
  RecordSet apply(std::span<const RecordSet> in) const override { return external_operator_invoke(spec_, in); }

 private:
  ExternalSpec spec_;
};

}  // namespace

OperatorHandle make_external_operator(std::string name, std::size_t arity, ExternalSpec spec, SpecLevel spec_level,
                                      PropertyClass properties) {
  if (spec.command.empty()) throw Error(ErrorCode::kInvalidPipeline, "external operator '" + name + "' has no command");
  return OperatorHandle(std::move(name), arity, std::make_shared<External>(std::move(spec)), Backing::kExternal,
                        std::move(spec_level), std::move(properties));
}

}  // namespace prober::runtime
