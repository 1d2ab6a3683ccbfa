#include "patchloc/process.h"

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "patchloc/error.h"

extern char** environ;

namespace patchloc {
namespace {

std::string TempDirectory() {
  const char* dir = std::getenv("TMPDIR");
  return (dir != nullptr && *dir != '\0') ? dir : "/tmp";
}

// Resolves argv[0] against PATH in the parent so the child only has to call
// execve.
std::string ResolveProgram(const std::string& program) {
  if (program.find('/') != std::string::npos) return program;
  const char* path = std::getenv("PATH");
  std::string dirs = path != nullptr ? path : "/usr/bin:/bin";
  std::size_t start = 0;
  while (start <= dirs.size()) {
    std::size_t end = dirs.find(':', start);
    if (end == std::string::npos) end = dirs.size();
    std::string dir = dirs.substr(start, end - start);
    if (dir.empty()) dir = ".";
    std::string candidate = dir + "/" + program;
    if (access(candidate.c_str(), X_OK) == 0) return candidate;
    start = end + 1;
  }
  return program;
}

void WriteAll(int fd, const void* data, std::size_t size) {
  const char* p = static_cast<const char*>(data);
  while (size > 0) {
    ssize_t n = write(fd, p, size);
    if (n < 0) {
      if (errno == EINTR) continue;
      return;
    }
    p += n;
    size -= static_cast<std::size_t>(n);
  }
}

bool IsLowerHex(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
}

}  // namespace

TempFile::TempFile(std::string_view tag) {
  std::string pattern = TempDirectory() + "/patchloc-" + std::string(tag) +
                        "-XXXXXX";
  std::vector<char> buf(pattern.begin(), pattern.end());
  buf.push_back('\0');
  int fd = mkostemp(buf.data(), O_CLOEXEC);
  if (fd < 0) {
    throw Error(ErrorCode::kIo, std::string("mkostemp: ") + strerror(errno));
  }
  close(fd);
  path_.assign(buf.data());
}

TempFile::~TempFile() { unlink(path_.c_str()); }

void TempFile::Write(std::span<const std::uint8_t> data) const {
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path_);
}

std::string TempFile::ReadAll() const {
  std::ifstream in(path_, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> SplitCommandLine(std::string_view command) {
  std::vector<std::string> words;
  std::string current;
  bool in_word = false;
  char quote = '\0';
  for (std::size_t i = 0; i < command.size(); ++i) {
    char c = command[i];
    if (quote == '\'') {
      if (c == '\'') {
        quote = '\0';
      } else {
        current += c;
      }
      continue;
    }
    if (c == '\\' && i + 1 < command.size()) {
      current += command[++i];
      in_word = true;
      continue;
    }
    if (quote == '"') {
      if (c == '"') {
        quote = '\0';
      } else {
        current += c;
      }
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
      in_word = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (in_word) {
        words.push_back(std::move(current));
        current.clear();
        in_word = false;
      }
    } else {
      current += c;
      in_word = true;
    }
  }
  if (quote != '\0') {
    throw Error(ErrorCode::kParse, "unterminated quote in command template");
  }
  if (in_word) words.push_back(std::move(current));
  return words;
}

std::vector<std::string> SubstituteInput(std::vector<std::string> argv,
                                         const std::string& input_path) {
  static constexpr std::string_view kPlaceholder = "{INPUT}";
  for (std::string& arg : argv) {
    std::size_t at = 0;
    while ((at = arg.find(kPlaceholder, at)) != std::string::npos) {
      arg.replace(at, kPlaceholder.size(), input_path);
      at += input_path.size();
    }
  }
  return argv;
}

ProcessOutcome RunProcess(const ProcessRequest& request) {
  if (request.argv.empty()) {
    throw Error(ErrorCode::kTargetLaunchFailure, "empty command");
  }
  // Everything the child needs is prepared before fork.
  std::string program = ResolveProgram(request.argv.front());
  std::vector<char*> argv;
  for (const std::string& a : request.argv) {
    argv.push_back(const_cast<char*>(a.c_str()));
  }
  argv.push_back(nullptr);

  std::vector<std::string> env_storage;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    std::string_view entry(*e);
    bool overridden = false;
    for (const auto& [key, value] : request.extra_env) {
      if (entry.size() > key.size() && entry.substr(0, key.size()) == key &&
          entry[key.size()] == '=') {
        overridden = true;
        break;
      }
    }
    if (!overridden) env_storage.emplace_back(entry);
  }
  for (const auto& [key, value] : request.extra_env) {
    env_storage.push_back(key + "=" + value);
  }
  std::vector<char*> envp;
  for (std::string& e : env_storage) envp.push_back(e.data());
  envp.push_back(nullptr);

  int stdin_fd = open(request.stdin_path ? request.stdin_path->c_str()
                                         : "/dev/null",
                      O_RDONLY | O_CLOEXEC);
  if (stdin_fd < 0) {
    throw Error(ErrorCode::kIo, std::string("cannot open child stdin: ") +
                                    strerror(errno));
  }
  int null_fd = open("/dev/null", O_WRONLY | O_CLOEXEC);
  int status_pipe[2];
  if (null_fd < 0 || pipe2(status_pipe, O_CLOEXEC) != 0) {
    close(stdin_fd);
    if (null_fd >= 0) close(null_fd);
    throw Error(ErrorCode::kIo, "cannot set up child process pipes");
  }

  pid_t pid = fork();
  if (pid < 0) {
    close(stdin_fd);
    close(null_fd);
    close(status_pipe[0]);
    close(status_pipe[1]);
    throw Error(ErrorCode::kTargetLaunchFailure,
                std::string("fork: ") + strerror(errno));
  }
  if (pid == 0) {
    setpgid(0, 0);
    sigset_t none;
    sigemptyset(&none);
    sigprocmask(SIG_SETMASK, &none, nullptr);
    signal(SIGPIPE, SIG_DFL);
    dup2(stdin_fd, STDIN_FILENO);
    dup2(null_fd, STDOUT_FILENO);
    dup2(null_fd, STDERR_FILENO);
    execve(program.c_str(), argv.data(), envp.data());
    int err = errno;
    WriteAll(status_pipe[1], &err, sizeof(err));
    _exit(127);
  }
  setpgid(pid, pid);
  close(stdin_fd);
  close(null_fd);
  close(status_pipe[1]);

  int exec_errno = 0;
  ssize_t got;
  do {
    got = read(status_pipe[0], &exec_errno, sizeof(exec_errno));
  } while (got < 0 && errno == EINTR);
  close(status_pipe[0]);
  if (got == static_cast<ssize_t>(sizeof(exec_errno))) {
    waitpid(pid, nullptr, 0);
    throw Error(ErrorCode::kTargetLaunchFailure,
                "cannot execute " + request.argv.front() + ": " +
                    strerror(exec_errno));
  }

  auto deadline = std::chrono::steady_clock::now() + request.timeout;
  auto pause = std::chrono::microseconds(50);
  int status = 0;
  for (;;) {
    pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) {
      throw Error(ErrorCode::kTargetLaunchFailure,
                  std::string("waitpid: ") + strerror(errno));
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
      return {ProcessOutcome::Kind::kTimedOut, 0, 0};
    }
    std::this_thread::sleep_for(pause);
    pause = std::min(pause * 2, std::chrono::microseconds(5000));
  }
  // Reap stragglers the target may have left in its group.
  kill(-pid, SIGKILL);
  if (WIFSIGNALED(status)) {
    return {ProcessOutcome::Kind::kSignaled, 0, WTERMSIG(status)};
  }
  return {ProcessOutcome::Kind::kExited, WEXITSTATUS(status), 0};
}

ExecutionTrace ParseTraceStream(std::string_view data,
                                std::size_t max_events) {
  ExecutionTrace trace;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < data.size()) {
    std::size_t end = data.find('\n', pos);
    if (end == std::string_view::npos) break;  // partial final record
    ++line_no;
    std::string_view record = data.substr(pos, end - pos);
    pos = end + 1;
    if (record.empty() || record.size() > 16) {
      throw Error(ErrorCode::kTraceProtocolError,
                  "malformed trace record on line " + std::to_string(line_no));
    }
    std::uint64_t id = 0;
    for (char c : record) {
      if (!IsLowerHex(c)) {
        throw Error(ErrorCode::kTraceProtocolError,
                    "malformed trace record on line " +
                        std::to_string(line_no));
      }
      id = (id << 4) | static_cast<std::uint64_t>(
                           c <= '9' ? c - '0' : c - 'a' + 10);
    }
    if (trace.events.size() >= max_events) {
      trace.truncated = true;
      break;
    }
    trace.events.push_back(BranchId{id});
  }
  return trace;
}

std::string FormatTraceStream(std::span<const BranchId> events) {
  std::string out;
  char buf[24];
  for (BranchId id : events) {
    int n = snprintf(buf, sizeof(buf), "%llx\n",
                     static_cast<unsigned long long>(ToValue(id)));
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

}  // namespace patchloc
