#include "alignguard/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

#include "alignguard/errors.hpp"

namespace alignguard {

namespace {

void set_cloexec(int fd) { ::fcntl(fd, F_SETFD, FD_CLOEXEC); }

void set_nonblock(int fd) {
  int flags = ::fcntl(fd, F_GETFL, 0);
  ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

ProcessResult run_process(const ProcessOptions& opts) {
  if (opts.argv.empty()) throw PreconditionError("run_process: empty argv");

  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0)
    throw InfraError("pipe() failed: " + std::string(std::strerror(errno)));

  pid_t pid = ::fork();
  if (pid < 0) throw InfraError("fork() failed: " + std::string(std::strerror(errno)));

  if (pid == 0) {
    // Child: own process group so a timeout kill reaps grandchildren too.
    ::setpgid(0, 0);
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(err_pipe[1], STDERR_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]})
      ::close(fd);
    for (const auto& [k, v] : opts.extra_env) ::setenv(k.c_str(), v.c_str(), 1);
    std::vector<char*> argv;
    argv.reserve(opts.argv.size() + 1);
    for (const auto& a : opts.argv) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    ::execvp(argv[0], argv.data());
    ::fprintf(stderr, "execvp(%s) failed: %s\n", argv[0], std::strerror(errno));
    ::_exit(127);
  }

  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  set_cloexec(in_pipe[1]);
  set_cloexec(out_pipe[0]);
  set_cloexec(err_pipe[0]);
  set_nonblock(in_pipe[1]);
  set_nonblock(out_pipe[0]);
  set_nonblock(err_pipe[0]);

  signal(SIGPIPE, SIG_IGN);

  ProcessResult result;
  const double start = now_seconds();
  const double deadline =
      opts.timeout_seconds > 0 ? start + opts.timeout_seconds : 0.0;

  size_t stdin_written = 0;
  bool stdin_open = true;
  bool out_open = true, err_open = true;
  if (opts.stdin_data.empty()) {
    ::close(in_pipe[1]);
    stdin_open = false;
  }

  char buf[65536];
  bool killed = false;
  while (out_open || err_open || stdin_open) {
    struct pollfd fds[3];
    int nfds = 0;
    int out_idx = -1, err_idx = -1, in_idx = -1;
    if (out_open) {
      out_idx = nfds;
      fds[nfds++] = {out_pipe[0], POLLIN, 0};
    }
    if (err_open) {
      err_idx = nfds;
      fds[nfds++] = {err_pipe[0], POLLIN, 0};
    }
    if (stdin_open) {
      in_idx = nfds;
      fds[nfds++] = {in_pipe[1], POLLOUT, 0};
    }

    int timeout_ms = -1;
    if (deadline > 0) {
      double remain = deadline - now_seconds();
      timeout_ms = remain <= 0 ? 0 : static_cast<int>(remain * 1000) + 1;
    }
    int rc = ::poll(fds, static_cast<nfds_t>(nfds), timeout_ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (deadline > 0 && now_seconds() >= deadline && !killed) {
      ::kill(-pid, SIGKILL);
      killed = true;
      result.timed_out = true;
    }

    auto drain = [&](int idx, int fd, std::string& sink, bool& open_flag) {
      if (idx < 0) return;
      if (fds[idx].revents & (POLLIN | POLLHUP | POLLERR)) {
        ssize_t n = ::read(fd, buf, sizeof(buf));
        if (n > 0) {
          if (sink.size() + static_cast<size_t>(n) <= opts.max_output_bytes)
            sink.append(buf, static_cast<size_t>(n));
        } else if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
          ::close(fd);
          open_flag = false;
        }
      }
    };
    drain(out_idx, out_pipe[0], result.out, out_open);
    drain(err_idx, err_pipe[0], result.err, err_open);

    if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
      if (fds[in_idx].revents & (POLLERR | POLLHUP)) {
        ::close(in_pipe[1]);
        stdin_open = false;
      } else {
        ssize_t n = ::write(in_pipe[1], opts.stdin_data.data() + stdin_written,
                            opts.stdin_data.size() - stdin_written);
        if (n > 0) {
          stdin_written += static_cast<size_t>(n);
          if (stdin_written == opts.stdin_data.size()) {
            ::close(in_pipe[1]);
            stdin_open = false;
          }
        } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
          ::close(in_pipe[1]);
          stdin_open = false;
        }
      }
    }
    if (killed && !out_open && !err_open) break;
  }
  if (stdin_open) ::close(in_pipe[1]);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.signaled = true;
    result.term_signal = WTERMSIG(status);
    result.exit_code = 128 + WTERMSIG(status);
  }
  result.wall_seconds = now_seconds() - start;
  return result;
}

}  // namespace alignguard
