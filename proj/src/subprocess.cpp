#include "translab/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <stdexcept>

namespace translab {

namespace {

void set_cloexec(int fd) { ::fcntl(fd, F_SETFD, FD_CLOEXEC); }

void set_nonblocking(int fd) {
    int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

[[noreturn]] void child_exec(const SubprocessSpec& spec, int in_fd, int out_fd, int err_fd) {
    ::setpgid(0, 0);
    ::dup2(in_fd, STDIN_FILENO);
    ::dup2(out_fd, STDOUT_FILENO);
    ::dup2(err_fd, STDERR_FILENO);
    if (!spec.cwd.empty() && ::chdir(spec.cwd.c_str()) != 0) {
        ::_exit(127);
    }
    std::vector<char*> argv;
    argv.reserve(spec.argv.size() + 1);
    for (const auto& a : spec.argv) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    std::vector<std::string> env_storage;
    env_storage.reserve(spec.env.size());
    for (const auto& [k, v] : spec.env) env_storage.push_back(k + "=" + v);
    std::vector<char*> envp;
    envp.reserve(env_storage.size() + 1);
    for (auto& e : env_storage) envp.push_back(e.data());
    envp.push_back(nullptr);
    ::execve(argv[0], argv.data(), envp.data());
    // execve only returns on error; 127 mirrors shell command-not-found.
    ::_exit(127);
}

}  // namespace

SubprocessResult run_subprocess(const SubprocessSpec& spec) {
    if (spec.argv.empty()) {
        throw std::invalid_argument("run_subprocess: empty argv");
    }
    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0) {
        throw std::runtime_error("run_subprocess: pipe() failed");
    }

    const auto start = std::chrono::steady_clock::now();
    pid_t pid = ::fork();
    if (pid < 0) {
        throw std::runtime_error("run_subprocess: fork() failed");
    }
    if (pid == 0) {
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(err_pipe[0]);
        child_exec(spec, in_pipe[0], out_pipe[1], err_pipe[1]);
    }

    ::setpgid(pid, pid);  // best-effort; child also calls setpgid on itself
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    set_cloexec(in_pipe[1]);
    set_cloexec(out_pipe[0]);
    set_cloexec(err_pipe[0]);
    set_nonblocking(in_pipe[1]);
    set_nonblocking(out_pipe[0]);
    set_nonblocking(err_pipe[0]);
    ::signal(SIGPIPE, SIG_IGN);

    SubprocessResult result;
    std::size_t stdin_offset = 0;
    int stdin_fd = in_pipe[1];
    int stdout_fd = out_pipe[0];
    int stderr_fd = err_pipe[0];
    if (spec.stdin_bytes.empty()) {
        ::close(stdin_fd);
        stdin_fd = -1;
    }

    const auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                      std::chrono::duration<double>(spec.timeout_s));
    char buf[65536];
    bool killed = false;

    while (stdout_fd >= 0 || stderr_fd >= 0) {
        struct pollfd fds[3];
        int nfds = 0;
        int stdin_slot = -1, stdout_slot = -1, stderr_slot = -1;
        if (stdin_fd >= 0) {
            stdin_slot = nfds;
            fds[nfds++] = {stdin_fd, POLLOUT, 0};
        }
        if (stdout_fd >= 0) {
            stdout_slot = nfds;
            fds[nfds++] = {stdout_fd, POLLIN, 0};
        }
        if (stderr_fd >= 0) {
            stderr_slot = nfds;
            fds[nfds++] = {stderr_fd, POLLIN, 0};
        }

        auto now = std::chrono::steady_clock::now();
        if (!killed && now >= deadline) {
            ::kill(-pid, SIGKILL);
            result.timed_out = true;
            killed = true;
        }
        int wait_ms = killed
                          ? 100
                          : static_cast<int>(
                                std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1);
        if (wait_ms < 0) wait_ms = 0;
        if (wait_ms > 1000) wait_ms = 1000;

        int rc = ::poll(fds, static_cast<nfds_t>(nfds), wait_ms);
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }

        if (stdin_slot >= 0 && (fds[stdin_slot].revents & (POLLOUT | POLLERR | POLLHUP))) {
            if (fds[stdin_slot].revents & (POLLERR | POLLHUP)) {
                ::close(stdin_fd);
                stdin_fd = -1;
            } else {
                ssize_t n = ::write(stdin_fd, spec.stdin_bytes.data() + stdin_offset,
                                    spec.stdin_bytes.size() - stdin_offset);
                if (n > 0) stdin_offset += static_cast<std::size_t>(n);
                if (n < 0 && errno != EAGAIN && errno != EINTR) {
                    ::close(stdin_fd);
                    stdin_fd = -1;
                } else if (stdin_offset == spec.stdin_bytes.size()) {
                    ::close(stdin_fd);
                    stdin_fd = -1;
                }
            }
        }

        auto drain = [&](int slot, int& fd, std::string& sink) {
            if (slot < 0 || !(fds[slot].revents & (POLLIN | POLLHUP | POLLERR))) return;
            while (true) {
                ssize_t n = ::read(fd, buf, sizeof(buf));
                if (n > 0) {
                    std::size_t take = static_cast<std::size_t>(n);
                    if (sink.size() < spec.max_capture_bytes) {
                        std::size_t room = spec.max_capture_bytes - sink.size();
                        sink.append(buf, std::min(take, room));
                    }
                    continue;
                }
                if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) return;
                ::close(fd);
                fd = -1;
                return;
            }
        };
        drain(stdout_slot, stdout_fd, result.stdout_bytes);
        drain(stderr_slot, stderr_fd, result.stderr_bytes);
    }

    if (stdin_fd >= 0) ::close(stdin_fd);

    int status = 0;
    while (true) {
        auto now = std::chrono::steady_clock::now();
        if (!killed && now >= deadline) {
            ::kill(-pid, SIGKILL);
            result.timed_out = true;
            killed = true;
        }
        pid_t w = ::waitpid(pid, &status, killed ? 0 : WNOHANG);
        if (w == pid) break;
        if (w < 0 && errno != EINTR) break;
        if (w == 0) {
            struct timespec ts = {0, 10'000'000};  // 10ms
            ::nanosleep(&ts, nullptr);
        }
    }
    // Reap any stragglers in the group so fixtures cannot leak processes.
    ::kill(-pid, SIGKILL);

    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.exit_code = -WTERMSIG(status);
    }
    result.duration_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace translab
