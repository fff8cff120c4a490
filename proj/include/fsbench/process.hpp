#pragma once

// POSIX child-process helpers: shell commands with captured stdout, and
// forked in-process work with a wall-clock limit.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <functional>
#include <optional>
#include <string>

#include "fsbench/error.hpp"

namespace fsbench {

struct ProcessResult {
    std::string output;
    int exit_code = -1;   // -1 when killed or terminated by a signal
    bool timed_out = false;
    std::chrono::duration<double> elapsed{0};
};

namespace detail {

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    out += "'";
    return out;
}

/// Reads the child's pipe until EOF or the deadline; kills the process group
/// on timeout and always reaps the child.
inline ProcessResult collect_child(pid_t pid, int read_fd, std::optional<std::chrono::duration<double>> timeout) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    ProcessResult result;
    char buf[4096];
    bool open = true;
    while (open) {
        int wait_ms = -1;
        if (timeout) {
            const auto left = *timeout - (clock::now() - start);
            if (left <= std::chrono::duration<double>::zero()) {
                result.timed_out = true;
                break;
            }
            wait_ms = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(left).count()) + 1;
        }
        pollfd pfd{read_fd, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, wait_ms);
        if (ready < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (ready == 0) continue;  // loop re-checks the deadline
        const ssize_t got = ::read(read_fd, buf, sizeof buf);
        if (got > 0) {
            result.output.append(buf, static_cast<std::size_t>(got));
        } else if (got == 0 || errno != EINTR) {
            open = false;
        }
    }
    ::close(read_fd);
    if (result.timed_out) {
        ::kill(-pid, SIGKILL);
        ::kill(pid, SIGKILL);
    }
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    result.elapsed = clock::now() - start;
    if (!result.timed_out && WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    return result;
}

}  // namespace detail

/// Runs `/bin/sh -c "<command> '<argument>'"` and captures stdout.
inline ProcessResult run_command(const std::string& command, const std::string& argument,
                                 std::optional<std::chrono::duration<double>> timeout) {
    int fds[2];
    if (::pipe2(fds, O_CLOEXEC) != 0) throw ExternalError(ExternalError::Kind::launch, "pipe() failed");
    const std::string line = command + " " + detail::shell_quote(argument);
    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        throw ExternalError(ExternalError::Kind::launch, "fork() failed");
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(fds[1], STDOUT_FILENO);
        ::close(fds[0]);
        ::close(fds[1]);
        ::execl("/bin/sh", "sh", "-c", line.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    ::close(fds[1]);
    return detail::collect_child(pid, fds[0], timeout);
}

/// Runs `work` in a forked copy of this process; whatever it returns is sent
/// back through a pipe. Only call while no other threads are running.
inline ProcessResult run_forked(const std::function<std::string()>& work,
                                std::optional<std::chrono::duration<double>> timeout) {
    int fds[2];
    if (::pipe2(fds, O_CLOEXEC) != 0) throw Error("pipe() failed");
    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        throw Error("fork() failed");
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        ::close(fds[0]);
        int code = 0;
        try {
            const std::string payload = work();
            std::size_t sent = 0;
            while (sent < payload.size()) {
                const ssize_t w = ::write(fds[1], payload.data() + sent, payload.size() - sent);
                if (w <= 0) break;
                sent += static_cast<std::size_t>(w);
            }
        } catch (...) {
            code = 1;
        }
        ::close(fds[1]);
        ::_exit(code);
    }
    ::setpgid(pid, pid);
    ::close(fds[1]);
    return detail::collect_child(pid, fds[0], timeout);
}

}  // namespace fsbench
