#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cqa {

inline constexpr const char* kToolName = "cqa-triage";
inline constexpr const char* kToolVersion = "0.1.0";

// Errors carry a stable machine-readable code ("degenerate_labels",
// "missing_asker", ...) next to the human message. `usage` errors map to
// CLI exit code 2, `runtime` errors to exit code 1.
enum class ErrorKind { usage, runtime };

class CqaError : public std::runtime_error {
public:
    CqaError(ErrorKind kind, std::string code, const std::string& message)
        : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& code() const noexcept { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

[[noreturn]] inline void fail_usage(std::string code, const std::string& msg) {
    throw CqaError(ErrorKind::usage, std::move(code), msg);
}

[[noreturn]] inline void fail_runtime(std::string code, const std::string& msg) {
    throw CqaError(ErrorKind::runtime, std::move(code), msg);
}

[[noreturn]] inline void fail_usage(const std::string& msg) { fail_usage("usage", msg); }

[[noreturn]] inline void fail_runtime(const std::string& msg) { fail_runtime("runtime", msg); }

// splitmix64: the documented seed-derivation mixer. All derived seeds in the
// toolkit are chains of this function over a master seed and integer salts,
// so any run/tree/fold can be reproduced in isolation.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt) noexcept {
    return splitmix64(master ^ splitmix64(salt));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b) noexcept {
    return derive_seed(derive_seed(master, a), b);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b, std::uint64_t c) noexcept {
    return derive_seed(derive_seed(master, a, b), c);
}

// FNV-1a 64-bit, used for content digests in manifests and snapshots.
constexpr std::uint64_t fnv1a(std::string_view bytes,
                              std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v);

// Log verbosity comes from the CQA_TRIAGE_LOG environment variable
// (error|warn|info|debug, default warn). Output goes to stderr.
enum class LogLevel : int { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel log_level();
void log_msg(LogLevel level, const std::string& msg);

inline void log_warn(const std::string& msg) { log_msg(LogLevel::warn, msg); }
inline void log_info(const std::string& msg) { log_msg(LogLevel::info, msg); }
inline void log_debug(const std::string& msg) { log_msg(LogLevel::debug, msg); }

// Process-wide worker cap (CLI --threads). 0 means hardware concurrency.
// Changing it must never change any computed output, only wall time.
void set_max_threads(int n);
int max_threads();

// Runs fn(i) for i in [0, n), possibly on several threads. Results must be
// written to disjoint slots so the outcome is identical to a serial loop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace cqa
