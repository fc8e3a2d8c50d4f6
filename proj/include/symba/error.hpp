#pragma once

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace symba {

enum class Errc {
  invalid_input,
  resource_cap,
  empty_window,
  unsupported_modulus,
  unsupported_subgroup,
  parameter,
  construction_bug,
  not_invertible,
  internal,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_input: return "invalid-input";
    case Errc::resource_cap: return "resource-cap";
    case Errc::empty_window: return "empty-window";
    case Errc::unsupported_modulus: return "unsupported-modulus";
    case Errc::unsupported_subgroup: return "unsupported-subgroup";
    case Errc::parameter: return "parameter";
    case Errc::construction_bug: return "construction-bug";
    case Errc::not_invertible: return "not-invertible";
    case Errc::internal: return "internal";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

// Enumeration caps. Every algorithm here is exponential in the window size,
// so each enumeration checks its size against one of these before starting.
struct Limits {
  std::uint64_t max_subset = std::uint64_t{1} << 20;
  std::uint64_t max_scan = std::uint64_t{1} << 26;
  std::uint64_t max_transport_table = std::uint64_t{1} << 24;
  std::uint64_t max_matrix_dim = 4096;

  static Limits from_env() {
    Limits l;
    if (const char* cap = std::getenv("SYMBA_CAP"); cap != nullptr && *cap != '\0') {
      char* end = nullptr;
      auto v = std::strtoull(cap, &end, 10);
      if (end != cap && *end == '\0') {
        l.max_subset = l.max_scan = l.max_transport_table = v;
      }
    }
    return l;
  }
};

inline Limits& limits() {
  static Limits l = Limits::from_env();
  return l;
}

class ScopedLimits {
 public:
  explicit ScopedLimits(const Limits& l) : saved_(limits()) { limits() = l; }
  ~ScopedLimits() { limits() = saved_; }
  ScopedLimits(const ScopedLimits&) = delete;
  ScopedLimits& operator=(const ScopedLimits&) = delete;

 private:
  Limits saved_;
};

// base^exp, or throws resource_cap once the value passes `cap`.
inline std::uint64_t checked_power(std::uint64_t base, std::uint64_t exp, std::uint64_t cap,
                                   const char* what) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > cap / base) {
      fail(Errc::resource_cap, std::string(what) + ": " + std::to_string(base) + "^" +
                                   std::to_string(exp) + " exceeds cap " + std::to_string(cap));
    }
    r *= base;
  }
  if (r > cap) {
    fail(Errc::resource_cap, std::string(what) + ": size " + std::to_string(r) +
                                 " exceeds cap " + std::to_string(cap));
  }
  return r;
}

}  // namespace symba
