#pragma once

// Command implementations behind the sspde executable. Each command reads a JSON config, writes
// its outputs into the output directory, and reports failures as {code, message, context}.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "sspde/symbolic_ifs.hpp"
#include "sspde/transport_map.hpp"
#include "sspde/trig_polynomial.hpp"
#include "sspde/nonlocal_kernels.hpp"

namespace sspde::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitValidation = 2;

struct CommandOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  bool verbose = false;
};

/// Runs `command` ("simulate", "sweep", "weights", "pullback", "export-sg") and returns the exit
/// code. Errors go to `err` and to <out>/error.json.
int run_command(std::string_view command, const nlohmann::json& config, const CommandOptions& options,
                std::ostream& log, std::ostream& err);

/// Loads the config file, then runs the command; an unreadable or malformed config exits with 2.
int run_command_file(std::string_view command, const std::filesystem::path& config_path,
                     const CommandOptions& options, std::ostream& log, std::ostream& err);

/// Parses a config file; malformed JSON is a validation error.
nlohmann::json load_config(const std::filesystem::path& path);

// Config fragments, exposed for tests.

/// Reads keys of one JSON object and rejects any key that was never consumed.
class Section {
 public:
  Section(const nlohmann::json& node, std::string path);

  bool has(const char* key) const;
  const nlohmann::json& raw(const char* key);
  Section child(const char* key);
  template <class T>
  T get(const char* key) {
    const auto& value = raw(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!value.is_boolean()) throw ValidationError(path_ + "." + key + ": expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!value.is_number_integer()) throw ValidationError(path_ + "." + key + ": expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!value.is_number()) throw ValidationError(path_ + "." + key + ": expected a number");
    }
    try {
      return value.template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ValidationError(path_ + "." + key + ": wrong type");
    }
  }
  template <class T>
  T get_or(const char* key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }
  const std::string& path() const { return path_; }
  /// Throws ValidationError naming every unknown key.
  void finish() const;

 private:
  const nlohmann::json* node_;
  std::string path_;
  std::vector<std::string> used_;
};

IfsSpec parse_ifs(const nlohmann::json& node);
TrigPolynomial parse_trig(const nlohmann::json& node, const std::string& path);
KernelFamily parse_kernel(const nlohmann::json& node, const std::string& path);
PlaneFunction parse_plane_function(const nlohmann::json& node, const std::string& path);
PlaneKernel parse_plane_kernel(const nlohmann::json& node, const std::string& path);

}  // namespace sspde::cli
