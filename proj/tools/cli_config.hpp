#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "toda/cocycle.hpp"
#include "toda/jacobi.hpp"
#include "toda/lax_flow.hpp"
#include "toda/scalar_function.hpp"

namespace toda::cli {

// Bad command line or configuration (exit 64).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key = value settings.  Later sources override earlier ones:
/// defaults, --config file, --set, subcommand flags.
class RunConfig {
 public:
  RunConfig();

  void load_file(const std::string& path);
  void parse_text(const std::string& text, const std::string& origin);
  /// "key=value"
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::string str(const std::string& key) const;
  double num(const std::string& key) const;
  long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<int> integers(const std::string& key) const;

  std::uint64_t seed() const;
  ScalarFunction function() const;
  JacobiMatrix matrix() const;
  ExtendedJacobi extended_matrix() const;
  bool matrix_is_extended() const;
  FlowConfig flow_config() const;
  CocycleConfig cocycle_config() const;
  Complex z() const;

  static const std::vector<std::pair<std::string, std::string>>& documented_keys();

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace toda::cli
