#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tuba
{

enum class ErrorCode
{
  NotFound,
  InvalidWeights,
  InvalidModel,
  DistMismatch,
  MissingDistribution,
  UnsupportedMetric,
  OverlapError,
  InvalidK,
  ZeroMassCategory,
  InvalidCategory,
  Schema,
  Usage,
  UnknownModel,
};

std::string_view error_code_name(ErrorCode code);

/// Single exception type for all domain failures. `path` locates the
/// offending field for parse/schema errors ("" when not applicable).
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string& message, std::string path = {})
      : std::runtime_error(message), code_(code), path_(std::move(path))
  {
  }

  ErrorCode code() const { return code_; }
  const std::string& path() const { return path_; }

private:
  ErrorCode code_;
  std::string path_;
};

}  // namespace tuba
