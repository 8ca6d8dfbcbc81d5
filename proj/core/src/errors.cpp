#include "kdetrack/errors.hpp"

namespace kdetrack {

void require_dimension(std::size_t expected, std::size_t actual, const char* what) {
  if (expected != actual) {
    throw DimensionError(std::string(what) + ": dimension mismatch (expected " + std::to_string(expected) +
                         ", got " + std::to_string(actual) + ")");
  }
}

}  // namespace kdetrack
