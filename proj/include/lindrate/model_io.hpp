#pragma once

// Model files: a YAML document declaring n, d, the Hamiltonian blocks and the
// channels. See docs/model_format.md for the schema.

#include <filesystem>
#include <stdexcept>
#include <string>

#include "lindrate/model.hpp"

namespace lindrate {

class ModelParseError : public std::runtime_error {
 public:
  // `invalid` marks a well-formed document describing an inadmissible model.
  ModelParseError(int line, std::string field, const std::string& message, bool invalid = false);
  int line() const { return line_; }
  const std::string& field() const { return field_; }
  bool invalid() const { return invalid_; }

 private:
  int line_;
  std::string field_;
  bool invalid_;
};

RateModel parse_model(const std::string& text);
RateModel load_model(const std::filesystem::path& path);

}  // namespace lindrate
