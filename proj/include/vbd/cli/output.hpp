#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace vbd::cli {

/// CSV text with a header row; numbers in 17 significant digits, LF endings.
class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header);

  Csv& num(double v);
  Csv& integer(long v);
  Csv& text(const std::string& s);
  Csv& empty();
  void end_row();

  const std::string& str() const { return buf_; }

 private:
  void sep();
  std::string buf_;
  bool row_open_ = false;
};

std::string format_number(double v);

struct OutputFile {
  std::string name;  // relative to the output directory
  std::string content;
};

std::string sha256_hex(const std::string& data);

/// Writes every file through a temporary name and renames it into place, then
/// the manifest (command, argv, resolved parameters, per-file SHA-256).
/// Nothing is left behind when a write fails.
void commit_outputs(const std::string& dir, const std::vector<OutputFile>& files, const std::string& command,
                    const std::vector<std::string>& argv, const nlohmann::ordered_json& parameters);

inline constexpr const char* kManifestName = "manifest.json";

}  // namespace vbd::cli
