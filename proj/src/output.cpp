#include "vbd/cli/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace vbd::cli {
namespace fs = std::filesystem;

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

Csv::Csv(const std::vector<std::string>& header) {
  for (const auto& h : header) text(h);
  end_row();
}

void Csv::sep() {
  if (row_open_) buf_ += ',';
  row_open_ = true;
}

Csv& Csv::num(double v) {
  sep();
  buf_ += format_number(v);
  return *this;
}

Csv& Csv::integer(long v) {
  sep();
  buf_ += std::to_string(v);
  return *this;
}

Csv& Csv::text(const std::string& s) {
  sep();
  buf_ += s;
  return *this;
}

Csv& Csv::empty() {
  sep();
  return *this;
}

void Csv::end_row() {
  buf_ += '\n';
  row_open_ = false;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::string out;
  for (unsigned i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
  return out;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  os.close();
  if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
}

}  // namespace

void commit_outputs(const std::string& dir, const std::vector<OutputFile>& files, const std::string& command,
                    const std::vector<std::string>& argv, const nlohmann::ordered_json& parameters) {
  const fs::path root(dir);
  fs::create_directories(root);

  nlohmann::ordered_json manifest;
  manifest["command"] = command;
  manifest["argv"] = argv;
  manifest["parameters"] = parameters;
  nlohmann::ordered_json outs = nlohmann::ordered_json::array();
  for (const auto& f : files) {
    outs.push_back({{"file", f.name}, {"bytes", f.content.size()}, {"sha256", sha256_hex(f.content)}});
  }
  manifest["outputs"] = outs;

  std::vector<OutputFile> all = files;
  all.push_back({kManifestName, manifest.dump(2) + "\n"});

  std::vector<fs::path> temps;
  try {
    for (const auto& f : all) {
      const fs::path target = root / f.name;
      fs::create_directories(target.parent_path());
      fs::path tmp = target;
      tmp += ".tmp";
      temps.push_back(tmp);
      write_file(tmp, f.content);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
    throw;
  }
  for (std::size_t i = 0; i < all.size(); ++i) fs::rename(temps[i], root / all[i].name);
}

}  // namespace vbd::cli
