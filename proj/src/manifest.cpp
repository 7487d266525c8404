#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <openssl/evp.h>

#include "lapreg/error.hpp"
#include "lapreg/io.hpp"

namespace lapreg {

using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  require(EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) == 1,
          ErrorKind::InvalidArgument, "sha256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(buf, sizeof buf, "%02x", digest[k]);
    hex += buf;
  }
  return hex;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::InvalidArgument, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

void write_manifest(const std::string& dir, RunManifest manifest,
                    const std::vector<std::string>& output_files) {
  namespace fs = std::filesystem;
  for (const auto& name : output_files)
    manifest.outputs[name] = sha256_file((fs::path(dir) / name).string());
  json doc;
  doc["version"] = manifest.version.empty() ? std::string(kVersion) : manifest.version;
  doc["config"] = manifest.config_json.empty() ? json::object() : json::parse(manifest.config_json);
  doc["seeds"] = manifest.seeds;
  doc["stage_seconds"] = manifest.stage_seconds;
  doc["outputs"] = manifest.outputs;
  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::InvalidArgument, "cannot write manifest in " + dir);
  out << doc.dump(2) << '\n';
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::InvalidArgument, "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  RunManifest m;
  try {
    m.version = doc.at("version").get<std::string>();
    m.config_json = doc.at("config").dump(2);
    m.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    m.stage_seconds = doc.at("stage_seconds").get<std::map<std::string, double>>();
    m.outputs = doc.at("outputs").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("manifest: ") + e.what());
  }
  return m;
}

}  // namespace lapreg
