#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

#include <fftw3.h>
#include <json.hpp>

#include "ctfpw/core/error.hpp"
#include "ctfpw/io/raw_io.hpp"
#include "ctfpw/version.hpp"

namespace ctfpw::io {

/// 64-bit FNV-1a over a byte stream.
inline std::uint64_t fnv1a64(std::istream& is) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (is) {
    is.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < is.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

inline std::string file_checksum(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot checksum " + path.string());
  std::ostringstream s;
  s << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0')
    << fnv1a64(is);
  return s.str();
}

struct ArtifactRecord {
  std::string path;
  std::string checksum;
  friend bool operator==(const ArtifactRecord&, const ArtifactRecord&) = default;
};

struct RunManifest {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
  std::map<std::string, std::string> inputs;
  std::map<std::string, ArtifactRecord> outputs;
  std::map<std::string, std::string> versions;
  // Thread counts and timings; they do not affect numeric outputs.
  nlohmann::json execution = nlohmann::json::object();

  static RunManifest for_command(std::string command) {
    RunManifest m;
    m.command = std::move(command);
    m.versions = {{"ctfpw", std::string(kVersion)},
                  {"fftw", std::string(fftw_version)},
                  {"compiler", std::string(__VERSION__)}};
    return m;
  }

  void add_output(const std::string& name, const fs::path& path) {
    outputs[name] = {path.filename().string(), file_checksum(path)};
  }

  nlohmann::json to_json() const {
    nlohmann::json outs = nlohmann::json::object();
    for (const auto& [k, v] : outputs) {
      outs[k] = {{"path", v.path}, {"checksum", v.checksum}};
    }
    return {{"command", command},
            {"parameters", parameters},
            {"inputs", inputs},
            {"outputs", outs},
            {"versions", versions},
            {"execution", execution}};
  }

  static RunManifest from_json(const nlohmann::json& j) {
    RunManifest m;
    try {
      m.command = j.at("command").get<std::string>();
      m.parameters = j.at("parameters");
      m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
      for (const auto& [k, v] : j.at("outputs").items()) {
        m.outputs[k] = {v.at("path").get<std::string>(),
                        v.at("checksum").get<std::string>()};
      }
      m.versions = j.at("versions").get<std::map<std::string, std::string>>();
      m.execution = j.value("execution", nlohmann::json::object());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("malformed run manifest: ") + e.what());
    }
    return m;
  }

  void write(const fs::path& path) const { write_json_file(path, to_json()); }
  static RunManifest read(const fs::path& path) {
    return from_json(read_json_file(path));
  }

  friend bool operator==(const RunManifest& a, const RunManifest& b) {
    return a.command == b.command && a.parameters == b.parameters &&
           a.inputs == b.inputs && a.outputs == b.outputs &&
           a.versions == b.versions && a.execution == b.execution;
  }

  /// Same command, parameters and inputs; outputs should then agree.
  bool same_run(const RunManifest& o) const {
    return command == o.command && parameters == o.parameters &&
           inputs == o.inputs;
  }
};

}  // namespace ctfpw::io
