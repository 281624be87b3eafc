#pragma once

#include <string>

#include "certiq/qcnn.hpp"
#include "certiq/smoothing.hpp"
#include "certiq/snes.hpp"

namespace certiq {

/// Trained model as persisted by `certiq train`.
struct ModelFile {
  std::string kind = "smoothed";  // or "plain"
  QcnnSpec qcnn;
  SmoothedModel model;
  SnesConfig config;
  std::uint64_t circuit_hash = 0;

  std::string to_json() const;
  static ModelFile from_json(std::string_view text);

  void save(const std::string& path) const;
  static ModelFile load(const std::string& path);

  /// Rebuilds the circuit and checks it against the stored hash.
  Qcnn rebuild() const;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace certiq
