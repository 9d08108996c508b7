#pragma once

#include <stdexcept>
#include <string>

namespace past {

// Base type for all errors raised by the library. The CLI catches this,
// prints one diagnostic line and exits nonzero.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ZeroVectorRow : Error {
  explicit ZeroVectorRow(const std::string& msg) : Error(msg) {}
};

struct InvalidK : Error {
  explicit InvalidK(const std::string& msg) : Error(msg) {}
};

struct InvalidMinSamples : Error {
  explicit InvalidMinSamples(const std::string& msg) : Error(msg) {}
};

struct InvalidEps : Error {
  explicit InvalidEps(const std::string& msg) : Error(msg) {}
};

struct NotEnoughClusters : Error {
  explicit NotEnoughClusters(const std::string& msg) : Error(msg) {}
};

struct EtaTooLarge : Error {
  explicit EtaTooLarge(const std::string& msg) : Error(msg) {}
};

struct DegenerateBatch : Error {
  explicit DegenerateBatch(const std::string& msg) : Error(msg) {}
};

struct ShapeMismatch : Error {
  explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};

struct LabelOutOfRange : Error {
  explicit LabelOutOfRange(const std::string& msg) : Error(msg) {}
};

struct EmptyCluster : Error {
  explicit EmptyCluster(const std::string& msg) : Error(msg) {}
};

struct EmptySelection : Error {
  explicit EmptySelection(const std::string& msg) : Error(msg) {}
};

struct MissingLabels : Error {
  explicit MissingLabels(const std::string& msg) : Error(msg) {}
};

struct StaleCache : Error {
  explicit StaleCache(const std::string& msg) : Error(msg) {}
};

struct InvalidSpec : Error {
  explicit InvalidSpec(const std::string& msg) : Error(msg) {}
};

struct NoClusteredSamples : Error {
  explicit NoClusteredSamples(const std::string& msg) : Error(msg) {}
};

struct NoValidGallery : Error {
  explicit NoValidGallery(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace past
