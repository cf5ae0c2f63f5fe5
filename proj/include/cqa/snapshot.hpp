#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "cqa/dataset.hpp"

namespace cqa {

inline constexpr uint32_t kSnapshotVersion = 1;

struct SnapshotInfo {
    uint64_t digest = 0;  // FNV-1a over the payload; doubles as the dataset id
    std::string id;       // digest in hex
};

// Full container bytes: magic, version, payload size, digest, payload.
// The dataset must be finalized so the encoding is canonical.
std::string snapshot_encode(const Dataset& ds);

// Parses container bytes; validates magic, version, length, and digest.
// `source` names the input in error messages.
std::pair<Dataset, SnapshotInfo> snapshot_decode(std::string_view bytes, const std::string& source);

SnapshotInfo snapshot_save(const Dataset& ds, const std::string& path);
std::pair<Dataset, SnapshotInfo> snapshot_load(const std::string& path);

}  // namespace cqa
