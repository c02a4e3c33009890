#ifndef MBINET_MANIFEST_HPP
#define MBINET_MANIFEST_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mbinet/hearing_loss.hpp"

namespace mbinet {

struct ManifestEntry {
  std::string utterance_id;
  std::string signal_path;  // relative to the manifest file's directory
  int track = 1;
  ListenerProfile listener;
  double correctness = 0.0;      // I_u, 0..100
  std::optional<double> haspi;   // H_u, stored scaled to 0..100
};

// Strict JSON array-of-objects schema:
//   { "utterance_id": str, "signal_path": str, "track": int >= 1,
//     "listener": { "id": str, "left": [8 numbers], "right": [8 numbers] },
//     "correctness": 0..100, "haspi": 0..1 (optional) }
// Unknown or missing fields are SchemaError; out-of-range values are
// RangeError; repeated utterance_id is DuplicateId. haspi is scaled x100
// at ingest so both labels share the 0..100 scale.
std::vector<ManifestEntry> parse_manifest(const std::string& path);
std::vector<ManifestEntry> parse_manifest_text(const std::string& text,
                                               const std::string& origin);

// Standalone listener object, same schema as the manifest's "listener":
//   { "id": str, "left": [8 numbers], "right": [8 numbers] }
ListenerProfile parse_listener_text(const std::string& text,
                                    const std::string& origin);

struct SplitAssignment {
  std::vector<std::string> train;
  std::vector<std::string> dev;
  std::uint64_t seed = 0;
};

// Deterministic shuffle-then-prefix split; |train| == round(ratio * N).
SplitAssignment split(const std::vector<ManifestEntry>& entries, double ratio,
                      std::uint64_t seed);

enum class SplitPart { Train, Dev };

// Training order is a fresh permutation per epoch derived from
// (order_seed, epoch); dev order is always sorted by utterance id.
std::vector<std::string> iterate(const SplitAssignment& s, SplitPart part,
                                 std::uint64_t order_seed, int epoch);

}  // namespace mbinet

#endif  // MBINET_MANIFEST_HPP
