#include "mbinet/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>

#include "mbinet/error.hpp"
#include "mbinet/rng.hpp"

namespace mbinet {

namespace {

using nlohmann::json;

void expect_object_keys(const json& o, const std::set<std::string>& required,
                        const std::set<std::string>& optional,
                        const std::string& where) {
  if (!o.is_object())
    fail(ErrorKind::SchemaError, where + " must be a JSON object");
  for (auto it = o.begin(); it != o.end(); ++it)
    if (!required.count(it.key()) && !optional.count(it.key()))
      fail(ErrorKind::SchemaError,
           where + " has unexpected field '" + it.key() + "'");
  for (const std::string& k : required)
    if (!o.contains(k))
      fail(ErrorKind::SchemaError, where + " is missing field '" + k + "'");
}

Audiogram parse_audiogram(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != kAudiogramFreqsHz.size())
    fail(ErrorKind::SchemaError,
         where + " must be an array of 8 thresholds");
  Audiogram a;
  for (std::size_t i = 0; i < a.thresholds_db_hl.size(); i++) {
    if (!j[i].is_number())
      fail(ErrorKind::SchemaError, where + " thresholds must be numbers");
    a.thresholds_db_hl[i] = j[i].get<double>();
  }
  a.validate();
  return a;
}

ManifestEntry parse_entry(const json& j, std::size_t index) {
  const std::string where = "entry " + std::to_string(index);
  expect_object_keys(
      j, {"utterance_id", "signal_path", "track", "listener", "correctness"},
      {"haspi"}, where);

  ManifestEntry e;
  if (!j["utterance_id"].is_string() ||
      j["utterance_id"].get<std::string>().empty())
    fail(ErrorKind::SchemaError, where + ": utterance_id must be a non-empty string");
  e.utterance_id = j["utterance_id"].get<std::string>();
  if (!j["signal_path"].is_string())
    fail(ErrorKind::SchemaError, where + ": signal_path must be a string");
  e.signal_path = j["signal_path"].get<std::string>();
  if (!j["track"].is_number_integer())
    fail(ErrorKind::SchemaError, where + ": track must be an integer");
  e.track = j["track"].get<int>();
  if (e.track < 1) fail(ErrorKind::RangeError, where + ": track must be >= 1");

  const json& l = j["listener"];
  expect_object_keys(l, {"id", "left", "right"}, {}, where + " listener");
  if (!l["id"].is_string())
    fail(ErrorKind::SchemaError, where + ": listener id must be a string");
  e.listener.listener_id = l["id"].get<std::string>();
  e.listener.left = parse_audiogram(l["left"], where + " left audiogram");
  e.listener.right = parse_audiogram(l["right"], where + " right audiogram");

  if (!j["correctness"].is_number())
    fail(ErrorKind::SchemaError, where + ": correctness must be a number");
  e.correctness = j["correctness"].get<double>();
  if (e.correctness < 0.0 || e.correctness > 100.0)
    fail(ErrorKind::RangeError, where + ": correctness outside [0, 100]");

  if (j.contains("haspi")) {
    if (!j["haspi"].is_number())
      fail(ErrorKind::SchemaError, where + ": haspi must be a number");
    double h = j["haspi"].get<double>();
    if (h < 0.0 || h > 1.0)
      fail(ErrorKind::RangeError, where + ": haspi outside [0, 1]");
    e.haspi = h * 100.0;
  }
  return e;
}

}  // namespace

std::vector<ManifestEntry> parse_manifest_text(const std::string& text,
                                               const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::SchemaError,
         origin + " is not valid JSON: " + e.what());
  }
  if (!root.is_array())
    fail(ErrorKind::SchemaError, origin + " must be a JSON array");

  std::vector<ManifestEntry> entries;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < root.size(); i++) {
    ManifestEntry e = parse_entry(root[i], i);
    if (!ids.insert(e.utterance_id).second)
      fail(ErrorKind::DuplicateId,
           "utterance_id '" + e.utterance_id + "' appears twice");
    entries.push_back(std::move(e));
  }
  return entries;
}

ListenerProfile parse_listener_text(const std::string& text,
                                    const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::SchemaError, origin + " is not valid JSON: " + e.what());
  }
  expect_object_keys(j, {"id", "left", "right"}, {}, origin);
  if (!j["id"].is_string())
    fail(ErrorKind::SchemaError, origin + ": listener id must be a string");
  ListenerProfile l;
  l.listener_id = j["id"].get<std::string>();
  l.left = parse_audiogram(j["left"], origin + " left audiogram");
  l.right = parse_audiogram(j["right"], origin + " right audiogram");
  return l;
}

std::vector<ManifestEntry> parse_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::IoError, "cannot open manifest '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return parse_manifest_text(text, path);
}

namespace {

void fisher_yates(std::vector<std::string>& ids, Rng& r) {
  for (std::size_t i = ids.size(); i > 1; i--)
    std::swap(ids[i - 1], ids[r.next_below(i)]);
}

}  // namespace

SplitAssignment split(const std::vector<ManifestEntry>& entries, double ratio,
                      std::uint64_t seed) {
  if (entries.size() < 2)
    fail(ErrorKind::TooFewEntries, "need at least 2 entries to split");
  if (ratio < 0.0 || ratio > 1.0)
    fail(ErrorKind::RangeError, "split ratio outside [0, 1]");

  std::vector<std::string> ids;
  ids.reserve(entries.size());
  for (const ManifestEntry& e : entries) ids.push_back(e.utterance_id);
  std::sort(ids.begin(), ids.end());

  Rng r(mix_seed(seed, hash_name("split")));
  fisher_yates(ids, r);

  auto n_train = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(ids.size())));
  SplitAssignment s;
  s.seed = seed;
  s.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.dev.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.dev.begin(), s.dev.end());
  return s;
}

std::vector<std::string> iterate(const SplitAssignment& s, SplitPart part,
                                 std::uint64_t order_seed, int epoch) {
  std::vector<std::string> ids = part == SplitPart::Train ? s.train : s.dev;
  std::sort(ids.begin(), ids.end());
  if (part == SplitPart::Train) {
    Rng r(mix_seed(order_seed, static_cast<std::uint64_t>(epoch)));
    fisher_yates(ids, r);
  }
  return ids;
}

}  // namespace mbinet
