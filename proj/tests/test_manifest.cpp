#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "mbinet/error.hpp"
#include "mbinet/manifest.hpp"
#include "support/helpers.hpp"

using namespace mbinet;

namespace {

std::string entry_json(const std::string& id, double correctness,
                       const std::string& extra = "") {
  return "{\"utterance_id\":\"" + id +
         "\",\"signal_path\":\"audio/" + id +
         ".wav\",\"track\":1,"
         "\"listener\":{\"id\":\"L1\",\"left\":[0,0,0,0,0,0,0,0],"
         "\"right\":[10,10,10,10,10,10,10,10]},\"correctness\":" +
         std::to_string(correctness) + extra + "}";
}

ErrorKind parse_kind(const std::string& text) {
  try {
    parse_manifest_text(text, "test");
  } catch (const Error& e) {
    return e.kind();
  }
  throw std::runtime_error("expected parse failure");
}

std::vector<ManifestEntry> synthetic_entries(int n) {
  std::vector<ManifestEntry> v(n);
  for (int i = 0; i < n; i++) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "u%03d", i);
    v[i].utterance_id = buf;
    v[i].correctness = 50.0;
  }
  return v;
}

}  // namespace

TEST_CASE("a fully populated entry parses with haspi rescaled") {
  std::string text = "[" + entry_json("utt1", 80.0, ",\"haspi\":0.83") + "]";
  auto entries = parse_manifest_text(text, "test");
  REQUIRE(entries.size() == 1);
  const ManifestEntry& e = entries[0];
  CHECK(e.utterance_id == "utt1");
  CHECK(e.signal_path == "audio/utt1.wav");
  CHECK(e.track == 1);
  CHECK(e.listener.listener_id == "L1");
  CHECK(e.listener.left.thresholds_db_hl[0] == 0.0);
  CHECK(e.listener.right.thresholds_db_hl[7] == 10.0);
  CHECK(e.correctness == 80.0);
  REQUIRE(e.haspi.has_value());
  CHECK(*e.haspi == doctest::Approx(83.0).epsilon(1e-12));

  auto no_haspi = parse_manifest_text("[" + entry_json("utt2", 25) + "]",
                                      "test");
  CHECK(!no_haspi[0].haspi.has_value());
}

TEST_CASE("schema violations carry the right error kinds") {
  CHECK(parse_kind("[" + entry_json("a", 120.0) + "]") ==
        ErrorKind::RangeError);
  CHECK(parse_kind("[" + entry_json("a", -3.0) + "]") == ErrorKind::RangeError);
  CHECK(parse_kind("[" + entry_json("a", 50, ",\"haspi\":1.2") + "]") ==
        ErrorKind::RangeError);
  CHECK(parse_kind("[" + entry_json("a", 50, ",\"bogus\":1") + "]") ==
        ErrorKind::SchemaError);
  CHECK(parse_kind("[{\"utterance_id\":\"a\"}]") == ErrorKind::SchemaError);
  CHECK(parse_kind("[" + entry_json("a", 50) + "," + entry_json("a", 60) +
                   "]") == ErrorKind::DuplicateId);
  CHECK(parse_kind("{\"not\":\"an array\"}") == ErrorKind::SchemaError);
  CHECK(parse_kind("not json at all") == ErrorKind::SchemaError);

  std::string bad_track = "[" + entry_json("a", 50) + "]";
  bad_track.replace(bad_track.find("\"track\":1"), 9, "\"track\":0");
  CHECK(parse_kind(bad_track) == ErrorKind::RangeError);

  std::string bad_audiogram = "[" + entry_json("a", 50) + "]";
  bad_audiogram.replace(bad_audiogram.find("[0,0,0,0,0,0,0,0]"), 17,
                        "[0,0,0,0,0,0,0]");
  CHECK(parse_kind(bad_audiogram) == ErrorKind::SchemaError);

  std::string wrong_type = "[" + entry_json("a", 50) + "]";
  wrong_type.replace(wrong_type.find("\"track\":1"), 9, "\"track\":\"1\"");
  CHECK(parse_kind(wrong_type) == ErrorKind::SchemaError);
}

TEST_CASE("standalone listener JSON parses and validates") {
  ListenerProfile p = parse_listener_text(
      "{\"id\":\"LX\",\"left\":[0,0,0,0,0,0,0,0],"
      "\"right\":[5,5,5,5,5,5,5,5]}",
      "inline");
  CHECK(p.listener_id == "LX");
  CHECK(p.right.thresholds_db_hl[3] == 5.0);
  CHECK_THROWS_AS(parse_listener_text("{\"id\":\"LX\"}", "inline"), Error);
}

TEST_CASE("split sizes follow the rounded ratio") {
  SplitAssignment s100 = split(synthetic_entries(100), 0.9, 1);
  CHECK(s100.train.size() == 90);
  CHECK(s100.dev.size() == 10);

  SplitAssignment s10 = split(synthetic_entries(10), 0.9, 1);
  CHECK(s10.train.size() == 9);
  CHECK(s10.dev.size() == 1);

  SplitAssignment all = split(synthetic_entries(10), 1.0, 1);
  CHECK(all.train.size() == 10);
  CHECK(all.dev.empty());

  CHECK_THROWS_AS(split(synthetic_entries(1), 0.9, 1), Error);
  CHECK_THROWS_AS(split(synthetic_entries(10), 1.5, 1), Error);
}

TEST_CASE("split is a deterministic partition") {
  auto entries = synthetic_entries(40);
  SplitAssignment a = split(entries, 0.8, 7);
  SplitAssignment b = split(entries, 0.8, 7);
  CHECK(a.train == b.train);
  CHECK(a.dev == b.dev);

  SplitAssignment c = split(entries, 0.8, 8);
  CHECK(a.train != c.train);

  CHECK(std::is_sorted(a.train.begin(), a.train.end()));
  CHECK(std::is_sorted(a.dev.begin(), a.dev.end()));
  std::set<std::string> seen(a.train.begin(), a.train.end());
  for (const std::string& id : a.dev) CHECK(seen.insert(id).second);
  CHECK(seen.size() == 40);
}

TEST_CASE("shuffled order of the input does not change the split") {
  auto entries = synthetic_entries(25);
  SplitAssignment a = split(entries, 0.8, 3);
  std::reverse(entries.begin(), entries.end());
  SplitAssignment b = split(entries, 0.8, 3);
  CHECK(a.train == b.train);
  CHECK(a.dev == b.dev);
}

TEST_CASE("train iteration reshuffles per epoch, dev stays sorted") {
  SplitAssignment s = split(synthetic_entries(30), 0.8, 5);
  auto e0 = iterate(s, SplitPart::Train, 99, 0);
  auto e0_again = iterate(s, SplitPart::Train, 99, 0);
  auto e1 = iterate(s, SplitPart::Train, 99, 1);
  CHECK(e0 == e0_again);
  CHECK(e0 != e1);

  auto sorted0 = e0;
  std::sort(sorted0.begin(), sorted0.end());
  auto sorted1 = e1;
  std::sort(sorted1.begin(), sorted1.end());
  CHECK(sorted0 == s.train);  // every id exactly once
  CHECK(sorted1 == s.train);

  auto d0 = iterate(s, SplitPart::Dev, 99, 0);
  auto d7 = iterate(s, SplitPart::Dev, 123, 7);
  CHECK(d0 == s.dev);
  CHECK(d7 == s.dev);
  CHECK(std::is_sorted(d0.begin(), d0.end()));
}

TEST_CASE("manifests load from disk with relative-path context intact") {
  testsup::TempDir dir;
  testsup::SynthCorpus corpus = testsup::write_synth_corpus(
      dir.path(), 6, 2, 77, true, 0.25);
  auto entries = parse_manifest(corpus.manifest_path);
  REQUIRE(entries.size() == 6);
  std::set<int> tracks;
  for (const auto& e : entries) {
    tracks.insert(e.track);
    CHECK(e.haspi.has_value());
    CHECK(*e.haspi >= 0.0);
    CHECK(*e.haspi <= 100.0);
  }
  CHECK(tracks == std::set<int>({1, 2}));
  CHECK_THROWS_AS(parse_manifest(dir.file("absent.json")), Error);
}
