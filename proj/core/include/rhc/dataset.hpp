#ifndef RHC_DATASET_HPP_
#define RHC_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rhc/taxonomy.hpp"
#include "rhc/trace.hpp"

namespace rhc {

struct CorpusDocument {
  std::string doc_id;
  std::string text;
  std::string main_label;
  std::string source;
  int year = 0;
  std::string status;
};

// Line-delimited JSON, one document per line. Throws InvalidInput on a bad
// line or a repeated doc_id.
std::vector<CorpusDocument> ReadCorpus(std::istream& in);

// Maps a raw label to the canonical deepest code, or nothing when the label
// cannot be parsed.
class LabelResolver {
 public:
  // Label must name a leaf of the taxonomy.
  static LabelResolver FromTaxonomy(const Taxonomy& taxonomy);
  // Label must be a well-formed IPC subclass code.
  static LabelResolver IpcSubclass();

  std::optional<std::string> Resolve(std::string_view label) const { return fn_(label); }

 private:
  explicit LabelResolver(std::function<std::optional<std::string>(std::string_view)> fn)
      : fn_(std::move(fn)) {}
  std::function<std::optional<std::string>(std::string_view)> fn_;
};

struct SplitParams {
  std::size_t min_instances = 50;
  std::size_t per_class = 50;
  double test_fraction = 0.1;
  std::uint64_t seed = 0;
  // Only documents with this status are used; empty accepts everything.
  std::string accepted_status = "Accepted";

  // per_class * test_fraction, or NonIntegralTestCount.
  std::size_t TestCount() const;
  void Validate() const;
};

struct SplitEntry {
  std::string doc_id;
  std::string split;  // "train" or "test"
  std::string subclass;

  friend bool operator==(const SplitEntry&, const SplitEntry&) = default;
};

struct SubclassCounts {
  std::size_t train = 0;
  std::size_t test = 0;

  friend bool operator==(const SubclassCounts&, const SubclassCounts&) = default;
};

/// Result of the balanced split. The header records everything needed to
/// rebuild it: seed, RNG algorithm and parameters.
struct SplitManifest {
  SplitParams params;
  std::string algorithm;
  std::vector<SplitEntry> entries;  // subclass order, test entries first
  std::map<std::string, SubclassCounts> per_subclass;
  std::size_t skipped_status = 0;
  std::size_t skipped_unparseable = 0;

  std::set<std::string> TrainIds() const;
  std::set<std::string> TestIds() const;
  std::set<std::string> Labels() const;

  void Write(std::ostream& out) const;
  static SplitManifest Read(std::istream& in);
};

// Keeps subclasses with at least min_instances accepted documents, samples
// per_class of each without replacement, and sends per_class * test_fraction
// of them to test. Subclasses are visited in sorted order and each draws
// from its own stream, so the result depends only on corpus content and seed.
// Throws InsufficientCorpus, NonIntegralTestCount.
SplitManifest BuildBalancedSplit(std::span<const CorpusDocument> corpus,
                                 const SplitParams& params,
                                 const LabelResolver& resolver);

struct OodEntry {
  std::string doc_id;
  std::string subclass;

  friend bool operator==(const OodEntry&, const OodEntry&) = default;
};

// Up to cap_per_class documents for every label also in train_label_set;
// all of them when fewer are available.
std::vector<OodEntry> BuildOodSet(std::span<const CorpusDocument> corpus,
                                  const std::set<std::string>& train_label_set,
                                  std::size_t cap_per_class, std::uint64_t seed,
                                  const LabelResolver& resolver);

struct TraceCandidate {
  std::string id;
  std::string raw;
  LabelPath gold;
};

struct RejectedTrace {
  std::string id;
  std::string reason;  // violation tag or "label_mismatch"
  std::size_t level = 0;

  std::string ToString() const { return reason + "@" + std::to_string(level); }
};

struct TraceFilterResult {
  std::vector<TraceCandidate> kept;
  std::vector<RejectedTrace> rejected;
};

// Keeps traces that parse strictly and agree with gold at every level.
TraceFilterResult FilterSyntheticTraces(std::span<const TraceCandidate> traces,
                                        std::span<const std::string> level_names);

}  // namespace rhc

#endif  // RHC_DATASET_HPP_
