#ifndef RHC_TESTS_SUPPORT_SYNTHETIC_HPP_
#define RHC_TESTS_SUPPORT_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "rhc/dataset.hpp"
#include "rhc/rng.hpp"
#include "rhc/taxonomy.hpp"

namespace rhc::testing {

// Random hierarchy with dotted codes ("3", "3.1", "3.1.4"). Every node has
// between min_branching and max_branching children.
inline Taxonomy RandomTaxonomy(Rng& rng, std::size_t depth, std::size_t min_branching = 2,
                               std::size_t max_branching = 5) {
  std::vector<std::string> names;
  std::vector<TaxonomyRecord> records;
  std::vector<std::string> frontier{""};
  for (std::size_t level = 1; level <= depth; ++level) {
    names.push_back("Level " + std::to_string(level));
    std::vector<std::string> next;
    for (const auto& parent : frontier) {
      const std::size_t n =
          min_branching + rng.UniformInt(max_branching - min_branching + 1);
      for (std::size_t c = 0; c < n; ++c) {
        const std::string code =
            parent.empty() ? "N" + std::to_string(next.size())
                           : parent + "." + std::to_string(c);
        records.push_back({code, level, parent, ""});
        next.push_back(code);
      }
    }
    frontier = std::move(next);
  }
  return Taxonomy::FromRecords("random", names, records);
}

inline std::vector<std::string> Leaves(const Taxonomy& t) {
  return t.level(t.depth() - 1).codes;
}

struct CorpusSpec {
  std::size_t qualifying = 500;      // subclasses with >= 50 accepted documents
  std::size_t min_docs = 50;
  std::size_t max_docs = 64;
  std::size_t thin = 40;             // subclasses below the threshold
  std::size_t rejected_per_class = 3;
  std::size_t unparseable = 25;
  std::uint64_t seed = 7;
};

// Distinct IPC-shaped subclass codes in a seeded order.
inline std::vector<std::string> IpcSubclassCodes(std::size_t count, Rng& rng) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  char buf[8];
  while (out.size() < count) {
    std::snprintf(buf, sizeof(buf), "%c%02d%c", static_cast<char>('A' + rng.UniformInt(8)),
                  static_cast<int>(1 + rng.UniformInt(99)),
                  static_cast<char>('A' + rng.UniformInt(26)));
    if (seen.insert(buf).second) out.emplace_back(buf);
  }
  return out;
}

// Patent-like corpus: `qualifying` subclasses with enough accepted documents,
// `thin` subclasses without, rejected applications sprinkled everywhere and
// a few documents whose label cannot be parsed.
inline std::vector<CorpusDocument> MakeCorpus(const CorpusSpec& spec) {
  Rng rng(spec.seed);
  const auto codes = IpcSubclassCodes(spec.qualifying + spec.thin, rng);
  std::vector<CorpusDocument> docs;
  std::size_t next_id = 0;
  auto add = [&](const std::string& label, const std::string& status) {
    CorpusDocument d;
    d.doc_id = "US" + std::to_string(10000000 + next_id++);
    d.text = "claim text for " + label;
    d.main_label = label;
    d.source = "synthetic";
    d.year = 2015 + static_cast<int>(rng.UniformInt(4));
    d.status = status;
    docs.push_back(std::move(d));
  };
  for (std::size_t c = 0; c < codes.size(); ++c) {
    const bool qualifies = c < spec.qualifying;
    const std::size_t n =
        qualifies ? spec.min_docs + rng.UniformInt(spec.max_docs - spec.min_docs + 1)
                  : 1 + rng.UniformInt(spec.min_docs - 1);
    for (std::size_t i = 0; i < n; ++i) add(codes[c], "Accepted");
    for (std::size_t i = 0; i < spec.rejected_per_class; ++i) add(codes[c], "Rejected");
  }
  for (std::size_t i = 0; i < spec.unparseable; ++i) add("not-a-code", "Accepted");
  // Corpus order should not matter; shuffle to make sure of it.
  rng.Shuffle(docs);
  return docs;
}

}  // namespace rhc::testing

#endif  // RHC_TESTS_SUPPORT_SYNTHETIC_HPP_
