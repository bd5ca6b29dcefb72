#ifndef RHC_TRACE_HPP_
#define RHC_TRACE_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rhc {

class Taxonomy;

enum class ParseMode { kStrict, kLenient };

enum class ViolationKind {
  kMissingStep,
  kDuplicateStep,
  kUnboxedDecision,
  kOutOfOrder,
  kEmptyJustification,
};

// Stable snake_case tags: missing_step, duplicate_step, unboxed_decision,
// out_of_order, empty_justification.
std::string_view ViolationTag(ViolationKind kind);
std::optional<ViolationKind> ViolationFromTag(std::string_view tag);

struct FormatViolation {
  ViolationKind kind;
  std::size_t level = 0;  // 1-based level the violation refers to
  bool fatal = false;     // a fatal violation suppresses the trace

  // "missing_step@2"
  std::string ToString() const;

  friend bool operator==(const FormatViolation&, const FormatViolation&) = default;
};

struct TraceStep {
  std::size_t level_index = 0;  // 1-based
  std::string level_name;
  std::string justification;
  std::string decision;
  // False when the decision was recovered without a box marker; such a
  // decision never earns reward.
  bool boxed = true;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

/// A parsed step-by-step output. Steps run 1..n without gaps.
struct ReasoningTrace {
  std::vector<TraceStep> steps;
  std::string raw_text;  // newline-normalized, trimmed
  std::size_t token_length = 0;

  // Step at 1-based `level`, or nullptr.
  const TraceStep* StepAt(std::size_t level) const;

  friend bool operator==(const ReasoningTrace&, const ReasoningTrace&) = default;
};

struct ParseReport {
  std::optional<ReasoningTrace> trace;
  std::vector<FormatViolation> violations;
  // Token length of the normalized input; available even without a trace.
  std::size_t token_length = 0;

  bool ok() const { return trace.has_value(); }
};

/// Measures output length for the format reward.
class TokenCounter {
 public:
  virtual ~TokenCounter() = default;
  virtual std::size_t Count(std::string_view text) const = 0;
  virtual std::string_view name() const = 0;
};

// Splits on Unicode White_Space.
class WhitespaceTokenCounter final : public TokenCounter {
 public:
  std::size_t Count(std::string_view text) const override;
  std::string_view name() const override { return "whitespace"; }
};

const TokenCounter& DefaultTokenCounter();

std::size_t CountTokens(std::string_view raw,
                        const TokenCounter& counter = DefaultTokenCounter());

/// Parses "Step i — <level>" blocks, each with an optional justification and
/// a "Decision:" line carrying \box{...}, \boxed{...} or \texttt{...}.
///
/// Never throws on bad input. Strict mode returns a trace only for a
/// complete, ordered, fully boxed output; lenient mode keeps the first
/// occurrence of each level and returns the gap-free prefix of levels that
/// carry a decision.
ParseReport ParseTrace(std::string_view raw,
                       std::span<const std::string> expected_levels,
                       ParseMode mode,
                       const TokenCounter& counter = DefaultTokenCounter());

// Content of the last non-empty box marker, trimmed.
std::optional<std::string> ParseFinalOnly(std::string_view raw);

struct StepHeader {
  std::size_t index = 0;
  std::string name;

  friend bool operator==(const StepHeader&, const StepHeader&) = default;
};

// "Step i — name" headers in document order.
std::vector<StepHeader> ExtractStepHeaders(
    std::string_view text, std::span<const std::string> expected_levels = {});

// Canonical rendering; ParseTrace(strict) inverts it.
std::string RenderSteps(std::span<const TraceStep> steps);

// Empty answer form listing every level, as used inside prompts.
std::string RenderOutputSkeleton(std::span<const std::string> level_names);

/// Prompt text with {placeholder} fields. Known fields: document,
/// level_names, output_format, taxonomy_name, depth.
struct PromptTemplate {
  std::string text;

  static PromptTemplate Load(const std::filesystem::path& path);
  static PromptTemplate DefaultCot();
  static PromptTemplate DefaultFinalOnly();
};

// Byte-deterministic. Throws MissingPlaceholder for unknown fields.
std::string RenderCotPrompt(std::string_view doc_text, const Taxonomy& taxonomy,
                            const PromptTemplate& tmpl);

}  // namespace rhc

#endif  // RHC_TRACE_HPP_
