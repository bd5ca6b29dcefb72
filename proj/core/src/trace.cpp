#include "rhc/trace.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "rhc/error.hpp"
#include "rhc/taxonomy.hpp"
#include "rhc/text.hpp"

namespace rhc {

namespace {

constexpr std::string_view kEmDash = "\xE2\x80\x94";
constexpr std::string_view kEnDash = "\xE2\x80\x93";

struct HeaderMatch {
  std::size_t begin = 0;  // offset of "Step"
  std::size_t end = 0;    // offset just past the dash and trailing spaces
  std::size_t index = 0;
};

bool IsWordChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::size_t SkipSpaces(std::string_view s, std::size_t pos) {
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  return pos;
}

// Case-insensitive find.
std::size_t FindIgnoreCase(std::string_view s, std::string_view needle,
                           std::size_t from = 0) {
  if (needle.empty()) return from;
  for (std::size_t i = from; i + needle.size() <= s.size(); ++i) {
    if (StartsWithIgnoreCase(s.substr(i), needle)) return i;
  }
  return std::string_view::npos;
}

std::vector<HeaderMatch> FindHeaders(std::string_view text) {
  std::vector<HeaderMatch> out;
  std::size_t pos = 0;
  while ((pos = FindIgnoreCase(text, "step", pos)) != std::string_view::npos) {
    const std::size_t begin = pos;
    pos += 4;
    if (begin > 0 && IsWordChar(text[begin - 1])) continue;
    std::size_t p = pos;
    if (p >= text.size() || (text[p] != ' ' && text[p] != '\t')) continue;
    p = SkipSpaces(text, p);
    std::size_t digits_begin = p;
    while (p < text.size() && std::isdigit(static_cast<unsigned char>(text[p]))) ++p;
    if (p == digits_begin || p - digits_begin > 4) continue;
    const std::size_t index =
        std::stoul(std::string(text.substr(digits_begin, p - digits_begin)));
    p = SkipSpaces(text, p);
    const std::string_view rest = text.substr(p);
    if (rest.starts_with(kEmDash)) {
      p += kEmDash.size();
    } else if (rest.starts_with(kEnDash)) {
      p += kEnDash.size();
    } else if (rest.starts_with("--")) {
      p += 2;
    } else if (rest.starts_with("-") || rest.starts_with(":")) {
      p += 1;
    } else {
      continue;
    }
    p = SkipSpaces(text, p);
    out.push_back({begin, p, index});
    pos = p;
  }
  return out;
}

// Length of the level name at the start of `body`.
std::size_t LevelNameLength(std::string_view body, std::string_view expected) {
  if (!expected.empty() && StartsWithIgnoreCase(body, expected)) {
    return expected.size();
  }
  std::size_t end = body.size();
  for (std::string_view stop : {"\n", "}", "Brief Justification", "Decision:"}) {
    const std::size_t at = FindIgnoreCase(body, stop);
    if (at != std::string_view::npos) end = std::min(end, at);
  }
  return end;
}

struct BoxMatch {
  std::size_t begin = 0;  // offset of the backslash
  std::size_t end = 0;    // offset past the closing brace
  std::string content;
};

// Box marker starting exactly at `pos`, if any.
std::optional<BoxMatch> BoxAt(std::string_view s, std::size_t pos) {
  std::size_t open = std::string_view::npos;
  const std::string_view rest = s.substr(pos);
  for (std::string_view marker : {"\\boxed{", "\\box{", "\\texttt{"}) {
    if (rest.starts_with(marker)) {
      open = pos + marker.size();
      break;
    }
  }
  if (open == std::string_view::npos) return std::nullopt;
  int depth = 1;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '{') {
      ++depth;
    } else if (s[i] == '}') {
      if (--depth == 0) {
        return BoxMatch{pos, i + 1, std::string(TrimView(s.substr(open, i - open)))};
      }
    }
  }
  return std::nullopt;
}

std::optional<BoxMatch> FirstBox(std::string_view s) {
  for (std::size_t pos = s.find('\\'); pos != std::string_view::npos;
       pos = s.find('\\', pos + 1)) {
    if (auto box = BoxAt(s, pos)) return box;
  }
  return std::nullopt;
}

std::string StripDecorations(std::string_view s) {
  // Leftovers from typeset output: closing braces of \textit{...} headers
  // and LaTeX thin spaces.
  std::string out = CollapseWhitespace(s);
  bool changed = true;
  while (changed && !out.empty()) {
    changed = false;
    if (out.front() == '}' || out.front() == ':') {
      out.erase(0, 1);
      changed = true;
    } else if (out.rfind("\\,", 0) == 0) {
      out.erase(0, 2);
      changed = true;
    }
    const std::string_view trimmed = TrimView(out);
    if (trimmed.size() != out.size()) {
      out = std::string(trimmed);
      changed = true;
    }
  }
  return out;
}

struct ParsedBlock {
  std::size_t index = 0;
  TraceStep step;
  bool has_decision = false;
};

ParsedBlock ParseBlock(std::string_view block, std::size_t index,
                       std::string_view expected_name) {
  ParsedBlock out;
  out.index = index;
  out.step.level_index = index;
  const std::size_t name_len = LevelNameLength(block, expected_name);
  out.step.level_name = CollapseWhitespace(block.substr(0, name_len));
  std::string_view body = block.substr(name_len);

  const std::size_t decision_at = FindIgnoreCase(body, "decision:");
  std::string_view justification =
      body.substr(0, decision_at == std::string_view::npos ? body.size() : decision_at);
  for (std::string_view label : {"brief justification:", "justification:"}) {
    const std::size_t at = FindIgnoreCase(justification, label);
    if (at != std::string_view::npos) {
      justification = justification.substr(at + label.size());
      break;
    }
  }
  out.step.justification = StripDecorations(justification);

  if (decision_at == std::string_view::npos) return out;
  std::string_view after = body.substr(decision_at + std::string_view("decision:").size());
  const std::size_t eol = after.find('\n');
  const std::string_view line = after.substr(0, eol);
  if (auto box = FirstBox(line)) {
    if (!box->content.empty()) {
      out.step.decision = NormalizeCode(box->content);
      out.step.boxed = true;
      out.has_decision = true;
      return out;
    }
  }
  // Best effort: first token of the decision line.
  std::string token;
  for (char c : TrimView(line)) {
    if (c == ' ' || c == '\t') break;
    token.push_back(c);
  }
  while (!token.empty() && std::string_view(".,;:*`'\"").find(token.back()) !=
                               std::string_view::npos) {
    token.pop_back();
  }
  while (!token.empty() && std::string_view("*`'\"").find(token.front()) !=
                               std::string_view::npos) {
    token.erase(0, 1);
  }
  if (token.find('\\') != std::string::npos || token.find('{') != std::string::npos) {
    token.clear();
  }
  out.step.decision = NormalizeCode(token);
  out.step.boxed = false;
  out.has_decision = !out.step.decision.empty();
  return out;
}

}  // namespace

std::string_view ViolationTag(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kMissingStep: return "missing_step";
    case ViolationKind::kDuplicateStep: return "duplicate_step";
    case ViolationKind::kUnboxedDecision: return "unboxed_decision";
    case ViolationKind::kOutOfOrder: return "out_of_order";
    case ViolationKind::kEmptyJustification: return "empty_justification";
  }
  return "unknown";
}

std::optional<ViolationKind> ViolationFromTag(std::string_view tag) {
  for (auto kind : {ViolationKind::kMissingStep, ViolationKind::kDuplicateStep,
                    ViolationKind::kUnboxedDecision, ViolationKind::kOutOfOrder,
                    ViolationKind::kEmptyJustification}) {
    if (ViolationTag(kind) == tag) return kind;
  }
  return std::nullopt;
}

std::string FormatViolation::ToString() const {
  return std::string(ViolationTag(kind)) + "@" + std::to_string(level);
}

const TraceStep* ReasoningTrace::StepAt(std::size_t level) const {
  if (level == 0 || level > steps.size()) return nullptr;
  return &steps[level - 1];
}

std::size_t WhitespaceTokenCounter::Count(std::string_view text) const {
  std::size_t count = 0;
  bool in_token = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp;
    pos += DecodeUtf8(text, pos, &cp);
    if (IsUnicodeWhitespace(cp)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

const TokenCounter& DefaultTokenCounter() {
  static const WhitespaceTokenCounter counter;
  return counter;
}

std::size_t CountTokens(std::string_view raw, const TokenCounter& counter) {
  return counter.Count(raw);
}

std::vector<StepHeader> ExtractStepHeaders(
    std::string_view raw, std::span<const std::string> expected_levels) {
  const std::string text = NormalizeNewlines(raw);
  const auto headers = FindHeaders(text);
  std::vector<StepHeader> out;
  for (std::size_t h = 0; h < headers.size(); ++h) {
    const std::size_t end = h + 1 < headers.size() ? headers[h + 1].begin : text.size();
    const std::string_view block =
        std::string_view(text).substr(headers[h].end, end - headers[h].end);
    const std::size_t idx = headers[h].index;
    const std::string_view expected =
        idx >= 1 && idx <= expected_levels.size() ? std::string_view(expected_levels[idx - 1])
                                                  : std::string_view();
    out.push_back({idx, CollapseWhitespace(block.substr(0, LevelNameLength(block, expected)))});
  }
  return out;
}

ParseReport ParseTrace(std::string_view raw,
                       std::span<const std::string> expected_levels,
                       ParseMode mode, const TokenCounter& counter) {
  ParseReport report;
  const std::string text(TrimView(NormalizeNewlines(raw)));
  report.token_length = counter.Count(text);
  const std::size_t depth = expected_levels.size();

  const auto headers = FindHeaders(text);
  std::vector<std::optional<ParsedBlock>> first(depth);
  std::vector<FormatViolation> violations;
  std::size_t max_seen = 0;
  for (std::size_t h = 0; h < headers.size(); ++h) {
    const std::size_t idx = headers[h].index;
    if (idx == 0 || idx > depth) continue;
    const std::size_t end = h + 1 < headers.size() ? headers[h + 1].begin : text.size();
    const std::string_view block =
        std::string_view(text).substr(headers[h].end, end - headers[h].end);
    if (first[idx - 1]) {
      violations.push_back({ViolationKind::kDuplicateStep, idx});
      continue;
    }
    if (idx < max_seen) violations.push_back({ViolationKind::kOutOfOrder, idx});
    max_seen = std::max(max_seen, idx);
    first[idx - 1] = ParseBlock(block, idx, expected_levels[idx - 1]);
  }

  for (std::size_t i = 0; i < depth; ++i) {
    if (!first[i]) {
      violations.push_back({ViolationKind::kMissingStep, i + 1});
      continue;
    }
    if (!first[i]->step.boxed || !first[i]->has_decision) {
      violations.push_back({ViolationKind::kUnboxedDecision, i + 1});
    }
    if (first[i]->step.justification.empty()) {
      violations.push_back({ViolationKind::kEmptyJustification, i + 1});
    }
  }
  std::stable_sort(violations.begin(), violations.end(),
                   [](const FormatViolation& a, const FormatViolation& b) {
                     return a.level < b.level;
                   });

  ReasoningTrace trace;
  trace.raw_text = text;
  trace.token_length = report.token_length;
  bool present = false;
  if (mode == ParseMode::kStrict) {
    present = violations.empty();
    if (present) {
      for (auto& block : first) trace.steps.push_back(std::move(block->step));
    }
    for (auto& v : violations) v.fatal = true;
  } else {
    for (std::size_t i = 0; i < depth; ++i) {
      if (!first[i] || !first[i]->has_decision) break;
      trace.steps.push_back(first[i]->step);
    }
    present = !trace.steps.empty();
    if (!present) {
      for (auto& v : violations) v.fatal = true;
    }
  }
  report.violations = std::move(violations);
  if (present) report.trace = std::move(trace);
  return report;
}

std::optional<std::string> ParseFinalOnly(std::string_view raw) {
  std::optional<std::string> last;
  std::size_t pos = raw.find('\\');
  while (pos != std::string_view::npos) {
    if (auto box = BoxAt(raw, pos)) {
      if (!box->content.empty()) last = NormalizeCode(box->content);
      pos = raw.find('\\', box->begin + 1);
    } else {
      pos = raw.find('\\', pos + 1);
    }
  }
  return last;
}

std::string RenderSteps(std::span<const TraceStep> steps) {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i > 0) out += "\n";
    out += "Step " + std::to_string(steps[i].level_index) + " " +
           std::string(kEmDash) + " " + steps[i].level_name + "\n";
    out += "Brief Justification: " + steps[i].justification + "\n";
    out += "Decision: \\box{" + steps[i].decision + "}\n";
  }
  return out;
}

std::string RenderOutputSkeleton(std::span<const std::string> level_names) {
  std::string out;
  for (std::size_t i = 0; i < level_names.size(); ++i) {
    if (i > 0) out += "\n";
    out += "Step " + std::to_string(i + 1) + " " + std::string(kEmDash) + " " +
           level_names[i] + "\n";
    out += "Brief Justification:\n";
    out += "Decision: \\box{}\n";
  }
  return out;
}

PromptTemplate PromptTemplate::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open template " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return {buf.str()};
}

PromptTemplate PromptTemplate::DefaultCot() {
  return {
      "You classify documents into the {taxonomy_name} hierarchy.\n"
      "Work level by level, from the broadest level to the most specific: "
      "{level_names}.\n"
      "\n"
      "- Give exactly one decision for each of the {depth} levels.\n"
      "- Put the code chosen at each level inside \\box{}.\n"
      "- Write a short justification before each decision.\n"
      "\n"
      "Expected Output Format:\n"
      "{output_format}"
      "\n"
      "Document:\n"
      "{document}\n"};
}

PromptTemplate PromptTemplate::DefaultFinalOnly() {
  return {
      "You classify documents into the {taxonomy_name} hierarchy "
      "({level_names}).\n"
      "Answer with the most specific code only, written as \\box{CODE}.\n"
      "\n"
      "Document:\n"
      "{document}\n"};
}

std::string RenderCotPrompt(std::string_view doc_text, const Taxonomy& taxonomy,
                            const PromptTemplate& tmpl) {
  const auto names = taxonomy.LevelNames();
  std::string joined;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) joined += " \xE2\x86\x92 ";  // rightwards arrow
    joined += names[i];
  }
  const auto lookup = [&](std::string_view key) -> std::optional<std::string> {
    if (key == "document") return std::string(doc_text);
    if (key == "level_names") return joined;
    if (key == "output_format") return RenderOutputSkeleton(names);
    if (key == "taxonomy_name") return taxonomy.name();
    if (key == "depth") return std::to_string(taxonomy.depth());
    return std::nullopt;
  };

  const std::string_view t = tmpl.text;
  std::string out;
  out.reserve(t.size() + doc_text.size());
  std::size_t i = 0;
  while (i < t.size()) {
    if (t[i] == '{') {
      std::size_t j = i + 1;
      const bool ident_start =
          j < t.size() && (std::islower(static_cast<unsigned char>(t[j])) || t[j] == '_');
      while (j < t.size() && (std::islower(static_cast<unsigned char>(t[j])) ||
                              std::isdigit(static_cast<unsigned char>(t[j])) || t[j] == '_')) {
        ++j;
      }
      if (ident_start && j < t.size() && t[j] == '}') {
        const std::string_view key = t.substr(i + 1, j - i - 1);
        const auto value = lookup(key);
        if (!value) {
          throw Error(ErrorCode::kMissingPlaceholder,
                      "template placeholder {" + std::string(key) + "} has no value");
        }
        out += *value;
        i = j + 1;
        continue;
      }
    }
    out.push_back(t[i]);
    ++i;
  }
  return out;
}

}  // namespace rhc
