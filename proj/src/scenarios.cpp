#include "tokalign/scenarios.hpp"

#include <algorithm>

#include "tokalign/errors.hpp"

namespace tokalign {
namespace {

bool word_at(ByteView s, std::size_t i) { return is_word_byte(static_cast<unsigned char>(s[i])); }
bool punct_at(ByteView s, std::size_t i) { return is_ascii_punct(static_cast<unsigned char>(s[i])); }
bool space_at(ByteView s, std::size_t i) { return is_space_byte(static_cast<unsigned char>(s[i])); }

// Positions strictly inside maximal runs of length >= 2 of bytes matching pred.
template <typename Pred>
void inner_run_cuts(ByteView s, Pred pred, std::vector<std::size_t>& out) {
  std::size_t i = 0;
  while (i < s.size()) {
    if (!pred(s, i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && pred(s, j)) ++j;
    for (std::size_t cut = i + 1; cut < j; ++cut) out.push_back(cut);
    i = j;
  }
}

std::size_t line_start(ByteView s, std::size_t pos) {
  const auto nl = pos == 0 ? ByteView::npos : s.rfind('\n', pos - 1);
  return nl == ByteView::npos ? 0 : nl + 1;
}

bool only_space(ByteView s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return is_space_byte(static_cast<unsigned char>(c)); });
}

ByteView rstrip_space(ByteView s) {
  while (!s.empty() && is_space_byte(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Start of the partial unit the cut lands in; the baseline ends before it.
std::size_t unit_start(ByteView source, Scenario scenario, std::size_t cut) {
  std::size_t start = cut;
  if (scenario == Scenario::subword) {
    while (start > 0 && word_at(source, start - 1)) --start;
  } else if (scenario == Scenario::punctuation) {
    while (start > 0 && punct_at(source, start - 1)) --start;
  }
  // '_' is both punctuation and a word byte, so a punctuation run can begin
  // inside a word; the baseline must not split that word either.
  while (start > 0 && start < source.size() && word_at(source, start - 1) &&
         word_at(source, start))
    --start;
  return start;
}

}  // namespace

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::subword: return "subword";
    case Scenario::punctuation: return "punctuation";
    case Scenario::prefix_sep: return "prefix_sep";
    case Scenario::prefix_indent: return "prefix_indent";
    case Scenario::contiguous_space: return "contiguous_space";
  }
  return "unknown";
}

std::optional<Scenario> parse_scenario(std::string_view name) {
  for (const Scenario s : kAllScenarios)
    if (to_string(s) == name) return s;
  return std::nullopt;
}

std::vector<std::size_t> eligible_cuts(ByteView source, Scenario scenario) {
  std::vector<std::size_t> cuts;
  switch (scenario) {
    case Scenario::subword:
      inner_run_cuts(source, word_at, cuts);
      break;
    case Scenario::punctuation:
      inner_run_cuts(source, punct_at, cuts);
      break;
    case Scenario::contiguous_space:
      inner_run_cuts(source, space_at, cuts);
      break;
    case Scenario::prefix_sep:
      for (std::size_t cut = 1; cut < source.size(); ++cut) {
        if (source[cut - 1] != ' ' || space_at(source, cut)) continue;
        const std::size_t ls = line_start(source, cut);
        if (!only_space(source.substr(ls, cut - ls))) cuts.push_back(cut);
      }
      break;
    case Scenario::prefix_indent:
      for (std::size_t ls = 1; ls < source.size(); ++ls) {
        if (source[ls - 1] != '\n') continue;
        std::size_t end = ls;
        while (end < source.size() && (source[end] == ' ' || source[end] == '\t')) ++end;
        if (end > ls && end < source.size() && !space_at(source, end)) cuts.push_back(end);
      }
      break;
  }
  return cuts;
}

ScenarioExample make_example(ByteView source, Scenario scenario, std::size_t cut,
                             std::string source_id) {
  const auto cuts = eligible_cuts(source, scenario);
  if (!std::binary_search(cuts.begin(), cuts.end(), cut))
    throw ContractViolation("offset " + std::to_string(cut) + " is not an eligible " +
                            std::string(to_string(scenario)) + " cut");
  ScenarioExample ex;
  ex.scenario = scenario;
  ex.source_id = std::move(source_id);
  ex.prompt = Bytes(source.substr(0, cut));
  ex.ground_truth = Bytes(source.substr(cut));
  ex.baseline_prompt = Bytes(rstrip_space(source.substr(0, unit_start(source, scenario, cut))));
  ex.cut_offset = cut;
  return ex;
}

ScenarioExample cut_scenario(ByteView source, Scenario scenario, Rng& rng, std::string source_id) {
  const auto cuts = eligible_cuts(source, scenario);
  if (cuts.empty())
    throw NoCutPoint("no eligible " + std::string(to_string(scenario)) + " cut point");
  const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(cuts.size()));
  return make_example(source, scenario, cuts[std::min(pick, cuts.size() - 1)],
                      std::move(source_id));
}

ScenarioExample cut_subword(ByteView source, Rng& rng) {
  return cut_scenario(source, Scenario::subword, rng);
}
ScenarioExample cut_punctuation(ByteView source, Rng& rng) {
  return cut_scenario(source, Scenario::punctuation, rng);
}
ScenarioExample cut_space_prefix_sep(ByteView source, Rng& rng) {
  return cut_scenario(source, Scenario::prefix_sep, rng);
}
ScenarioExample cut_space_prefix_indent(ByteView source, Rng& rng) {
  return cut_scenario(source, Scenario::prefix_indent, rng);
}
ScenarioExample cut_contiguous_space(ByteView source, Rng& rng) {
  return cut_scenario(source, Scenario::contiguous_space, rng);
}

std::string validate_example(const ScenarioExample& ex, ByteView source) {
  if (ex.prompt + ex.ground_truth != source) return "prompt + ground_truth differs from source";
  if (ex.cut_offset != ex.prompt.size()) return "cut_offset differs from prompt length";
  if (ex.baseline_prompt.size() >= ex.prompt.size() || !starts_with(ex.prompt, ex.baseline_prompt))
    return "baseline is not a strict prefix of the prompt";
  if (!ex.baseline_prompt.empty() &&
      is_space_byte(static_cast<unsigned char>(ex.baseline_prompt.back())))
    return "baseline ends in whitespace";
  if (!ex.baseline_prompt.empty() &&
      is_word_byte(static_cast<unsigned char>(ex.baseline_prompt.back())) &&
      is_word_byte(static_cast<unsigned char>(ex.prompt[ex.baseline_prompt.size()])))
    return "baseline ends inside a word";
  if (ex.ground_truth.empty()) return "empty ground truth";
  const auto last = static_cast<unsigned char>(ex.prompt.back());
  const auto next = static_cast<unsigned char>(ex.ground_truth.front());
  switch (ex.scenario) {
    case Scenario::subword:
      if (!is_word_byte(last) || !is_word_byte(next)) return "cut is not inside a word";
      break;
    case Scenario::punctuation:
      if (!is_ascii_punct(last) || !is_ascii_punct(next)) return "cut is not inside punctuation";
      break;
    case Scenario::prefix_sep: {
      if (last != ' ' || is_space_byte(next)) return "cut is not between a space and non-space";
      const std::size_t ls = line_start(ex.prompt, ex.prompt.size());
      if (only_space(ByteView(ex.prompt).substr(ls))) return "cut lies in indentation";
      break;
    }
    case Scenario::prefix_indent: {
      if (is_space_byte(next)) return "byte after the cut is whitespace";
      const std::size_t ls = line_start(ex.prompt, ex.prompt.size());
      const ByteView indent = ByteView(ex.prompt).substr(ls);
      if (ls == 0 || indent.empty() || !only_space(indent) ||
          indent.find('\n') != ByteView::npos)
        return "prompt does not end with newline + indentation";
      break;
    }
    case Scenario::contiguous_space:
      if (!is_space_byte(last) || !is_space_byte(next)) return "cut is not inside whitespace";
      break;
  }
  return {};
}

std::string validate_example(const ScenarioExample& ex) {
  return validate_example(ex, ex.prompt + ex.ground_truth);
}

Dataset generate_dataset(std::span<const Document> corpus, Scenario scenario, std::uint64_t seed,
                         std::size_t per_doc) {
  if (corpus.empty()) throw ValidationError("corpus is empty");
  Dataset out;
  out.stats.scenario = scenario;
  out.stats.seed = seed;
  out.stats.documents = corpus.size();
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    std::vector<std::size_t> cuts = eligible_cuts(corpus[d].text, scenario);
    if (cuts.empty()) {
      ++out.stats.skipped;
      continue;
    }
    Rng rng(seed ^ static_cast<std::uint64_t>(d));
    const std::size_t take = std::min(per_doc, cuts.size());
    // Partial Fisher-Yates: the first `take` slots become a uniform sample.
    for (std::size_t k = 0; k < take; ++k) {
      const std::size_t remaining = cuts.size() - k;
      const std::size_t j =
          k + std::min(remaining - 1,
                       static_cast<std::size_t>(rng.uniform() * static_cast<double>(remaining)));
      std::swap(cuts[k], cuts[j]);
      ScenarioExample ex = make_example(corpus[d].text, scenario, cuts[k], corpus[d].id);
      ex.id = std::string(to_string(scenario)) + "/" + corpus[d].id + "/" + std::to_string(k);
      out.examples.push_back(std::move(ex));
    }
  }
  out.stats.emitted = out.examples.size();
  if (out.examples.empty())
    throw NoCutPoint("0 eligible documents for scenario " + std::string(to_string(scenario)) +
                     " (" + std::to_string(out.stats.skipped) + " of " +
                     std::to_string(out.stats.documents) + " skipped)");
  return out;
}

}  // namespace tokalign
