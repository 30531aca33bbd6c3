#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tokalign/bytes.hpp"
#include "tokalign/sampling.hpp"

namespace tokalign {

enum class Scenario { subword, punctuation, prefix_sep, prefix_indent, contiguous_space };

inline constexpr Scenario kAllScenarios[] = {Scenario::subword, Scenario::punctuation,
                                             Scenario::prefix_sep, Scenario::prefix_indent,
                                             Scenario::contiguous_space};

std::string_view to_string(Scenario s);
std::optional<Scenario> parse_scenario(std::string_view name);

// One partial-token prompt cut from a source document.
//
// prompt + ground_truth is the source. baseline_prompt is the control: the
// prompt cut back to end at the last complete word, trailing whitespace
// removed.
struct ScenarioExample {
  std::string id;
  Scenario scenario = Scenario::subword;
  std::string source_id;
  Bytes prompt;
  Bytes baseline_prompt;
  Bytes ground_truth;
  std::size_t cut_offset = 0;

  friend bool operator==(const ScenarioExample&, const ScenarioExample&) = default;
};

// Every cut offset the scenario allows in `source`, ascending.
//
//  subword           strictly inside a word (run of [A-Za-z0-9_] or bytes >= 0x80)
//  punctuation       strictly inside a run of >= 2 ASCII punctuation bytes
//  prefix_sep        right after a space that follows non-whitespace on its
//                    line and precedes a non-whitespace byte
//  prefix_indent     right after the full leading whitespace of a line that
//                    follows a newline and has content
//  contiguous_space  strictly inside a run of >= 2 bytes from {' ', '\n', '\t'}
std::vector<std::size_t> eligible_cuts(ByteView source, Scenario scenario);

// Builds the example for a cut; throws ContractViolation if the cut is not
// eligible.
ScenarioExample make_example(ByteView source, Scenario scenario, std::size_t cut,
                             std::string source_id = {});

// Uniform choice among eligible cuts. Throws NoCutPoint when there is none.
ScenarioExample cut_scenario(ByteView source, Scenario scenario, Rng& rng,
                             std::string source_id = {});
ScenarioExample cut_subword(ByteView source, Rng& rng);
ScenarioExample cut_punctuation(ByteView source, Rng& rng);
ScenarioExample cut_space_prefix_sep(ByteView source, Rng& rng);
ScenarioExample cut_space_prefix_indent(ByteView source, Rng& rng);
ScenarioExample cut_contiguous_space(ByteView source, Rng& rng);

// Post-hoc checks on an emitted example: reconstruction against `source`,
// baseline containment and the scenario's boundary bytes. Returns an empty
// string when valid, otherwise the first failure.
std::string validate_example(const ScenarioExample& example, ByteView source);
// Same checks without the source (reconstructed as prompt + ground_truth).
std::string validate_example(const ScenarioExample& example);

struct Document {
  std::string id;
  Bytes text;
};

struct DatasetStats {
  Scenario scenario = Scenario::subword;
  std::uint64_t seed = 0;
  std::size_t documents = 0;
  std::size_t emitted = 0;
  std::size_t skipped = 0;
};

struct Dataset {
  std::vector<ScenarioExample> examples;
  DatasetStats stats;
};

// Up to `per_doc` distinct cuts per document, chosen with a per-document
// generator seeded by seed XOR document index. Documents without an eligible
// cut are skipped and counted. Throws NoCutPoint when nothing is emitted.
Dataset generate_dataset(std::span<const Document> corpus, Scenario scenario, std::uint64_t seed,
                         std::size_t per_doc = 1);

}  // namespace tokalign
