#pragma once

#include <string>
#include <string_view>

namespace persuasion {

/// Text normalization strategies. Both off reproduces the raw input.
struct PreprocessConfig {
  bool normalize_whitespace_punct = false;
  bool replace_entities = false;

  bool operator==(const PreprocessConfig&) const = default;
};

/// Parses a comma list of strategy names: "ws_punct", "entities" (or "" / "none").
/// Throws ConfigError on unknown names.
PreprocessConfig parse_preprocess_flags(std::string_view flags);
std::string to_flags(const PreprocessConfig& config);

/// Collapses whitespace runs to one space, trims both ends and collapses runs
/// of the same character from `.,!?;:-` to a single occurrence.
std::string normalize_ws_punct(std::string_view text);

/// Single left-to-right scan replacing URLs with "{url}", emails with
/// "{email}", hashtags with "{hashtag}" and Extended_Pictographic codepoints
/// with "{emoji}". At each position the recognizers are tried in that order.
///
///   url      http:// or https:// (ASCII case-insensitive) + non-space run
///   email    [A-Za-z0-9._%+-]+ @ label(.label)+, label = [A-Za-z0-9-]+;
///            only starts where the previous output char is not a local char
///   hashtag  # followed by one or more word characters
std::string replace_entities(std::string_view text);

/// replace_entities then normalize_ws_punct, each when enabled. With both
/// enabled the pair is repeated until a fixed point, since collapsing
/// punctuation can complete an entity ("http:://x" -> "http://x").
std::string preprocess(std::string_view text, const PreprocessConfig& config);

}  // namespace persuasion
