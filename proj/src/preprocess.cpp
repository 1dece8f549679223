#include "persuasion/preprocess.hpp"

#include <array>

#include "persuasion/error.hpp"
#include "persuasion/unicode.hpp"

namespace persuasion {

namespace {

using unicode::is_white_space;

constexpr std::u32string_view kUrl = U"{url}";
constexpr std::u32string_view kEmail = U"{email}";
constexpr std::u32string_view kHashtag = U"{hashtag}";
constexpr std::u32string_view kEmoji = U"{emoji}";

bool is_collapsible_punct(char32_t c) {
  switch (c) {
    case U'.': case U',': case U'!': case U'?': case U';': case U':': case U'-':
      return true;
    default:
      return false;
  }
}

bool is_ascii_alnum(char32_t c) {
  return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9');
}

bool is_email_local_char(char32_t c) {
  return is_ascii_alnum(c) || c == U'.' || c == U'_' || c == U'%' || c == U'+' || c == U'-';
}

bool is_domain_char(char32_t c) { return is_ascii_alnum(c) || c == U'-'; }

char32_t ascii_lower(char32_t c) { return (c >= U'A' && c <= U'Z') ? c + 32 : c; }

bool starts_with_ci(std::u32string_view text, std::size_t pos, std::u32string_view prefix) {
  if (text.size() - pos < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (ascii_lower(text[pos + i]) != prefix[i]) return false;
  }
  return true;
}

// Each matcher returns the match length at `pos`, or 0.

std::size_t match_url(std::u32string_view text, std::size_t pos) {
  std::size_t scheme = 0;
  if (starts_with_ci(text, pos, U"https://")) {
    scheme = 8;
  } else if (starts_with_ci(text, pos, U"http://")) {
    scheme = 7;
  } else {
    return 0;
  }
  std::size_t end = pos + scheme;
  while (end < text.size() && !is_white_space(text[end])) ++end;
  return end > pos + scheme ? end - pos : 0;
}

std::size_t match_email(std::u32string_view text, std::size_t pos) {
  std::size_t i = pos;
  while (i < text.size() && is_email_local_char(text[i])) ++i;
  if (i == pos || i >= text.size() || text[i] != U'@') return 0;
  ++i;

  auto label_end = [&](std::size_t from) {
    while (from < text.size() && is_domain_char(text[from])) ++from;
    return from;
  };
  std::size_t end = label_end(i);
  if (end == i) return 0;
  std::size_t labels = 1;
  while (end < text.size() && text[end] == U'.') {
    const std::size_t next = label_end(end + 1);
    if (next == end + 1) break;
    end = next;
    ++labels;
  }
  return labels >= 2 ? end - pos : 0;
}

std::size_t match_hashtag(std::u32string_view text, std::size_t pos) {
  if (text[pos] != U'#') return 0;
  std::size_t end = pos + 1;
  while (end < text.size() && unicode::is_word_char(text[end])) ++end;
  return end > pos + 1 ? end - pos : 0;
}

}  // namespace

PreprocessConfig parse_preprocess_flags(std::string_view flags) {
  PreprocessConfig config;
  std::size_t start = 0;
  while (start <= flags.size()) {
    auto end = flags.find(',', start);
    if (end == std::string_view::npos) end = flags.size();
    const auto name = flags.substr(start, end - start);
    if (name == "ws_punct") {
      config.normalize_whitespace_punct = true;
    } else if (name == "entities") {
      config.replace_entities = true;
    } else if (!name.empty() && name != "none") {
      throw ConfigError("unknown preprocessing strategy '" + std::string(name) + "'");
    }
    start = end + 1;
  }
  return config;
}

std::string to_flags(const PreprocessConfig& config) {
  std::string out;
  if (config.normalize_whitespace_punct) out = "ws_punct";
  if (config.replace_entities) out += out.empty() ? "entities" : ",entities";
  return out.empty() ? "none" : out;
}

std::string normalize_ws_punct(std::string_view text) {
  const auto cps = unicode::decode_utf8(text);
  std::u32string out;
  out.reserve(cps.size());
  bool pending_space = false;
  for (char32_t c : cps) {
    if (is_white_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(U' ');
    pending_space = false;
    if (is_collapsible_punct(c) && !out.empty() && out.back() == c) continue;
    out.push_back(c);
  }
  return unicode::encode_utf8(out);
}

std::string replace_entities(std::string_view text) {
  const auto cps = unicode::decode_utf8(text);
  const std::u32string_view view(cps);
  std::u32string out;
  out.reserve(cps.size());
  std::size_t i = 0;
  while (i < view.size()) {
    if (const auto n = match_url(view, i)) {
      out += kUrl;
      i += n;
      continue;
    }
    const bool token_start = out.empty() || !is_email_local_char(out.back());
    if (token_start) {
      if (const auto n = match_email(view, i)) {
        out += kEmail;
        i += n;
        continue;
      }
    }
    if (const auto n = match_hashtag(view, i)) {
      out += kHashtag;
      i += n;
      continue;
    }
    if (unicode::is_extended_pictographic(view[i])) {
      out += kEmoji;
      ++i;
      continue;
    }
    out.push_back(view[i]);
    ++i;
  }
  return unicode::encode_utf8(out);
}

std::string preprocess(std::string_view text, const PreprocessConfig& config) {
  const auto once = [&](std::string_view in) {
    std::string s(in);
    if (config.replace_entities) s = replace_entities(s);
    if (config.normalize_whitespace_punct) s = normalize_ws_punct(s);
    return s;
  };
  std::string current = once(text);
  if (!(config.replace_entities && config.normalize_whitespace_punct)) return current;
  // Terminates: entity replacement strictly removes '@', '#', ':' or
  // pictographs, normalization strictly shortens, neither adds the other's.
  while (true) {
    auto next = once(current);
    if (next == current) return current;
    current = std::move(next);
  }
}

}  // namespace persuasion
