#include <random>
#include <regex>

#include "doctest.h"
#include "persuasion/error.hpp"
#include "persuasion/preprocess.hpp"
#include "persuasion/unicode.hpp"
#include "support.hpp"

using namespace persuasion;

namespace {

bool has_url(const std::u32string& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::u32string_view scheme : {U"http://", U"https://"}) {
      if (s.size() - i <= scheme.size()) continue;
      bool same = true;
      for (std::size_t k = 0; k < scheme.size(); ++k) {
        char32_t c = s[i + k];
        if (c >= U'A' && c <= U'Z') c += 32;
        same = same && c == scheme[k];
      }
      if (same && !unicode::is_white_space(s[i + scheme.size()])) return true;
    }
  }
  return false;
}

bool has_hashtag(const std::u32string& s) {
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i] == U'#' && unicode::is_word_char(s[i + 1])) return true;
  }
  return false;
}

bool has_pictograph(const std::u32string& s) {
  return std::any_of(s.begin(), s.end(), unicode::is_extended_pictographic);
}

bool has_email(const std::string& s) {
  static const std::regex email(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(\.[A-Za-z0-9-]+)+)");
  return std::regex_search(s, email);
}

}  // namespace

TEST_CASE("normalize_ws_punct examples") {
  CHECK(normalize_ws_punct("Hello!!!  World ") == "Hello! World");
  CHECK(normalize_ws_punct("") == "");
  CHECK(normalize_ws_punct("a.b") == "a.b");
  CHECK(normalize_ws_punct("Wait?!") == "Wait?!");
  CHECK(normalize_ws_punct("so... what,, now;; ok:: a -- b") == "so. what, now; ok: a - b");
  CHECK(normalize_ws_punct("\t a\n\nb  　c ") == "a b c");
  CHECK(normalize_ws_punct("! !") == "! !");
  CHECK(normalize_ws_punct("éé") == "éé");
}

TEST_CASE("replace_entities examples") {
  CHECK(replace_entities("See https://x.example/now today") == "See {url} today");
  CHECK(replace_entities("mail me@site.org #stop") == "mail {email} {hashtag}");
  CHECK(replace_entities("{url}") == "{url}");
  CHECK(replace_entities("{email} {hashtag} {emoji}") == "{email} {hashtag} {emoji}");
  CHECK(replace_entities("HTTPS://X.org/A") == "{url}");
  CHECK(replace_entities("http://") == "http://");
  CHECK(replace_entities("x\U0001F600y") == "x{emoji}y");
  CHECK(replace_entities("##stop") == "#{hashtag}");
  CHECK(replace_entities("# alone") == "# alone");
  CHECK(replace_entities("#Привет!") == "{hashtag}!");
  CHECK(replace_entities("user@localhost") == "user@localhost");
  CHECK(replace_entities("foo.me@site.org, hi") == "{email}, hi");
  CHECK(replace_entities("a@b.c.") == "{email}.");
}

TEST_CASE("replace_entities precedence is url, email, hashtag, emoji") {
  CHECK(replace_entities("https://a.b/#x me@x.io") == "{url} {email}");
  CHECK(replace_entities("#https://x") == "{hashtag}://x");
}

TEST_CASE("preprocess applies entities before normalization") {
  const PreprocessConfig off;
  const PreprocessConfig both{true, true};
  CHECK(preprocess("Go!!  https://a.b  ", off) == "Go!!  https://a.b  ");
  CHECK(preprocess("Go!!  https://a.b", both) == "Go! {url}");
  CHECK(preprocess("Go!!  https://a.b", PreprocessConfig{true, false}) == "Go! https://a.b");
  CHECK(preprocess("Go!!  https://a.b", PreprocessConfig{false, true}) == "Go!!  {url}");
  // Collapsing punctuation can complete an entity; the result is still a fixed point.
  CHECK(preprocess("see http:://x", both) == "see {url}");
  CHECK(preprocess("me@a..com", both) == "{email}");
}

TEST_CASE("preprocess flag parsing") {
  CHECK(parse_preprocess_flags("ws_punct,entities") == PreprocessConfig{true, true});
  CHECK(parse_preprocess_flags("entities") == PreprocessConfig{false, true});
  CHECK(parse_preprocess_flags("") == PreprocessConfig{});
  CHECK(parse_preprocess_flags("none") == PreprocessConfig{});
  CHECK_THROWS_AS(parse_preprocess_flags("lowercase"), ConfigError);
  CHECK(to_flags(PreprocessConfig{true, true}) == "ws_punct,entities");
  CHECK(to_flags(PreprocessConfig{}) == "none");
}

TEST_CASE("preprocessing is idempotent and leaves no recognizable entity") {
  std::mt19937_64 rng(2024);
  const std::vector<PreprocessConfig> configs = {{false, false}, {true, false}, {false, true}, {true, true}};
  for (int i = 0; i < 500; ++i) {
    const auto text = testing::random_unicode(rng);
    INFO("input: " << text);

    const auto n = normalize_ws_punct(text);
    CHECK(normalize_ws_punct(n) == n);
    CHECK(n.find("  ") == std::string::npos);
    for (const char* run : {"..", ",,", "!!", "??", ";;", "::", "--"}) CHECK(n.find(run) == std::string::npos);

    const auto e = replace_entities(text);
    CHECK(replace_entities(e) == e);
    const auto cps = unicode::decode_utf8(e);
    CHECK_FALSE(has_url(cps));
    CHECK_FALSE(has_hashtag(cps));
    CHECK_FALSE(has_pictograph(cps));
    CHECK_FALSE(has_email(e));

    for (const auto& config : configs) {
      const auto p = preprocess(text, config);
      CHECK(preprocess(p, config) == p);
    }
    CHECK(preprocess(text, PreprocessConfig{}) == text);
  }
}
