#pragma once

#include <string>
#include <string_view>

namespace persuasion::unicode {

/// Decodes UTF-8; every ill-formed sequence becomes U+FFFD.
std::u32string decode_utf8(std::string_view text);

std::string encode_utf8(std::u32string_view text);
void append_utf8(std::string& out, char32_t cp);

/// Unicode White_Space property.
bool is_white_space(char32_t cp);

/// Unicode Extended_Pictographic property.
bool is_extended_pictographic(char32_t cp);

/// Regex word character: Alphabetic, Mark, Decimal_Number,
/// Connector_Punctuation or Join_Control.
bool is_word_char(char32_t cp);

}  // namespace persuasion::unicode
