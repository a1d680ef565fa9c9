#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ldp {

// Decodes UTF-8 into Unicode scalar values. Invalid byte sequences decode to
// U+FFFD, one replacement per offending byte.
std::vector<char32_t> decode_utf8(std::string_view text);

void append_utf8(std::string& out, char32_t cp);

std::string encode_utf8(const std::vector<char32_t>& cps);

// Number of Unicode scalar values in the text.
std::size_t count_codepoints(std::string_view text);

}  // namespace ldp
