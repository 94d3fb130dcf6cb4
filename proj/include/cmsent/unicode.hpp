#pragma once

#include <string>
#include <string_view>

namespace cmsent::unicode {

// Decodes UTF-8 into scalar values. Ill-formed sequences become U+FFFD.
std::u32string decode(std::string_view utf8);

std::string encode(std::u32string_view scalars);
std::string encode(char32_t scalar);

// Full Unicode default lowercase mapping (root locale).
std::string to_lower(std::string_view utf8);
std::u32string to_lower(std::u32string_view scalars);

bool is_space(char32_t c);
// Letters, digits, combining marks and '_'.
bool is_word(char32_t c);
bool is_mark(char32_t c);

}  // namespace cmsent::unicode
