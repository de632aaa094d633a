#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace statedrift {

using TokenStream = std::vector<std::string>;

/// Splits UTF-8 text into lowercase tokens.
///
/// The text is NFC-normalized and lowercased, then cut at every maximal run
/// of code points that are neither letters (general category L) nor decimal
/// digits. Empty segments are dropped; order and duplicates are kept.
/// Invalid UTF-8 sequences behave like separators.
TokenStream tokenize(std::string_view text);

}  // namespace statedrift
