#include "statedrift/tokenizer.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <stdexcept>

namespace statedrift {
namespace {

const icu::Normalizer2& nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  return *n;
}

bool is_token_char(UChar32 c) { return u_isalpha(c) || u_isdigit(c); }

}  // namespace

TokenStream tokenize(std::string_view text) {
  TokenStream tokens;
  if (text.empty()) return tokens;

  icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString normalized = nfc().normalize(source, status);
  if (U_FAILURE(status)) {
    throw std::runtime_error("NFC normalization failed");
  }
  normalized.toLower(icu::Locale::getRoot());

  int32_t start = -1;
  auto flush = [&](int32_t end) {
    if (start < 0) return;
    std::string token;
    normalized.tempSubStringBetween(start, end).toUTF8String(token);
    tokens.push_back(std::move(token));
    start = -1;
  };

  const int32_t length = normalized.length();
  for (int32_t i = 0; i < length;) {
    const UChar32 c = normalized.char32At(i);
    if (is_token_char(c)) {
      if (start < 0) start = i;
    } else {
      flush(i);
    }
    i = normalized.moveIndex32(i, 1);
  }
  flush(length);
  return tokens;
}

}  // namespace statedrift
