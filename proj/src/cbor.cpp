#include "govkit/cbor.hpp"

#include <algorithm>
#include <vector>

#include "govkit/error.hpp"

namespace govkit::cbor {

namespace {

constexpr std::uint8_t kUnsigned = 0;
constexpr std::uint8_t kBytes = 2;
constexpr std::uint8_t kText = 3;
constexpr std::uint8_t kArray = 4;
constexpr std::uint8_t kMap = 5;

}  // namespace

void Encoder::head(std::uint8_t major, std::uint64_t value) {
  const std::uint8_t mt = static_cast<std::uint8_t>(major << 5);
  if (value < 24) {
    out_.push_back(mt | static_cast<std::uint8_t>(value));
    return;
  }
  int width;
  if (value <= 0xff) {
    out_.push_back(mt | 24);
    width = 1;
  } else if (value <= 0xffff) {
    out_.push_back(mt | 25);
    width = 2;
  } else if (value <= 0xffffffffULL) {
    out_.push_back(mt | 26);
    width = 4;
  } else {
    out_.push_back(mt | 27);
    width = 8;
  }
  for (int i = width - 1; i >= 0; --i) {
    out_.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

Encoder& Encoder::uint(std::uint64_t value) {
  head(kUnsigned, value);
  return *this;
}

Encoder& Encoder::bytes(ByteView value) {
  head(kBytes, value.size());
  out_.insert(out_.end(), value.begin(), value.end());
  return *this;
}

Encoder& Encoder::text(std::string_view value) {
  head(kText, value.size());
  out_.insert(out_.end(), value.begin(), value.end());
  return *this;
}

Encoder& Encoder::array(std::size_t count) {
  head(kArray, count);
  return *this;
}

Encoder& Encoder::map(std::size_t count) {
  head(kMap, count);
  return *this;
}

Encoder& Encoder::text_map(const std::map<std::string, std::string>& entries) {
  std::vector<std::pair<Bytes, const std::string*>> keyed;
  keyed.reserve(entries.size());
  for (const auto& [k, v] : entries) {
    Encoder key;
    key.text(k);
    keyed.emplace_back(std::move(key).take(), &v);
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  map(keyed.size());
  for (const auto& [key, value] : keyed) {
    raw(key);
    text(*value);
  }
  return *this;
}

Encoder& Encoder::raw(ByteView encoded) {
  out_.insert(out_.end(), encoded.begin(), encoded.end());
  return *this;
}

void Decoder::throw_malformed(const std::string& what) const {
  throw Error(ErrorCode::malformed, "cbor at offset " + std::to_string(pos_) + ": " + what);
}

std::uint64_t Decoder::head(std::uint8_t expected_major) {
  if (pos_ >= in_.size()) throw_malformed("unexpected end of input");
  const std::uint8_t initial = in_[pos_];
  const std::uint8_t major = initial >> 5;
  const std::uint8_t info = initial & 0x1f;
  if (major != expected_major) throw_malformed("unexpected major type");
  ++pos_;
  if (info < 24) return info;
  int width;
  switch (info) {
    case 24: width = 1; break;
    case 25: width = 2; break;
    case 26: width = 4; break;
    case 27: width = 8; break;
    default: throw_malformed("indefinite or reserved length");
  }
  if (in_.size() - pos_ < static_cast<std::size_t>(width)) throw_malformed("truncated head");
  std::uint64_t value = 0;
  for (int i = 0; i < width; ++i) value = (value << 8) | in_[pos_++];
  // Shortest-form rule.
  const std::uint64_t floor = width == 1 ? 24 : width == 2 ? 0x100 : width == 4 ? 0x10000 : 0x100000000ULL;
  if (value < floor) throw_malformed("non-minimal integer encoding");
  return value;
}

std::uint64_t Decoder::uint() { return head(kUnsigned); }

Bytes Decoder::bytes() {
  auto len = head(kBytes);
  if (len > in_.size() - pos_) throw_malformed("byte string overruns input");
  Bytes out(in_.begin() + static_cast<std::ptrdiff_t>(pos_),
            in_.begin() + static_cast<std::ptrdiff_t>(pos_ + len));
  pos_ += len;
  return out;
}

std::string Decoder::text() {
  auto len = head(kText);
  if (len > in_.size() - pos_) throw_malformed("text string overruns input");
  std::string out(reinterpret_cast<const char*>(in_.data() + pos_), len);
  if (!is_valid_utf8(out)) throw_malformed("text string is not valid UTF-8");
  pos_ += len;
  return out;
}

std::size_t Decoder::array() {
  auto n = head(kArray);
  if (n > in_.size() - pos_) throw_malformed("array count exceeds input");
  return static_cast<std::size_t>(n);
}

std::size_t Decoder::map() {
  auto n = head(kMap);
  if (n > in_.size() - pos_) throw_malformed("map count exceeds input");
  return static_cast<std::size_t>(n);
}

std::map<std::string, std::string> Decoder::text_map() {
  const auto n = map();
  std::map<std::string, std::string> out;
  Bytes previous_key;
  for (std::size_t i = 0; i < n; ++i) {
    const auto key_start = pos_;
    auto key = text();
    Bytes encoded_key(in_.begin() + static_cast<std::ptrdiff_t>(key_start),
                      in_.begin() + static_cast<std::ptrdiff_t>(pos_));
    if (i > 0 && !(previous_key < encoded_key)) throw_malformed("map keys not in canonical order");
    previous_key = std::move(encoded_key);
    out.emplace(std::move(key), text());
  }
  return out;
}

void Decoder::expect_array(std::size_t count) {
  if (array() != count) throw_malformed("array has wrong number of elements");
}

void Decoder::expect_end() {
  if (!at_end()) throw_malformed("trailing bytes");
}

bool is_valid_utf8(std::string_view s) {
  std::size_t i = 0;
  const auto n = s.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      ++i;
      continue;
    }
    int extra;
    std::uint32_t cp;
    if ((c & 0xe0) == 0xc0) {
      extra = 1;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      extra = 2;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + static_cast<std::size_t>(extra) >= n) return false;
    for (int k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xc0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3f);
    }
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000)) {
      return false;
    }
    if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) return false;
    i += static_cast<std::size_t>(extra) + 1;
  }
  return true;
}

}  // namespace govkit::cbor
