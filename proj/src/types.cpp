/*
 * Copyright (c) 2026, the ecreg authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ecreg/types.hpp"

#include <openssl/evp.h>

#include <cstdio>

namespace ecreg {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int HexValue(char ch) {
  if (ch >= '0' && ch <= '9') return ch - '0';
  if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
  if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
  return -1;
}

}  // namespace

std::string ToHex(const std::uint8_t* data, std::size_t len) {
  std::string out;
  out.reserve(len * 2);
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back(kHexDigits[data[i] >> 4]);
    out.push_back(kHexDigits[data[i] & 0x0F]);
  }
  return out;
}

std::string ToHex(const Bytes& data) { return ToHex(data.data(), data.size()); }

Bytes FromHex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw ConfigError("hex string has odd length");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = HexValue(hex[i]);
    const int lo = HexValue(hex[i + 1]);
    if (hi < 0 || lo < 0) throw ConfigError("invalid hex digit");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

TsKey EncodeTimestampKey(const Timestamp& ts) {
  TsKey key{};
  for (int i = 0; i < 8; ++i) {
    key[i] = static_cast<std::uint8_t>(ts.sn >> (8 * (7 - i)));
  }
  key[8] = static_cast<std::uint8_t>(ts.c >> 8);
  key[9] = static_cast<std::uint8_t>(ts.c & 0xFF);
  return key;
}

Timestamp DecodeTimestampKey(const TsKey& key) {
  Timestamp ts;
  ts.sn = 0;
  for (int i = 0; i < 8; ++i) {
    ts.sn = (ts.sn << 8) | key[i];
  }
  ts.c = static_cast<ClientId>((key[8] << 8) | key[9]);
  return ts;
}

std::string TimestampHex(const Timestamp& ts) {
  const TsKey key = EncodeTimestampKey(ts);
  return ToHex(key.data(), key.size());
}

std::optional<Timestamp> TimestampFromHex(const std::string& hex) {
  if (hex.size() != 20) return std::nullopt;
  Bytes raw;
  try {
    raw = FromHex(hex);
  } catch (const ConfigError&) {
    return std::nullopt;
  }
  TsKey key{};
  std::copy(raw.begin(), raw.end(), key.begin());
  return DecodeTimestampKey(key);
}

Digest HashFragment(const Bytes& data) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len != out.size()) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  return out;
}

std::vector<Digest> BuildCrossChecksum(const std::vector<Bytes>& fragments) {
  std::vector<Digest> out;
  out.reserve(fragments.size());
  for (const Bytes& f : fragments) out.push_back(HashFragment(f));
  return out;
}

MetadataEntry MakeEntry(std::uint16_t m) {
  MetadataEntry entry;
  entry.frozenptrlist.assign(m, NullPointer());
  entry.frozenindex.assign(m, 0);
  entry.readindex = 0;
  return entry;
}

void SystemConfig::Validate(bool allow_insufficient_nodes) const {
  char buf[128];
  if (n < 1 || n > 255) throw ConfigError("n: must be in [1, 255]");
  if (k < 1) throw ConfigError("k: must be >= 1");
  if (k > n) throw ConfigError("k: must be <= n");
  if (m < 1) throw ConfigError("m: must be >= 1");
  if (m >= kNilClient) throw ConfigError("m: must be < 65535");
  if (ell < 1) throw ConfigError("ell: must be >= 1");
  if (!allow_insufficient_nodes && n < 2 * t + k) {
    std::snprintf(buf, sizeof(buf),
                  "n: resilience requires n >= 2t+k (n=%u, t=%u, k=%u)", n, t,
                  k);
    throw ConfigError(buf);
  }
  if (static_cast<std::uint32_t>(t) + k > n) {
    std::snprintf(buf, sizeof(buf),
                  "t: write quorum t+k exceeds n (n=%u, t=%u, k=%u)", n, t, k);
    throw ConfigError(buf);
  }
}

}  // namespace ecreg
