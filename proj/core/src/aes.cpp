#include "mpvr/aes.hpp"

#include <cstring>

#include "mpvr/errors.hpp"

namespace mpvr {
namespace {

// FIPS-197 SubBytes table.
constexpr std::uint8_t kSbox[256] = {
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b,
    0xfe, 0xd7, 0xab, 0x76, 0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0,
    0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0, 0xb7, 0xfd, 0x93, 0x26,
    0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2,
    0xeb, 0x27, 0xb2, 0x75, 0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0,
    0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84, 0x53, 0xd1, 0x00, 0xed,
    0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f,
    0x50, 0x3c, 0x9f, 0xa8, 0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5,
    0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2, 0xcd, 0x0c, 0x13, 0xec,
    0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14,
    0xde, 0x5e, 0x0b, 0xdb, 0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c,
    0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79, 0xe7, 0xc8, 0x37, 0x6d,
    0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f,
    0x4b, 0xbd, 0x8b, 0x8a, 0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e,
    0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e, 0xe1, 0xf8, 0x98, 0x11,
    0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f,
    0xb0, 0x54, 0xbb, 0x16};

struct InvSbox {
  std::uint8_t t[256];
  InvSbox() {
    for (int i = 0; i < 256; ++i) t[kSbox[i]] = static_cast<std::uint8_t>(i);
  }
};
const InvSbox kInvSbox;

inline std::uint8_t xtime(std::uint8_t x) {
  return static_cast<std::uint8_t>((x << 1) ^ ((x >> 7) * 0x1b));
}

inline std::uint8_t gmul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t p = 0;
  while (b) {
    if (b & 1) p ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return p;
}

// State layout: column-major as in FIPS-197, state[4*c + r].
void sub_bytes(Block& s) {
  for (auto& b : s) b = kSbox[b];
}

void shift_rows(Block& s) {
  Block t = s;
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) s[4 * c + r] = t[4 * ((c + r) % 4) + r];
}

void mix_columns(Block& s) {
  for (int c = 0; c < 4; ++c) {
    std::uint8_t a0 = s[4 * c], a1 = s[4 * c + 1], a2 = s[4 * c + 2], a3 = s[4 * c + 3];
    s[4 * c] = static_cast<std::uint8_t>(xtime(a0) ^ xtime(a1) ^ a1 ^ a2 ^ a3);
    s[4 * c + 1] = static_cast<std::uint8_t>(a0 ^ xtime(a1) ^ xtime(a2) ^ a2 ^ a3);
    s[4 * c + 2] = static_cast<std::uint8_t>(a0 ^ a1 ^ xtime(a2) ^ xtime(a3) ^ a3);
    s[4 * c + 3] = static_cast<std::uint8_t>(xtime(a0) ^ a0 ^ a1 ^ a2 ^ xtime(a3));
  }
}

void inv_shift_rows(Block& s) {
  Block t = s;
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) s[4 * ((c + r) % 4) + r] = t[4 * c + r];
}

void inv_sub_bytes(Block& s) {
  for (auto& b : s) b = kInvSbox.t[b];
}

void inv_mix_columns(Block& s) {
  for (int c = 0; c < 4; ++c) {
    std::uint8_t a0 = s[4 * c], a1 = s[4 * c + 1], a2 = s[4 * c + 2], a3 = s[4 * c + 3];
    s[4 * c] = static_cast<std::uint8_t>(gmul(a0, 14) ^ gmul(a1, 11) ^ gmul(a2, 13) ^ gmul(a3, 9));
    s[4 * c + 1] = static_cast<std::uint8_t>(gmul(a0, 9) ^ gmul(a1, 14) ^ gmul(a2, 11) ^ gmul(a3, 13));
    s[4 * c + 2] = static_cast<std::uint8_t>(gmul(a0, 13) ^ gmul(a1, 9) ^ gmul(a2, 14) ^ gmul(a3, 11));
    s[4 * c + 3] = static_cast<std::uint8_t>(gmul(a0, 11) ^ gmul(a1, 13) ^ gmul(a2, 9) ^ gmul(a3, 14));
  }
}

void add_round_key(Block& s, const Block& k) {
  for (int i = 0; i < 16; ++i) s[i] ^= k[i];
}

}  // namespace

std::uint8_t aes_sbox(std::uint8_t b) { return kSbox[b]; }
std::uint8_t aes_inv_sbox(std::uint8_t b) { return kInvSbox.t[b]; }

RoundKeys aes128_expand_key(const Block& key) {
  RoundKeys rk;
  rk[0] = key;
  std::uint8_t rcon = 1;
  for (int round = 1; round <= 10; ++round) {
    const Block& prev = rk[round - 1];
    Block& cur = rk[round];
    // First word: rotate, substitute, rcon.
    cur[0] = static_cast<std::uint8_t>(prev[0] ^ kSbox[prev[13]] ^ rcon);
    cur[1] = static_cast<std::uint8_t>(prev[1] ^ kSbox[prev[14]]);
    cur[2] = static_cast<std::uint8_t>(prev[2] ^ kSbox[prev[15]]);
    cur[3] = static_cast<std::uint8_t>(prev[3] ^ kSbox[prev[12]]);
    for (int i = 4; i < 16; ++i)
      cur[i] = static_cast<std::uint8_t>(prev[i] ^ cur[i - 4]);
    rcon = xtime(rcon);
  }
  return rk;
}

Block aes128_encrypt_faulted(const Block& key, const Block& plaintext,
                             int fault_round, const Block& fault_mask,
                             const Block& round10_key_mask) {
  if (fault_round < 0 || fault_round > 10)
    throw ConfigError("fault round must be in 0..10");
  RoundKeys rk = aes128_expand_key(key);
  for (int i = 0; i < 16; ++i) rk[10][i] ^= round10_key_mask[i];

  Block s = plaintext;
  add_round_key(s, rk[0]);
  for (int round = 1; round <= 10; ++round) {
    if (round == fault_round)
      for (int i = 0; i < 16; ++i) s[i] ^= fault_mask[i];
    sub_bytes(s);
    shift_rows(s);
    if (round != 10) mix_columns(s);
    add_round_key(s, rk[round]);
  }
  return s;
}

Block aes128_state_entering_round(const Block& key, const Block& plaintext, int round) {
  if (round < 1 || round > 10) throw ConfigError("state tap round must be in 1..10");
  RoundKeys rk = aes128_expand_key(key);
  Block s = plaintext;
  add_round_key(s, rk[0]);
  for (int r = 1; r < round; ++r) {
    sub_bytes(s);
    shift_rows(s);
    if (r != 10) mix_columns(s);
    add_round_key(s, rk[r]);
  }
  return s;
}

Block aes128_encrypt(const Block& key, const Block& plaintext) {
  return aes128_encrypt_faulted(key, plaintext, 0, Block{}, Block{});
}

Block aes128_decrypt(const Block& key, const Block& ciphertext) {
  RoundKeys rk = aes128_expand_key(key);
  Block s = ciphertext;
  add_round_key(s, rk[10]);
  for (int round = 9; round >= 0; --round) {
    inv_shift_rows(s);
    inv_sub_bytes(s);
    add_round_key(s, rk[round]);
    if (round != 0) inv_mix_columns(s);
  }
  return s;
}

FaultPropagation propagate_fault(const Block& key, const Block& plaintext,
                                 int round_index, const Block& e1) {
  if (round_index < 1 || round_index > 10)
    throw ConfigError("propagate_fault: round_index must be in 1..10");
  if (is_zero(e1)) throw ConfigError("propagate_fault: e1 must be nonzero");
  FaultPropagation out;
  out.correct_ct = aes128_encrypt(key, plaintext);
  out.faulty_ct = aes128_encrypt_faulted(key, plaintext, round_index, e1, Block{});
  for (int i = 0; i < 16; ++i)
    out.e2[i] = static_cast<std::uint8_t>(out.correct_ct[i] ^ out.faulty_ct[i]);
  return out;
}

std::string to_hex(const Block& b) {
  static const char* digits = "0123456789abcdef";
  std::string s(32, '0');
  for (int i = 0; i < 16; ++i) {
    s[2 * i] = digits[b[i] >> 4];
    s[2 * i + 1] = digits[b[i] & 0xf];
  }
  return s;
}

Block block_from_hex(std::string_view hex) {
  if (hex.size() != 32) throw ConfigError("hex block must be 32 characters");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw ConfigError("invalid hex digit in block");
  };
  Block b{};
  for (int i = 0; i < 16; ++i)
    b[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  return b;
}

bool is_zero(const Block& b) {
  for (auto v : b)
    if (v) return false;
  return true;
}

}  // namespace mpvr
