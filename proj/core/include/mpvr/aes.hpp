#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace mpvr {

using Block = std::array<std::uint8_t, 16>;
using RoundKeys = std::array<Block, 11>;

std::uint8_t aes_sbox(std::uint8_t b);
std::uint8_t aes_inv_sbox(std::uint8_t b);

RoundKeys aes128_expand_key(const Block& key);

Block aes128_encrypt(const Block& key, const Block& plaintext);
Block aes128_decrypt(const Block& key, const Block& ciphertext);

// Encryption with per-round state taps for fault injection and with optional
// contamination of the last round key:
//  - fault_round in 1..10 XORs fault_mask into the state entering that round
//    (0 = no fault),
//  - round10_key_mask is XORed into the round-10 subkey (all-zero = no
//    contamination).
Block aes128_encrypt_faulted(const Block& key, const Block& plaintext,
                             int fault_round, const Block& fault_mask,
                             const Block& round10_key_mask);

// State tap: the cipher state entering round `round` (1..10), after the
// initial AddRoundKey and round-1..round-1 transformations.
Block aes128_state_entering_round(const Block& key, const Block& plaintext, int round);

struct FaultPropagation {
  Block correct_ct;
  Block faulty_ct;
  Block e2;  // correct_ct XOR faulty_ct, nonzero for nonzero e1
};

// Injects e1 into the state entering round round_index (1..10) and reports
// the diffused output error e2.
FaultPropagation propagate_fault(const Block& key, const Block& plaintext,
                                 int round_index, const Block& e1);

std::string to_hex(const Block& b);
Block block_from_hex(std::string_view hex);  // 32 lowercase/uppercase hex chars
bool is_zero(const Block& b);

}  // namespace mpvr
