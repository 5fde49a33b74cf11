#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "manet/types.hpp"

namespace manet {

enum class TxKind : std::uint8_t { REGISTER, FORWARD_EVENT, EVICT };

std::string_view to_string(TxKind k);

/// Ledger entry. Times are integer microseconds so that the hashed bytes and
/// the stored value are the same quantity. Every field except tx_hash is
/// hashed, including body fields the kind leaves at their defaults.
struct LedgerTransaction {
  TxKind kind = TxKind::REGISTER;
  NodeId node_id = kNoNode;
  std::int64_t timestamp_us = 0;

  Digest registration_key{};                          // REGISTER
  PacketId packet_id = 0;                             // FORWARD_EVENT
  std::int64_t delay_us = 0;                          // FORWARD_EVENT
  NodeId evicted = kNoNode;                           // EVICT
  EvictionReason reason = EvictionReason::HIGH_DELAY; // EVICT

  Digest tx_hash{};

  double timestamp() const;
  bool operator==(const LedgerTransaction&) const = default;
};

struct Block {
  std::uint64_t index = 0;
  Digest prev_hash{};
  std::int64_t timestamp_us = 0;
  std::vector<LedgerTransaction> transactions;
  Digest block_hash{};

  double timestamp() const;
  bool operator==(const Block&) const = default;
};

/// Canonical bytes of a transaction without its hash: a fixed layout of
/// kind, node, timestamp, key, packet id, delay, evicted node and reason.
std::vector<std::uint8_t> serialize_transaction(const LedgerTransaction& tx);
Digest hash_transaction(const LedgerTransaction& tx);

/// index || prev_hash || timestamp || length-prefixed tx hashes.
std::vector<std::uint8_t> serialize_block_header(const Block& b);
Digest hash_block(const Block& b);

struct SealRecord {
  std::uint64_t index = 0;
  double latency_s = 0.0;
  bool operator==(const SealRecord&) const = default;
};

struct VerificationReport {
  bool valid = true;
  std::optional<std::uint64_t> first_bad_index;
};

class LedgerError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Single logical append-only chain. Starts with a genesis block.
class LedgerChain {
public:
  explicit LedgerChain(double genesis_time = 0.0, int block_size_txs = 8);

  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<LedgerTransaction>& pending() const { return pending_; }
  const std::vector<SealRecord>& seal_times() const { return seals_; }
  int block_size_txs() const { return block_size_; }

  /// Direct access for integrity experiments; normal code never mutates
  /// sealed blocks.
  std::vector<Block>& mutable_blocks() { return blocks_; }

  /// Hashes `tx` and appends it to the pending list. Returns the stored copy.
  const LedgerTransaction& submit(LedgerTransaction tx);

  /// Seals every pending transaction into a new block. Throws LedgerError if
  /// nothing is pending.
  const Block& append_block(double now);

  bool pending_full() const { return static_cast<int>(pending_.size()) >= block_size_; }
  std::optional<double> first_pending_time() const;

  /// Registers `node` with the digest of its pre-provisioned secret. Throws
  /// LedgerError on duplicate registration.
  const LedgerTransaction& register_node(NodeId node, const Digest& secret_key, double now);
  bool is_registered(NodeId node) const;

  /// Secret held for `node` by the provisioning directory, if any.
  const Digest* secret_of(NodeId node) const;

  /// True iff `node` is registered and `tag` equals the keyed hash of
  /// `message` under its secret.
  bool authenticate_message(NodeId node, std::span<const std::uint8_t> message,
                            const Digest& tag) const;

  /// Transactions of `kind`, sealed plus pending.
  std::size_t count(TxKind kind) const;

  /// One block per line, digests hex encoded.
  void write_jsonl(std::ostream& os) const;

private:
  std::vector<Block> blocks_;
  std::vector<LedgerTransaction> pending_;
  std::vector<SealRecord> seals_;
  int block_size_;
  // node -> registration key digest (sealed or pending REGISTER)
  std::map<NodeId, Digest> registered_;
  // Pre-provisioned secrets. Not part of any hashed structure.
  std::map<NodeId, Digest> secrets_;
};

VerificationReport verify_chain(const LedgerChain& chain);
VerificationReport verify_chain(const std::vector<Block>& blocks);

/// len(blocks) - 1. Throws LedgerError on an empty chain.
std::int64_t block_height(const LedgerChain& chain);
std::int64_t block_height(const std::vector<Block>& blocks);

LedgerTransaction make_forward_event(NodeId node, PacketId packet, double delay_s, double now);
LedgerTransaction make_evict(NodeId node, NodeId evicted, EvictionReason reason, double now);

} // namespace manet
