#include "manet/ledger.hpp"

#include <algorithm>
#include <ostream>

#include "manet/bytes.hpp"
#include "manet/digest.hpp"

namespace manet {

std::string_view to_string(TxKind k) {
  switch (k) {
  case TxKind::REGISTER: return "REGISTER";
  case TxKind::FORWARD_EVENT: return "FORWARD_EVENT";
  case TxKind::EVICT: return "EVICT";
  }
  return "?";
}

double LedgerTransaction::timestamp() const { return from_micros(timestamp_us); }
double Block::timestamp() const { return from_micros(timestamp_us); }

std::vector<std::uint8_t> serialize_transaction(const LedgerTransaction& tx) {
  ByteWriter w(66);
  w.u8(static_cast<std::uint8_t>(tx.kind));
  w.i32(tx.node_id);
  w.i64(tx.timestamp_us);
  w.digest(tx.registration_key);
  w.u64(tx.packet_id);
  w.i64(tx.delay_us);
  w.i32(tx.evicted);
  w.u8(static_cast<std::uint8_t>(tx.reason));
  return w.take();
}

Digest hash_transaction(const LedgerTransaction& tx) { return sha256(serialize_transaction(tx)); }

std::vector<std::uint8_t> serialize_block_header(const Block& b) {
  ByteWriter w(52 + 32 * b.transactions.size());
  w.u64(b.index);
  w.digest(b.prev_hash);
  w.i64(b.timestamp_us);
  w.u32(static_cast<std::uint32_t>(b.transactions.size()));
  for (const auto& tx : b.transactions) {
    w.digest(tx.tx_hash);
  }
  return w.take();
}

Digest hash_block(const Block& b) { return sha256(serialize_block_header(b)); }

LedgerChain::LedgerChain(double genesis_time, int block_size_txs) : block_size_(block_size_txs) {
  if (block_size_txs < 1) {
    throw LedgerError("block size must be at least one transaction");
  }
  Block genesis;
  genesis.index = 0;
  genesis.prev_hash = kZeroDigest;
  genesis.timestamp_us = to_micros(genesis_time);
  genesis.block_hash = hash_block(genesis);
  blocks_.push_back(std::move(genesis));
}

const LedgerTransaction& LedgerChain::submit(LedgerTransaction tx) {
  tx.tx_hash = hash_transaction(tx);
  pending_.push_back(std::move(tx));
  return pending_.back();
}

std::optional<double> LedgerChain::first_pending_time() const {
  if (pending_.empty()) {
    return std::nullopt;
  }
  return pending_.front().timestamp();
}

const Block& LedgerChain::append_block(double now) {
  if (pending_.empty()) {
    throw LedgerError("append_block: no pending transactions");
  }
  Block b;
  b.index = blocks_.back().index + 1;
  b.prev_hash = blocks_.back().block_hash;
  b.timestamp_us = to_micros(now);
  b.transactions = std::move(pending_);
  pending_.clear();
  b.block_hash = hash_block(b);
  const double latency = std::max(0.0, now - b.transactions.front().timestamp());
  seals_.push_back({b.index, latency});
  blocks_.push_back(std::move(b));
  return blocks_.back();
}

const LedgerTransaction& LedgerChain::register_node(NodeId node, const Digest& secret_key,
                                                    double now) {
  if (registered_.count(node) != 0) {
    throw LedgerError("register_node: node " + std::to_string(node) + " is already registered");
  }
  LedgerTransaction tx;
  tx.kind = TxKind::REGISTER;
  tx.node_id = node;
  tx.timestamp_us = to_micros(now);
  tx.registration_key = sha256(secret_key);
  registered_[node] = tx.registration_key;
  secrets_[node] = secret_key;
  return submit(std::move(tx));
}

bool LedgerChain::is_registered(NodeId node) const { return registered_.count(node) != 0; }

const Digest* LedgerChain::secret_of(NodeId node) const {
  auto it = secrets_.find(node);
  return it == secrets_.end() ? nullptr : &it->second;
}

bool LedgerChain::authenticate_message(NodeId node, std::span<const std::uint8_t> message,
                                       const Digest& tag) const {
  auto reg = registered_.find(node);
  auto key = secrets_.find(node);
  if (reg == registered_.end() || key == secrets_.end()) {
    return false;
  }
  return keyed_tag(key->second, message) == tag;
}

std::size_t LedgerChain::count(TxKind kind) const {
  std::size_t n = 0;
  for (const auto& b : blocks_) {
    n += static_cast<std::size_t>(std::count_if(b.transactions.begin(), b.transactions.end(),
                                                [&](const auto& t) { return t.kind == kind; }));
  }
  n += static_cast<std::size_t>(std::count_if(pending_.begin(), pending_.end(),
                                              [&](const auto& t) { return t.kind == kind; }));
  return n;
}

void LedgerChain::write_jsonl(std::ostream& os) const {
  for (const auto& b : blocks_) {
    os << "{\"index\":" << b.index << ",\"prev_hash\":\"" << to_hex(b.prev_hash)
       << "\",\"timestamp_us\":" << b.timestamp_us << ",\"block_hash\":\"" << to_hex(b.block_hash)
       << "\",\"transactions\":[";
    for (std::size_t i = 0; i < b.transactions.size(); ++i) {
      const auto& t = b.transactions[i];
      os << (i ? "," : "") << "{\"kind\":\"" << to_string(t.kind) << "\",\"node\":" << t.node_id
         << ",\"timestamp_us\":" << t.timestamp_us;
      switch (t.kind) {
      case TxKind::REGISTER:
        os << ",\"registration_key\":\"" << to_hex(t.registration_key) << '"';
        break;
      case TxKind::FORWARD_EVENT:
        os << ",\"packet_id\":" << t.packet_id << ",\"delay_us\":" << t.delay_us;
        break;
      case TxKind::EVICT:
        os << ",\"evicted\":" << t.evicted << ",\"reason\":\"" << to_string(t.reason) << '"';
        break;
      }
      os << ",\"tx_hash\":\"" << to_hex(t.tx_hash) << "\"}";
    }
    os << "]}\n";
  }
}

VerificationReport verify_chain(const std::vector<Block>& blocks) {
  VerificationReport rep;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    bool ok = b.index == i;
    const Digest& expected_prev = i == 0 ? kZeroDigest : blocks[i - 1].block_hash;
    ok = ok && b.prev_hash == expected_prev;
    for (const auto& tx : b.transactions) {
      ok = ok && hash_transaction(tx) == tx.tx_hash;
    }
    ok = ok && hash_block(b) == b.block_hash;
    if (!ok) {
      rep.valid = false;
      rep.first_bad_index = i;
      return rep;
    }
  }
  return rep;
}

VerificationReport verify_chain(const LedgerChain& chain) { return verify_chain(chain.blocks()); }

std::int64_t block_height(const std::vector<Block>& blocks) {
  if (blocks.empty()) {
    throw LedgerError("block_height: empty chain");
  }
  return static_cast<std::int64_t>(blocks.size()) - 1;
}

std::int64_t block_height(const LedgerChain& chain) { return block_height(chain.blocks()); }

LedgerTransaction make_forward_event(NodeId node, PacketId packet, double delay_s, double now) {
  LedgerTransaction tx;
  tx.kind = TxKind::FORWARD_EVENT;
  tx.node_id = node;
  tx.timestamp_us = to_micros(now);
  tx.packet_id = packet;
  tx.delay_us = to_micros(delay_s);
  return tx;
}

LedgerTransaction make_evict(NodeId node, NodeId evicted, EvictionReason reason, double now) {
  LedgerTransaction tx;
  tx.kind = TxKind::EVICT;
  tx.node_id = node;
  tx.timestamp_us = to_micros(now);
  tx.evicted = evicted;
  tx.reason = reason;
  return tx;
}

} // namespace manet
