#pragma once

// Random chain construction and single-field mutation, shared by the ledger
// unit tests and the acceptance suite.

#include <functional>
#include <string>
#include <vector>

#include "manet/ledger.hpp"
#include "manet/rng.hpp"

namespace manet::tamper {

inline Digest random_digest(Rng& rng) {
  Digest d;
  for (auto& b : d) {
    b = static_cast<std::uint8_t>(rng.below(256));
  }
  return d;
}

inline LedgerTransaction random_tx(Rng& rng, double now) {
  LedgerTransaction tx;
  tx.kind = static_cast<TxKind>(rng.below(3));
  tx.node_id = static_cast<NodeId>(rng.below(64));
  tx.timestamp_us = static_cast<std::int64_t>(now * 1e6);
  switch (tx.kind) {
  case TxKind::REGISTER: tx.registration_key = random_digest(rng); break;
  case TxKind::FORWARD_EVENT:
    tx.packet_id = rng.next_u64() >> 16;
    tx.delay_us = static_cast<std::int64_t>(rng.below(200000));
    break;
  case TxKind::EVICT:
    tx.evicted = static_cast<NodeId>(rng.below(64));
    tx.reason = static_cast<EvictionReason>(rng.below(3));
    break;
  }
  return tx;
}

/// Chain with `blocks` blocks in total (genesis included), 1 to 8
/// transactions per sealed block.
inline LedgerChain random_chain(Rng& rng, int blocks) {
  LedgerChain chain(0.0, 8);
  double now = 0.0;
  for (int b = 1; b < blocks; ++b) {
    const int txs = 1 + static_cast<int>(rng.below(8));
    for (int t = 0; t < txs; ++t) {
      now += rng.uniform(0.0, 0.5);
      chain.submit(random_tx(rng, now));
    }
    now += rng.uniform(0.0, 2.0);
    chain.append_block(now);
  }
  return chain;
}

/// One named single-field edit applied to a copy of the blocks. The edit
/// always produces a value different from the original.
struct Mutation {
  std::string field;
  std::size_t block = 0;
  std::function<void(std::vector<Block>&, Rng&)> apply;
};

template <typename T>
T different(T old, Rng& rng, std::uint64_t span) {
  T v = old;
  while (v == old) {
    v = static_cast<T>(static_cast<std::uint64_t>(old) + 1 + rng.below(span));
  }
  return v;
}

inline void flip_digest(Digest& d, Rng& rng) {
  const auto byte = rng.below(32);
  d[byte] ^= static_cast<std::uint8_t>(1u << rng.below(8));
}

/// Every field of every block and transaction of `blocks`.
inline std::vector<Mutation> all_mutations(const std::vector<Block>& blocks) {
  std::vector<Mutation> out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    out.push_back({"block.index", i, [i](auto& bs, Rng& r) {
                     bs[i].index = different<std::uint64_t>(bs[i].index, r, 1000);
                   }});
    out.push_back({"block.prev_hash", i, [i](auto& bs, Rng& r) { flip_digest(bs[i].prev_hash, r); }});
    out.push_back({"block.timestamp_us", i, [i](auto& bs, Rng& r) {
                     bs[i].timestamp_us = different<std::int64_t>(bs[i].timestamp_us, r, 1000000);
                   }});
    out.push_back({"block.block_hash", i, [i](auto& bs, Rng& r) { flip_digest(bs[i].block_hash, r); }});
    for (std::size_t t = 0; t < blocks[i].transactions.size(); ++t) {
      auto tx = [i, t](std::vector<Block>& bs) -> LedgerTransaction& {
        return bs[i].transactions[t];
      };
      out.push_back({"tx.kind", i, [tx](auto& bs, Rng& r) {
                       auto& x = tx(bs);
                       x.kind = static_cast<TxKind>((static_cast<int>(x.kind) + 1 + r.below(2)) % 3);
                     }});
      out.push_back({"tx.node_id", i, [tx](auto& bs, Rng& r) {
                       tx(bs).node_id = different<NodeId>(tx(bs).node_id, r, 1000);
                     }});
      out.push_back({"tx.timestamp_us", i, [tx](auto& bs, Rng& r) {
                       tx(bs).timestamp_us = different<std::int64_t>(tx(bs).timestamp_us, r, 1000000);
                     }});
      out.push_back({"tx.registration_key", i,
                     [tx](auto& bs, Rng& r) { flip_digest(tx(bs).registration_key, r); }});
      out.push_back({"tx.packet_id", i, [tx](auto& bs, Rng& r) {
                       tx(bs).packet_id = different<PacketId>(tx(bs).packet_id, r, 1u << 30);
                     }});
      out.push_back({"tx.delay_us", i, [tx](auto& bs, Rng& r) {
                       tx(bs).delay_us = different<std::int64_t>(tx(bs).delay_us, r, 1000000);
                     }});
      out.push_back({"tx.evicted", i, [tx](auto& bs, Rng& r) {
                       tx(bs).evicted = different<NodeId>(tx(bs).evicted, r, 1000);
                     }});
      out.push_back({"tx.reason", i, [tx](auto& bs, Rng& r) {
                       auto& x = tx(bs);
                       x.reason = static_cast<EvictionReason>(
                           (static_cast<int>(x.reason) + 1 + r.below(2)) % 3);
                     }});
      out.push_back({"tx.tx_hash", i, [tx](auto& bs, Rng& r) { flip_digest(tx(bs).tx_hash, r); }});
    }
  }
  return out;
}

} // namespace manet::tamper
