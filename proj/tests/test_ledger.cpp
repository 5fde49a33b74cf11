#include "doctest.h"
#include "ledger_tamper.hpp"
#include "manet/digest.hpp"
#include "manet/ledger.hpp"

using namespace manet;

TEST_CASE("hash_transaction: deterministic and sensitive to the timestamp") {
  LedgerTransaction tx;
  tx.kind = TxKind::REGISTER;
  tx.node_id = 3;
  tx.timestamp_us = 1000;
  tx.registration_key = sha256(std::string_view("k3"));
  CHECK(hash_transaction(tx) == hash_transaction(tx));
  LedgerTransaction later = tx;
  later.timestamp_us += 1;
  CHECK(hash_transaction(tx) != hash_transaction(later));
}

TEST_CASE("append_block: genesis and linking") {
  LedgerChain chain;
  REQUIRE(chain.blocks().size() == 1);
  CHECK(chain.blocks()[0].index == 0);
  CHECK(chain.blocks()[0].prev_hash == kZeroDigest);
  CHECK(block_height(chain) == 0);
  CHECK_THROWS_AS(chain.append_block(1.0), LedgerError);

  chain.submit(make_forward_event(1, 10, 0.01, 0.5));
  const Block& b1 = chain.append_block(1.0);
  CHECK(b1.index == 1);
  CHECK(b1.prev_hash == chain.blocks()[0].block_hash);
  chain.submit(make_evict(2, 7, EvictionReason::AUTH_FAIL, 1.5));
  chain.append_block(2.0);
  chain.submit(make_forward_event(1, 11, 0.02, 2.5));
  chain.append_block(3.0);
  CHECK(verify_chain(chain).valid);
  CHECK(block_height(chain) == 3);
}

TEST_CASE("block_height: grows by one per block") {
  LedgerChain chain;
  for (int i = 1; i <= 4; ++i) {
    chain.submit(make_forward_event(0, i, 0.0, i));
    chain.append_block(i + 0.5);
    CHECK(block_height(chain) == i);
  }
  CHECK(chain.blocks().size() == 5);
  CHECK(block_height(chain) == 4);
}

TEST_CASE("seal latency is recorded for every sealed block") {
  LedgerChain chain;
  chain.submit(make_forward_event(0, 1, 0.0, 1.0));
  chain.submit(make_forward_event(0, 2, 0.0, 1.5));
  chain.append_block(3.0);
  chain.submit(make_forward_event(0, 3, 0.0, 4.0));
  chain.append_block(4.0);
  REQUIRE(chain.seal_times().size() == 2);
  CHECK(chain.seal_times()[0].index == 1);
  CHECK(chain.seal_times()[0].latency_s == doctest::Approx(2.0));
  CHECK(chain.seal_times()[1].latency_s == doctest::Approx(0.0));
  for (const auto& s : chain.seal_times()) {
    CHECK(s.latency_s >= 0.0);
  }
}

TEST_CASE("verify_chain: bit flip in block 3 is localised") {
  Rng rng(3);
  LedgerChain chain = tamper::random_chain(rng, 5);
  CHECK(verify_chain(chain).valid);
  auto& tx = chain.mutable_blocks()[3].transactions[0];
  tx.node_id ^= 1;
  const auto rep = verify_chain(chain);
  CHECK_FALSE(rep.valid);
  REQUIRE(rep.first_bad_index.has_value());
  CHECK(*rep.first_bad_index == 3);
}

TEST_CASE("verify_chain: swapping adjacent blocks is caught at the swap") {
  Rng rng(4);
  for (std::size_t at = 1; at + 1 < 6; ++at) {
    LedgerChain chain = tamper::random_chain(rng, 6);
    auto blocks = chain.blocks();
    std::swap(blocks[at], blocks[at + 1]);
    const auto rep = verify_chain(blocks);
    CHECK_FALSE(rep.valid);
    CHECK(rep.first_bad_index == at);
  }
}

TEST_CASE("verify_chain: every single-field mutation is rejected at its block") {
  Rng rng(2718);
  std::size_t mutations = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int len = 1 + static_cast<int>(rng.below(12));
    const LedgerChain chain = tamper::random_chain(rng, len);
    REQUIRE(verify_chain(chain).valid);
    CHECK(block_height(chain) == len - 1);
    for (std::size_t i = 1; i < chain.blocks().size(); ++i) {
      CHECK(chain.blocks()[i].prev_hash == chain.blocks()[i - 1].block_hash);
    }
    for (const auto& m : tamper::all_mutations(chain.blocks())) {
      auto blocks = chain.blocks();
      m.apply(blocks, rng);
      const auto rep = verify_chain(blocks);
      INFO(m.field << " in block " << m.block);
      CHECK_FALSE(rep.valid);
      CHECK(rep.first_bad_index == m.block);
      ++mutations;
    }
  }
  CHECK(mutations > 1000);
}

TEST_CASE("register_node: pending entry and duplicate rejection") {
  LedgerChain chain;
  const Digest secret = sha256(std::string_view("node-3"));
  const LedgerTransaction& tx = chain.register_node(3, secret, 0.0);
  CHECK(tx.kind == TxKind::REGISTER);
  CHECK(tx.node_id == 3);
  CHECK(tx.registration_key == sha256(std::span<const std::uint8_t>(secret)));
  REQUIRE(chain.pending().size() == 1);
  CHECK(chain.pending()[0].node_id == 3);
  CHECK_THROWS_AS(chain.register_node(3, secret, 1.0), LedgerError);
}

TEST_CASE("authenticate_message: round trip, unknown node and forgeries") {
  LedgerChain chain(0.0, 8);
  Rng rng(11);
  std::vector<Digest> secrets;
  for (NodeId n = 0; n < 20; ++n) {
    secrets.push_back(tamper::random_digest(rng));
    chain.register_node(n, secrets.back(), 0.0);
  }
  while (!chain.pending().empty()) {
    chain.append_block(0.0);
  }
  const std::vector<std::uint8_t> msg{1, 2, 3, 4, 5};
  for (NodeId n = 0; n < 20; ++n) {
    CHECK(chain.is_registered(n));
    CHECK(chain.authenticate_message(n, msg, keyed_tag(secrets[n], msg)));
  }
  CHECK_FALSE(chain.is_registered(99));
  CHECK_FALSE(chain.authenticate_message(99, msg, keyed_tag(secrets[0], msg)));

  int accepted = 0;
  for (int i = 0; i < 10000; ++i) {
    const Digest key = tamper::random_digest(rng);
    if (chain.authenticate_message(static_cast<NodeId>(i % 20), msg, keyed_tag(key, msg))) {
      ++accepted;
    }
  }
  CHECK(accepted == 0);
}
