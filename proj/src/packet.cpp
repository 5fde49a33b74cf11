#include "manet/packet.hpp"

#include "manet/bytes.hpp"

namespace manet {

std::string_view to_string(PacketKind k) {
  switch (k) {
  case PacketKind::DATA: return "DATA";
  case PacketKind::RREQ: return "RREQ";
  case PacketKind::RREP: return "RREP";
  case PacketKind::RERR: return "RERR";
  case PacketKind::HELLO: return "HELLO";
  case PacketKind::LEDGER_TX: return "LEDGER_TX";
  }
  return "?";
}

std::vector<std::uint8_t> canonical_bytes(const Packet& p) {
  ByteWriter w;
  w.u64(p.packet_id);
  w.u8(static_cast<std::uint8_t>(p.kind));
  w.i32(p.src);
  w.i32(p.dst);
  w.i64(to_micros(p.origin_time));
  w.i32(p.hop_count);
  w.u32(p.payload_bits);
  w.u32(p.rreq_id);
  w.f64(p.rand_gate);
  w.u32(p.orig_seq);
  w.u32(p.dest_seq);
  w.u8(p.dest_seq_known ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(p.unreachable.size()));
  for (const auto& u : p.unreachable) {
    w.i32(u.dst);
    w.u32(u.seq);
  }
  w.i32(p.sender);
  w.i32(p.next_hop);
  w.i32(p.ttl);
  return w.take();
}

} // namespace manet
