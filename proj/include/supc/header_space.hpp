#pragma once

#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

// Exact set algebra over the seven-subfield OpenFlow match space
// (src/dst MAC, src/dst IPv4 prefix, src/dst port, protocol).
//
// Every type is an immutable value; every operation is pure. A MatchSet
// denotes the Cartesian product of its subfield sets and is nonempty by
// construction -- emptiness only arises as the explicit nullopt result of
// an intersection.

namespace supc {

enum class Proto : std::uint8_t { Tcp, Udp, Icmp };

inline constexpr std::array<Proto, 3> kAllProtos = {Proto::Tcp, Proto::Udp,
                                                    Proto::Icmp};

inline std::string_view to_string(Proto p) {
  switch (p) {
    case Proto::Tcp: return "tcp";
    case Proto::Udp: return "udp";
    case Proto::Icmp: return "icmp";
  }
  return "?";
}

inline std::optional<Proto> proto_from_string(std::string_view s) {
  if (s == "tcp") return Proto::Tcp;
  if (s == "udp") return Proto::Udp;
  if (s == "icmp") return Proto::Icmp;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Subfields

/// Wildcard-or-exact 48-bit hardware address.
class MacField {
 public:
  constexpr MacField() = default;  // wildcard

  static constexpr MacField exact(std::uint64_t mac) {
    MacField f;
    f.value_ = mac & kMacMask;
    return f;
  }
  static constexpr MacField wildcard() { return {}; }

  constexpr bool is_wildcard() const { return !value_.has_value(); }
  constexpr std::uint64_t value() const { return *value_; }

  friend constexpr auto operator<=>(const MacField&, const MacField&) = default;

  static constexpr std::uint64_t kMacMask = (std::uint64_t{1} << 48) - 1;

 private:
  std::optional<std::uint64_t> value_;
};

inline std::optional<MacField> intersect(MacField a, MacField b) {
  if (a.is_wildcard()) return b;
  if (b.is_wildcard()) return a;
  if (a.value() == b.value()) return a;
  return std::nullopt;
}

// a subset-of b
inline bool is_subset(MacField a, MacField b) {
  if (b.is_wildcard()) return true;
  return !a.is_wildcard() && a.value() == b.value();
}

inline bool contains(MacField f, std::uint64_t mac) {
  return f.is_wildcard() || f.value() == mac;
}

/// IPv4 CIDR prefix. Length 0 is the wildcard; host bits are kept zero.
class Ipv4Prefix {
 public:
  constexpr Ipv4Prefix() = default;  // 0.0.0.0/0

  constexpr Ipv4Prefix(std::uint32_t network, std::uint8_t length)
      : network_(network & mask_for(length)), length_(length) {}

  static constexpr Ipv4Prefix wildcard() { return {}; }
  static constexpr Ipv4Prefix host(std::uint32_t addr) { return {addr, 32}; }

  constexpr std::uint32_t network() const { return network_; }
  constexpr std::uint8_t length() const { return length_; }
  constexpr bool is_wildcard() const { return length_ == 0; }
  constexpr std::uint32_t mask() const { return mask_for(length_); }

  constexpr bool contains(std::uint32_t addr) const {
    return (addr & mask()) == network_;
  }
  // this prefix includes every address of `other`
  constexpr bool contains(const Ipv4Prefix& other) const {
    return length_ <= other.length_ && contains(other.network_);
  }

  friend constexpr auto operator<=>(const Ipv4Prefix&,
                                    const Ipv4Prefix&) = default;

  static constexpr std::uint32_t mask_for(std::uint8_t length) {
    return length == 0 ? 0u : ~std::uint32_t{0} << (32 - length);
  }

 private:
  std::uint32_t network_ = 0;
  std::uint8_t length_ = 0;
};

// Two prefixes are either nested or disjoint; the result is the longer one.
inline std::optional<Ipv4Prefix> intersect(const Ipv4Prefix& a,
                                           const Ipv4Prefix& b) {
  if (a.contains(b)) return b;
  if (b.contains(a)) return a;
  return std::nullopt;
}

inline bool is_subset(const Ipv4Prefix& a, const Ipv4Prefix& b) {
  return b.contains(a);
}

/// Wildcard-or-exact transport port.
class PortField {
 public:
  constexpr PortField() = default;  // wildcard

  static constexpr PortField exact(std::uint16_t port) {
    PortField f;
    f.value_ = port;
    return f;
  }
  static constexpr PortField wildcard() { return {}; }

  constexpr bool is_wildcard() const { return !value_.has_value(); }
  constexpr std::uint16_t value() const { return *value_; }

  friend constexpr auto operator<=>(const PortField&,
                                    const PortField&) = default;

 private:
  std::optional<std::uint16_t> value_;
};

inline std::optional<PortField> intersect(PortField a, PortField b) {
  if (a.is_wildcard()) return b;
  if (b.is_wildcard()) return a;
  if (a.value() == b.value()) return a;
  return std::nullopt;
}

inline bool is_subset(PortField a, PortField b) {
  if (b.is_wildcard()) return true;
  return !a.is_wildcard() && a.value() == b.value();
}

inline bool contains(PortField f, std::uint16_t port) {
  return f.is_wildcard() || f.value() == port;
}

/// Wildcard-or-exact protocol.
class ProtoField {
 public:
  constexpr ProtoField() = default;  // wildcard

  static constexpr ProtoField exact(Proto p) {
    ProtoField f;
    f.value_ = p;
    return f;
  }
  static constexpr ProtoField wildcard() { return {}; }

  constexpr bool is_wildcard() const { return !value_.has_value(); }
  constexpr Proto value() const { return *value_; }

  friend constexpr auto operator<=>(const ProtoField&,
                                    const ProtoField&) = default;

 private:
  std::optional<Proto> value_;
};

inline std::optional<ProtoField> intersect(ProtoField a, ProtoField b) {
  if (a.is_wildcard()) return b;
  if (b.is_wildcard()) return a;
  if (a.value() == b.value()) return a;
  return std::nullopt;
}

inline bool is_subset(ProtoField a, ProtoField b) {
  if (b.is_wildcard()) return true;
  return !a.is_wildcard() && a.value() == b.value();
}

inline bool contains(ProtoField f, Proto p) {
  return f.is_wildcard() || f.value() == p;
}

// ---------------------------------------------------------------------------
// MatchSet and concrete headers

/// The seven-subfield match predicate of one flow rule.
struct MatchSet {
  ProtoField proto;
  MacField l2s;
  MacField l2d;
  Ipv4Prefix l3s;
  Ipv4Prefix l3d;
  PortField l4s;
  PortField l4d;

  friend constexpr auto operator<=>(const MatchSet&, const MatchSet&) = default;
};

/// A fully concrete packet header; used as witness evidence.
struct PacketHeader {
  std::uint64_t src_mac = 0;
  std::uint64_t dst_mac = 0;
  std::uint32_t src_ip = 0;
  std::uint32_t dst_ip = 0;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  Proto proto = Proto::Tcp;

  friend constexpr auto operator<=>(const PacketHeader&,
                                    const PacketHeader&) = default;
};

/// Subfield-wise intersection; nullopt iff any subfield pair is disjoint.
inline std::optional<MatchSet> intersect(const MatchSet& a, const MatchSet& b) {
  auto proto = intersect(a.proto, b.proto);
  if (!proto) return std::nullopt;
  auto l2s = intersect(a.l2s, b.l2s);
  if (!l2s) return std::nullopt;
  auto l2d = intersect(a.l2d, b.l2d);
  if (!l2d) return std::nullopt;
  auto l3s = intersect(a.l3s, b.l3s);
  if (!l3s) return std::nullopt;
  auto l3d = intersect(a.l3d, b.l3d);
  if (!l3d) return std::nullopt;
  auto l4s = intersect(a.l4s, b.l4s);
  if (!l4s) return std::nullopt;
  auto l4d = intersect(a.l4d, b.l4d);
  if (!l4d) return std::nullopt;
  return MatchSet{*proto, *l2s, *l2d, *l3s, *l3d, *l4s, *l4d};
}

/// True iff every subfield of `a` is contained in the matching subfield of `b`.
inline bool is_subset(const MatchSet& a, const MatchSet& b) {
  return is_subset(a.proto, b.proto) && is_subset(a.l2s, b.l2s) &&
         is_subset(a.l2d, b.l2d) && is_subset(a.l3s, b.l3s) &&
         is_subset(a.l3d, b.l3d) && is_subset(a.l4s, b.l4s) &&
         is_subset(a.l4d, b.l4d);
}

/// Swaps the source/destination pairs at L2, L3 and L4; protocol unchanged.
inline MatchSet reversed(const MatchSet& m) {
  return MatchSet{m.proto, m.l2d, m.l2s, m.l3d, m.l3s, m.l4d, m.l4s};
}

inline bool contains(const MatchSet& m, const PacketHeader& h) {
  return contains(m.proto, h.proto) && contains(m.l2s, h.src_mac) &&
         contains(m.l2d, h.dst_mac) && m.l3s.contains(h.src_ip) &&
         m.l3d.contains(h.dst_ip) && contains(m.l4s, h.src_port) &&
         contains(m.l4d, h.dst_port);
}

/// Deterministic concrete header inside `m`: the minimum element of every
/// subfield (network address, port 0, first protocol, all-zero MAC).
inline PacketHeader pick_witness(const MatchSet& m) {
  PacketHeader h;
  h.proto = m.proto.is_wildcard() ? Proto::Tcp : m.proto.value();
  h.src_mac = m.l2s.is_wildcard() ? 0 : m.l2s.value();
  h.dst_mac = m.l2d.is_wildcard() ? 0 : m.l2d.value();
  h.src_ip = m.l3s.network();
  h.dst_ip = m.l3d.network();
  h.src_port = m.l4s.is_wildcard() ? 0 : m.l4s.value();
  h.dst_port = m.l4d.is_wildcard() ? 0 : m.l4d.value();
  return h;
}

// ---------------------------------------------------------------------------
// Field parsing and rendering

inline std::string format_ipv4(std::uint32_t addr) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", (addr >> 24) & 0xff,
                (addr >> 16) & 0xff, (addr >> 8) & 0xff, addr & 0xff);
  return buf;
}

inline std::optional<std::uint32_t> parse_ipv4(std::string_view s) {
  std::uint32_t addr = 0;
  const char* p = s.data();
  const char* end = s.data() + s.size();
  for (int octet = 0; octet < 4; ++octet) {
    unsigned value = 0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc{} || value > 255) return std::nullopt;
    addr = addr << 8 | value;
    p = next;
    if (octet < 3) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
  }
  if (p != end) return std::nullopt;
  return addr;
}

/// Accepts "*", a bare address (host /32), or "addr/len" with len in [0,32].
/// Host bits below the prefix length are canonicalized to zero.
inline std::optional<Ipv4Prefix> parse_prefix(std::string_view s) {
  if (s == "*") return Ipv4Prefix::wildcard();
  auto slash = s.find('/');
  auto addr = parse_ipv4(s.substr(0, slash));
  if (!addr) return std::nullopt;
  if (slash == std::string_view::npos) return Ipv4Prefix::host(*addr);
  auto len_text = s.substr(slash + 1);
  unsigned len = 0;
  auto [next, ec] =
      std::from_chars(len_text.data(), len_text.data() + len_text.size(), len);
  if (ec != std::errc{} || next != len_text.data() + len_text.size() ||
      len > 32) {
    return std::nullopt;
  }
  return Ipv4Prefix(*addr, static_cast<std::uint8_t>(len));
}

inline std::string format_mac(std::uint64_t mac) {
  char buf[18];
  std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x",
                unsigned(mac >> 40 & 0xff), unsigned(mac >> 32 & 0xff),
                unsigned(mac >> 24 & 0xff), unsigned(mac >> 16 & 0xff),
                unsigned(mac >> 8 & 0xff), unsigned(mac & 0xff));
  return buf;
}

inline std::optional<std::uint64_t> parse_mac(std::string_view s) {
  if (s.size() != 17) return std::nullopt;
  std::uint64_t mac = 0;
  for (int group = 0; group < 6; ++group) {
    const char* p = s.data() + group * 3;
    unsigned value = 0;
    auto [next, ec] = std::from_chars(p, p + 2, value, 16);
    if (ec != std::errc{} || next != p + 2) return std::nullopt;
    if (group < 5 && p[2] != ':') return std::nullopt;
    mac = mac << 8 | value;
  }
  return mac;
}

inline std::optional<std::uint16_t> parse_port(std::string_view s) {
  unsigned value = 0;
  auto [next, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || next != s.data() + s.size() || value > 65535) {
    return std::nullopt;
  }
  return static_cast<std::uint16_t>(value);
}

inline std::string to_string(MacField f) {
  return f.is_wildcard() ? "*" : format_mac(f.value());
}

/// Wildcard renders as "*"; host addresses always carry the /32 suffix.
inline std::string to_string(const Ipv4Prefix& p) {
  if (p.is_wildcard()) return "*";
  return format_ipv4(p.network()) + "/" + std::to_string(p.length());
}

inline std::string to_string(PortField f) {
  return f.is_wildcard() ? "*" : std::to_string(f.value());
}

inline std::string to_string(ProtoField f) {
  return f.is_wildcard() ? "*" : std::string(to_string(f.value()));
}

/// Report rendering, e.g.
/// `proto=tcp l2s=* l2d=* l3s=192.168.1.0/24 l3d=192.168.2.20/32 l4s=* l4d=*`
inline std::string to_string(const MatchSet& m) {
  std::string out;
  out += "proto=" + to_string(m.proto);
  out += " l2s=" + to_string(m.l2s);
  out += " l2d=" + to_string(m.l2d);
  out += " l3s=" + to_string(m.l3s);
  out += " l3d=" + to_string(m.l3d);
  out += " l4s=" + to_string(m.l4s);
  out += " l4d=" + to_string(m.l4d);
  return out;
}

}  // namespace supc
