#include "reasm/wire.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

#include "reasm/checksum.hpp"

namespace reasm {

namespace {

void put16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v & 0xFF));
}

void put32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v & 0xFF));
}

uint16_t get16(const uint8_t* p) { return static_cast<uint16_t>((p[0] << 8) | p[1]); }

uint32_t get32(const uint8_t* p) {
    return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
           (static_cast<uint32_t>(p[2]) << 8) | p[3];
}

void patch16(std::vector<uint8_t>& buf, size_t at, uint16_t v) {
    buf[at] = static_cast<uint8_t>(v >> 8);
    buf[at + 1] = static_cast<uint8_t>(v & 0xFF);
}

constexpr uint16_t kEtherIpv4 = 0x0800;
constexpr uint16_t kEtherIpv6 = 0x86DD;
constexpr uint8_t kProtoIcmp = 1;
constexpr uint8_t kProtoTcp = 6;
constexpr uint8_t kProtoIcmpv6 = 58;
constexpr uint8_t kProtoFragment = 44;

constexpr uint8_t kTcpFin = 0x01;
constexpr uint8_t kTcpSyn = 0x02;
constexpr uint8_t kTcpRst = 0x04;
constexpr uint8_t kTcpPsh = 0x08;
constexpr uint8_t kTcpAck = 0x10;

}  // namespace

MacAddress MacAddress::parse(std::string_view text) {
    MacAddress mac;
    unsigned values[6];
    if (std::sscanf(std::string(text).c_str(), "%x:%x:%x:%x:%x:%x", &values[0], &values[1],
                    &values[2], &values[3], &values[4], &values[5]) != 6) {
        throw std::invalid_argument("malformed MAC address: " + std::string(text));
    }
    for (int i = 0; i < 6; ++i) {
        if (values[i] > 0xFF) throw std::invalid_argument("malformed MAC address");
        mac.bytes[static_cast<size_t>(i)] = static_cast<uint8_t>(values[i]);
    }
    return mac;
}

std::string MacAddress::to_string() const {
    char buf[18];
    std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x", bytes[0], bytes[1], bytes[2],
                  bytes[3], bytes[4], bytes[5]);
    return buf;
}

Ipv4Address Ipv4Address::parse(std::string_view text) {
    Ipv4Address addr;
    unsigned values[4];
    if (std::sscanf(std::string(text).c_str(), "%u.%u.%u.%u", &values[0], &values[1], &values[2],
                    &values[3]) != 4) {
        throw std::invalid_argument("malformed IPv4 address: " + std::string(text));
    }
    for (int i = 0; i < 4; ++i) {
        if (values[i] > 255) throw std::invalid_argument("malformed IPv4 address");
        addr.bytes[static_cast<size_t>(i)] = static_cast<uint8_t>(values[i]);
    }
    return addr;
}

std::string Ipv4Address::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", bytes[0], bytes[1], bytes[2], bytes[3]);
    return buf;
}

Ipv6Address Ipv6Address::parse(std::string_view text) {
    std::string s(text);
    std::vector<uint16_t> head, tail;
    bool seen_gap = false;
    size_t pos = 0;
    if (s.rfind("::", 0) == 0) {
        seen_gap = true;
        pos = 2;
    }
    while (pos < s.size()) {
        size_t next = s.find(':', pos);
        std::string group = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        if (group.empty()) throw std::invalid_argument("malformed IPv6 address: " + s);
        unsigned v = 0;
        if (std::sscanf(group.c_str(), "%x", &v) != 1 || v > 0xFFFF) {
            throw std::invalid_argument("malformed IPv6 address: " + s);
        }
        (seen_gap ? tail : head).push_back(static_cast<uint16_t>(v));
        if (next == std::string::npos) break;
        pos = next + 1;
        if (pos < s.size() && s[pos] == ':') {
            if (seen_gap) throw std::invalid_argument("malformed IPv6 address: " + s);
            seen_gap = true;
            ++pos;
        } else if (pos == s.size()) {
            throw std::invalid_argument("malformed IPv6 address: " + s);
        }
    }
    if (head.size() + tail.size() > 8 || (!seen_gap && head.size() + tail.size() != 8)) {
        throw std::invalid_argument("malformed IPv6 address: " + s);
    }
    Ipv6Address addr;
    for (size_t i = 0; i < head.size(); ++i) {
        addr.bytes[2 * i] = static_cast<uint8_t>(head[i] >> 8);
        addr.bytes[2 * i + 1] = static_cast<uint8_t>(head[i] & 0xFF);
    }
    for (size_t i = 0; i < tail.size(); ++i) {
        size_t at = 16 - 2 * (tail.size() - i);
        addr.bytes[at] = static_cast<uint8_t>(tail[i] >> 8);
        addr.bytes[at + 1] = static_cast<uint8_t>(tail[i] & 0xFF);
    }
    return addr;
}

std::string Ipv6Address::to_string() const {
    char buf[40];
    char* p = buf;
    for (int g = 0; g < 8; ++g) {
        p += std::snprintf(p, 6, g ? ":%x" : "%x",
                           (bytes[static_cast<size_t>(2 * g)] << 8) |
                               bytes[static_cast<size_t>(2 * g + 1)]);
    }
    return buf;
}

void NetConfig::validate() const {
    if (tcp_echo_port == 0 || base_src_port == 0) {
        throw std::invalid_argument("ports must be in 1..65535");
    }
}

WireIds wire_ids_for(const TestCaseInstance& inst, const NetConfig& net) {
    WireIds ids;
    uint32_t ordinal = inst.ordinal;
    ids.ipv4_ident = static_cast<uint16_t>(0x1000 + ordinal);
    ids.ipv6_frag_id = 0x100000u + ordinal;
    ids.icmp_id = static_cast<uint16_t>(net.icmp_id_base + ordinal);
    ids.icmp_seq = 1;
    uint32_t port = net.base_src_port + ordinal;
    if (port > 0xFFFF) throw std::invalid_argument("ephemeral port range exhausted");
    ids.tcp_src_port = static_cast<uint16_t>(port);
    ids.tcp_client_isn = 0x01000000u + ordinal * 0x10u;
    ids.tcp_server_isn = 0x7F000000u + ordinal * 0x10u;
    return ids;
}

namespace {

std::vector<uint8_t> ether_header(const NetConfig& net, uint16_t ethertype, bool from_target) {
    std::vector<uint8_t> out;
    const auto& dst = from_target ? net.src_mac : net.dst_mac;
    const auto& src = from_target ? net.dst_mac : net.src_mac;
    out.insert(out.end(), dst.bytes.begin(), dst.bytes.end());
    out.insert(out.end(), src.bytes.begin(), src.bytes.end());
    put16(out, ethertype);
    return out;
}

// IPv4 header with checksum filled in. frag_units is the offset in 8-byte
// units; mf sets the More Fragments flag.
std::vector<uint8_t> ipv4_header(const NetConfig& net, bool from_target, uint8_t protocol,
                                 uint16_t payload_len, uint16_t ident, uint16_t frag_units,
                                 bool mf) {
    std::vector<uint8_t> h;
    h.push_back(0x45);
    h.push_back(0);
    put16(h, static_cast<uint16_t>(20 + payload_len));
    put16(h, ident);
    uint16_t frag_field = static_cast<uint16_t>((mf ? 0x2000 : 0) | (frag_units & 0x1FFF));
    put16(h, frag_field);
    h.push_back(64);
    h.push_back(protocol);
    put16(h, 0);
    const auto& src = from_target ? net.dst_ipv4 : net.src_ipv4;
    const auto& dst = from_target ? net.src_ipv4 : net.dst_ipv4;
    h.insert(h.end(), src.bytes.begin(), src.bytes.end());
    h.insert(h.end(), dst.bytes.begin(), dst.bytes.end());
    patch16(h, 10, internet_checksum(h));
    return h;
}

std::vector<uint8_t> ipv6_header(const NetConfig& net, bool from_target, uint8_t next_header,
                                 uint16_t payload_len) {
    std::vector<uint8_t> h;
    h.push_back(0x60);
    h.push_back(0);
    put16(h, 0);
    put16(h, payload_len);
    h.push_back(next_header);
    h.push_back(64);
    const auto& src = from_target ? net.dst_ipv6 : net.src_ipv6;
    const auto& dst = from_target ? net.src_ipv6 : net.dst_ipv6;
    h.insert(h.end(), src.bytes.begin(), src.bytes.end());
    h.insert(h.end(), dst.bytes.begin(), dst.bytes.end());
    return h;
}

std::vector<uint8_t> ipv6_fragment_header(uint8_t next_header, uint16_t frag_units, bool more,
                                          uint32_t ident) {
    std::vector<uint8_t> h;
    h.push_back(next_header);
    h.push_back(0);
    put16(h, static_cast<uint16_t>((frag_units << 3) | (more ? 1 : 0)));
    put32(h, ident);
    return h;
}

uint16_t icmpv6_pseudo_sum(const NetConfig& net, bool from_target, uint32_t upper_len) {
    uint16_t sum = 0;
    const auto& src = from_target ? net.dst_ipv6 : net.src_ipv6;
    const auto& dst = from_target ? net.src_ipv6 : net.dst_ipv6;
    sum = oc_sum_accumulate(sum, std::span<const uint8_t>(src.bytes.data(), src.bytes.size()));
    sum = oc_sum_accumulate(sum, std::span<const uint8_t>(dst.bytes.data(), dst.bytes.size()));
    sum = oc_add(sum, static_cast<uint16_t>(upper_len >> 16));
    sum = oc_add(sum, static_cast<uint16_t>(upper_len & 0xFFFF));
    sum = oc_add(sum, kProtoIcmpv6);
    return sum;
}

// Echo header whose checksum stays valid whichever cells survive and
// however long the reassembled datagram is; the pattern cells pin every
// possible data contribution to a fixed value.
std::array<uint8_t, 8> echo_header(const TestCaseInstance& inst, const NetConfig& net,
                                   const WireIds& ids, bool reply) {
    std::array<uint8_t, 8> h{};
    bool v6 = inst.protocol == Protocol::ipv6;
    h[0] = v6 ? (reply ? 129 : 128) : (reply ? 0 : 8);
    h[1] = 0;
    h[4] = static_cast<uint8_t>(ids.icmp_id >> 8);
    h[5] = static_cast<uint8_t>(ids.icmp_id & 0xFF);
    h[6] = static_cast<uint8_t>(ids.icmp_seq >> 8);
    h[7] = static_cast<uint8_t>(ids.icmp_seq & 0xFF);
    uint16_t sum = oc_sum(std::span<const uint8_t>(h.data(), h.size()));
    if (v6) sum = oc_add(sum, icmpv6_pseudo_sum(net, reply, 8));
    uint16_t cksum = static_cast<uint16_t>(~sum);
    h[2] = static_cast<uint8_t>(cksum >> 8);
    h[3] = static_cast<uint8_t>(cksum & 0xFF);
    return h;
}

}  // namespace

std::vector<FrameBlueprint> synth_ip(const TestCaseInstance& inst, const NetConfig& net) {
    if (!is_ip(inst.protocol)) {
        throw std::invalid_argument("synth_ip requires an IPv4 or IPv6 instance");
    }
    net.validate();
    WireIds ids = wire_ids_for(inst, net);
    std::array<uint8_t, 8> echo = echo_header(inst, net, ids, false);

    std::vector<FrameBlueprint> frames;
    for (const auto& chunk : inst.chunks) {
        if ((1 + chunk.end_cell) * kCellBytes + 40 > 65535) {
            throw std::invalid_argument("chunk extent exceeds datagram bounds");
        }
        std::vector<uint8_t> data;
        uint16_t frag_units;
        if (chunk.carries_header) {
            data.insert(data.end(), echo.begin(), echo.end());
            frag_units = 0;
        } else {
            frag_units = static_cast<uint16_t>(chunk.start_cell + 1);
        }
        std::vector<uint8_t> payload = chunk_payload(inst, chunk);
        data.insert(data.end(), payload.begin(), payload.end());

        std::vector<uint8_t> frame;
        bool more = !chunk.mf_unset;
        if (inst.protocol == Protocol::ipv4) {
            frame = ether_header(net, kEtherIpv4, false);
            auto ip = ipv4_header(net, false, kProtoIcmp, static_cast<uint16_t>(data.size()),
                                  ids.ipv4_ident, frag_units, more);
            frame.insert(frame.end(), ip.begin(), ip.end());
        } else {
            frame = ether_header(net, kEtherIpv6, false);
            auto ip = ipv6_header(net, false, kProtoFragment,
                                  static_cast<uint16_t>(8 + data.size()));
            frame.insert(frame.end(), ip.begin(), ip.end());
            auto fh = ipv6_fragment_header(kProtoIcmpv6, frag_units, more, ids.ipv6_frag_id);
            frame.insert(frame.end(), fh.begin(), fh.end());
        }
        frame.insert(frame.end(), data.begin(), data.end());

        FrameBlueprint bp;
        bp.bytes = std::move(frame);
        bp.send_index = static_cast<uint32_t>(frames.size());
        bp.ts_usec = static_cast<uint64_t>(net.frame_spacing_usec) * frames.size();
        frames.push_back(std::move(bp));
    }
    return frames;
}

namespace {

std::vector<uint8_t> tcp_frame(const NetConfig& net, bool from_target, uint16_t src_port,
                               uint16_t dst_port, uint32_t seq, uint32_t ack, uint8_t flags,
                               std::span<const uint8_t> payload, bool mss_option) {
    std::vector<uint8_t> tcp;
    put16(tcp, src_port);
    put16(tcp, dst_port);
    put32(tcp, seq);
    put32(tcp, ack);
    uint8_t data_offset = mss_option ? 6 : 5;
    tcp.push_back(static_cast<uint8_t>(data_offset << 4));
    tcp.push_back(flags);
    put16(tcp, 65535);
    put16(tcp, 0);
    put16(tcp, 0);
    if (mss_option) {
        tcp.push_back(2);
        tcp.push_back(4);
        put16(tcp, 1460);
    }
    tcp.insert(tcp.end(), payload.begin(), payload.end());

    // Pseudo-header checksum.
    uint16_t sum = 0;
    const auto& src = from_target ? net.dst_ipv4 : net.src_ipv4;
    const auto& dst = from_target ? net.src_ipv4 : net.dst_ipv4;
    sum = oc_sum_accumulate(sum, std::span<const uint8_t>(src.bytes.data(), 4));
    sum = oc_sum_accumulate(sum, std::span<const uint8_t>(dst.bytes.data(), 4));
    sum = oc_add(sum, kProtoTcp);
    sum = oc_add(sum, static_cast<uint16_t>(tcp.size()));
    sum = oc_sum_accumulate(sum, tcp);
    patch16(tcp, 16, static_cast<uint16_t>(~sum));

    std::vector<uint8_t> frame = ether_header(net, kEtherIpv4, from_target);
    auto ip = ipv4_header(net, from_target, kProtoTcp, static_cast<uint16_t>(tcp.size()),
                          from_target ? 0 : 1, 0, false);
    frame.insert(frame.end(), ip.begin(), ip.end());
    frame.insert(frame.end(), tcp.begin(), tcp.end());
    return frame;
}

// Stream cells covered so far, counted from 0 up to the first gap: the
// amount a well-behaved echo server could have pushed back.
int coverage_prefix(const std::vector<const ChunkSpec*>& sent) {
    int max_end = 0;
    for (const auto* c : sent) max_end = std::max(max_end, c->end_cell);
    std::vector<bool> covered(static_cast<size_t>(max_end), false);
    for (const auto* c : sent) {
        for (int x = c->start_cell; x < c->end_cell; ++x) covered[static_cast<size_t>(x)] = true;
    }
    int len = 0;
    while (len < max_end && covered[static_cast<size_t>(len)]) ++len;
    return len;
}

}  // namespace

std::vector<FrameBlueprint> synth_tcp(const TestCaseInstance& inst, const NetConfig& net,
                                      TcpSynthMode mode,
                                      const std::optional<TcpSimParams>& sim) {
    if (inst.protocol != Protocol::tcp) {
        throw std::invalid_argument("synth_tcp requires a TCP instance");
    }
    if (mode == TcpSynthMode::bidirectional && !sim) {
        throw std::invalid_argument("bidirectional synthesis requires reassembly parameters");
    }
    net.validate();
    WireIds ids = wire_ids_for(inst, net);
    PatternFamily family = pattern_family(inst.protocol);

    std::vector<FrameBlueprint> frames;
    auto push = [&](std::vector<uint8_t> bytes) {
        FrameBlueprint bp;
        bp.bytes = std::move(bytes);
        bp.send_index = static_cast<uint32_t>(frames.size());
        bp.ts_usec = static_cast<uint64_t>(net.frame_spacing_usec) * frames.size();
        frames.push_back(std::move(bp));
    };

    const uint32_t isn_c = ids.tcp_client_isn;
    const uint32_t isn_s = ids.tcp_server_isn;
    const bool two_way = mode == TcpSynthMode::bidirectional;

    std::optional<TcpReassembler> engine;
    if (two_way) engine.emplace(sim->policy, sim->mech);

    // Handshake. client_only assumes a server ISN of 0 and acknowledges
    // relative to it.
    push(tcp_frame(net, false, ids.tcp_src_port, net.tcp_echo_port, isn_c, 0, kTcpSyn, {}, true));
    uint32_t server_base = two_way ? isn_s + 1 : 1;
    if (two_way) {
        push(tcp_frame(net, true, net.tcp_echo_port, ids.tcp_src_port, isn_s, isn_c + 1,
                       kTcpSyn | kTcpAck, {}, true));
        push(tcp_frame(net, false, ids.tcp_src_port, net.tcp_echo_port, isn_c + 1, isn_s + 1,
                       kTcpAck, {}, false));
    }

    std::vector<const ChunkSpec*> sent;
    int delivered = 0;  // echoed cells assumed (client_only) or simulated
    int max_end = 0;
    for (const auto& chunk : inst.chunks) {
        std::vector<uint8_t> payload;
        for (int cell = chunk.start_cell; cell < chunk.end_cell; ++cell) {
            CellBytes pat = pattern_for(chunk.chunk_id, cell, family);
            payload.insert(payload.end(), pat.begin(), pat.end());
        }
        uint32_t seq = isn_c + 1 + static_cast<uint32_t>(chunk.start_cell) * kCellBytes;
        uint32_t ack = server_base + static_cast<uint32_t>(delivered) * kCellBytes;
        push(tcp_frame(net, false, ids.tcp_src_port, net.tcp_echo_port, seq, ack,
                       kTcpPsh | kTcpAck, payload, false));
        sent.push_back(&chunk);
        max_end = std::max(max_end, chunk.end_cell);

        if (two_way) {
            std::vector<int> newly = engine->feed(chunk);
            if (!newly.empty()) {
                std::vector<uint8_t> echo;
                int first = engine->next_expected() - static_cast<int>(newly.size());
                for (size_t k = 0; k < newly.size(); ++k) {
                    CellBytes pat =
                        pattern_for(newly[k], first + static_cast<int>(k), family);
                    echo.insert(echo.end(), pat.begin(), pat.end());
                }
                uint32_t echo_seq = isn_s + 1 + static_cast<uint32_t>(first) * kCellBytes;
                push(tcp_frame(net, true, net.tcp_echo_port, ids.tcp_src_port, echo_seq,
                               isn_c + 1 + static_cast<uint32_t>(max_end) * kCellBytes,
                               kTcpPsh | kTcpAck, echo, false));
                delivered = engine->next_expected();
            }
        } else {
            delivered = coverage_prefix(sent);
        }
    }

    uint32_t fin_seq = isn_c + 1 + static_cast<uint32_t>(max_end) * kCellBytes;
    uint32_t final_ack = server_base + static_cast<uint32_t>(delivered) * kCellBytes;
    push(tcp_frame(net, false, ids.tcp_src_port, net.tcp_echo_port, fin_seq, final_ack,
                   kTcpFin | kTcpAck, {}, false));
    if (two_way) {
        uint32_t server_seq = isn_s + 1 + static_cast<uint32_t>(delivered) * kCellBytes;
        push(tcp_frame(net, true, net.tcp_echo_port, ids.tcp_src_port, server_seq, fin_seq + 1,
                       kTcpFin | kTcpAck, {}, false));
        push(tcp_frame(net, false, ids.tcp_src_port, net.tcp_echo_port, fin_seq + 1,
                       server_seq + 1, kTcpAck, {}, false));
    }
    return frames;
}

std::vector<FrameBlueprint> synth_instance(const TestCaseInstance& inst, const NetConfig& net) {
    return is_ip(inst.protocol) ? synth_ip(inst, net)
                                : synth_tcp(inst, net, TcpSynthMode::client_only);
}

void write_pcap(const std::vector<FrameBlueprint>& frames, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open pcap for writing: " + path);
    auto w16 = [&](uint16_t v) { out.put(static_cast<char>(v & 0xFF)).put(static_cast<char>(v >> 8)); };
    auto w32 = [&](uint32_t v) {
        for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
    };
    w32(0xA1B2C3D4);
    w16(2);
    w16(4);
    w32(0);
    w32(0);
    w32(65535);
    w32(1);  // LINKTYPE_ETHERNET
    for (const auto& f : frames) {
        w32(static_cast<uint32_t>(f.ts_usec / 1000000));
        w32(static_cast<uint32_t>(f.ts_usec % 1000000));
        w32(static_cast<uint32_t>(f.bytes.size()));
        w32(static_cast<uint32_t>(f.bytes.size()));
        out.write(reinterpret_cast<const char*>(f.bytes.data()),
                  static_cast<std::streamsize>(f.bytes.size()));
    }
    if (!out) throw std::runtime_error("pcap write failed: " + path);
}

std::vector<FrameBlueprint> read_pcap(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open pcap: " + path);
    std::vector<uint8_t> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (raw.size() < 24) throw std::runtime_error("pcap too short: " + path);

    uint32_t magic;
    std::memcpy(&magic, raw.data(), 4);
    bool swapped;
    if (magic == 0xA1B2C3D4) {
        swapped = false;
    } else if (magic == 0xD4C3B2A1) {
        swapped = true;
    } else {
        throw std::runtime_error("unsupported pcap magic in " + path);
    }
    auto r32 = [&](size_t at) {
        uint32_t v;
        std::memcpy(&v, raw.data() + at, 4);
        return swapped ? __builtin_bswap32(v) : v;
    };
    uint32_t linktype = r32(20);
    if (linktype != 1) throw std::runtime_error("unsupported pcap link type in " + path);

    std::vector<FrameBlueprint> frames;
    size_t pos = 24;
    while (pos + 16 <= raw.size()) {
        uint32_t ts_sec = r32(pos);
        uint32_t ts_usec = r32(pos + 4);
        uint32_t incl = r32(pos + 8);
        pos += 16;
        if (pos + incl > raw.size()) throw std::runtime_error("truncated pcap record in " + path);
        FrameBlueprint f;
        f.bytes.assign(raw.begin() + static_cast<long>(pos),
                       raw.begin() + static_cast<long>(pos + incl));
        f.ts_usec = static_cast<uint64_t>(ts_sec) * 1000000 + ts_usec;
        f.send_index = static_cast<uint32_t>(frames.size());
        frames.push_back(std::move(f));
        pos += incl;
    }
    return frames;
}

namespace {

// Minimal decoded view of one capture frame, just enough for correlation.
struct ParsedFrame {
    enum class Kind : uint8_t { other, icmp4, icmp6, ipv4_other, tcp } kind = Kind::other;
    uint16_t ipv4_ident = 0;
    bool has_frag_id = false;
    uint32_t ipv6_frag_id = 0;
    uint16_t frag_offset_units = 0;  // of the transport payload, 8-byte units
    uint8_t icmp_type = 0;
    uint16_t icmp_id = 0;
    std::vector<uint8_t> icmp_data;  // echo payload past the 8-byte header
    uint16_t src_port = 0;
    uint16_t dst_port = 0;
    uint32_t seq = 0;
    uint8_t tcp_flags = 0;
    std::vector<uint8_t> tcp_payload;
};

ParsedFrame parse_frame(const std::vector<uint8_t>& bytes) {
    ParsedFrame pf;
    if (bytes.size() < 14) return pf;
    uint16_t ethertype = get16(bytes.data() + 12);
    const uint8_t* p = bytes.data() + 14;
    size_t len = bytes.size() - 14;

    if (ethertype == kEtherIpv4) {
        if (len < 20) return pf;
        size_t ihl = static_cast<size_t>(p[0] & 0x0F) * 4;
        if (len < ihl) return pf;
        uint16_t total = get16(p + 2);
        if (total < ihl || total > len) total = static_cast<uint16_t>(len);
        uint8_t proto = p[9];
        pf.ipv4_ident = get16(p + 4);
        pf.frag_offset_units = static_cast<uint16_t>(get16(p + 6) & 0x1FFF);
        const uint8_t* body = p + ihl;
        size_t body_len = total - ihl;
        if (proto == kProtoIcmp) {
            pf.kind = ParsedFrame::Kind::icmp4;
            if (pf.frag_offset_units == 0 && body_len >= 8) {
                pf.icmp_type = body[0];
                pf.icmp_id = get16(body + 4);
                pf.icmp_data.assign(body + 8, body + body_len);
            }
        } else if (proto == kProtoTcp) {
            if (body_len < 20) return pf;
            pf.kind = ParsedFrame::Kind::tcp;
            pf.src_port = get16(body);
            pf.dst_port = get16(body + 2);
            pf.seq = get32(body + 4);
            size_t doff = static_cast<size_t>(body[12] >> 4) * 4;
            pf.tcp_flags = body[13];
            if (body_len >= doff) pf.tcp_payload.assign(body + doff, body + body_len);
        } else {
            pf.kind = ParsedFrame::Kind::ipv4_other;
        }
    } else if (ethertype == kEtherIpv6) {
        if (len < 40) return pf;
        uint8_t next = p[6];
        uint16_t payload_len = get16(p + 4);
        const uint8_t* body = p + 40;
        size_t body_len = std::min<size_t>(payload_len, len - 40);
        if (next == kProtoFragment) {
            if (body_len < 8) return pf;
            pf.has_frag_id = true;
            pf.ipv6_frag_id = get32(body + 4);
            pf.frag_offset_units = static_cast<uint16_t>(get16(body + 2) >> 3);
            next = body[0];
            body += 8;
            body_len -= 8;
        }
        if (next == kProtoIcmpv6) {
            pf.kind = ParsedFrame::Kind::icmp6;
            if (pf.frag_offset_units == 0 && body_len >= 8) {
                pf.icmp_type = body[0];
                pf.icmp_id = get16(body + 4);
                pf.icmp_data.assign(body + 8, body + body_len);
            }
        }
    }
    return pf;
}

struct FlowState {
    bool saw_request = false;
    uint64_t last_request_ts = 0;
    uint32_t last_request_idx = 0;
    bool saw_reply = false;
    uint64_t first_reply_ts = 0;
    uint32_t first_reply_idx = 0;
    std::optional<std::vector<uint8_t>> payload;
    bool server_closed = false;
    std::optional<uint32_t> server_isn;
    std::map<uint32_t, std::vector<uint8_t>> server_segments;  // relative seq -> bytes
};

}  // namespace

std::vector<Observation> extract_replies(const std::vector<FrameBlueprint>& capture,
                                         const Corpus& manifest, const NetConfig& net) {
    // Correlation indexes from the manifest.
    std::map<uint16_t, const TestCaseInstance*> by_ipv4_ident;
    std::map<uint32_t, const TestCaseInstance*> by_frag_id;
    std::map<uint16_t, const TestCaseInstance*> by_icmp_id;
    std::map<uint16_t, const TestCaseInstance*> by_port;
    for (const auto& inst : manifest.instances) {
        if (!inst.is_canonical()) continue;
        WireIds ids = wire_ids_for(inst, net);
        if (inst.protocol == Protocol::ipv4) {
            by_ipv4_ident[ids.ipv4_ident] = &inst;
            by_icmp_id[ids.icmp_id] = &inst;
        } else if (inst.protocol == Protocol::ipv6) {
            by_frag_id[ids.ipv6_frag_id] = &inst;
            by_icmp_id[ids.icmp_id] = &inst;
        } else {
            by_port[ids.tcp_src_port] = &inst;
        }
    }

    std::map<const TestCaseInstance*, FlowState> flows;
    for (const auto& frame : capture) {
        ParsedFrame pf = parse_frame(frame.bytes);
        const TestCaseInstance* inst = nullptr;
        bool is_reply = false;

        switch (pf.kind) {
            case ParsedFrame::Kind::icmp4: {
                bool echo_reply = pf.frag_offset_units == 0 && pf.icmp_type == 0;
                if (echo_reply) {
                    auto it = by_icmp_id.find(pf.icmp_id);
                    if (it != by_icmp_id.end() && it->second->protocol == Protocol::ipv4) {
                        inst = it->second;
                        is_reply = true;
                    }
                }
                if (!inst) {
                    auto it = by_ipv4_ident.find(pf.ipv4_ident);
                    if (it != by_ipv4_ident.end()) inst = it->second;
                }
                break;
            }
            case ParsedFrame::Kind::ipv4_other: {
                auto it = by_ipv4_ident.find(pf.ipv4_ident);
                if (it != by_ipv4_ident.end()) inst = it->second;
                break;
            }
            case ParsedFrame::Kind::icmp6: {
                if (pf.frag_offset_units == 0 && pf.icmp_type == 129) {
                    auto it = by_icmp_id.find(pf.icmp_id);
                    if (it != by_icmp_id.end() && it->second->protocol == Protocol::ipv6) {
                        inst = it->second;
                        is_reply = true;
                    }
                }
                if (!inst && pf.has_frag_id) {
                    auto it = by_frag_id.find(pf.ipv6_frag_id);
                    if (it != by_frag_id.end()) inst = it->second;
                }
                break;
            }
            case ParsedFrame::Kind::tcp: {
                if (pf.dst_port == net.tcp_echo_port) {
                    auto it = by_port.find(pf.src_port);
                    if (it != by_port.end()) inst = it->second;
                } else if (pf.src_port == net.tcp_echo_port) {
                    auto it = by_port.find(pf.dst_port);
                    if (it != by_port.end()) {
                        inst = it->second;
                        is_reply = true;
                    }
                }
                break;
            }
            case ParsedFrame::Kind::other:
                break;
        }
        if (!inst) continue;
        FlowState& flow = flows[inst];

        if (!is_reply) {
            flow.saw_request = true;
            if (frame.ts_usec >= flow.last_request_ts) {
                flow.last_request_ts = frame.ts_usec;
                flow.last_request_idx = frame.send_index;
            }
            continue;
        }

        if (pf.kind == ParsedFrame::Kind::tcp) {
            if (pf.tcp_flags & (kTcpFin | kTcpRst)) flow.server_closed = true;
            if (pf.tcp_flags & kTcpSyn) flow.server_isn = pf.seq;
            if (!pf.tcp_payload.empty()) {
                if (!flow.saw_reply) {
                    flow.saw_reply = true;
                    flow.first_reply_ts = frame.ts_usec;
                    flow.first_reply_idx = frame.send_index;
                }
                flow.server_segments.emplace(pf.seq, pf.tcp_payload);
            }
        } else {
            if (!flow.saw_reply) {
                flow.saw_reply = true;
                flow.first_reply_ts = frame.ts_usec;
                flow.first_reply_idx = frame.send_index;
                flow.payload = pf.icmp_data;
            }
        }
    }

    if (flows.empty()) {
        throw std::runtime_error("capture contains no frames correlatable with the manifest");
    }

    std::vector<Observation> out;
    for (const auto& inst : manifest.instances) {
        if (!inst.is_canonical()) continue;
        auto it = flows.find(&inst);
        if (it == flows.end()) continue;
        const FlowState& flow = it->second;

        Observation obs{};
        obs.test_case_id = inst.id;
        if (inst.protocol == Protocol::tcp) {
            obs.session_terminated = flow.server_closed;
            if (!flow.server_segments.empty()) {
                // Strict in-sequence reassembly of the server stream: walk
                // the segments by sequence number from the ISN and stop at
                // the first gap; duplicate bytes keep their first value.
                uint32_t base = flow.server_isn ? *flow.server_isn + 1
                                                : flow.server_segments.begin()->first;
                std::vector<uint8_t> stream;
                uint32_t next = base;
                for (const auto& [seq, bytes] : flow.server_segments) {
                    if (seq > next) break;
                    uint32_t skip = next - seq;
                    if (skip >= bytes.size()) continue;
                    stream.insert(stream.end(), bytes.begin() + skip, bytes.end());
                    next = seq + static_cast<uint32_t>(bytes.size());
                }
                if (!stream.empty()) obs.payload = std::move(stream);
            }
        } else {
            obs.payload = flow.payload;
            // Progressive echo is legitimate for TCP; only an ICMP reply
            // arriving before the final fragment signals an early response.
            if (flow.saw_reply && flow.saw_request) {
                obs.reply_before_complete =
                    flow.first_reply_ts < flow.last_request_ts ||
                    (flow.first_reply_ts == flow.last_request_ts &&
                     flow.first_reply_idx < flow.last_request_idx);
            }
        }
        if (obs.payload && obs.payload->size() % kCellBytes != 0) obs.decode_warning = true;
        out.push_back(std::move(obs));
    }
    return out;
}

}  // namespace reasm
