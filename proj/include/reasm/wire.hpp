// Bit-exact synthesis of test-case instances into IPv4 fragments, IPv6
// fragment chains, and TCP echo sessions; classic PCAP read/write; and
// extraction of echoed reassemblies from reply captures.
#ifndef REASM_WIRE_HPP
#define REASM_WIRE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reasm/corpus.hpp"
#include "reasm/policy.hpp"
#include "reasm/simulator.hpp"

namespace reasm {

struct MacAddress {
    std::array<uint8_t, 6> bytes{};

    static MacAddress parse(std::string_view text);
    std::string to_string() const;
};

struct Ipv4Address {
    std::array<uint8_t, 4> bytes{};

    static Ipv4Address parse(std::string_view text);
    std::string to_string() const;
};

struct Ipv6Address {
    std::array<uint8_t, 16> bytes{};

    // Accepts full and "::"-compressed hex group notation.
    static Ipv6Address parse(std::string_view text);
    std::string to_string() const;
};

struct NetConfig {
    MacAddress src_mac = MacAddress::parse("02:00:00:00:00:01");
    MacAddress dst_mac = MacAddress::parse("02:00:00:00:00:02");
    Ipv4Address src_ipv4 = Ipv4Address::parse("10.0.0.1");
    Ipv4Address dst_ipv4 = Ipv4Address::parse("10.0.0.2");
    Ipv6Address src_ipv6 = Ipv6Address::parse("fd00::1");
    Ipv6Address dst_ipv6 = Ipv6Address::parse("fd00::2");
    uint16_t tcp_echo_port = 7;
    uint16_t base_src_port = 20000;   // ephemeral port of instance 0
    uint16_t icmp_id_base = 0x2000;   // ICMP identifier of instance 0
    uint32_t frame_spacing_usec = 0;  // 0 keeps frames ordered with equal stamps

    void validate() const;
};

// Correlation identifiers derived from the instance ordinal, so replies can
// be matched statelessly.
struct WireIds {
    uint16_t ipv4_ident = 0;
    uint32_t ipv6_frag_id = 0;
    uint16_t icmp_id = 0;
    uint16_t icmp_seq = 1;
    uint16_t tcp_src_port = 0;
    uint32_t tcp_client_isn = 0;
    uint32_t tcp_server_isn = 0;
};

WireIds wire_ids_for(const TestCaseInstance& inst, const NetConfig& net);

struct FrameBlueprint {
    std::vector<uint8_t> bytes;
    uint32_t send_index = 0;
    uint64_t ts_usec = 0;
};

// One fragment per chunk in send order. Pattern cell j sits at datagram
// data offset (j + 1) * 8; the 8-byte Echo header occupies offset 0 and is
// repeated identically on every chunk that starts at cell 0. The Echo
// checksum is valid for every reassembled length.
std::vector<FrameBlueprint> synth_ip(const TestCaseInstance& inst, const NetConfig& net);

enum class TcpSynthMode : uint8_t { client_only, bidirectional };

struct TcpSimParams {
    PolicyTable policy;
    MechanismConfig mech;
};

// client_only emits SYN, data segments (cell j at stream offset j * 8 past
// the ISN), and FIN. bidirectional also fabricates the echo side by running
// the TCP reassembly engine with the supplied parameters.
std::vector<FrameBlueprint> synth_tcp(const TestCaseInstance& inst, const NetConfig& net,
                                      TcpSynthMode mode,
                                      const std::optional<TcpSimParams>& sim = std::nullopt);

std::vector<FrameBlueprint> synth_instance(const TestCaseInstance& inst, const NetConfig& net);

// Classic PCAP, little-endian, microsecond timestamps, Ethernet link type.
void write_pcap(const std::vector<FrameBlueprint>& frames, const std::string& path);
std::vector<FrameBlueprint> read_pcap(const std::string& path);

// Correlates request and reply frames with the manifest and recovers the
// echoed payload per test case. Instances without any correlated frame are
// omitted; an entirely uncorrelated capture is an error.
std::vector<Observation> extract_replies(const std::vector<FrameBlueprint>& capture,
                                         const Corpus& manifest, const NetConfig& net);

}  // namespace reasm

#endif
