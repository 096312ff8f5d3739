#pragma once

#include <string>
#include <string_view>

#include "sfdr/signalcore.hpp"

namespace sfdr {

/// Relay forwarding rule.
enum class Protocol {
    proposed,       ///< symbol-level square-deviation selection
    crc_sdf,        ///< forward the whole frame iff its CRC passes
    threshold_sdf,  ///< forward the whole frame iff the received SINR reaches a threshold
    perfect_relay,  ///< genie relay that always forwards the correct frame
};

inline std::string to_string(Protocol p) {
    switch (p) {
        case Protocol::proposed: return "proposed";
        case Protocol::crc_sdf: return "crc_sdf";
        case Protocol::threshold_sdf: return "threshold_sdf";
        case Protocol::perfect_relay: return "perfect_relay";
    }
    return "unknown";
}

inline Protocol parse_protocol(std::string_view name) {
    if (name == "proposed") return Protocol::proposed;
    if (name == "crc_sdf") return Protocol::crc_sdf;
    if (name == "threshold_sdf") return Protocol::threshold_sdf;
    if (name == "perfect_relay") return Protocol::perfect_relay;
    throw Error("unknown protocol '" + std::string(name) + "'");
}

}  // namespace sfdr
