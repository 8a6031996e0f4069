#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "event_model.hpp"
#include "footprint.hpp"

namespace edgeminer {

// Activity nodes are 0..n-1; the collector is node n.
using NodeId = std::uint32_t;

struct QueryItem {
    CaseIndex case_index = 0;
    Timestamp timestamp = 0;  // of the event looking for its predecessor
};

struct PredQuery {
    std::uint64_t round = 0;
    std::vector<QueryItem> items;
};

struct Candidate {
    CaseIndex case_index = 0;
    Timestamp query_timestamp = 0;
    std::optional<Timestamp> predecessor;  // timestamp of the offered event at the responder
};

struct PredResponse {
    std::uint64_t round = 0;
    std::vector<Candidate> candidates;  // one per queried item, same order
};

// Sent by the successor's node to the node holding the chosen predecessor.
struct ChosenNotify {
    CaseIndex case_index = 0;
    Timestamp predecessor_timestamp = 0;
    Timestamp successor_timestamp = 0;
};

// Sent by a predecessor's node to a successor that lost the link; the
// receiver drops it unless its event still points at that predecessor.
struct CorrectionNotify {
    CaseIndex case_index = 0;
    Timestamp successor_timestamp = 0;
    Timestamp predecessor_timestamp = 0;
};

struct FMRequest {
    std::uint64_t request = 0;
};

struct FMResponse {
    std::uint64_t request = 0;
    PartialFM partial;
};

using Payload = std::variant<PredQuery, PredResponse, ChosenNotify, CorrectionNotify, FMRequest, FMResponse>;

enum class MessageKind : std::uint8_t {
    pred_query,
    pred_response,
    chosen_notify,
    correction_notify,
    fm_request,
    fm_response
};

struct Message {
    NodeId src = 0;
    NodeId dst = 0;
    Timestamp send_time = 0;
    Timestamp delivery_time = 0;
    std::uint64_t seq = 0;
    Payload payload;

    MessageKind kind() const noexcept { return static_cast<MessageKind>(payload.index()); }
};

std::string_view to_string(MessageKind kind);

// Case of the first item carried, if the message concerns a case at all.
std::optional<CaseIndex> message_case(const Message& m);

} // namespace edgeminer
