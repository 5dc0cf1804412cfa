#include "otmt/core.hpp"

#include <sstream>

namespace otmt {

std::string_view to_string(TopicStatus status) {
    return status == TopicStatus::kOffTopic ? "off-topic" : "on-topic";
}

std::optional<TopicStatus> topic_status_from_string(std::string_view text) {
    if (text == "on-topic") return TopicStatus::kOnTopic;
    if (text == "off-topic") return TopicStatus::kOffTopic;
    return std::nullopt;
}

bool MementoRef::has_hint(std::string_view label) const {
    std::istringstream in{std::string(label)};
    std::string token;
    bool any = false;
    while (in >> token) {
        any = true;
        if (!rel_hints.contains(token)) return false;
    }
    return any;
}

TopicStatus overall_topic_status(const std::vector<MeasureResult>& results) {
    if (results.empty()) {
        throw UsageError("overall_topic_status: no measure results");
    }
    for (const auto& r : results) {
        if (r.topic_status == TopicStatus::kOffTopic) return TopicStatus::kOffTopic;
    }
    return TopicStatus::kOnTopic;
}

}  // namespace otmt
