#include "storetwin/mqtt/topic.hpp"

#include "storetwin/error.hpp"
#include "storetwin/mqtt/codec.hpp"

namespace storetwin::mqtt {

namespace {

std::vector<std::string> split_levels(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto slash = s.find('/', start);
        if (slash == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, slash - start));
        start = slash + 1;
    }
    return out;
}

}  // namespace

bool is_valid_topic_filter(std::string_view filter) noexcept {
    if (filter.empty() || !is_valid_mqtt_string(filter)) return false;
    const auto levels = split_levels(filter);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto& level = levels[i];
        if (level.find('#') != std::string::npos) {
            if (level != "#" || i + 1 != levels.size()) return false;
        }
        if (level.find('+') != std::string::npos && level != "+") return false;
    }
    return true;
}

bool is_valid_topic_name(std::string_view topic) noexcept {
    if (topic.empty() || !is_valid_mqtt_string(topic)) return false;
    return topic.find_first_of("+#") == std::string_view::npos;
}

TopicFilter TopicFilter::parse(std::string_view filter) {
    if (!is_valid_topic_filter(filter))
        throw ValidationError("invalid topic filter '" + std::string(filter) + "'");
    TopicFilter f;
    f.text_ = std::string(filter);
    f.segments_ = split_levels(filter);
    return f;
}

bool topic_matches(const TopicFilter& filter, std::string_view topic) {
    if (!is_valid_topic_name(topic)) return false;
    const auto& fs = filter.segments();
    if (topic.front() == '$' && (fs.front() == "+" || fs.front() == "#")) return false;

    const auto ts = split_levels(topic);
    std::size_t i = 0;
    for (; i < fs.size(); ++i) {
        if (fs[i] == "#") return true;
        if (i >= ts.size()) return false;
        if (fs[i] != "+" && fs[i] != ts[i]) return false;
    }
    return i == ts.size();
}

}  // namespace storetwin::mqtt
