#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace storetwin::mqtt {

/// A validated subscription filter. '+' matches exactly one level and must
/// occupy a whole level; '#' matches the remaining levels (including none)
/// and may only appear as the last level.
class TopicFilter {
public:
    /// Throws ValidationError for an invalid filter.
    static TopicFilter parse(std::string_view filter);

    [[nodiscard]] const std::string& str() const noexcept { return text_; }
    [[nodiscard]] const std::vector<std::string>& segments() const noexcept { return segments_; }

    bool operator==(const TopicFilter&) const = default;

private:
    std::string text_;
    std::vector<std::string> segments_;
};

bool is_valid_topic_filter(std::string_view filter) noexcept;

/// Publish topic names: non-empty, valid string, no wildcard characters.
bool is_valid_topic_name(std::string_view topic) noexcept;

/// Topics starting with '$' are not matched by filters that start with a wildcard.
bool topic_matches(const TopicFilter& filter, std::string_view topic);

}  // namespace storetwin::mqtt
