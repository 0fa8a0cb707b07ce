#include <gtest/gtest.h>

#include "gen.hpp"
#include "storetwin/error.hpp"
#include "storetwin/mqtt/topic.hpp"

using namespace storetwin;
using namespace storetwin::mqtt;

namespace {

bool matches(std::string_view filter, std::string_view topic) {
    return topic_matches(TopicFilter::parse(filter), topic);
}

}  // namespace

TEST(Topic, WildcardExamples) {
    EXPECT_TRUE(matches("store/+/temp", "store/a/temp"));
    EXPECT_TRUE(matches("store/#", "store"));
    EXPECT_FALSE(matches("store/+", "store/a/b"));
    EXPECT_TRUE(matches("store/+", "store/"));
    EXPECT_TRUE(matches("#", "a/b/c"));
    EXPECT_TRUE(matches("+/+", "/x"));
    EXPECT_FALSE(matches("a/b", "a/B"));
    EXPECT_TRUE(matches("a/b/#", "a/b/c/d"));
    EXPECT_FALSE(matches("a/b/#", "a/c"));
}

TEST(Topic, DollarTopicsHiddenFromLeadingWildcards) {
    EXPECT_FALSE(matches("#", "$SYS/x"));
    EXPECT_FALSE(matches("+/x", "$SYS/x"));
    EXPECT_TRUE(matches("$SYS/#", "$SYS/x"));
}

TEST(Topic, FilterValidation) {
    EXPECT_TRUE(is_valid_topic_filter("a/+/b/#"));
    EXPECT_FALSE(is_valid_topic_filter(""));
    EXPECT_FALSE(is_valid_topic_filter("a/#/b"));
    EXPECT_FALSE(is_valid_topic_filter("a+/b"));
    EXPECT_FALSE(is_valid_topic_filter("a/b#"));
    EXPECT_THROW(TopicFilter::parse("a/#/b"), ValidationError);
    EXPECT_EQ(TopicFilter::parse("a//b").segments(), (std::vector<std::string>{"a", "", "b"}));
}

TEST(Topic, NameValidation) {
    EXPECT_TRUE(is_valid_topic_name("store/1/sensor/temp"));
    EXPECT_FALSE(is_valid_topic_name(""));
    EXPECT_FALSE(is_valid_topic_name("a/+"));
    EXPECT_FALSE(is_valid_topic_name("a/#"));
}

TEST(Topic, ExactFilterMatchesOnlyItself) {
    Gen g(4);
    for (int i = 0; i < 2000; ++i) {
        const auto a = g.ascii(1, 3, "ab") + "/" + g.ascii(0, 3, "ab");
        const auto b = g.ascii(1, 3, "ab") + "/" + g.ascii(0, 3, "ab");
        ASSERT_EQ(matches(a, b), a == b);
        ASSERT_TRUE(matches("#", a));
        ASSERT_TRUE(matches("+/+", a));
    }
}
