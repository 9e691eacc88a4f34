#include <catch_amalgamated.hpp>

#include "ntcu/lsc.hpp"

using namespace ntcu;

TEST_CASE("indicator and eval") {
    auto x = indicator(OpenSet::arc(Space::Circle, Q(3, 4), Q(5, 4)));
    CHECK(x.eval(0) == 1);
    CHECK(x.eval(Q(3, 4)) == 0);
    CHECK(x.eval(Q(1, 2)) == 0);
    auto y = indicator(OpenSet::arc(Space::Interval, Q(1, 4), Q(1, 2)));
    CHECK(y.eval(Q(1, 4)) == 0);
    CHECK(y.eval(Q(1, 3)) == 1);
}

TEST_CASE("level sets round trip") {
    auto u = OpenSet::arc(Space::Circle, Q(3, 4), Q(5, 4));
    auto v = OpenSet::arc(Space::Circle, Q(1, 8), Q(1, 2));
    auto s = lsc_add(indicator(u), indicator(v));
    CHECK(s.level_set(1) == u.united(v));
    CHECK(s.level_set(2) == OpenSet::arc(Space::Circle, Q(1, 8), Q(1, 4)));
    auto w = indicator(OpenSet(Space::Circle, {{0, 1}}));
    CHECK(w.level_set(1) == OpenSet(Space::Circle, {{0, 1}}));
}

TEST_CASE("way-below examples") {
    auto a = indicator(OpenSet::arc(Space::Circle, Q(1, 4), Q(1, 2)));
    auto b = indicator(OpenSet::arc(Space::Circle, Q(1, 8), Q(5, 8)));
    CHECK(lsc_waybelow(a, b));
    auto one = indicator(OpenSet::arc(Space::Interval, 0, 1));
    CHECK(!lsc_waybelow(one, one));
    auto whole = LscFunction::constant(Space::Interval, 1);
    CHECK(lsc_waybelow(whole, whole));
    CHECK(!lsc_waybelow(LscFunction::constant(Space::Interval, kInf), LscFunction::constant(Space::Interval, kInf)));
}

TEST_CASE("sup of a chain") {
    std::vector<LscFunction> ch;
    for (long m = 3; m <= 6; ++m) ch.push_back(indicator(OpenSet::arc(Space::Interval, Q(1, m), Q(m - 1, m))));
    auto s = lsc_sup(ch);
    CHECK(s == ch.back());
    std::vector<LscFunction> bad{ch[1], ch[0]};
    CHECK_THROWS_AS(lsc_sup(bad), std::invalid_argument);
}
