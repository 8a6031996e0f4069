#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "errors.hpp"
#include "log_io.hpp"
#include "oracle.hpp"
#include "synthetic.hpp"

using namespace edgeminer;

namespace {

EventLog csv(const std::string& text, TiePolicy policy = TiePolicy::reject) {
    std::istringstream in(text);
    return read_log(in, LogFormat::csv, {std::nullopt, {}, policy}).log;
}

EventLog traces(const std::vector<std::string>& words) {
    std::vector<RawEvent> raw;
    Timestamp t = 1000;
    for (std::size_t c = 0; c < words.size(); ++c)
        for (char a : words[c]) raw.push_back({"c" + std::to_string(c), std::string(1, a), t++});
    return validate_log(EventLog::from_raw(raw), TiePolicy::reject).log;
}

} // namespace

TEST_SUITE("event_model") {

TEST_CASE("minimal XES log") {
    std::istringstream in(R"(<?xml version="1.0"?>
<log xes.version="1.0">
  <string key="concept:name" value="toy"/>
  <trace>
    <string key="concept:name" value="case-1"/>
    <event>
      <string key="concept:name" value="a"/>
      <date key="time:timestamp" value="2020-01-01T00:00:00.000+00:00"/>
    </event>
    <event>
      <string key="concept:name" value="b"/>
      <date key="time:timestamp" value="2020-01-01T00:00:01.000+00:00"/>
      <string key="org:resource" value="ignored"/>
    </event>
  </trace>
</log>)");
    const auto log = parse_xes(in);
    CHECK(log.activity_count() == 2);
    CHECK(log.case_count() == 1);
    REQUIRE(log.events().size() == 2);
    CHECK(log.case_name(0) == "case-1");
    CHECK(log.activities().name(log.events()[0].activity) == "a");
    CHECK(log.events()[1].timestamp - log.events()[0].timestamp == 1'000'000);
}

TEST_CASE("XES errors carry a line or event index") {
    SUBCASE("malformed XML") {
        std::istringstream in("<log>\n<trace>\n<event>\n</trace>\n</log>");
        try {
            parse_xes(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 4);
        }
    }
    SUBCASE("missing timestamp") {
        std::istringstream in(R"(<log><trace><string key="concept:name" value="c"/>
<event><string key="concept:name" value="a"/></event></trace></log>)");
        try {
            parse_xes(in);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("event 0") != std::string::npos);
        }
    }
}

TEST_CASE("three-row CSV") {
    const auto log = csv("case_id,activity,timestamp_us\nc,a,1\nc,b,2\nc,c,3\n");
    CHECK(log.case_count() == 1);
    REQUIRE(log.trace(0).size() == 3);
    std::string word;
    for (auto i : log.trace(0)) word += log.activities().name(log.events()[i].activity);
    CHECK(word == "abc");
}

TEST_CASE("CSV with ISO timestamps, quoting and custom columns") {
    std::istringstream in("\xEF\xBB\xBFid,\"step, name\",when\n"
                          "x,\"say \"\"hi\"\"\",2021-03-04T05:06:07.5Z\n"
                          "x,b,2021-03-04T07:06:07.5+02:00\n");
    const auto log = parse_csv(in, {"id", "step, name", "when"});
    REQUIRE(log.events().size() == 2);
    CHECK(log.activities().name(0) == "say \"hi\"");
    // Same instant once the offset is applied.
    CHECK(log.events()[0].timestamp == log.events()[1].timestamp);
}

TEST_CASE("CSV errors") {
    CHECK_THROWS_AS(csv("case,activity,timestamp_us\nc,a,1\n"), ValidationError);
    try {
        csv("case_id,activity,timestamp_us\nc,a,1\nc,b,yesterday\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("shuffled CSV rows give the same log") {
    std::vector<std::string> rows = {"c1,a,10", "c1,b,20", "c1,c,30", "c2,b,15", "c2,a,25"};
    auto text = [&] {
        std::string t = "case_id,activity,timestamp_us\n";
        for (const auto& r : rows) t += r + "\n";
        return t;
    };
    const auto sorted = csv(text());
    std::mt19937 rng(3);
    for (int k = 0; k < 10; ++k) {
        std::shuffle(rows.begin(), rows.end(), rng);
        CHECK(csv(text()) == sorted);
    }
}

TEST_CASE("tie policies") {
    const std::string text = "case_id,activity,timestamp_us\nc,a,5\nc,b,5\nd,a,5\n";
    try {
        csv(text);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("c") != std::string::npos);
    }
    std::istringstream in(text);
    const auto raw = parse_csv(in);
    CHECK(find_ties(raw).size() == 1);
    const auto fixed = validate_log(raw, TiePolicy::tiebreak);
    REQUIRE(fixed.report.perturbations.size() == 1);
    CHECK(fixed.report.perturbations[0].case_id == "c");
    CHECK(fixed.report.perturbations[0].original == 5);
    CHECK(fixed.report.perturbations[0].adjusted == 6);
    CHECK(find_ties(fixed.log).empty());
    CHECK(validate_log(fixed.log, TiePolicy::reject).report.empty());
}

TEST_CASE("synthetic generator") {
    SUBCASE("single activity yields self-loops") {
        auto spec = SyntheticSpec::uniform(1, 1, 3, 0);
        spec.min_length = 3;
        const auto log = generate_synthetic(spec);
        CHECK(log.events().size() == 3);
        CHECK(central_footprint(log).at(0, 0) == 2);
    }
    SUBCASE("deterministic per seed") {
        const auto a = generate_synthetic(SyntheticSpec::uniform(6, 20, 10, 42));
        const auto b = generate_synthetic(SyntheticSpec::uniform(6, 20, 10, 42));
        CHECK(to_canonical_csv(a) == to_canonical_csv(b));
        CHECK(to_canonical_csv(a) != to_canonical_csv(generate_synthetic(SyntheticSpec::uniform(6, 20, 10, 43))));
    }
    SUBCASE("chain weights only follow the chain") {
        SyntheticSpec spec;
        spec.activities = 3;
        spec.cases = 30;
        spec.min_length = 1;
        spec.max_length = 8;
        spec.transitions = {0, 1, 0, 0, 0, 1, 1, 0, 0};  // a->b->c->a
        spec.start_weights = {1, 0, 0};
        spec.seed = 9;
        const auto log = generate_synthetic(spec);
        for (CaseIndex c = 0; c < log.case_count(); ++c) {
            auto t = log.trace(c);
            for (std::size_t k = 0; k < t.size(); ++k)
                CHECK(log.activities().name(log.events()[t[k]].activity) == synthetic_activity_name(k % 3));
        }
    }
    SUBCASE("all-zero row is rejected") {
        SyntheticSpec spec;
        spec.activities = 2;
        spec.transitions = {0, 1, 0, 0};
        CHECK_THROWS_AS(generate_synthetic(spec), ValidationError);
    }
    SUBCASE("timestamps strictly increase within a case") {
        const auto log = generate_synthetic(SyntheticSpec::uniform(5, 40, 15, 1));
        for (CaseIndex c = 0; c < log.case_count(); ++c) {
            auto t = log.trace(c);
            for (std::size_t k = 1; k < t.size(); ++k)
                CHECK(log.events()[t[k - 1]].timestamp < log.events()[t[k]].timestamp);
        }
    }
}

TEST_CASE("central footprint") {
    SUBCASE("<a,b>") {
        const auto fm = central_footprint(traces({"ab"}));
        CHECK(fm.at(0, 1) == 1);
        CHECK(fm.total() == 1);
        CHECK(fm.starts() == std::set<ActivityId>{0});
        CHECK(fm.ends() == std::set<ActivityId>{1});
    }
    SUBCASE("<a,a,a>") { CHECK(central_footprint(traces({"aaa"})).at(0, 0) == 2); }
    SUBCASE("L1 against the oracle") {
        const auto log = traces({"abcd", "acbd", "aed"});
        const auto view = oracle::view(central_footprint(log), log.activities().names());
        const oracle::Footprint expected{
            {{{"a", "b"}, 1}, {{"a", "c"}, 1}, {{"b", "c"}, 1}, {{"c", "b"}, 1},
             {{"b", "d"}, 1}, {{"c", "d"}, 1}, {{"a", "e"}, 1}, {{"e", "d"}, 1}},
            {"a"},
            {"d"}};
        CHECK(view == expected);
        CHECK(view == oracle::footprint(oracle::rows_of(log)));
    }
    SUBCASE("random logs: oracle agreement and entry sum") {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const auto log = generate_synthetic(SyntheticSpec::uniform(1 + seed % 7, 1 + seed % 13, 9, seed));
            const auto fm = central_footprint(log);
            CHECK(oracle::view(fm, log.activities().names()) == oracle::footprint(oracle::rows_of(log)));
            Count expected = 0;
            for (CaseIndex c = 0; c < log.case_count(); ++c) expected += log.trace(c).size() - 1;
            CHECK(fm.total() == expected);
        }
    }
}

TEST_CASE("relations") {
    MergedFM fm(2);
    fm.at(0, 1) = 3;
    CHECK(relation(fm, 0, 1) == Relation::causality);
    CHECK(relation(fm, 1, 0) == Relation::reverse_causality);
    fm.at(0, 1) = 0;
    CHECK(relation(fm, 0, 1) == Relation::no_succession);
    // Two traces <a,b> and <b,a,b>.
    const auto log = traces({"ab", "bab"});
    const auto two = central_footprint(log);
    CHECK(two.at(0, 1) == 2);
    CHECK(two.at(1, 0) == 1);
    CHECK(relation(two, 0, 1) == Relation::parallel);
    CHECK(relation(two, 1, 0) == Relation::parallel);
}

TEST_CASE("relation is total and consistent") {
    const auto log = generate_synthetic(SyntheticSpec::uniform(6, 10, 6, 5));
    const auto fm = central_footprint(log);
    for (ActivityId a = 0; a < fm.size(); ++a)
        for (ActivityId b = 0; b < fm.size(); ++b) {
            const auto r = relation(fm, a, b);
            const auto s = relation(fm, b, a);
            if (r == Relation::causality) CHECK(s == Relation::reverse_causality);
            if (r == Relation::parallel) CHECK(s == Relation::parallel);
            if (r == Relation::no_succession) CHECK(s == Relation::no_succession);
        }
}

TEST_CASE("canonical CSV round trip") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto log = generate_synthetic(SyntheticSpec::uniform(5, 12, 8, seed));
        const auto text = to_canonical_csv(log);
        const auto again = csv(text);
        CHECK(again == log);
        CHECK(to_canonical_csv(again) == text);
    }
}

TEST_CASE("timestamps") {
    CHECK(parse_timestamp("123") == 123);
    CHECK(parse_timestamp("1970-01-01T00:00:01Z") == 1'000'000);
    CHECK(parse_timestamp("1970-01-01T01:00:00+01:00") == 0);
    const auto t = parse_timestamp("2020-01-02T03:04:05.000006Z");
    REQUIRE(t);
    CHECK(format_timestamp(*t) == "2020-01-02T03:04:05.000006Z");
    CHECK_FALSE(parse_timestamp("soon"));
}

}
