#include "bss/error.hpp"
#include "bss/io.hpp"
#include "bss/model.hpp"
#include "oracles.hpp"

#include "doctest.h"

#include <algorithm>

using namespace bss;

namespace {

bool has_code(const ValidationReport& r, const std::string& code) {
    return std::any_of(r.violations.begin(), r.violations.end(), [&](const Violation& v) { return v.code == code; });
}

}  // namespace

TEST_CASE("two stations, one bike each, K=2 is valid and full-reachable") {
    const auto p = uniform_params(2, 1, 2, {1.0, 1.0});
    const auto report = validate(p);
    CHECK(report.ok());
    CHECK(report.regime == Regime::full_reachable);
    CHECK(report.total_bikes == 2);
}

TEST_CASE("row sum of p_first below one is reported with its row") {
    auto p = uniform_params(2, 1, 2, {1.0, 1.0});
    p.p_first(0, 1) = 0.5;
    const auto report = validate(p);
    REQUIRE_FALSE(report.ok());
    REQUIRE(has_code(report, "row_sum"));
    const auto it = std::find_if(report.violations.begin(), report.violations.end(),
                                 [](const Violation& v) { return v.code == "row_sum"; });
    CHECK(it->indices == std::vector<int>{1});
    CHECK(it->message.find("p_first") != std::string::npos);
}

TEST_CASE("K above NC gives the no-full regime") {
    const auto report = validate(testing::t1());
    CHECK(report.ok());
    CHECK(report.regime == Regime::no_full);
    CHECK_FALSE(report.full_reachable());
}

TEST_CASE("row sums are checked to 1e-12") {
    auto p = testing::t3();
    p.alpha(0, 1) += 5e-13;
    CHECK(validate(p).ok());
    p.alpha(0, 1) += 5e-12;
    CHECK(has_code(validate(p), "row_sum"));
}

TEST_CASE("every problem is reported at once") {
    auto p = testing::t3();
    p.C = 0;
    p.lambda[1] = 0.0;
    p.mu(0, 2) = 0.0;          // p_first(0,2) > 0
    p.xi(1, 1) = 3.0;          // diagonal
    p.alpha(2, 0) = -0.1;
    const auto report = validate(p);
    CHECK(has_code(report, "C_min"));
    CHECK(has_code(report, "lambda_positive"));
    CHECK(has_code(report, "rate_positive"));
    CHECK(has_code(report, "diagonal"));
    CHECK(has_code(report, "probability_range"));
    CHECK(has_code(report, "row_sum"));
}

TEST_CASE("rates on zero-probability routes may be absent") {
    auto p = testing::t3();
    p.p_first(0, 1) = 0.0;
    p.p_first(0, 2) = 1.0;
    p.mu(0, 1) = 0.0;
    CHECK(validate(p).ok());
}

TEST_CASE("C above K is rejected because the start state would not fit") {
    const auto p = uniform_params(2, 3, 2, {1.0, 1.0});
    CHECK(has_code(validate(p), "C_le_K"));
}

TEST_CASE("validate is deterministic and idempotent") {
    auto p = testing::t2();
    p.p_first(1, 0) = 0.9;
    const auto a = validate(p);
    const auto b = validate(p);
    REQUIRE(a.violations.size() == b.violations.size());
    for (std::size_t i = 0; i < a.violations.size(); ++i) CHECK(a.violations[i].message == b.violations[i].message);
}

TEST_CASE("require_valid throws invalid_params") {
    auto p = testing::t1();
    p.K = 0;
    try {
        require_valid(p);
        FAIL("expected an exception");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_params);
    }
}

TEST_CASE("config round trip and shipped fixtures") {
    const auto p = io::load_params(std::string(BSS_FIXTURE_DIR) + "/t2.json");
    CHECK(validate(p).ok());
    CHECK(p.lambda == std::vector<double>{1.0, 2.0});
    const auto again = io::params_from_json(io::to_json(p));
    CHECK(again.p_first == p.p_first);
    CHECK(again.xi == p.xi);

    const auto t3 = io::load_params(std::string(BSS_FIXTURE_DIR) + "/t3.json");
    CHECK(t3.mu == testing::t3().mu);
    CHECK(t3.p_first == testing::t3().p_first);
}

TEST_CASE("malformed configs raise config errors") {
    auto j = io::to_json(testing::t1());
    j["p_first"][0] = io::json::array({0.0});
    CHECK_THROWS_AS((void)io::params_from_json(j), Error);
    j = io::to_json(testing::t1());
    j.erase("xi");
    try {
        (void)io::params_from_json(j);
        FAIL("expected an exception");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
    }
}
