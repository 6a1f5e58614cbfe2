#include "helpers.hpp"

#include "intorder/dgp.hpp"
#include "intorder/errors.hpp"
#include "intorder/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace intorder;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

FunctionalPanel parse(const std::string& text, IngestConfig cfg = {})
{
    std::istringstream in(text);
    return parse_panel(in, cfg);
}

std::string parse_error(const std::string& text, IngestConfig cfg = {})
{
    try {
        parse(text, cfg);
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("logit of one half is zero", "[ingest]")
{
    IngestConfig cfg;
    cfg.transform = Transform::Logit;
    cfg.initialize = false;
    const auto p = parse("0.5,0.5\n0.5,0.5\n0.5,0.5\n", cfg);
    REQUIRE(p.n_rows() == 3);
    REQUIRE(p.grid_size() == 2);
    REQUIRE(p.values().isZero(0.0));
}

TEST_CASE("initialization subtracts the first curve", "[ingest]")
{
    const auto p = parse("1,2,3\n4,6,8\n0,0,1\n");
    Eigen::MatrixXd expected(3, 3);
    expected << 0, 0, 0, 3, 4, 5, -1, -2, -2;
    REQUIRE(p.values() == expected);
    REQUIRE(p.first_index() == 1);

    IngestConfig raw;
    raw.initialize = false;
    REQUIRE(parse("1,2,3\n4,6,8\n", raw).values()(0, 0) == 1.0);
}

TEST_CASE("transform roundtrips", "[transform]")
{
    for (Transform t : {Transform::Logit, Transform::Probit, Transform::Log, Transform::Identity}) {
        for (double x : {1e-6, 0.01, 0.2, 0.5, 0.77, 0.999}) {
            REQUIRE_THAT(inverse_transform(t, apply_transform(t, x)), WithinAbs(x, 1e-12));
        }
    }
    REQUIRE_THAT(apply_transform(Transform::Probit, 0.975), WithinAbs(1.959963984540054, 1e-12));
    REQUIRE_THROWS_AS(apply_transform(Transform::Logit, 1.0), DomainError);
    REQUIRE_THROWS_AS(apply_transform(Transform::Probit, 0.0), DomainError);
    REQUIRE_THROWS_AS(apply_transform(Transform::Log, -1.0), DomainError);
    REQUIRE(parse_transform("probit") == Transform::Probit);
    REQUIRE_FALSE(parse_transform("sqrt").has_value());
}

TEST_CASE("parse errors name their location", "[ingest]")
{
    REQUIRE_THAT(parse_error("1,2\n3,x\n"), ContainsSubstring("line 2, column 2"));
    REQUIRE_THAT(parse_error("1,2\n3\n"), ContainsSubstring("ragged row at line 2"));
    REQUIRE_THAT(parse_error("1,2\n"), ContainsSubstring("at least two rows"));
    REQUIRE_THAT(parse_error("1,,2\n1,2,3\n"), ContainsSubstring("line 1, column 2"));

    IngestConfig logit;
    logit.transform = Transform::Logit;
    REQUIRE_THAT(parse_error("0.2,0.3\n0.4,1.5\n", logit), ContainsSubstring("line 2, column 2"));
}

TEST_CASE("headers, delimiters, blank lines and scalar series", "[ingest]")
{
    IngestConfig cfg;
    cfg.has_header = true;
    cfg.delimiter = ';';
    cfg.initialize = false;
    const auto p = parse("m1;m2\n\n 1 ; 2 \n3;4\r\n", cfg);
    REQUIRE(p.n_rows() == 2);
    REQUIRE(p.values()(1, 1) == 4.0);

    const auto s = parse("1\n2\n4\n");
    REQUIRE(s.grid().size() == 1);
    REQUIRE(s.grid().weights()(0) == 1.0);
    REQUIRE(s.values()(2, 0) == 3.0);
}

TEST_CASE("CSV writes and reads back exactly", "[roundtrip]")
{
    const auto p = testing::random_panel(3, 17, 6, 1e3);
    std::ostringstream out;
    write_panel_csv(out, p);
    IngestConfig cfg;
    cfg.initialize = false;
    const auto back = parse(out.str(), cfg);
    REQUIRE(back.values() == p.values());

    const auto path = std::filesystem::temp_directory_path() / "intorder-io-roundtrip.csv";
    write_panel_csv(path, p);
    cfg.path = path;
    REQUIRE(ingest(cfg).values() == p.values());
    std::filesystem::remove(path);

    cfg.path = "/nonexistent/dir/panel.csv";
    REQUIRE_THROWS_AS(ingest(cfg), IoError);
}

TEST_CASE("JSON reports carry their schema", "[json]")
{
    TestReport r;
    r.order = 1;
    r.statistic = 1.82;
    r.p_value = 0.08;
    r.limit_reps = 200000;
    const auto j = to_json(r);
    REQUIRE(j["schema"] == kTestReportSchema);
    REQUIRE(j["decision"] == "accept");
    REQUIRE(j["p_value_floor"] == 5e-6);
    REQUIRE(j["direction_source"] == "levels");

    SequentialReport s;
    s.interval = Interval::One;
    s.d_seq = 1;
    s.stages = {r, r};
    const auto js = to_json(s);
    REQUIRE(js["schema"] == kSequentialSchema);
    REQUIRE(js["interval"] == "{1}");
    REQUIRE(js["stages"].size() == 2);

    DgpConfig cfg;
    cfg.T = 20;
    cfg.G = 5;
    cfg.seed = 9;
    const auto real = generate(cfg);
    const auto jr = to_json(real);
    REQUIRE(jr["schema"] == kRealizationSchema);
    REQUIRE(jr["config"]["seed"] == 9);
    REQUIRE(jr["arma"].size() == 25);
    REQUIRE(jr["coordinates"] == 25);
}
