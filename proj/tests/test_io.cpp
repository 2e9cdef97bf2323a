#include <filesystem>
#include <fstream>

#include "helpers.hpp"

using namespace psdcone;
using namespace psdcone::testing;
using io::json;

namespace {

std::string data_file(const std::string& name) { return std::string(PSDCONE_DATA_DIR) + "/" + name; }

std::string parse_error_message(const std::string& text) {
  try {
    io::parse_matrix_json(json::parse(text));
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ParseMatrix, Examples) {
  const auto m = io::parse_matrix_json(json::parse(R"({"backend":"exact","rows":1,"cols":1,"data":[[["1/2","0/1"]]]})"));
  ASSERT_TRUE(std::holds_alternative<ExactMatrix>(m));
  EXPECT_EQ(std::get<ExactMatrix>(m)(0, 0), q(1, 2));

  const auto ragged = parse_error_message(
      R"({"backend":"exact","rows":2,"cols":2,"data":[[["1","0"],["0","0"]],[["1","0"]]]})");
  EXPECT_NE(ragged.find("data[1]"), std::string::npos) << ragged;

  const auto nan = parse_error_message(R"({"backend":"float","rows":1,"cols":1,"data":[[["NaN",0]]]})");
  EXPECT_FALSE(nan.empty());
}

TEST(ParseMatrix, NonFiniteFloatRejected) {
  json j;
  j["backend"] = "float";
  j["rows"] = 1;
  j["cols"] = 1;
  j["data"] = json::array({json::array({json::array({std::numeric_limits<double>::infinity(), 0.0})})});
  EXPECT_THROW(io::parse_matrix_json(j), ParseError);
}

TEST(ParseMatrix, ErrorsNameTheField) {
  EXPECT_NE(parse_error_message(R"({"rows":1,"cols":1,"data":[[["1","0"]]]})").find("backend"), std::string::npos);
  EXPECT_NE(parse_error_message(R"({"backend":"exact","cols":1,"data":[[["1","0"]]]})").find("rows"),
            std::string::npos);
  EXPECT_NE(parse_error_message(R"({"backend":"exact","rows":1,"cols":1})").find("data"), std::string::npos);
  EXPECT_NE(parse_error_message(R"({"backend":"quad","rows":1,"cols":1,"data":[[["1","0"]]]})").find("backend"),
            std::string::npos);
  const auto bad = parse_error_message(R"({"backend":"exact","rows":1,"cols":2,"data":[[["1","0"],["1/x","0"]]]})");
  EXPECT_NE(bad.find("data[0][1]"), std::string::npos) << bad;
  EXPECT_NE(parse_error_message(R"({"backend":"exact","rows":1,"cols":1,"data":[[["1/0","0"]]]})").find("denominator"),
            std::string::npos);
  EXPECT_FALSE(parse_error_message(R"({"backend":"exact","rows":2,"cols":1,"data":[[["1","0"]]]})").empty());
  EXPECT_FALSE(parse_error_message(R"({"backend":"exact","rows":1,"cols":1,"data":[[["6/-4","0"]]]})").empty());
}

TEST(ParseMatrix, CanonicalizesRationals) {
  const auto m = io::parse_matrix_json(json::parse(R"({"backend":"exact","rows":1,"cols":1,"data":[[["-6/4","+10/20"]]]})"));
  EXPECT_EQ(io::matrix_to_json(m).dump(), R"({"backend":"exact","rows":1,"cols":1,"data":[[["-3/2","1/2"]]]})");
}

TEST(ParseMatrix, ExactRoundTripIsByteIdentical) {
  for (Seed s = 0; s < 30; ++s) {
    const auto m = random_psd<Exact>(3, s % 4, s).matrix() * q(static_cast<long>(s) + 1, 7);
    const std::string once = io::matrix_to_json(m).dump(2);
    const auto parsed = io::parse_matrix_json(json::parse(once));
    EXPECT_EQ(std::get<ExactMatrix>(parsed), m);
    EXPECT_EQ(io::matrix_to_json(parsed).dump(2), once);
  }
}

TEST(ParseMatrix, FloatRoundTripIsBitExact) {
  const auto m = random_psd<Approx>(3, 2, 5).matrix();
  const auto parsed = io::parse_matrix_json(json::parse(io::matrix_to_json(m).dump()));
  EXPECT_EQ(std::get<ApproxMatrix>(parsed), m);
}

TEST(ParseMatrix, PackagedFiles) {
  EXPECT_EQ(io::as_backend<Exact>(io::parse_matrix_file(data_file("diag10.json"))), ediag({1, 0}));
  EXPECT_EQ(io::as_backend<Exact>(io::parse_matrix_file(data_file("ones2.json"))), ones(2));
  EXPECT_THROW(io::parse_matrix_file(data_file("does_not_exist.json")), ParseError);
}

TEST(RelationReportJson, FieldOrderAndNull) {
  const auto r = analyze_pair(epsd(ediag({1, 0})), epsd(ediag({0, 1})));
  const auto j = io::to_json(r);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  const std::vector<std::string> expected{"leq_ab",  "leq_ba", "abs_cont_ab", "abs_cont_ba",
                                          "singular", "same_range_class", "min_domination_constant",
                                          "rank_a",  "rank_b", "dim_range_sum", "dim_range_intersection"};
  EXPECT_EQ(keys, expected);
  EXPECT_TRUE(j["min_domination_constant"].is_null());
  EXPECT_TRUE(j["singular"].get<bool>());
}

TEST(SpecJson, RoundTrip) {
  const auto t = random_semilinear<Exact>(3, 4, Flavor::conjugate);
  const auto specs = {PreserverSpec::congruence(t), PreserverSpec::form_iv(t, ZFamily{12, {}}), make_wild_map(3, 3),
                      PreserverSpec::composite({PreserverSpec::congruence(t), make_wild_map(8, 3)})};
  for (const auto& s : specs) {
    const auto j = io::to_json(s);
    const auto back = io::parse_spec(json::parse(j.dump()));
    EXPECT_EQ(io::to_json(back).dump(), j.dump());
    EXPECT_EQ(back.kind, s.kind);
    EXPECT_EQ(back.dim, s.dim);
  }
}

TEST(SpecJson, PackagedSpecsParse) {
  for (const char* name : {"congruence3.json", "form_iv3.json", "wild3.json", "composite3.json"}) {
    const auto s = io::parse_spec(io::read_json_file(data_file(name)));
    EXPECT_EQ(s.dim, 3u) << name;
  }
}

TEST(SpecJson, Errors) {
  EXPECT_THROW(io::parse_spec(json::parse(R"({"T":1})")), ParseError);
  EXPECT_THROW(io::parse_spec(json::parse(R"({"kind":"mystery"})")), ParseError);
  EXPECT_THROW(io::parse_spec(json::parse(R"({"kind":"composite","parts":[]})")), ParseError);
  const json singular = {{"kind", "congruence"}, {"T", io::matrix_to_json(ones(2))}};
  EXPECT_THROW(io::parse_spec(singular), ParseError);
  const json bad_flavor = {{"kind", "congruence"}, {"T", io::matrix_to_json(ediag({1, 1}))}, {"flavor", "sideways"}};
  EXPECT_THROW(io::parse_spec(bad_flavor), Error);
}

TEST(LineTable, SwapCounterexample) {
  const auto m = io::parse_line_table(io::read_json_file(data_file("swap_e1_e2.json")));
  EXPECT_EQ(m.dim, 3u);
  EXPECT_EQ(m(Line::basis(3, 0)), Line::basis(3, 1));
  EXPECT_EQ(m(Line::basis(3, 1)), Line::basis(3, 0));
  EXPECT_EQ(m(Line::basis(3, 2)), Line::basis(3, 2));
  EXPECT_FALSE(verify_projectivity(m, 50, 1).passed);
}

TEST(SemilinearJson, Shape) {
  const auto t = random_semilinear<Exact>(2, 1, Flavor::conjugate);
  const auto j = io::to_json(t);
  EXPECT_EQ(j["flavor"], "conjugate");
  EXPECT_EQ(std::get<ExactMatrix>(io::parse_matrix_json(j["T"])), t.matrix());
}
