#include <gtest/gtest.h>

#include "eoptd/io.hpp"

using namespace eoptd;

TEST(DesignJson, RoundTripCube) {
  auto d = expand_design(minimal_support_design(3));
  auto j = design_to_json(d);
  EXPECT_EQ(j["k"], 3);
  EXPECT_EQ(j["space"], "cube");
  auto back = design_from_json(j);
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t p = 0; p < d.size(); ++p) {
    EXPECT_EQ(back.weights()[p].to_rational(), d.weights()[p]);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(back.points()[p][i], QuadraticSurd(d.points()[p][i]));
  }
}

TEST(DesignJson, RoundTripBall) {
  auto d = optimal_ball_design(3);
  auto j = design_to_json(d);
  EXPECT_EQ(j["points"][0][0]["inv_sqrt_k"], true);
  auto back = design_from_json(Json::parse(j.dump()));
  EXPECT_EQ(back.points(), d.points());
  EXPECT_EQ(back.weights(), d.weights());
}

TEST(DesignJson, Rejects) {
  auto good = design_to_json(expand_design(minimal_support_design(2)));
  auto bad = good;
  bad["weights"][0] = 0.1;
  EXPECT_THROW(design_from_json(bad), ParseError);
  bad = good;
  bad["points"][0][0] = 1;
  EXPECT_THROW(design_from_json(bad), ParseError);
  bad = good;
  bad.erase("space");
  EXPECT_THROW(design_from_json(bad), ParseError);
  bad = good;
  bad["space"] = "simplex";
  EXPECT_THROW(design_from_json(bad), ParseError);
  bad = good;
  bad["points"][0][0] = "3/2";
  EXPECT_THROW(design_from_json(bad), ParseError);
  bad = good;
  bad["points"][0][0] = {{"sign", 2}, {"inv_sqrt_k", true}};
  EXPECT_THROW(design_from_json(bad), ParseError);
  bad = good;
  bad["weights"][0] = "1/x";
  EXPECT_THROW(design_from_json(bad), ParseError);
  EXPECT_THROW(read_design_file("/nonexistent/design.json"), ParseError);
}

TEST(Tables, RowsFormat) {
  EXPECT_EQ(table1_row(minimal_support_design(3)), "3,-,1,3,-,3/5,2/5,13,1/5");
  EXPECT_EQ(table1_row(minimal_support_design(5)), "5,0,3,5,2/15,2/3,1/5,73,1/5");
  EXPECT_EQ(diophantine_rows(4), (std::vector<std::string>{"4,0,3,1/5,4/5,24"}));
  EXPECT_TRUE(diophantine_rows(6).empty());
  EXPECT_EQ(std::string(table2_header()), "k,q,l,s,xi_E0,xi_Es,xi_Ek,N,lambda_min");
}

TEST(Report, JsonFields) {
  VerificationReport r;
  r.lambda_min = "1/5";
  r.pass = true;
  auto j = report_to_json(r);
  EXPECT_EQ(j["lambda_min"], "1/5");
  EXPECT_EQ(j["pass"], true);
  EXPECT_FALSE(j.contains("notes"));
}
