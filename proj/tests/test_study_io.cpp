#include <gtest/gtest.h>

#include <sstream>

#include "lpwg/study_io.hpp"

namespace lpwg {
namespace {

StudyOutput sample() {
  StudyOutput out;
  out.version = "9.9.9";
  out.config = {{"problem", "const"}, {"p", "2"}, {"k", "2"}, {"l", "1"}};
  out.table.problem = "const";
  out.table.p = 2;
  for (int i = 0; i < 3; ++i) {
    ErrorReport r;
    r.n = 4 << i;
    r.h = std::sqrt(2.0) / r.n;
    r.e_L = 1e-2 / std::pow(8.0, i);
    r.e_W1 = 1e-1 / std::pow(4.0, i);
    r.e_W2 = 1.0 / std::pow(2.0, i);
    r.iterations = 10 * i;
    r.r1 = 1e-12;
    r.r2 = 2e-12;
    r.r3 = 3e-15;
    r.wall_time = 0.25 * i;
    r.converged = i != 2;
    out.table.reports.push_back(r);
  }
  return out;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

TEST(FormatSci, SixSignificantDigits) {
  EXPECT_EQ(format_sci(1.2345678e-3), "1.23457e-03");
  EXPECT_EQ(format_sci(0.0), "0.00000e+00");
  EXPECT_EQ(format_sci(-2.5), "-2.50000e+00");
}

TEST(Csv, Layout) {
  std::ostringstream os;
  write_csv(os, sample());
  const auto ls = lines(os.str());
  ASSERT_EQ(ls.size(), 1u + 4u + 1u + 3u);
  EXPECT_EQ(ls[0], "# lpwg_version=9.9.9");
  EXPECT_EQ(ls[1], "# problem=const");
  EXPECT_EQ(ls[5], "n,h,e_L,rate_L,e_W1,rate_W1,e_W2,rate_W2,iters,r1,r2,r3,wall_time,converged");
  EXPECT_EQ(ls[6].substr(0, 2), "4,");
  EXPECT_NE(ls[6].find(",,"), std::string::npos);  // first row has blank rates
  EXPECT_NE(ls[7].find(",3.00000e+00,"), std::string::npos);
  EXPECT_NE(ls[7].find(",2.00000e+00,"), std::string::npos);
  EXPECT_EQ(ls[8].back(), '0');
}

TEST(Csv, RoundTrip) {
  const StudyOutput in = sample();
  std::ostringstream os;
  write_csv(os, in);
  std::istringstream is(os.str());
  const StudyOutput back = read_csv(is);
  EXPECT_EQ(back.version, in.version);
  EXPECT_EQ(back.config, in.config);
  EXPECT_EQ(back.table.problem, "const");
  EXPECT_EQ(back.table.p, 2);
  ASSERT_EQ(back.table.reports.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const ErrorReport &a = in.table.reports[i], &b = back.table.reports[i];
    EXPECT_EQ(a.n, b.n);
    EXPECT_NEAR(a.e_L, b.e_L, 1e-5 * a.e_L);
    EXPECT_NEAR(a.e_W2, b.e_W2, 1e-5 * a.e_W2);
    EXPECT_EQ(a.iterations, b.iterations);
    EXPECT_EQ(a.converged, b.converged);
    EXPECT_NEAR(a.wall_time, b.wall_time, 1e-5);
  }
  std::ostringstream again;
  write_csv(again, back);
  EXPECT_EQ(again.str(), os.str());
}

TEST(Csv, OmittedWallTimeRoundTrips) {
  StudyOutput in = sample();
  in.omit_wall_time = true;
  std::ostringstream os;
  write_csv(os, in);
  std::istringstream is(os.str());
  const StudyOutput back = read_csv(is);
  EXPECT_TRUE(back.omit_wall_time);
  EXPECT_EQ(back.table.reports[1].wall_time, 0.0);
}

TEST(Csv, RejectsMalformedInput) {
  std::istringstream empty("");
  EXPECT_THROW(read_csv(empty), std::runtime_error);
  std::istringstream header("n,h\n");
  EXPECT_THROW(read_csv(header), std::runtime_error);
  std::ostringstream os;
  write_csv(os, sample());
  std::string s = os.str();
  s.replace(s.rfind("1.00000e-12"), 11, "abc");
  std::istringstream bad(s);
  EXPECT_THROW(read_csv(bad), std::runtime_error);
}

TEST(Markdown, Layout) {
  std::ostringstream os;
  write_markdown(os, sample());
  const auto ls = lines(os.str());
  ASSERT_EQ(ls.size(), 2u + 2u + 3u);
  EXPECT_EQ(ls[0].rfind("<!-- lpwg 9.9.9", 0), 0u);
  EXPECT_NE(ls[2].find("||u-u_h||_{0,2}"), std::string::npos);
  EXPECT_EQ(ls[3], "|---|---|---|---|---|---|---|---|---|");
  EXPECT_NE(ls[5].find("| 3.00 |"), std::string::npos);
  EXPECT_NE(ls[5].find("| 2.00 |"), std::string::npos);
  EXPECT_NE(ls[5].find("| 1.00 |"), std::string::npos);
  EXPECT_NE(ls[6].find("| no |"), std::string::npos);
}

}  // namespace
}  // namespace lpwg
