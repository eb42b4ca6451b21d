#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "panelspec/errors.hpp"
#include "panelspec/panel.hpp"
#include "panelspec/rng.hpp"

using namespace panelspec;

namespace {

const ColumnSchema kSchema{"unit", "time", "y", {"x"}};

PanelDataset parse(const std::string& text, const ColumnSchema& schema = kSchema) {
  std::istringstream in(text);
  return parse_long_csv(in, schema);
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const PanelError& e) {
    return e.kind();
  }
  FAIL("expected PanelError");
  return ErrorKind::Io;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const PanelError& e) {
    return e.what();
  }
  return {};
}

const char* kSixRows =
    "unit,time,y,x\n"
    "A,1,1.0,0.5\n"
    "A,2,2.0,1.5\n"
    "B,1,3.0,-0.5\n"
    "B,2,4.0,2.0\n"
    "C,1,5.0,1.0\n"
    "C,2,6.5,0.25\n";

}  // namespace

TEST_CASE("six-row file gives N=3, T=2, K=1") {
  const auto ds = parse(kSixRows);
  CHECK(ds.n_units() == 3);
  CHECK(ds.n_periods() == 2);
  CHECK(ds.n_regressors() == 1);
  CHECK(ds.unit_ids() == std::vector<std::string>{"A", "B", "C"});
  CHECK(ds.time_ids() == std::vector<std::string>{"1", "2"});
  CHECK(ds.y(2, 1) == 6.5);
  CHECK(ds.x(1, 1, 0) == 2.0);
  CHECK(ds.regressor_names() == std::vector<std::string>{"x"});
}

TEST_CASE("missing cell is reported with its coordinates") {
  const std::string text =
      "unit,time,y,x\nA,1,1,0.5\nA,2,2,1.5\nB,1,3,-0.5\nC,1,5,1\nC,2,6,0.25\n";
  auto fn = [&] { parse(text); };
  CHECK(kind_of(fn) == ErrorKind::MissingCell);
  CHECK(message_of(fn).find("(B, 2)") != std::string::npos);
}

TEST_CASE("duplicate cell, bad number and missing column") {
  CHECK(kind_of([] { parse("unit,time,y,x\nA,1,1,1\nA,1,2,2\nB,1,3,3\nB,2,4,5\n"); }) == ErrorKind::DuplicateCell);
  auto bad = [] { parse("unit,time,y,x\nA,1,1,1\nA,2,abc,2\nB,1,3,3\nB,2,4,5\n"); };
  CHECK(kind_of(bad) == ErrorKind::NonNumericValue);
  CHECK(message_of(bad).find("y") != std::string::npos);
  CHECK(kind_of([] { parse("unit,time,y,z\nA,1,1,1\n"); }) == ErrorKind::MissingColumn);
  CHECK(kind_of([] { parse("unit,time,y,x\nA,1,1,1\nA,2,,2\nB,1,3,3\nB,2,4,5\n"); }) == ErrorKind::NonNumericValue);
  CHECK(kind_of([] { parse("unit,time,y,x\nA,1,nan,1\nA,2,1,2\nB,1,3,3\nB,2,4,5\n"); }) ==
        ErrorKind::NonNumericValue);
}

TEST_CASE("too few units, periods or within degrees of freedom") {
  CHECK(kind_of([] { parse("unit,time,y,x\nA,1,1,1\nA,2,2,3\n"); }) == ErrorKind::TooFewUnitsOrPeriods);
  CHECK(kind_of([] { parse("unit,time,y,x\nA,1,1,1\nB,1,2,3\n"); }) == ErrorKind::TooFewUnitsOrPeriods);
  // N(T-1) = 2 is not > K = 2
  const ColumnSchema two{"unit", "time", "y", {"x", "z"}};
  CHECK(kind_of([&] { parse("unit,time,y,x,z\nA,1,1,1,2\nA,2,2,3,1\nB,1,2,3,0\nB,2,4,5,1\n", two); }) ==
        ErrorKind::TooFewUnitsOrPeriods);
}

TEST_CASE("constant regressor is rejected as an intercept") {
  CHECK(kind_of([] { parse("unit,time,y,x\nA,1,1,1\nA,2,2,1\nB,1,3,1\nB,2,4,1\n"); }) == ErrorKind::InterceptColumn);
}

TEST_CASE("schema errors") {
  CHECK(kind_of([] { parse("unit,time,y,x\nA,1,1,1\n", ColumnSchema{"unit", "time", "y", {}}); }) ==
        ErrorKind::InvalidSchema);
  CHECK(kind_of([] { parse("unit,time,y,x\nA,1,1,1\n", ColumnSchema{"unit", "time", "y", {"y"}}); }) ==
        ErrorKind::InvalidSchema);
  CHECK(kind_of([] { load_long_csv("/nonexistent/panel.csv", kSchema); }) == ErrorKind::Io);
}

TEST_CASE("quoted fields, CRLF line endings and extra columns") {
  const auto ds = parse(
      "note,unit,time,y,x\r\n"
      "\"a, b\",\"A\",1,1.0,0.5\r\n"
      "x,A,2,2.0,1.5\r\n"
      "x,B,1,3.0,-0.5\r\n"
      "x,B,2,4.0,2e0\r\n");
  CHECK(ds.n_units() == 2);
  CHECK(ds.x(1, 1, 0) == 2.0);
}

TEST_CASE("stacked ordering is unit-major") {
  const PanelDataset ds({"1", "2"}, {"1", "2"}, Eigen::Vector4d(1, 2, 3, 4), Eigen::Vector4d(0.1, 0.7, 0.2, 0.5));
  CHECK(ds.y_matrix() == (Eigen::Matrix2d() << 1, 2, 3, 4).finished());
  const auto st = to_stacked(ds);
  CHECK(st.y == Eigen::Vector4d(1, 2, 3, 4));
}

// N=2, T=2 would leave N(T-1) = K, which the dataset invariant rejects.
TEST_CASE("K=2 dataset gives an NT x 2 design in declared column order") {
  const ColumnSchema schema{"unit", "time", "y", {"b", "a"}};
  const auto ds =
      parse("unit,time,y,a,b\n1,1,1,10,20\n1,2,2,11,21\n2,1,3,12,22\n2,2,4,13,24\n3,1,0,9,25\n3,2,1,8,23\n", schema);
  REQUIRE(ds.x_stacked().rows() == 6);
  REQUIRE(ds.x_stacked().cols() == 2);
  CHECK(ds.x_stacked()(0, 0) == 20);
  CHECK(ds.x_stacked()(3, 1) == 13);
  CHECK(ds.regressor_names() == std::vector<std::string>{"b", "a"});
}

TEST_CASE("stacked round trip is the identity") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ds = oracle::random_panel(4 + static_cast<Index>(seed), 3, 2, seed);
    const auto back = from_stacked(to_stacked(ds), ds.unit_ids(), ds.time_ids(), ds.regressor_names());
    CHECK(back == ds);
  }
}

TEST_CASE("300-row file with N=100, T=3, K=2") {
  std::ostringstream out;
  out << "unit,time,y,x1,x2\n";
  RandomStream rs(5);
  for (int i = 0; i < 100; ++i) {
    for (int t = 1; t <= 3; ++t) out << "u" << i << ',' << t << ',' << rs.normal() << ',' << rs.normal() << ',' << rs.normal() << '\n';
  }
  std::istringstream in(out.str());
  const auto ds = parse_long_csv(in, ColumnSchema{"unit", "time", "y", {"x1", "x2"}});
  CHECK(ds.n_units() == 100);
  CHECK(ds.n_periods() == 3);
  CHECK(ds.n_regressors() == 2);
  CHECK(ds.n_obs() == 300);
}

TEST_CASE("loading is invariant to row order") {
  const auto ds = oracle::random_panel(7, 4, 2, 99);
  std::ostringstream out;
  write_long_csv(out, ds);
  std::vector<std::string> lines;
  std::istringstream split(out.str());
  std::string header, line;
  std::getline(split, header);
  while (std::getline(split, line)) lines.push_back(line);

  const ColumnSchema schema{"unit", "time", "y", {"x1", "x2"}};
  std::istringstream first(out.str());
  const auto reference = parse_long_csv(first, schema);
  RandomStream rs(3);
  for (int rep = 0; rep < 10; ++rep) {
    for (std::size_t i = lines.size() - 1; i > 0; --i) std::swap(lines[i], lines[rs.index(i + 1)]);
    std::string text = header + "\n";
    for (const auto& l : lines) text += l + "\n";
    std::istringstream in(text);
    CHECK(parse_long_csv(in, schema) == reference);
  }
}

TEST_CASE("numeric labels sort numerically, others lexicographically") {
  const auto ds = parse("unit,time,y,x\n10,2,1,1\n10,10,2,3\n9,2,3,4\n9,10,4,6\n");
  CHECK(ds.unit_ids() == std::vector<std::string>{"9", "10"});
  CHECK(ds.time_ids() == std::vector<std::string>{"2", "10"});
  CHECK(ds.y(0, 1) == 4);
}

TEST_CASE("written CSV reads back bit for bit") {
  const auto ds = oracle::random_panel(5, 3, 2, 17);
  std::ostringstream out;
  write_long_csv(out, ds);
  std::istringstream in(out.str());
  const auto back = parse_long_csv(in, ColumnSchema{"unit", "time", "y", {"x1", "x2"}});
  CHECK(back.y_stacked() == ds.y_stacked());
  CHECK(back.x_stacked() == ds.x_stacked());
}

TEST_CASE("constructor validates shapes and labels") {
  CHECK(kind_of([] { PanelDataset({"a", "b"}, {"1", "2"}, Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(1, 2, 4)); }) ==
        ErrorKind::DimensionMismatch);
  CHECK(kind_of([] {
          PanelDataset({"a", "a"}, {"1", "2"}, Eigen::Vector4d(1, 2, 3, 4), Eigen::Vector4d(1, 2, 4, 3));
        }) == ErrorKind::DuplicateCell);
}
