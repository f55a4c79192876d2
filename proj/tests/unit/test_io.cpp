#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "helpers.hpp"
#include "scatterlab/io.hpp"

using namespace scatterlab;

namespace {

FieldSample make(const Grid& g, FieldShape shape, bool real) {
  FieldSample f(g, shape, real);
  Rng rng({5, 0});
  for (auto& v : f.values()) v = {rng.normal(), real ? 0.0 : rng.normal()};
  return f;
}

void expect_same(const FieldSample& a, const FieldSample& b) {
  EXPECT_TRUE(a.grid() == b.grid());
  EXPECT_EQ(a.components(), b.components());
  EXPECT_EQ(a.real_valued(), b.real_valued());
  ASSERT_EQ(a.value_count(), b.value_count());
  for (std::size_t i = 0; i < a.value_count(); ++i) EXPECT_EQ(a.values()[i], b.values()[i]);
}

}  // namespace

TEST(Rwf1, RoundTripsBitExact) {
  const std::array<std::size_t, 3> n{8, 9, 10};
  const Grid g3(Box::make(std::vector<double>{-1.0, 0.0, 0.5}, std::vector<double>{1.0, 0.3, 2.0}), n);
  for (const auto& f : {make(test::square_grid(16), FieldShape::scalar(2), true),
                        make(test::square_grid(16), FieldShape::vector(2), false),
                        make(g3, FieldShape::matrix(3), true)}) {
    expect_same(io::decode_field(io::encode_field(f)), f);
  }
}

TEST(Rwf1, HeaderLayout) {
  const FieldSample f = make(test::square_grid(8), FieldShape::vector(2), false);
  const auto bytes = io::encode_field(f);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "RWF1");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 2);
  EXPECT_EQ(bytes[6], 2);
  for (int i = 7; i < 12; ++i) EXPECT_EQ(bytes[i], 0);
  std::uint64_t nx = 0;
  std::memcpy(&nx, bytes.data() + 12, 8);
  EXPECT_EQ(nx, 8u);
  EXPECT_EQ(bytes.size(), 12 + 2 * 24 + 64 * 2 * 16u);
}

TEST(Rwf1, RejectsCorruptInput) {
  const auto good = io::encode_field(make(test::square_grid(8), FieldShape::scalar(2), true));
  auto bad = good;
  bad[0] = 'X';
  test::expect_error(ErrorKind::FormatError, [&] { io::decode_field(bad); });
  bad = good;
  bad[4] = 7;
  test::expect_error(ErrorKind::FormatError, [&] { io::decode_field(bad); });
  bad = good;
  bad[9] = 1;
  test::expect_error(ErrorKind::FormatError, [&] { io::decode_field(bad); });
  bad = good;
  bad.pop_back();
  test::expect_error(ErrorKind::FormatError, [&] { io::decode_field(bad); });
  test::expect_error(ErrorKind::IoError, [] { io::read_field("/nonexistent/field.rwf"); });
}

TEST(Rwf1, FileRoundTripAndDescribe) {
  const auto dir = std::filesystem::temp_directory_path() / "scatterlab_io_test";
  std::filesystem::create_directories(dir);
  const FieldSample f = make(test::square_grid(8), FieldShape::scalar(2), false);
  io::write_field(dir / "f.rwf", f);
  expect_same(io::read_field(dir / "f.rwf"), f);
  const auto h = io::read_header(dir / "f.rwf");
  EXPECT_TRUE(h.complex_valued);
  EXPECT_EQ(h.data_bytes(), 64u * 16u);
  EXPECT_NE(io::describe(h).find("dims: 8 8"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Csv, FormatsAndEscapes) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(io::format_double(1.0 / 3.0)), 1.0 / 3.0);
  const auto path = std::filesystem::temp_directory_path() / "scatterlab_csv_test.csv";
  io::write_csv(path, {"a", "b"}, {{"1", "x,y"}, {"2", "say \"hi\""}});
  std::ifstream in(path);
  const std::string text((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(text, "a,b\n1,\"x,y\"\n2,\"say \"\"hi\"\"\"\n");
  std::filesystem::remove(path);
}
