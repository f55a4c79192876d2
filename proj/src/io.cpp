#include "scatterlab/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace scatterlab::io {

namespace {

constexpr char kMagic[4] = {'R', 'W', 'F', '1'};
constexpr std::size_t kPreamble = 12;

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

void put_f64(std::vector<unsigned char>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw Error(ErrorKind::FormatError, "RWF1 data truncated");
  }
  unsigned char u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes_[pos_ + b]) << (8 * b);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 0;
};

FieldHeader parse_header(Reader& r) {
  char magic[4];
  for (char& c : magic) c = static_cast<char>(r.u8());
  if (std::memcmp(magic, kMagic, 4) != 0) throw Error(ErrorKind::FormatError, "bad magic, expected RWF1");
  FieldHeader h;
  const unsigned dtype = r.u8();
  if (dtype > 1) throw Error(ErrorKind::FormatError, "unknown dtype " + std::to_string(dtype));
  h.complex_valued = dtype == 1;
  h.ndim = r.u8();
  h.components = r.u8();
  for (int i = 0; i < 5; ++i) {
    if (r.u8() != 0) throw Error(ErrorKind::FormatError, "reserved header bytes must be zero");
  }
  if (h.ndim != 2 && h.ndim != 3) throw Error(ErrorKind::FormatError, "ndim must be 2 or 3");
  if (h.components < 1) throw Error(ErrorKind::FormatError, "component count must be positive");
  for (int i = 0; i < h.ndim; ++i) h.dims.push_back(r.u64());
  for (int i = 0; i < h.ndim; ++i) h.lower.push_back(r.f64());
  for (int i = 0; i < h.ndim; ++i) h.upper.push_back(r.f64());
  return h;
}

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::filesystem::path& path, const char* data, std::size_t n) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out.write(data, static_cast<std::streamsize>(n));
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::size_t FieldHeader::data_bytes() const {
  std::size_t n = static_cast<std::size_t>(components) * (complex_valued ? 16 : 8);
  for (auto d : dims) n *= d;
  return n;
}

std::vector<unsigned char> encode_field(const FieldSample& field) {
  const Grid& g = field.grid();
  const int d = g.dim();
  std::vector<unsigned char> out(kMagic, kMagic + 4);
  out.push_back(field.real_valued() ? 0 : 1);
  out.push_back(static_cast<unsigned char>(d));
  out.push_back(static_cast<unsigned char>(field.components()));
  out.insert(out.end(), 5, 0);
  for (int i = 0; i < d; ++i) put_u64(out, g.n(i));
  for (int i = 0; i < d; ++i) put_f64(out, g.box().lower[i]);
  for (int i = 0; i < d; ++i) put_f64(out, g.box().upper[i]);
  out.reserve(out.size() + field.value_count() * (field.real_valued() ? 8 : 16));
  for (const cplx& z : field.values()) {
    put_f64(out, z.real());
    if (!field.real_valued()) put_f64(out, z.imag());
  }
  return out;
}

FieldSample decode_field(const std::vector<unsigned char>& bytes) {
  Reader r(bytes);
  const FieldHeader h = parse_header(r);
  if (r.remaining() != h.data_bytes()) {
    throw Error(ErrorKind::FormatError, "payload size " + std::to_string(r.remaining()) + " does not match header (" +
                                            std::to_string(h.data_bytes()) + ")");
  }
  std::vector<std::size_t> n(h.dims.begin(), h.dims.end());
  const Grid grid(Box::make(h.lower, h.upper), n);
  FieldSample f(grid, FieldShape::from_components(h.components, h.ndim), !h.complex_valued);
  for (cplx& z : f.values()) {
    const double re = r.f64();
    const double im = h.complex_valued ? r.f64() : 0.0;
    z = {re, im};
  }
  return f;
}

void write_field(const std::filesystem::path& path, const FieldSample& field) {
  const auto bytes = encode_field(field);
  dump(path, reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

FieldSample read_field(const std::filesystem::path& path) { return decode_field(slurp(path)); }

FieldHeader read_header(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  Reader r(bytes);
  FieldHeader h = parse_header(r);
  if (r.remaining() != h.data_bytes()) throw Error(ErrorKind::FormatError, "payload size does not match header");
  return h;
}

std::string describe(const FieldHeader& h) {
  std::ostringstream os;
  os << "format: RWF1\n";
  os << "dtype: " << (h.complex_valued ? "complex128" : "float64") << "\n";
  os << "ndim: " << h.ndim << "\n";
  os << "components: " << h.components << "\n";
  os << "dims:";
  for (auto d : h.dims) os << ' ' << d;
  os << "\nlower:";
  for (double v : h.lower) os << ' ' << format_double(v);
  os << "\nupper:";
  for (double v : h.upper) os << ' ' << format_double(v);
  os << "\n";
  return os.str();
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path, const CsvRow& header, const std::vector<CsvRow>& rows) {
  std::ostringstream os;
  auto line = [&](const CsvRow& row) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
    os << "\n";
  };
  line(header);
  for (const auto& row : rows) line(row);
  const std::string s = os.str();
  dump(path, s.data(), s.size());
}

}  // namespace scatterlab::io
