#include <cstdlib>
#include <fstream>
#include <iterator>

#include "crashbound/dataio.hpp"
#include "crashbound/error.hpp"

namespace crashbound {

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
         std::uint32_t{b[at + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace

IdxArray parse_idx(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw ParseError("truncated IDX magic word", bytes.size());
  IdxArray a;
  a.magic = read_be32(bytes, 0);
  // Only unsigned-byte payloads (type code 0x08) are supported.
  if ((a.magic >> 16) != 0 || ((a.magic >> 8) & 0xff) != 0x08 || (a.magic & 0xff) == 0)
    throw ParseError("unsupported IDX magic word", 0);
  const std::size_t n_dims = a.magic & 0xff;
  const std::size_t header = 4 + 4 * n_dims;
  if (bytes.size() < header) throw ParseError("truncated IDX header", bytes.size());
  std::size_t expected = 1;
  for (std::size_t d = 0; d < n_dims; ++d) {
    a.dims.push_back(read_be32(bytes, 4 + 4 * d));
    expected *= a.dims.back();
  }
  const std::size_t available = bytes.size() - header;
  if (available < expected) throw ParseError("truncated IDX payload", bytes.size());
  if (available > expected) throw ParseError("trailing bytes after IDX payload", header + expected);
  a.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return a;
}

std::vector<std::uint8_t> serialize_idx(const IdxArray& a) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + 4 * a.dims.size() + a.payload.size());
  write_be32(out, a.magic);
  for (auto d : a.dims) write_be32(out, d);
  out.insert(out.end(), a.payload.begin(), a.payload.end());
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

LabeledDataset dataset_from_idx(const IdxArray& images, const IdxArray& labels, std::optional<std::size_t> limit) {
  if (images.magic != kIdxImagesMagic) throw ParseError("images file is not a 3-D unsigned-byte IDX array", 0);
  if (labels.magic != kIdxLabelsMagic) throw ParseError("labels file is not a 1-D unsigned-byte IDX array", 0);
  const std::size_t count = images.dims[0];
  if (labels.dims[0] != count)
    throw ParseError("image count " + std::to_string(count) + " does not match label count " +
                         std::to_string(labels.dims[0]),
                     4);
  const std::size_t n = limit ? std::min(*limit, count) : count;
  const std::size_t dim = std::size_t{images.dims[1]} * images.dims[2];
  LabeledDataset d;
  d.inputs = Matrix(n, dim);
  auto values = d.inputs.values();
  for (std::size_t i = 0; i < n * dim; ++i) values[i] = images.payload[i] / 255.0;
  d.labels.assign(labels.payload.begin(), labels.payload.begin() + static_cast<std::ptrdiff_t>(n));
  return d;
}

LabeledDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                        std::optional<std::size_t> limit) {
  return dataset_from_idx(parse_idx(read_file(images)), parse_idx(read_file(labels)), limit);
}

std::optional<MnistPaths> find_mnist(const std::filesystem::path& dir) {
  std::filesystem::path root = dir;
  if (root.empty()) {
    const char* env = std::getenv("MNIST_DIR");
    if (!env || !*env) return std::nullopt;
    root = env;
  }
  MnistPaths p{root / "train-images-idx3-ubyte", root / "train-labels-idx1-ubyte", root / "t10k-images-idx3-ubyte",
               root / "t10k-labels-idx1-ubyte"};
  for (const auto& f : {p.train_images, p.train_labels, p.test_images, p.test_labels})
    if (!std::filesystem::is_regular_file(f)) return std::nullopt;
  return p;
}

}  // namespace crashbound
