#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "crashbound/network.hpp"
#include "crashbound/trainer.hpp"

namespace crashbound {

// ---------------------------------------------------------------------------
// IDX (big-endian MNIST container)

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// Raw IDX file: magic word, dimension sizes and payload bytes, exactly as
/// stored.
struct IdxArray {
  std::uint32_t magic = 0;
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> payload;

  bool operator==(const IdxArray&) const = default;
};

/// Parses an unsigned-byte IDX buffer. Throws ParseError with the offending
/// byte offset on a bad magic word, truncated header, or payload length that
/// disagrees with the dimensions.
IdxArray parse_idx(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_idx(const IdxArray& a);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Loads an images/labels pair, scaling pixels by 1/255. `limit` keeps only
/// the first items.
LabeledDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                        std::optional<std::size_t> limit = std::nullopt);

/// Builds a dataset from parsed images and labels (counts must match).
LabeledDataset dataset_from_idx(const IdxArray& images, const IdxArray& labels,
                                std::optional<std::size_t> limit = std::nullopt);

struct MnistPaths {
  std::filesystem::path train_images, train_labels, test_images, test_labels;
};

/// Standard MNIST file names under `dir`, or under $MNIST_DIR when `dir` is
/// empty. Returns nullopt if the directory or any file is missing.
std::optional<MnistPaths> find_mnist(const std::filesystem::path& dir = {});

// ---------------------------------------------------------------------------
// Network documents

inline constexpr int kNetworkDocumentVersion = 1;

nlohmann::json save_network(const Network& net);
/// Throws SchemaError on unknown fields, a wrong version or an invalid network.
Network load_network(const nlohmann::json& doc);

void save_network_file(const Network& net, const std::filesystem::path& path);
Network load_network_file(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// CSV results

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
/// Inverse of format_double; throws DomainError on malformed text.
double parse_double(std::string_view text);

/// One line of experiment output. Omega columns are empty when no omega was
/// measured (Erf-only rows); erf columns are empty when no estimate was made.
struct ResultRow {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string activation;
  double lipschitz = 0.0;
  std::size_t depth = 0;
  std::vector<std::size_t> widths;
  std::size_t f = 0;
  std::optional<double> omega_av, omega_mav, omega_max, omega_std;
  std::optional<double> erf_av, erf_max;
  std::optional<std::uint64_t> patterns, inputs;
  std::string mode;
};

inline constexpr std::string_view kResultsHeader =
    "experiment,seed,activation,K,L,widths,f,omega_av,omega_mav,omega_max,omega_std,erf_av,erf_max,patterns,inputs,mode";

/// Header line followed by one line per row in order.
void write_results(std::ostream& out, std::span<const ResultRow> rows);
std::string result_line(const ResultRow& row);

/// Generic table writer; throws DomainError if a row's arity differs from
/// the header's.
void write_table(std::ostream& out, std::span<const std::string> header,
                 std::span<const std::vector<std::string>> rows);

/// Splits one CSV line on commas (fields never contain commas or quotes).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace crashbound
