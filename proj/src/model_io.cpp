#include "wrlda/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "wrlda/errors.hpp"

namespace wrlda {

namespace {

constexpr std::array<char, 8> kMagic = {'W', 'R', 'L', 'D', 'A', 'M', 'D', 'L'};
// Guards against absurd allocations from corrupt headers.
constexpr std::uint64_t kMaxEntries = std::uint64_t{1} << 32;

template <typename UInt>
void put_uint(std::ostream& out, UInt value) {
  std::array<char, sizeof(UInt)> bytes;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

void put_double(std::ostream& out, double value) {
  put_uint(out, std::bit_cast<std::uint64_t>(value));
}

void put_string(std::ostream& out, const std::string& s) {
  put_uint(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void read_exact(std::istream& in, char* data, std::size_t size) {
  in.read(data, static_cast<std::streamsize>(size));
  if (static_cast<std::size_t>(in.gcount()) != size) throw DataError("model file is truncated");
}

template <typename UInt>
UInt get_uint(std::istream& in) {
  std::array<unsigned char, sizeof(UInt)> bytes;
  read_exact(in, reinterpret_cast<char*>(bytes.data()), bytes.size());
  UInt value = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) value |= static_cast<UInt>(bytes[i]) << (8 * i);
  return value;
}

double get_double(std::istream& in) { return std::bit_cast<double>(get_uint<std::uint64_t>(in)); }

std::string get_string(std::istream& in) {
  const auto size = get_uint<std::uint32_t>(in);
  std::string s(size, '\0');
  read_exact(in, s.data(), size);
  return s;
}

}  // namespace

void write_model(std::ostream& out, const ModelParams& params, const Vocabulary& vocab) {
  const auto k = params.num_topics();
  const auto v = params.vocab_size();
  if (vocab.size() != v) throw ValidationError("vocabulary size does not match beta");
  out.write(kMagic.data(), kMagic.size());
  put_uint(out, kModelFormatVersion);
  put_uint(out, static_cast<std::uint64_t>(k));
  put_uint(out, static_cast<std::uint64_t>(v));
  for (std::size_t t = 0; t < k; ++t) put_double(out, params.alpha[static_cast<Eigen::Index>(t)]);
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t w = 0; w < v; ++w) {
      put_double(out, params.beta(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(w)));
    }
  }
  for (const auto& token : vocab.tokens()) put_string(out, token);
  const bool has_langs = vocab.has_languages();
  out.put(has_langs ? 1 : 0);
  if (has_langs) {
    for (WordId w = 0; w < v; ++w) put_string(out, vocab.language(w));
  }
  if (!out) throw DataError("failed writing model");
}

void save_model(const std::filesystem::path& path, const ModelParams& params,
                const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_model(out, params, vocab);
}

StoredModel read_model(std::istream& in) {
  std::array<char, 8> magic{};
  read_exact(in, magic.data(), magic.size());
  if (magic != kMagic) throw DataError("not a model file (bad magic)");
  const auto version = get_uint<std::uint32_t>(in);
  if (version != kModelFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version));
  }
  const auto k = get_uint<std::uint64_t>(in);
  const auto v = get_uint<std::uint64_t>(in);
  if (k == 0 || v == 0 || k > kMaxEntries || v > kMaxEntries || k * v > kMaxEntries) {
    throw DataError("model file has implausible dimensions");
  }
  StoredModel model;
  model.params.alpha.resize(static_cast<Eigen::Index>(k));
  model.params.beta.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(v));
  for (std::uint64_t t = 0; t < k; ++t) {
    model.params.alpha[static_cast<Eigen::Index>(t)] = get_double(in);
  }
  for (std::uint64_t t = 0; t < k; ++t) {
    for (std::uint64_t w = 0; w < v; ++w) {
      model.params.beta(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(w)) =
          get_double(in);
    }
  }
  for (std::uint64_t w = 0; w < v; ++w) {
    auto token = get_string(in);
    if (model.vocab.find(token)) throw DataError("model vocabulary has duplicate tokens");
    model.vocab.add(token);
  }
  const int has_langs = in.get();
  if (has_langs == std::char_traits<char>::eof()) throw DataError("model file is truncated");
  if (has_langs == 1) {
    for (std::uint64_t w = 0; w < v; ++w) {
      model.vocab.set_language(static_cast<WordId>(w), get_string(in));
    }
  } else if (has_langs != 0) {
    throw DataError("model file has a corrupt language flag");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw DataError("trailing bytes in model file");
  try {
    model.params.validate();
  } catch (const ValidationError& e) {
    throw DataError(std::string("model file holds invalid parameters: ") + e.what());
  }
  return model;
}

StoredModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_model(in);
}

}  // namespace wrlda
